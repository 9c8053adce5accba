#include "irloc/image.hpp"

#include <fstream>
#include <sstream>

namespace irloc {

GrayImage make_image(std::uint32_t width, std::uint32_t height, std::uint8_t fill) {
  if (width == 0 || height == 0) throw InvalidArgument("image dimensions must be positive");
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * height, fill);
  return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw InvalidArgument("image pixel buffer does not match dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open file for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw FormatError(path.string() + ": write failed");
}

namespace {

// PGM headers allow '#' comments between tokens.
int next_header_int(std::istream& in, const std::string& path, const char* what) {
  int c;
  while ((c = in.peek()) != EOF) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value;
  if (!(in >> value))
    throw FormatError(path + ": malformed PGM header (" + std::string(what) + ")");
  return value;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P')
    throw FormatError(path.string() + ": not a PGM file (bad magic at offset 0)");
  if (m1 != '5')
    throw FormatError(path.string() + ": unsupported PGM variant P" + std::string(1, m1) +
                      " (only binary P5 is supported)");
  const int width = next_header_int(in, path.string(), "width");
  const int height = next_header_int(in, path.string(), "height");
  const int maxval = next_header_int(in, path.string(), "maxval");
  if (width <= 0 || height <= 0)
    throw FormatError(path.string() + ": non-positive PGM dimensions");
  if (maxval != 255)
    throw FormatError(path.string() + ": unsupported PGM maxval " + std::to_string(maxval) +
                      " (must be 255)");
  in.get();  // single whitespace byte after maxval
  GrayImage img = make_image(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height));
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw FormatError(path.string() + ": truncated PGM payload, expected " +
                      std::to_string(img.pixels.size()) + " bytes, got " +
                      std::to_string(in.gcount()));
  return img;
}

}  // namespace irloc
