#include "irloc/descriptor_io.hpp"

#include <cmath>
#include <fstream>

#include "binio.hpp"

namespace irloc {

namespace detail {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> buf(size);
  if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (!in) throw FormatError(path + ": read failed");
  return buf;
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path + ": cannot open file for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError(path + ": write failed");
}

}  // namespace detail

std::vector<std::uint8_t> serialize_descriptor_set(const DescriptorSet& set) {
  detail::ByteWriter w;
  w.magic("DSC1");
  w.u8(static_cast<std::uint8_t>(set.dtype()));
  w.u16(static_cast<std::uint16_t>(set.dim()));
  w.u32(static_cast<std::uint32_t>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.dtype() == DType::binary) {
      w.bytes(set.binary_row(i));
    } else {
      for (float v : set.f32_row(i)) w.f32(v);
    }
  }
  std::uint8_t flags = 0;
  if (set.has_keypoints()) flags |= 1u;
  if (set.has_landmark_ids()) flags |= 2u;
  w.u8(flags);
  if (set.has_keypoints()) {
    for (const Keypoint& kp : set.keypoints()) {
      w.f32(kp.x);
      w.f32(kp.y);
    }
  }
  if (set.has_landmark_ids()) {
    for (std::uint32_t id : set.landmark_ids()) w.u32(id);
  }
  return w.take();
}

DescriptorSet parse_descriptor_set(std::span<const std::uint8_t> data, std::size_t* consumed,
                                   const std::string& context) {
  detail::ByteReader r(data, context);
  r.expect_magic("DSC1");
  const std::uint8_t dtype_raw = r.u8();
  if (dtype_raw > 1) r.fail("unknown dtype " + std::to_string(dtype_raw));
  const DType dtype = static_cast<DType>(dtype_raw);
  const std::uint16_t dim = r.u16();
  if (dim == 0) r.fail("descriptor dim 0");
  const std::uint32_t count = r.u32();

  DescriptorSet set(dtype, dim);
  set.reserve(count);
  if (dtype == DType::binary) {
    for (std::uint32_t i = 0; i < count; ++i) set.push_back_binary(r.bytes(dim));
  } else {
    std::vector<float> row(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
      for (std::uint16_t j = 0; j < dim; ++j) {
        row[j] = r.f32();
        if (!std::isfinite(row[j])) r.fail("non-finite float descriptor element");
      }
      set.push_back_f32(row);
    }
  }

  const std::uint8_t flags = r.u8();
  if (flags & ~3u) r.fail("unknown flag bits " + std::to_string(flags));
  if (flags & 1u) {
    std::vector<Keypoint> kps(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      kps[i].x = r.f32();
      kps[i].y = r.f32();
      if (!std::isfinite(kps[i].x) || !std::isfinite(kps[i].y)) r.fail("non-finite keypoint");
    }
    set.set_keypoints(std::move(kps));
  }
  if (flags & 2u) {
    std::vector<std::uint32_t> ids(count);
    for (std::uint32_t i = 0; i < count; ++i) ids[i] = r.u32();
    set.set_landmark_ids(std::move(ids));
  }
  if (consumed) *consumed = r.offset();
  return set;
}

void write_descriptor_set(const DescriptorSet& set, const std::filesystem::path& path) {
  detail::write_file(path.string(), serialize_descriptor_set(set));
}

DescriptorSet read_descriptor_set(const std::filesystem::path& path) {
  const auto buf = detail::read_file(path.string());
  std::size_t consumed = 0;
  DescriptorSet set = parse_descriptor_set(buf, &consumed, path.string());
  if (consumed != buf.size())
    throw FormatError(path.string() + ": " + std::to_string(buf.size() - consumed) +
                      " trailing bytes after descriptor set");
  return set;
}

void write_matches(std::span<const MatchPair> matches, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic("MCH1");
  w.u32(static_cast<std::uint32_t>(matches.size()));
  for (const auto& [a, b] : matches) {
    w.u32(a);
    w.u32(b);
  }
  detail::write_file(path.string(), w.data());
}

std::vector<MatchPair> read_matches(const std::filesystem::path& path) {
  const auto buf = detail::read_file(path.string());
  detail::ByteReader r(buf, path.string());
  r.expect_magic("MCH1");
  const std::uint32_t count = r.u32();
  std::vector<MatchPair> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t a = r.u32();
    const std::uint32_t b = r.u32();
    out.emplace_back(a, b);
  }
  if (r.remaining() != 0)
    throw FormatError(path.string() + ": trailing bytes after matches");
  return out;
}

}  // namespace irloc
