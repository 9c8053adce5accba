#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "irloc/descriptor_io.hpp"
#include "irloc/rng.hpp"

using namespace irloc;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

DescriptorSet sample_set(DType dtype, std::uint32_t dim, std::size_t count, bool kps, bool lms,
                         std::uint64_t seed) {
  DescriptorSet set(dtype, dim);
  Rng rng(seed);
  std::vector<Keypoint> keypoints;
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < count; ++i) {
    if (dtype == DType::binary) {
      std::vector<std::uint8_t> row(dim);
      for (auto& b : row) b = static_cast<std::uint8_t>(rng.next_below(256));
      set.push_back_binary(row);
    } else {
      std::vector<float> row(dim);
      for (auto& v : row) v = static_cast<float>(rng.normal());
      set.push_back_f32(row);
    }
    keypoints.push_back({static_cast<float>(rng.next_double() * 640),
                         static_cast<float>(rng.next_double() * 512)});
    ids.push_back(static_cast<std::uint32_t>(rng.next_below(1000)));
  }
  if (kps) set.set_keypoints(std::move(keypoints));
  if (lms) set.set_landmark_ids(std::move(ids));
  return set;
}

std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("descriptor_io") {

TEST_CASE("round-trip is bit-exact for all field combinations") {
  int variant = 0;
  for (DType dtype : {DType::binary, DType::f32}) {
    for (bool kps : {false, true}) {
      for (bool lms : {false, true}) {
        const auto path = temp_file("irloc_dsc_roundtrip.dsc");
        const DescriptorSet set = sample_set(dtype, dtype == DType::binary ? 32 : 64, 17, kps,
                                             lms, 100 + variant++);
        write_descriptor_set(set, path);
        const DescriptorSet loaded = read_descriptor_set(path);
        CHECK(loaded == set);
        // write(read(f)) must reproduce f byte for byte
        const auto path2 = temp_file("irloc_dsc_roundtrip2.dsc");
        write_descriptor_set(loaded, path2);
        CHECK(file_bytes(path) == file_bytes(path2));
      }
    }
  }
}

TEST_CASE("empty set round-trips") {
  const auto path = temp_file("irloc_dsc_empty.dsc");
  const DescriptorSet set(DType::f32, 8);
  write_descriptor_set(set, path);
  CHECK(read_descriptor_set(path) == set);
}

TEST_CASE("corrupted magic names offset 0") {
  const auto path = temp_file("irloc_dsc_badmagic.dsc");
  const DescriptorSet set = sample_set(DType::binary, 4, 2, false, false, 1);
  write_descriptor_set(set, path);
  auto bytes = file_bytes(path);
  bytes[0] = 'X';  // "XSC1"
  std::ofstream(path, std::ios::binary | std::ios::trunc)
      .write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  try {
    read_descriptor_set(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("bad magic at offset 0") != std::string::npos);
  }
}

TEST_CASE("truncated payload is a typed error naming the offset") {
  const auto path = temp_file("irloc_dsc_trunc.dsc");
  const DescriptorSet set = sample_set(DType::binary, 16, 4, true, false, 2);
  write_descriptor_set(set, path);
  auto bytes = file_bytes(path);
  bytes.resize(bytes.size() / 2);
  std::ofstream(path, std::ios::binary | std::ios::trunc)
      .write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  try {
    read_descriptor_set(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("at offset") != std::string::npos);
  }
}

TEST_CASE("trailing bytes are rejected") {
  const auto path = temp_file("irloc_dsc_trailing.dsc");
  const DescriptorSet set = sample_set(DType::f32, 4, 2, false, false, 3);
  auto bytes = serialize_descriptor_set(set);
  bytes.push_back(0xAB);
  std::ofstream(path, std::ios::binary | std::ios::trunc)
      .write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  CHECK_THROWS_AS(read_descriptor_set(path), FormatError);
}

TEST_CASE("matches file round-trips") {
  const auto path = temp_file("irloc_matches.mch");
  const std::vector<MatchPair> matches = {{0, 3}, {4, 1}, {7, 7}};
  write_matches(matches, path);
  CHECK(read_matches(path) == matches);
  write_matches({}, path);
  CHECK(read_matches(path).empty());
}

}  // TEST_SUITE
