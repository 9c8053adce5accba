#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "irloc/descriptor.hpp"

namespace irloc {

// Descriptor set file ".dsc" (magic DSC1), all integers little-endian:
//   "DSC1" | dtype u8 (0=binary, 1=float) | dim u16 | count u32
//   | payload, row-major (binary: dim bytes/row; float: dim x f32/row)
//   | flags u8 (bit0: keypoints follow, bit1: landmark ids follow)
//   | [count x (f32 x, f32 y)] | [count x u32 landmark id]

std::vector<std::uint8_t> serialize_descriptor_set(const DescriptorSet& set);

/// Parses one DSC1 record from the front of `data`. The format is
/// self-delimiting; `consumed`, when non-null, receives the record length.
DescriptorSet parse_descriptor_set(std::span<const std::uint8_t> data,
                                   std::size_t* consumed = nullptr,
                                   const std::string& context = "DSC1");

void write_descriptor_set(const DescriptorSet& set, const std::filesystem::path& path);
DescriptorSet read_descriptor_set(const std::filesystem::path& path);

// Matches file ".mch" (magic MCH1): count u32 | count x (u32 idx_a, u32 idx_b).

using MatchPair = std::pair<std::uint32_t, std::uint32_t>;

void write_matches(std::span<const MatchPair> matches, const std::filesystem::path& path);
std::vector<MatchPair> read_matches(const std::filesystem::path& path);

}  // namespace irloc
