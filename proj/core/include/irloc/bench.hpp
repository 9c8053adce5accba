#pragma once

#include <cstdint>

#include "irloc/vocabulary.hpp"

namespace irloc {

struct DistanceBenchReport {
  double l2_ns_per_op = 0.0;
  double hamming_ns_per_op = 0.0;
  double ratio = 0.0;  // l2 / hamming
};

/// Times L2 (dim_float f32 elements) against Hamming (bits_binary bits) over
/// n_pairs random descriptor pairs.
DistanceBenchReport bench_distances(std::uint32_t dim_float, std::uint32_t bits_binary,
                                    std::uint32_t n_pairs, std::uint64_t seed = 1);

struct DatabaseBenchReport {
  std::uint32_t entries = 0;
  std::uint32_t features_per_image = 0;
  double images_per_s_with_di = 0.0;     // transform + query + add, direct index on
  double images_per_s_without_di = 0.0;  // BowVector-only transform + query + add
};

/// Single-threaded add+query throughput over synthetic images: per image the
/// BoW vector is computed, the database queried, then the image added.
DatabaseBenchReport bench_database(std::uint32_t n_entries, std::uint32_t features_per_image,
                                   const Vocabulary& vocab, std::uint64_t seed = 1);

}  // namespace irloc
