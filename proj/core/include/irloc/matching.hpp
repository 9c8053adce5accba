#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "irloc/bow.hpp"
#include "irloc/descriptor_io.hpp"

namespace irloc {

struct MatchParams {
  /// Lowe ratio test threshold for float descriptors: accept iff
  /// best < ratio * second_best.
  double ratio = 0.8;
  /// Absolute Hamming acceptance threshold for binary descriptors.
  std::uint32_t binary_threshold = 64;
};

/// Mutual-nearest-neighbor matching restricted to feature-vector buckets
/// under shared direct-index nodes. Float descriptors additionally pass the
/// Lowe ratio test, binary descriptors an absolute distance threshold. Each
/// feature index appears in at most one returned pair; pairs are ordered by
/// ascending index into `a`.
std::vector<MatchPair> match_descriptors(const DescriptorSet& a, const DescriptorSet& b,
                                         const FeatureVector& fv_a, const FeatureVector& fv_b,
                                         const MatchParams& params = {});

/// Brute-force variant considering every pair (single bucket); used for
/// training-pair matching and timelapse evaluation where no vocabulary is
/// involved.
std::vector<MatchPair> match_descriptors(const DescriptorSet& a, const DescriptorSet& b,
                                         const MatchParams& params = {});

/// Matched-feature training pool from a frame sequence: consecutive frames
/// (i, i+1) are matched (brute force, or by `provided` returning
/// externally computed matches for pair index i) and the matched subset of
/// frame i joins the pool.
TrainingPool build_training_pool(
    std::span<const DescriptorSet> frames, const MatchParams& params,
    const std::function<std::optional<std::vector<MatchPair>>(std::size_t)>& provided = nullptr);

}  // namespace irloc
