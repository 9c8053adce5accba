#pragma once

#include <optional>

#include "irloc/loop_detector.hpp"
#include "irloc/map_file.hpp"

namespace irloc {

struct RelocParams {
  LoopParams loop;                 // alpha / islands / matching; dislocal is forced to 0
  std::uint32_t min_inliers = 12;  // PnP RANSAC inlier floor
  double gate_m = 10.0;            // max distance to the matched keyframe's center
  std::uint32_t window = 10;       // +- keyframes for local alignment
  double pnp_threshold_px = 2.0;
  std::uint32_t pnp_max_iters = 500;
  std::uint64_t pnp_seed = 7;
};

enum class RelocStatus {
  accepted,
  no_candidates,
  low_normalized_score,
  too_few_matches,
  verification_failed,
  gated,
  alignment_failed,
};

const char* reloc_status_name(RelocStatus s);

struct RelocRecord {
  std::uint32_t query_id = 0;
  RelocStatus status = RelocStatus::no_candidates;
  std::optional<std::uint32_t> matched_keyframe;
  std::uint32_t inliers = 0;
  std::optional<Eigen::Vector3d> position;  // estimated camera center, map frame
  std::optional<double> error_m;            // present iff accepted
};

/// Single-shot relocalization of each query frame against a map: BoW island
/// search over the embedded database, mutual-NN matching to the best
/// island's keyframe, lifting matched features to the 3D landmark table,
/// RANSAC PnP, the 10 m keyframe-distance gate, then the locally-aligned
/// error against ground truth. map_gt maps keyframe ids to ground-truth
/// positions; query_gt maps query ids to theirs (used only for the error).
std::vector<RelocRecord> relocalize_sequence(
    const MapFile& map, const Vocabulary& vocab, std::span<const DescriptorSet> queries,
    const RelocParams& params, const std::map<std::uint32_t, Eigen::Vector3d>& map_gt,
    const std::map<std::uint32_t, Eigen::Vector3d>& query_gt, const Intrinsics& K);

}  // namespace irloc
