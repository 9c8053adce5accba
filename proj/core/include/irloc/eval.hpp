#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irloc/loop_detector.hpp"
#include "irloc/simgen.hpp"

namespace irloc {

inline constexpr std::uint32_t kNoCandidate = 0xFFFFFFFFu;

struct EvalRecord {
  std::uint32_t query_id = 0;
  std::uint32_t candidate_id = kNoCandidate;
  double bow_score = 0.0;
  std::uint32_t inlier_count = 0;
  bool is_true_positive = false;
};

struct RecallResult {
  std::uint32_t threshold = 0;  // minimum inlier count eliminating every false positive
  double recall = 0.0;          // fraction of queries surviving the threshold
};

/// Recall at 100% precision: the threshold is the smallest inlier count T
/// such that every record with inlier_count >= T is a true positive (min
/// inlier count when there are no false positives); recall is the fraction
/// of queries whose true-positive record survives T. When no T eliminates
/// all false positives the threshold is max inlier count + 1 and recall 0.
RecallResult recall_at_full_precision(std::span<const EvalRecord> records);

/// `count` indices evenly spread over [0, total).
std::vector<std::uint32_t> uniform_indices(std::size_t total, std::size_t count);

/// The place-recognition protocol: each selected query frame is searched
/// against the database in best-candidate mode, the top result is
/// geometrically verified, and the record's truth label compares the
/// candidate's ground-truth position against the query's within
/// tp_radius_m. Positions are indexed by entry id / query frame index.
std::vector<EvalRecord> run_recall_protocol(const Vocabulary& vocab, const ImageDatabase& db,
                                            std::span<const Eigen::Vector3d> db_positions,
                                            std::span<const DescriptorSet> query_frames,
                                            std::span<const Eigen::Vector3d> query_positions,
                                            std::span<const std::uint32_t> query_indices,
                                            const LoopParams& params, double tp_radius_m);

struct TimelapseCount {
  double tau = 0.0;
  std::uint32_t correct_matches = 0;
  std::uint32_t total_matches = 0;
  std::uint32_t visible = 0;
};

/// Timelapse protocol: every frame of a static-camera series is matched
/// (brute force) against the frame at ref_index; a match counts as correct
/// iff both features observe the same landmark and both keypoints lie
/// within px_tol of that landmark's true projection.
std::vector<TimelapseCount> timelapse_eval(const World& world,
                                           std::span<const Observation> frames,
                                           std::size_t ref_index, const Intrinsics& K,
                                           double px_tol = 3.0, const MatchParams& match = {});

}  // namespace irloc
