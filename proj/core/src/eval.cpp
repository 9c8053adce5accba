#include "irloc/eval.hpp"

#include <algorithm>
#include <limits>

namespace irloc {

RecallResult recall_at_full_precision(std::span<const EvalRecord> records) {
  if (records.empty())
    throw InvalidArgument("recall_at_full_precision: records must be non-empty");

  bool any_fp = false;
  std::uint32_t max_fp_inliers = 0;
  std::uint32_t min_inliers = std::numeric_limits<std::uint32_t>::max();
  for (const auto& r : records) {
    min_inliers = std::min(min_inliers, r.inlier_count);
    if (!r.is_true_positive) {
      any_fp = true;
      max_fp_inliers = std::max(max_fp_inliers, r.inlier_count);
    }
  }

  RecallResult out;
  out.threshold = any_fp ? max_fp_inliers + 1 : min_inliers;
  std::size_t surviving_tp = 0;
  for (const auto& r : records)
    if (r.is_true_positive && r.inlier_count >= out.threshold) ++surviving_tp;
  out.recall = static_cast<double>(surviving_tp) / static_cast<double>(records.size());
  return out;
}

std::vector<std::uint32_t> uniform_indices(std::size_t total, std::size_t count) {
  std::vector<std::uint32_t> out;
  if (total == 0) return out;
  count = std::min(count, total);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(static_cast<std::uint32_t>(i * total / count));
  return out;
}

std::vector<EvalRecord> run_recall_protocol(const Vocabulary& vocab, const ImageDatabase& db,
                                            std::span<const Eigen::Vector3d> db_positions,
                                            std::span<const DescriptorSet> query_frames,
                                            std::span<const Eigen::Vector3d> query_positions,
                                            std::span<const std::uint32_t> query_indices,
                                            const LoopParams& params, double tp_radius_m) {
  if (db_positions.size() != db.size())
    throw InvalidArgument("run_recall_protocol: db position count mismatch");
  if (query_positions.size() != query_frames.size())
    throw InvalidArgument("run_recall_protocol: query position count mismatch");

  // Cross-session searches: no recent-entry exclusion, and a floor of one
  // inlier so that verification always runs and counts are recorded.
  LoopParams p = params;
  p.dislocal = 0;
  p.min_inliers = std::max<std::uint32_t>(1, p.min_inliers);
  LoopDetector detector(vocab, db, p);

  std::vector<EvalRecord> records;
  records.reserve(query_indices.size());
  for (std::uint32_t qi : query_indices) {
    const LoopResult res = detector.detect(query_frames[qi], LoopMode::best_candidate);
    EvalRecord rec;
    rec.query_id = qi;
    if (res.candidate) {
      rec.candidate_id = res.candidate->entry_id;
      rec.bow_score = res.candidate->score;
      rec.inlier_count = res.candidate->inlier_count;
      rec.is_true_positive =
          (db_positions[rec.candidate_id] - query_positions[qi]).norm() <= tp_radius_m;
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<TimelapseCount> timelapse_eval(const World& world,
                                           std::span<const Observation> frames,
                                           std::size_t ref_index, const Intrinsics& K,
                                           double px_tol, const MatchParams& match) {
  if (frames.empty()) throw InvalidArgument("timelapse_eval: no frames");
  if (ref_index >= frames.size())
    throw InvalidArgument("timelapse_eval: ref_index out of range");
  const Observation& ref = frames[ref_index];

  const auto projection_of = [&](const Observation& obs, std::uint32_t feature) {
    const std::uint32_t lm = obs.truth.landmark_ids[feature];
    return K.project(obs.truth.pose.to_camera(world.landmark(lm).position));
  };

  std::vector<TimelapseCount> out;
  out.reserve(frames.size());
  for (const Observation& frame : frames) {
    TimelapseCount count;
    count.tau = frame.truth.tau;
    count.visible = static_cast<std::uint32_t>(frame.set.size());
    const auto matches = match_descriptors(frame.set, ref.set, match);
    count.total_matches = static_cast<std::uint32_t>(matches.size());
    for (const auto& [fi, ri] : matches) {
      if (frame.truth.landmark_ids[fi] != ref.truth.landmark_ids[ri]) continue;
      const Keypoint& kf = frame.set.keypoints()[fi];
      const Keypoint& kr = ref.set.keypoints()[ri];
      const Eigen::Vector2d pf = projection_of(frame, fi);
      const Eigen::Vector2d pr = projection_of(ref, ri);
      if ((Eigen::Vector2d(kf.x, kf.y) - pf).norm() <= px_tol &&
          (Eigen::Vector2d(kr.x, kr.y) - pr).norm() <= px_tol)
        ++count.correct_matches;
    }
    out.push_back(count);
  }
  return out;
}

}  // namespace irloc
