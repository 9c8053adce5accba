#include "irloc/reloc.hpp"

namespace irloc {

const char* reloc_status_name(RelocStatus s) {
  switch (s) {
    case RelocStatus::accepted: return "accepted";
    case RelocStatus::no_candidates: return "no_candidates";
    case RelocStatus::low_normalized_score: return "low_normalized_score";
    case RelocStatus::too_few_matches: return "too_few_matches";
    case RelocStatus::verification_failed: return "verification_failed";
    case RelocStatus::gated: return "gated";
    case RelocStatus::alignment_failed: return "alignment_failed";
  }
  return "unknown";
}

std::vector<RelocRecord> relocalize_sequence(
    const MapFile& map, const Vocabulary& vocab, std::span<const DescriptorSet> queries,
    const RelocParams& params, const std::map<std::uint32_t, Eigen::Vector3d>& map_gt,
    const std::map<std::uint32_t, Eigen::Vector3d>& query_gt, const Intrinsics& K) {
  if (map.database.fingerprint() != vocabulary_fingerprint(vocab))
    throw InvalidArgument("relocalize_sequence: map database vocabulary fingerprint mismatch");

  const auto map_positions = map.keyframe_positions();

  std::vector<RelocRecord> records;
  records.reserve(queries.size());
  std::optional<BowVector> prev_bow;

  for (std::uint32_t q = 0; q < queries.size(); ++q) {
    const DescriptorSet& frame = queries[q];
    RelocRecord rec;
    rec.query_id = q;

    auto [bow, fv] = transform(vocab, frame, params.loop.di_levels);
    const double s_norm = prev_bow ? l1_score(bow, *prev_bow) : 1.0;
    prev_bow = bow;

    // Cross-session queries: no dislocal exclusion.
    const auto results = map.database.query(bow, params.loop.max_query_results, std::nullopt);
    if (results.empty()) {
      rec.status = RelocStatus::no_candidates;
      records.push_back(std::move(rec));
      continue;
    }
    if (s_norm < 0.01) {
      rec.status = RelocStatus::low_normalized_score;
      records.push_back(std::move(rec));
      continue;
    }
    std::vector<ScoredEntry> scored;
    scored.reserve(results.size());
    for (const auto& r : results) scored.push_back({r.entry_id, r.score});
    const auto surviving = normalize_scores(std::move(scored), s_norm, params.loop.alpha);
    if (surviving.empty()) {
      rec.status = RelocStatus::low_normalized_score;
      records.push_back(std::move(rec));
      continue;
    }
    const auto islands = build_islands(surviving, params.loop.max_island_gap);
    const std::uint32_t kf_id = islands.front().best_entry;
    rec.matched_keyframe = kf_id;
    const MapKeyframe& kf = map.keyframes[kf_id];

    const auto matches =
        match_descriptors(frame, kf.observations, fv, map.database.feature_vector(kf_id),
                          params.loop.match);

    if (!frame.has_keypoints())
      throw InvalidArgument("relocalize_sequence: query frames must carry keypoints");

    std::vector<Correspondence3D2D> corrs;
    corrs.reserve(matches.size());
    for (const auto& [qi, ki] : matches) {
      const std::uint32_t lm = kf.landmark_index[ki];
      if (lm == kNoLandmark) continue;
      const Keypoint& kp = frame.keypoints()[qi];
      corrs.push_back({map.landmarks[lm].cast<double>(), Eigen::Vector2d(kp.x, kp.y)});
    }
    if (corrs.size() < 6) {
      rec.status = RelocStatus::too_few_matches;
      records.push_back(std::move(rec));
      continue;
    }

    PnpRansacResult pnp;
    try {
      pnp = ransac_pnp(corrs, K, params.pnp_threshold_px, params.pnp_max_iters, params.pnp_seed);
    } catch (const Error&) {
      rec.status = RelocStatus::verification_failed;
      records.push_back(std::move(rec));
      continue;
    }
    rec.inliers = static_cast<std::uint32_t>(pnp.inlier_count);
    if (pnp.inlier_count < params.min_inliers) {
      rec.status = RelocStatus::verification_failed;
      records.push_back(std::move(rec));
      continue;
    }

    const Eigen::Vector3d center = pnp.pose.camera_center();
    rec.position = center;
    if ((center - kf.pose.camera_center()).norm() > params.gate_m) {
      rec.status = RelocStatus::gated;
      records.push_back(std::move(rec));
      continue;
    }

    const auto gt_it = query_gt.find(q);
    if (gt_it == query_gt.end()) {
      rec.status = RelocStatus::alignment_failed;
      records.push_back(std::move(rec));
      continue;
    }
    try {
      rec.error_m = local_alignment_error(map_positions, map_gt, kf_id, params.window, pnp.pose,
                                          gt_it->second);
    } catch (const Error&) {
      rec.status = RelocStatus::alignment_failed;
      records.push_back(std::move(rec));
      continue;
    }
    rec.status = RelocStatus::accepted;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace irloc
