#include "irloc/loop_detector.hpp"

#include <algorithm>

#include "irloc/geometry.hpp"

namespace irloc {

const char* loop_status_name(LoopStatus s) {
  switch (s) {
    case LoopStatus::accepted: return "accepted";
    case LoopStatus::no_candidates: return "no_candidates";
    case LoopStatus::low_normalized_score: return "low_normalized_score";
    case LoopStatus::temporally_inconsistent: return "temporally_inconsistent";
    case LoopStatus::verification_failed: return "verification_failed";
  }
  return "unknown";
}

std::vector<ScoredEntry> normalize_scores(std::vector<ScoredEntry> results, double s_norm,
                                          double alpha) {
  std::vector<ScoredEntry> out;
  out.reserve(results.size());
  for (auto& r : results) {
    const double eta = r.score / s_norm;
    if (eta >= alpha) out.push_back({r.entry_id, eta});
  }
  return out;
}

std::vector<Island> build_islands(std::span<const ScoredEntry> candidates,
                                  std::uint32_t max_gap) {
  std::vector<ScoredEntry> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredEntry& a, const ScoredEntry& b) { return a.entry_id < b.entry_id; });

  std::vector<Island> islands;
  for (const auto& c : sorted) {
    if (islands.empty() || c.entry_id - islands.back().last_id > max_gap) {
      islands.push_back({c.entry_id, c.entry_id, c.score, c.entry_id, c.score});
    } else {
      Island& isl = islands.back();
      isl.last_id = c.entry_id;
      isl.score += c.score;
      if (c.score > isl.best_score) {  // strict: ties keep the lower entry id
        isl.best_score = c.score;
        isl.best_entry = c.entry_id;
      }
    }
  }
  std::sort(islands.begin(), islands.end(), [](const Island& a, const Island& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.first_id < b.first_id;
  });
  return islands;
}

bool temporal_check(const std::deque<std::optional<Island>>& history, const Island& current,
                    std::uint32_t k, std::uint32_t gap) {
  if (k == 0) return true;
  if (history.size() < k) return false;
  const std::uint32_t lo = current.first_id >= gap ? current.first_id - gap : 0;
  const std::uint32_t hi = current.last_id + gap;
  // the k most recent past queries
  for (std::size_t i = history.size() - k; i < history.size(); ++i) {
    const auto& past = history[i];
    if (!past) return false;
    if (past->last_id < lo || past->first_id > hi) return false;
  }
  return true;
}

LoopDetector::LoopDetector(const Vocabulary& vocab, const ImageDatabase& db, LoopParams params)
    : vocab_(vocab), db_(db), params_(std::move(params)) {
  if (db.fingerprint() != vocabulary_fingerprint(vocab))
    throw InvalidArgument("loop detector: database was built with a different vocabulary");
}

LoopResult LoopDetector::verify(const DescriptorSet& frame, const FeatureVector& fv,
                                std::uint32_t entry_id, double score) {
  LoopCandidate cand;
  cand.entry_id = entry_id;
  cand.score = score;

  if (params_.min_inliers == 0) {
    // pure BoW ranking: accept without geometric verification
    return {LoopStatus::accepted, std::move(cand)};
  }

  std::optional<std::vector<MatchPair>> provided;
  if (match_provider_) provided = match_provider_(entry_id);
  if (provided) {
    cand.matches = std::move(*provided);
  } else {
    const DescriptorSet* entry_set = db_.descriptors(entry_id);
    if (!entry_set)
      throw InvalidArgument("loop detector: database entry " + std::to_string(entry_id) +
                            " has no stored descriptors for verification");
    cand.matches = match_descriptors(frame, *entry_set, fv, db_.feature_vector(entry_id),
                                     params_.match);
  }

  const DescriptorSet* entry_set = db_.descriptors(entry_id);
  if (!frame.has_keypoints() || !entry_set || !entry_set->has_keypoints())
    throw InvalidArgument("loop detector: geometric verification requires keypoints");

  if (cand.matches.size() >= 8) {
    std::vector<PixelPair> pairs;
    pairs.reserve(cand.matches.size());
    for (const auto& [qi, ei] : cand.matches) {
      const Keypoint& kq = frame.keypoints()[qi];
      const Keypoint& ke = entry_set->keypoints()[ei];
      pairs.emplace_back(Eigen::Vector2d(kq.x, kq.y), Eigen::Vector2d(ke.x, ke.y));
    }
    try {
      const FundamentalRansacResult r = ransac_fundamental(
          pairs, params_.ransac_threshold_px, params_.ransac_max_iters, params_.ransac_seed);
      cand.inlier_count = static_cast<std::uint32_t>(r.inlier_count);
    } catch (const DegenerateInput&) {
      cand.inlier_count = 0;
    }
  }

  const LoopStatus status = cand.inlier_count >= params_.min_inliers
                                ? LoopStatus::accepted
                                : LoopStatus::verification_failed;
  return {status, std::move(cand)};
}

LoopResult LoopDetector::detect(const DescriptorSet& frame, LoopMode mode) {
  const std::uint32_t n = static_cast<std::uint32_t>(db_.size());
  std::optional<EntryRange> exclude;
  if (params_.dislocal > 0 && n > 0) {
    const std::uint32_t first = n > params_.dislocal ? n - params_.dislocal : 0;
    exclude = EntryRange{first, n - 1};
  }
  return detect_excluding(frame, mode, exclude);
}

LoopResult LoopDetector::detect(const DescriptorSet& frame, LoopMode mode,
                                std::uint32_t sequential_index) {
  const std::uint32_t n = static_cast<std::uint32_t>(db_.size());
  std::optional<EntryRange> exclude;
  if (n > 0) {
    const std::uint32_t first =
        sequential_index > params_.dislocal ? sequential_index - params_.dislocal : 0;
    exclude = EntryRange{first, n - 1};
  }
  return detect_excluding(frame, mode, exclude);
}

LoopResult LoopDetector::detect_excluding(const DescriptorSet& frame, LoopMode mode,
                                          std::optional<EntryRange> exclude) {
  auto [bow, fv] = transform(vocab_, frame, params_.di_levels);

  // s_norm is the similarity to the previous query frame; 1.0 for the first.
  const double s_norm = prev_bow_ ? l1_score(bow, *prev_bow_) : 1.0;
  prev_bow_ = bow;

  const auto finish = [&](LoopResult result, std::optional<Island> best) {
    if (mode == LoopMode::islands) {
      history_.push_back(std::move(best));
      while (history_.size() > params_.temporal_k) history_.pop_front();
    }
    return result;
  };

  if (mode == LoopMode::best_candidate) {
    const auto results = db_.query(bow, params_.max_query_results, exclude);
    if (results.empty()) return finish({LoopStatus::no_candidates, std::nullopt}, std::nullopt);
    return finish(verify(frame, fv, results[0].entry_id, results[0].score), std::nullopt);
  }

  // islands mode
  if (s_norm < 0.01)
    return finish({LoopStatus::low_normalized_score, std::nullopt}, std::nullopt);
  const auto results = db_.query(bow, params_.max_query_results, exclude);
  if (results.empty()) return finish({LoopStatus::no_candidates, std::nullopt}, std::nullopt);

  std::vector<ScoredEntry> scored;
  scored.reserve(results.size());
  for (const auto& r : results) scored.push_back({r.entry_id, r.score});
  const auto surviving = normalize_scores(std::move(scored), s_norm, params_.alpha);
  if (surviving.empty())
    return finish({LoopStatus::low_normalized_score, std::nullopt}, std::nullopt);

  const auto islands = build_islands(surviving, params_.max_island_gap);
  const Island best = islands.front();
  if (!temporal_check(history_, best, params_.temporal_k, params_.max_island_gap))
    return finish({LoopStatus::temporally_inconsistent, std::nullopt}, best);
  return finish(verify(frame, fv, best.best_entry, best.best_score), best);
}

}  // namespace irloc
