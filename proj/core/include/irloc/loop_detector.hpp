#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "irloc/database.hpp"
#include "irloc/matching.hpp"

namespace irloc {

struct LoopParams {
  double alpha = 0.3;               // normalized-score floor
  std::uint32_t max_island_gap = 3; // max entry-id gap within an island
  std::uint32_t temporal_k = 3;     // consecutive consistent queries required
  std::uint32_t dislocal = 20;      // most recent entries excluded from queries
  std::uint32_t min_inliers = 12;   // RANSAC inlier floor; 0 = pure BoW ranking
  MatchParams match;                // ratio test / binary threshold
  double ransac_threshold_px = 2.0;
  std::uint32_t ransac_max_iters = 500;
  std::uint64_t ransac_seed = 7;
  std::uint32_t di_levels = 2;
  std::size_t max_query_results = 50;
};

struct ScoredEntry {
  std::uint32_t entry_id = 0;
  double score = 0.0;
};

struct Island {
  std::uint32_t first_id = 0;
  std::uint32_t last_id = 0;
  double score = 0.0;       // sum of member normalized scores
  std::uint32_t best_entry = 0;
  double best_score = 0.0;
};

enum class LoopStatus {
  accepted,
  no_candidates,
  low_normalized_score,
  temporally_inconsistent,
  verification_failed,
};

const char* loop_status_name(LoopStatus s);

struct LoopCandidate {
  std::uint32_t entry_id = 0;
  double score = 0.0;  // raw BoW score in best-candidate mode, eta in islands mode
  std::uint32_t inlier_count = 0;
  std::vector<MatchPair> matches;
};

struct LoopResult {
  LoopStatus status = LoopStatus::no_candidates;
  std::optional<LoopCandidate> candidate;
};

enum class LoopMode { best_candidate, islands };

/// Divides scores by s_norm (the similarity of the current frame to its
/// predecessor) and drops entries below alpha. Callers reject the frame
/// outright when s_norm < 0.01.
std::vector<ScoredEntry> normalize_scores(std::vector<ScoredEntry> results, double s_norm,
                                          double alpha);

/// Groups candidates into islands of entry-id-adjacent hypotheses: sorted by
/// id, split where the gap exceeds max_gap; island score is the sum of member
/// scores, best_entry the max-scoring member (ties to the lower id). Islands
/// are returned by descending score (ties by ascending first_id).
std::vector<Island> build_islands(std::span<const ScoredEntry> candidates,
                                  std::uint32_t max_gap);

/// True iff each of the previous k queries produced a best island overlapping
/// current's [first - gap, last + gap] id range. k = 0 always passes.
bool temporal_check(const std::deque<std::optional<Island>>& history, const Island& current,
                    std::uint32_t k, std::uint32_t gap);

/// Loop-closure front end over an image database. In best-candidate mode the
/// top raw-score result is geometrically verified; in islands mode scores are
/// normalized against the previous frame, grouped into islands, checked for
/// temporal consistency, and the best island's best entry is verified.
/// Verification estimates a fundamental matrix over mutual-NN matches and
/// accepts iff the RANSAC inlier count reaches min_inliers.
class LoopDetector {
 public:
  /// Returns externally supplied matches for (query frame, entry), or
  /// nullopt to fall back to internal matching.
  using MatchProvider =
      std::function<std::optional<std::vector<MatchPair>>(std::uint32_t entry_id)>;

  LoopDetector(const Vocabulary& vocab, const ImageDatabase& db, LoopParams params);

  /// Cross-session detection: only the database's most recent `dislocal`
  /// entries are excluded.
  LoopResult detect(const DescriptorSet& frame, LoopMode mode);
  /// Same-sequence detection for a query that is frame `sequential_index` of
  /// the indexed sequence itself: everything from sequential_index - dislocal
  /// onward is excluded, emulating an incrementally built database.
  LoopResult detect(const DescriptorSet& frame, LoopMode mode, std::uint32_t sequential_index);

  void set_match_provider(MatchProvider provider) { match_provider_ = std::move(provider); }
  const LoopParams& params() const { return params_; }

 private:
  LoopResult detect_excluding(const DescriptorSet& frame, LoopMode mode,
                              std::optional<EntryRange> exclude);
  LoopResult verify(const DescriptorSet& frame, const FeatureVector& fv, std::uint32_t entry_id,
                    double score);

  const Vocabulary& vocab_;
  const ImageDatabase& db_;
  LoopParams params_;
  std::deque<std::optional<Island>> history_;
  std::optional<BowVector> prev_bow_;
  MatchProvider match_provider_;
};

}  // namespace irloc
