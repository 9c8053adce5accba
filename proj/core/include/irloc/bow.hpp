#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "irloc/vocabulary.hpp"

namespace irloc {

/// Sparse word -> weight association, sorted by word id, L1-normalized
/// (unless empty), with no zero-weight entries.
struct BowVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
  double l1_norm() const;
  bool is_normalized(double eps = 1e-6) const;
  bool operator==(const BowVector&) const = default;
};

/// Direct index for one image: node id (at the chosen level above the
/// leaves) -> ascending feature indices. Every feature index appears under
/// exactly one node.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> nodes;

  bool empty() const { return nodes.empty(); }
  const std::vector<std::uint32_t>* bucket(std::uint32_t node_id) const;
  bool operator==(const FeatureVector&) const = default;
};

/// BoW transform: term frequency x IDF per word, L1-normalized; the feature
/// vector keys each descriptor under the quantization-path ancestor
/// `di_levels` above the leaf (clamped at the root). Words with zero IDF
/// weight are dropped from the BowVector but their features are still
/// indexed in the FeatureVector.
std::pair<BowVector, FeatureVector> transform(const Vocabulary& vocab,
                                              const DescriptorSet& set,
                                              std::uint32_t di_levels = 2);

/// BowVector-only transform (no direct index bookkeeping).
BowVector transform_bow(const Vocabulary& vocab, const DescriptorSet& set);

/// L1 similarity: 1 - 0.5 * sum_i |u_i - v_i| over the union of support,
/// in [0, 1] for normalized inputs. Empty vectors score 0 against anything.
double l1_score(const BowVector& u, const BowVector& v);

}  // namespace irloc
