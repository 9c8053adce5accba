#include "irloc/bow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace irloc {

double BowVector::l1_norm() const {
  double s = 0.0;
  for (const auto& [w, v] : entries) s += std::abs(v);
  return s;
}

bool BowVector::is_normalized(double eps) const {
  return std::abs(l1_norm() - 1.0) <= eps;
}

const std::vector<std::uint32_t>* FeatureVector::bucket(std::uint32_t node_id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), node_id,
                             [](const auto& a, std::uint32_t id) { return a.first < id; });
  if (it == nodes.end() || it->first != node_id) return nullptr;
  return &it->second;
}

namespace {

QuantizeResult quantize_row(const Vocabulary& vocab, const DescriptorSet& set, std::size_t i) {
  return set.dtype() == DType::binary ? vocab.quantize_binary(set.binary_row(i))
                                      : vocab.quantize_f32(set.f32_row(i));
}

BowVector normalize_counts(std::map<std::uint32_t, double>&& weighted_counts) {
  BowVector bow;
  double norm = 0.0;
  for (const auto& [w, v] : weighted_counts) norm += v;
  if (norm <= 0.0) return bow;
  bow.entries.reserve(weighted_counts.size());
  for (const auto& [w, v] : weighted_counts) {
    if (v > 0.0) bow.entries.emplace_back(w, v / norm);
  }
  return bow;
}

}  // namespace

std::pair<BowVector, FeatureVector> transform(const Vocabulary& vocab, const DescriptorSet& set,
                                              std::uint32_t di_levels) {
  if (di_levels > vocab.levels())
    throw InvalidArgument("transform: di_levels must be in [0, L]");
  std::map<std::uint32_t, double> weighted_counts;
  std::map<std::uint32_t, std::vector<std::uint32_t>> buckets;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const QuantizeResult q = quantize_row(vocab, set, i);
    weighted_counts[q.word_id] += static_cast<double>(q.weight);
    const std::size_t depth = q.path.size() - 1;
    const std::size_t up = std::min<std::size_t>(di_levels, depth);
    buckets[q.path[depth - up]].push_back(static_cast<std::uint32_t>(i));
  }
  FeatureVector fv;
  fv.nodes.reserve(buckets.size());
  for (auto& [node, indices] : buckets) fv.nodes.emplace_back(node, std::move(indices));
  return {normalize_counts(std::move(weighted_counts)), std::move(fv)};
}

BowVector transform_bow(const Vocabulary& vocab, const DescriptorSet& set) {
  std::map<std::uint32_t, double> weighted_counts;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const QuantizeResult q = quantize_row(vocab, set, i);
    weighted_counts[q.word_id] += static_cast<double>(q.weight);
  }
  return normalize_counts(std::move(weighted_counts));
}

double l1_score(const BowVector& u, const BowVector& v) {
  if (u.empty() || v.empty()) return 0.0;
  if (!u.is_normalized() || !v.is_normalized())
    throw InvalidArgument("l1_score requires L1-normalized inputs");
  double abs_diff = 0.0;
  std::size_t i = 0, j = 0;
  while (i < u.entries.size() || j < v.entries.size()) {
    if (j >= v.entries.size() ||
        (i < u.entries.size() && u.entries[i].first < v.entries[j].first)) {
      abs_diff += std::abs(u.entries[i].second);
      ++i;
    } else if (i >= u.entries.size() || v.entries[j].first < u.entries[i].first) {
      abs_diff += std::abs(v.entries[j].second);
      ++j;
    } else {
      abs_diff += std::abs(u.entries[i].second - v.entries[j].second);
      ++i;
      ++j;
    }
  }
  return 1.0 - 0.5 * abs_diff;
}

}  // namespace irloc
