#include "irloc/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace irloc {

namespace {

struct NearestTwo {
  std::uint32_t best_index = 0;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

double pair_distance(const DescriptorSet& a, std::uint32_t ia, const DescriptorSet& b,
                     std::uint32_t ib) {
  if (a.dtype() == DType::binary)
    return static_cast<double>(hamming_distance(a.binary_row(ia), b.binary_row(ib)));
  return l2_distance_sq(a.f32_row(ia), b.f32_row(ib));
}

NearestTwo nearest_two(const DescriptorSet& a, std::uint32_t ia, const DescriptorSet& b,
                       std::span<const std::uint32_t> candidates) {
  NearestTwo out;
  for (std::uint32_t ib : candidates) {
    const double d = pair_distance(a, ia, b, ib);
    if (d < out.best) {
      out.second = out.best;
      out.best = d;
      out.best_index = ib;
    } else if (d < out.second) {
      out.second = d;
    }
  }
  return out;
}

bool passes_test(const NearestTwo& fwd, DType dtype, const MatchParams& p) {
  if (dtype == DType::binary) return fwd.best <= static_cast<double>(p.binary_threshold);
  // distances are squared L2: compare against the squared ratio
  if (!std::isfinite(fwd.second)) return true;  // sole candidate
  return fwd.best < p.ratio * p.ratio * fwd.second;
}

void match_buckets(const DescriptorSet& a, const DescriptorSet& b,
                   std::span<const std::uint32_t> bucket_a,
                   std::span<const std::uint32_t> bucket_b, const MatchParams& params,
                   std::vector<MatchPair>& out) {
  for (std::uint32_t ia : bucket_a) {
    const NearestTwo fwd = nearest_two(a, ia, b, bucket_b);
    if (!std::isfinite(fwd.best)) continue;
    if (!passes_test(fwd, a.dtype(), params)) continue;
    const NearestTwo rev = nearest_two(b, fwd.best_index, a, bucket_a);
    if (rev.best_index != ia) continue;  // not mutual
    out.emplace_back(ia, fwd.best_index);
  }
}

void check_pair_signatures(const DescriptorSet& a, const DescriptorSet& b) {
  if (a.dtype() != b.dtype() || a.dim() != b.dim())
    throw InvalidArgument("match_descriptors: descriptor signature mismatch between frames");
}

}  // namespace

std::vector<MatchPair> match_descriptors(const DescriptorSet& a, const DescriptorSet& b,
                                         const FeatureVector& fv_a, const FeatureVector& fv_b,
                                         const MatchParams& params) {
  check_pair_signatures(a, b);
  std::vector<MatchPair> out;
  // Merge walk over the two sorted node lists; only shared nodes produce
  // candidate pairs.
  std::size_t i = 0, j = 0;
  while (i < fv_a.nodes.size() && j < fv_b.nodes.size()) {
    if (fv_a.nodes[i].first < fv_b.nodes[j].first) {
      ++i;
    } else if (fv_b.nodes[j].first < fv_a.nodes[i].first) {
      ++j;
    } else {
      match_buckets(a, b, fv_a.nodes[i].second, fv_b.nodes[j].second, params, out);
      ++i;
      ++j;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<MatchPair> match_descriptors(const DescriptorSet& a, const DescriptorSet& b,
                                         const MatchParams& params) {
  check_pair_signatures(a, b);
  std::vector<std::uint32_t> all_a(a.size()), all_b(b.size());
  for (std::size_t i = 0; i < all_a.size(); ++i) all_a[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < all_b.size(); ++i) all_b[i] = static_cast<std::uint32_t>(i);
  std::vector<MatchPair> out;
  match_buckets(a, b, all_a, all_b, params, out);
  return out;
}

TrainingPool build_training_pool(
    std::span<const DescriptorSet> frames, const MatchParams& params,
    const std::function<std::optional<std::vector<MatchPair>>(std::size_t)>& provided) {
  TrainingPool pool;
  if (frames.size() < 2) return pool;
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    std::vector<MatchPair> matches;
    std::optional<std::vector<MatchPair>> external;
    if (provided) external = provided(i);
    if (external)
      matches = std::move(*external);
    else
      matches = match_descriptors(frames[i], frames[i + 1], params);
    pool.images.push_back(filter_matched_features(frames[i], frames[i + 1], matches));
    ++pool.pairs_consumed;
  }
  return pool;
}

}  // namespace irloc
