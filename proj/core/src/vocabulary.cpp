#include "irloc/vocabulary.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "binio.hpp"
#include "irloc/rng.hpp"

namespace irloc {

namespace {

void check_set_signature(const DescriptorSet& set, DType dtype, std::uint32_t dim,
                         const char* what) {
  if (set.dtype() != dtype || set.dim() != dim) {
    std::ostringstream os;
    os << what << ": descriptor signature mismatch (expected " << dtype_name(dtype) << "/"
       << dim << ", got " << dtype_name(set.dtype()) << "/" << set.dim() << ")";
    throw InvalidArgument(os.str());
  }
}

// Distance used for cluster assignment and k-means++ weights: squared L2 for
// float descriptors, Hamming count for binary ones.
double assign_distance(const DescriptorSet& set, std::size_t row, const DescriptorSet& centers,
                       std::size_t center) {
  if (set.dtype() == DType::binary)
    return static_cast<double>(hamming_distance(set.binary_row(row), centers.binary_row(center)));
  return l2_distance_sq(set.f32_row(row), centers.f32_row(center));
}

double seed_weight(double assign_dist, DType dtype) {
  // k-means++ samples proportionally to the squared metric.
  return dtype == DType::binary ? assign_dist * assign_dist : assign_dist;
}

// Cluster cost the Lloyd iterations are guaranteed not to increase: total
// squared L2 (mean centers minimize it) or total Hamming (majority-vote
// centers minimize it).
double cluster_cost(const DescriptorSet& set, std::uint32_t row, const DescriptorSet& centers,
                    std::uint32_t center) {
  return assign_distance(set, row, centers, center);
}

void push_row(DescriptorSet& dst, const DescriptorSet& src, std::uint32_t row) {
  if (src.dtype() == DType::binary)
    dst.push_back_binary(src.binary_row(row));
  else
    dst.push_back_f32(src.f32_row(row));
}

KmeansResult kmeans_impl(const DescriptorSet& set, std::span<const std::uint32_t> idx,
                         std::uint32_t k, Rng& rng, std::uint32_t max_iters) {
  if (k == 0) throw InvalidArgument("kmeans: k must be >= 1");
  if (max_iters == 0) throw InvalidArgument("kmeans: max_iters must be >= 1");
  const std::size_t n = idx.size();
  if (n == 0) throw InvalidArgument("kmeans on empty descriptor set");

  KmeansResult res;
  res.centers = DescriptorSet(set.dtype(), set.dim());

  if (n <= k) {
    res.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      push_row(res.centers, set, idx[i]);
      res.assignment[i] = static_cast<std::uint32_t>(i);
    }
    res.iteration_cost.push_back(0.0);
    return res;
  }

  // k-means++ seeding. Stops early if every remaining point coincides with a
  // chosen center, in which case fewer than k clusters are produced.
  std::vector<double> d2(n);
  {
    const std::uint32_t first = static_cast<std::uint32_t>(rng.next_below(n));
    push_row(res.centers, set, idx[first]);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = seed_weight(assign_distance(set, idx[i], res.centers, 0), set.dtype());
    while (res.centers.size() < k) {
      double total = 0.0;
      for (double v : d2) total += v;
      if (total <= 0.0) break;
      const double r = rng.next_double() * total;
      double cum = 0.0;
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // numeric edge: fall back to the last positive-weight point
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
      }
      const std::size_t c = res.centers.size();
      push_row(res.centers, set, idx[pick]);
      for (std::size_t i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], seed_weight(assign_distance(set, idx[i], res.centers, c),
                                            set.dtype()));
    }
  }
  const std::size_t n_clusters = res.centers.size();

  res.assignment.assign(n, 0);
  std::vector<std::uint32_t> counts(n_clusters, 0);
  const std::uint32_t lloyd_rounds = std::max<std::uint32_t>(1, max_iters - 1);

  for (std::uint32_t round = 0; round < lloyd_rounds; ++round) {
    bool changed = (round == 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t best = 0;
      double best_d = assign_distance(set, idx[i], res.centers, 0);
      for (std::size_t c = 1; c < n_clusters; ++c) {
        const double d = assign_distance(set, idx[i], res.centers, c);
        if (d < best_d) {  // strict: ties keep the lowest center index
          best_d = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
      if (best != res.assignment[i]) {
        res.assignment[i] = best;
        changed = true;
      }
    }

    counts.assign(n_clusters, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[res.assignment[i]];

    // Empty clusters steal the point currently farthest from its own center.
    bool reseeded = false;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (counts[c] != 0) continue;
      double far_d = -1.0;
      std::size_t far_i = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[res.assignment[i]] < 2) continue;
        const double d = assign_distance(set, idx[i], res.centers, res.assignment[i]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_i == n) break;  // nothing left to steal
      --counts[res.assignment[far_i]];
      res.assignment[far_i] = static_cast<std::uint32_t>(c);
      ++counts[c];
      reseeded = true;
    }

    // Center update: mean for float, bitwise strict majority for binary.
    DescriptorSet new_centers(set.dtype(), set.dim());
    std::vector<std::uint32_t> members;
    for (std::size_t c = 0; c < n_clusters; ++c) {
      members.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (res.assignment[i] == c) members.push_back(idx[i]);
      const Descriptor center = centroid(set, members);
      if (set.dtype() == DType::binary)
        new_centers.push_back_binary(center.bytes());
      else
        new_centers.push_back_f32(center.values());
    }
    res.centers = std::move(new_centers);

    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      cost += cluster_cost(set, idx[i], res.centers, res.assignment[i]);
    if (!res.iteration_cost.empty()) {
      const double prev = res.iteration_cost.back();
      if (cost > prev + 1e-9 * std::max(1.0, prev))
        throw Error("kmeans: within-cluster cost increased between Lloyd iterations");
    }
    res.iteration_cost.push_back(cost);

    if (!changed && !reseeded) break;
  }
  return res;
}

}  // namespace

KmeansResult kmeans(const DescriptorSet& descs, std::uint32_t k, std::uint64_t seed,
                    std::uint32_t max_iters) {
  std::vector<std::uint32_t> idx(descs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
  Rng rng(seed);
  return kmeans_impl(descs, idx, k, rng, max_iters);
}

std::size_t TrainingPool::total_descriptors() const {
  std::size_t n = 0;
  for (const auto& img : images) n += img.size();
  return n;
}

DescriptorSet filter_matched_features(const DescriptorSet& frame_a, const DescriptorSet& frame_b,
                                      std::span<const MatchPair> matches) {
  std::vector<std::uint32_t> indices;
  indices.reserve(matches.size());
  for (const auto& [ia, ib] : matches) {
    if (ia >= frame_a.size())
      throw InvalidArgument("filter_matched_features: match index " + std::to_string(ia) +
                            " out of range for frame_a of size " + std::to_string(frame_a.size()));
    if (ib >= frame_b.size())
      throw InvalidArgument("filter_matched_features: match index " + std::to_string(ib) +
                            " out of range for frame_b of size " + std::to_string(frame_b.size()));
    indices.push_back(ia);
  }
  return frame_a.subset(indices);
}

Vocabulary::Vocabulary(DType dtype, std::uint16_t dim, std::uint32_t k, std::uint32_t levels,
                       std::vector<VocabNode> nodes)
    : dtype_(dtype), dim_(dim), k_(k), levels_(levels), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvalidArgument("vocabulary must have at least one node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    VocabNode& nd = nodes_[i];
    if (i == 0) {
      if (nd.parent != kInvalidNode) throw InvalidArgument("vocabulary root must have no parent");
    } else if (nd.parent >= i) {
      throw InvalidArgument("vocabulary nodes must be in breadth-first order");
    }
    if (nd.center.dtype() != dtype_ || nd.center.dim() != dim_)
      throw InvalidArgument("vocabulary node center signature mismatch");
    if (nd.children.size() > k_)
      throw InvalidArgument("vocabulary node exceeds branching factor");
    if (!(nd.weight >= 0.0f) || !std::isfinite(nd.weight))
      throw InvalidArgument("vocabulary leaf weight must be finite and >= 0");
    nd.word_id = -1;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].children.empty()) continue;
    nodes_[i].word_id = static_cast<std::int64_t>(word_to_node_.size());
    word_to_node_.push_back(static_cast<std::uint32_t>(i));
  }
}

void Vocabulary::check_signature(DType dtype, std::uint32_t dim) const {
  if (dtype != dtype_ || dim != dim_) {
    std::ostringstream os;
    os << "vocabulary signature mismatch: vocabulary is " << dtype_name(dtype_) << "/" << dim_
       << ", descriptor is " << dtype_name(dtype) << "/" << dim;
    throw InvalidArgument(os.str());
  }
}

template <typename DistFn>
static QuantizeResult descend(const std::vector<VocabNode>& nodes, DistFn&& dist) {
  QuantizeResult out;
  std::uint32_t node = 0;
  out.path.push_back(0);
  while (!nodes[node].children.empty()) {
    const auto& children = nodes[node].children;
    std::uint32_t best = children[0];
    double best_d = dist(nodes[best]);
    for (std::size_t c = 1; c < children.size(); ++c) {
      const double d = dist(nodes[children[c]]);
      if (d < best_d) {  // ties keep the lowest child id (children are ascending)
        best_d = d;
        best = children[c];
      }
    }
    node = best;
    out.path.push_back(node);
  }
  out.word_id = static_cast<std::uint32_t>(nodes[node].word_id);
  out.weight = nodes[node].weight;
  return out;
}

QuantizeResult Vocabulary::quantize_binary(std::span<const std::uint8_t> row) const {
  if (empty()) throw InvalidArgument("quantize on empty vocabulary");
  if (row.size() != dim_) check_signature(DType::binary, static_cast<std::uint32_t>(row.size()));
  if (dtype_ != DType::binary) check_signature(DType::binary, dim_);
  return descend(nodes_, [&](const VocabNode& nd) {
    return static_cast<double>(hamming_distance(row, nd.center.bytes()));
  });
}

QuantizeResult Vocabulary::quantize_f32(std::span<const float> row) const {
  if (empty()) throw InvalidArgument("quantize on empty vocabulary");
  if (row.size() != dim_) check_signature(DType::f32, static_cast<std::uint32_t>(row.size()));
  if (dtype_ != DType::f32) check_signature(DType::f32, dim_);
  return descend(nodes_,
                 [&](const VocabNode& nd) { return l2_distance_sq(row, nd.center.values()); });
}

QuantizeResult Vocabulary::quantize(const Descriptor& d) const {
  check_signature(d.dtype(), d.dim());
  return d.dtype() == DType::binary ? quantize_binary(d.bytes()) : quantize_f32(d.values());
}

Vocabulary build_vocabulary(const TrainingPool& pool, std::uint32_t k, std::uint32_t levels,
                            std::uint64_t seed) {
  if (pool.images.empty() || pool.total_descriptors() == 0)
    throw InvalidArgument("build_vocabulary: empty training pool");
  if (k < 2) throw InvalidArgument("build_vocabulary: branching factor must be >= 2");
  if (levels < 1) throw InvalidArgument("build_vocabulary: levels must be >= 1");

  const DType dtype = pool.images.front().dtype();
  const std::uint32_t dim = pool.images.front().dim();
  DescriptorSet all(dtype, dim);
  all.reserve(pool.total_descriptors());
  for (const auto& img : pool.images) {
    check_set_signature(img, dtype, dim, "build_vocabulary");
    for (std::size_t i = 0; i < img.size(); ++i) push_row(all, img, i);
  }

  std::vector<std::uint32_t> all_idx(all.size());
  for (std::size_t i = 0; i < all_idx.size(); ++i) all_idx[i] = static_cast<std::uint32_t>(i);

  std::vector<VocabNode> nodes;
  nodes.emplace_back();
  nodes[0].parent = kInvalidNode;
  nodes[0].center = centroid(all, all_idx);

  // Breadth-first construction; the single rng stream is consumed in node
  // order, so (pool, k, levels, seed) pin the tree exactly.
  Rng rng(seed);
  struct Pending {
    std::uint32_t node;
    std::vector<std::uint32_t> members;
    std::uint32_t depth;
  };
  std::deque<Pending> queue;
  if (all.size() > 1) queue.push_back({0, std::move(all_idx), 0});

  while (!queue.empty()) {
    Pending item = std::move(queue.front());
    queue.pop_front();
    KmeansResult res = kmeans_impl(all, item.members, k, rng, 11);
    const std::size_t n_clusters = res.centers.size();
    if (n_clusters <= 1) continue;  // indivisible cluster (identical points): stays a leaf
    for (std::size_t c = 0; c < n_clusters; ++c) {
      std::vector<std::uint32_t> members;
      for (std::size_t i = 0; i < item.members.size(); ++i)
        if (res.assignment[i] == c) members.push_back(item.members[i]);
      const std::uint32_t child = static_cast<std::uint32_t>(nodes.size());
      VocabNode nd;
      nd.parent = item.node;
      nd.center = res.centers.descriptor(c);
      nodes.push_back(std::move(nd));
      nodes[item.node].children.push_back(child);
      if (item.depth + 1 < levels && members.size() > 1)
        queue.push_back({child, std::move(members), item.depth + 1});
    }
  }

  return Vocabulary(dtype, static_cast<std::uint16_t>(dim), k, levels, std::move(nodes));
}

Vocabulary assign_idf(Vocabulary vocab, std::span<const DescriptorSet> images) {
  if (images.empty()) throw InvalidArgument("assign_idf: need at least one image");
  std::vector<std::uint32_t> docs_with_word(vocab.word_count(), 0);
  std::unordered_set<std::uint32_t> seen;
  for (const auto& img : images) {
    seen.clear();
    for (std::size_t i = 0; i < img.size(); ++i) {
      const QuantizeResult q = img.dtype() == DType::binary
                                   ? vocab.quantize_binary(img.binary_row(i))
                                   : vocab.quantize_f32(img.f32_row(i));
      seen.insert(q.word_id);
    }
    for (std::uint32_t w : seen) ++docs_with_word[w];
  }
  const double n_images = static_cast<double>(images.size());
  for (std::uint32_t w = 0; w < vocab.word_count(); ++w) {
    const float weight =
        docs_with_word[w] == 0
            ? 0.0f
            : static_cast<float>(std::log(n_images / static_cast<double>(docs_with_word[w])));
    vocab.set_word_weight(w, weight);
  }
  return vocab;
}

std::vector<std::uint8_t> serialize_vocabulary(const Vocabulary& vocab) {
  detail::ByteWriter w;
  w.magic("VOC1");
  w.u8(static_cast<std::uint8_t>(vocab.dtype()));
  w.u16(vocab.dim());
  w.u32(vocab.branching());
  w.u32(vocab.levels());
  w.u32(static_cast<std::uint32_t>(vocab.node_count()));
  for (const VocabNode& nd : vocab.nodes()) {
    w.u32(nd.parent);
    w.u8(nd.is_leaf() ? 1 : 0);
    w.f32(nd.weight);
    if (vocab.dtype() == DType::binary) {
      w.bytes(nd.center.bytes());
    } else {
      for (float v : nd.center.values()) w.f32(v);
    }
  }
  return w.take();
}

Vocabulary parse_vocabulary(std::span<const std::uint8_t> data, const std::string& context) {
  detail::ByteReader r(data, context);
  r.expect_magic("VOC1");
  const std::uint8_t dtype_raw = r.u8();
  if (dtype_raw > 1) r.fail("unknown dtype " + std::to_string(dtype_raw));
  const DType dtype = static_cast<DType>(dtype_raw);
  const std::uint16_t dim = r.u16();
  if (dim == 0) r.fail("descriptor dim 0");
  const std::uint32_t k = r.u32();
  const std::uint32_t levels = r.u32();
  const std::uint32_t node_count = r.u32();
  if (node_count == 0) r.fail("vocabulary with zero nodes");

  const std::size_t center_bytes = dtype == DType::binary ? dim : 4u * dim;
  const std::size_t node_record = 4 + 1 + 4 + center_bytes;
  if (node_count > r.remaining() / node_record) {
    std::ostringstream os;
    os << context << ": truncated node table, expected " << node_count << " nodes ("
       << node_count * node_record << " bytes) but only " << r.remaining() << " bytes remain";
    throw FormatError(os.str());
  }

  std::vector<VocabNode> nodes(node_count);
  std::vector<std::uint8_t> leaf_flags(node_count);
  for (std::uint32_t i = 0; i < node_count; ++i) {
    nodes[i].parent = r.u32();
    leaf_flags[i] = r.u8();
    nodes[i].weight = r.f32();
    if (dtype == DType::binary) {
      auto b = r.bytes(dim);
      nodes[i].center = Descriptor::binary({b.begin(), b.end()});
    } else {
      std::vector<float> vals(dim);
      for (std::uint16_t j = 0; j < dim; ++j) vals[j] = r.f32();
      nodes[i].center = Descriptor::f32(std::move(vals));
    }
  }
  if (r.remaining() != 0) r.fail("trailing bytes after node table");

  for (std::uint32_t i = 1; i < node_count; ++i) {
    if (nodes[i].parent >= i)
      throw FormatError(context + ": node " + std::to_string(i) +
                        " has parent >= its own id (not breadth-first)");
    nodes[nodes[i].parent].children.push_back(i);
  }
  Vocabulary vocab(dtype, dim, k, levels, std::move(nodes));
  for (std::uint32_t i = 0; i < node_count; ++i) {
    const bool is_leaf = vocab.node(i).is_leaf();
    if (is_leaf != (leaf_flags[i] != 0))
      throw FormatError(context + ": node " + std::to_string(i) +
                        " leaf flag inconsistent with child list");
  }
  return vocab;
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  detail::write_file(path.string(), serialize_vocabulary(vocab));
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  const auto buf = detail::read_file(path.string());
  return parse_vocabulary(buf, path.string());
}

VocabFingerprint vocabulary_fingerprint(const Vocabulary& vocab) {
  const auto bytes = serialize_vocabulary(vocab);
  VocabFingerprint fp{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), fp.data(), &len, EVP_sha256(), nullptr);
  return fp;
}

std::string fingerprint_hex(const VocabFingerprint& fp) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : fp) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xF]);
  }
  return out;
}

}  // namespace irloc
