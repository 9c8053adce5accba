#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "irloc/descriptor.hpp"
#include "irloc/descriptor_io.hpp"

namespace irloc {

inline constexpr std::uint32_t kInvalidNode = 0xFFFFFFFFu;

struct VocabNode {
  std::uint32_t parent = kInvalidNode;  // kInvalidNode for the root
  std::vector<std::uint32_t> children;
  Descriptor center;
  float weight = 0.0f;        // IDF, meaningful at leaves
  std::int64_t word_id = -1;  // >= 0 iff leaf

  bool is_leaf() const { return word_id >= 0; }
};

struct QuantizeResult {
  std::uint32_t word_id = 0;
  float weight = 0.0f;
  std::vector<std::uint32_t> path;  // visited node ids, root first, leaf last
};

/// k-ary tree of cluster centers. Leaves are words; word ids follow leaf
/// order of appearance in the breadth-first node sequence.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Assembles a vocabulary from an explicit node list (loader / tests).
  /// Nodes must be in breadth-first order; children ids ascending.
  Vocabulary(DType dtype, std::uint16_t dim, std::uint32_t k, std::uint32_t levels,
             std::vector<VocabNode> nodes);

  DType dtype() const { return dtype_; }
  std::uint16_t dim() const { return dim_; }
  std::uint32_t branching() const { return k_; }
  std::uint32_t levels() const { return levels_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t word_count() const { return word_to_node_.size(); }
  bool empty() const { return nodes_.empty(); }

  const VocabNode& node(std::uint32_t id) const { return nodes_[id]; }
  const std::vector<VocabNode>& nodes() const { return nodes_; }
  std::uint32_t word_node(std::uint32_t word_id) const { return word_to_node_[word_id]; }
  float word_weight(std::uint32_t word_id) const { return nodes_[word_to_node_[word_id]].weight; }

  /// Greedy descent: at each node pick the child with the nearest center
  /// under the dtype metric, ties to the lowest child id. Returns the leaf
  /// word, its weight, and the visited node path (for the direct index).
  QuantizeResult quantize(const Descriptor& d) const;
  QuantizeResult quantize_binary(std::span<const std::uint8_t> row) const;
  QuantizeResult quantize_f32(std::span<const float> row) const;

  void set_word_weight(std::uint32_t word_id, float w) {
    nodes_[word_to_node_[word_id]].weight = w;
  }

  bool operator==(const Vocabulary&) const = default;

 private:
  void check_signature(DType dtype, std::uint32_t dim) const;

  DType dtype_ = DType::f32;
  std::uint16_t dim_ = 0;
  std::uint32_t k_ = 0;
  std::uint32_t levels_ = 0;
  std::vector<VocabNode> nodes_;
  std::vector<std::uint32_t> word_to_node_;
};

struct KmeansResult {
  DescriptorSet centers;
  std::vector<std::uint32_t> assignment;  // per input descriptor, index into centers
  /// Total within-cluster cost after each assignment pass (squared L2 for
  /// float, Hamming for binary). Non-increasing by construction.
  std::vector<double> iteration_cost;
};

/// Lloyd k-means (float/L2, mean centers) or k-medians (binary/Hamming,
/// majority-vote centers) with k-means++ seeding from `seed`.
/// max_iters counts the seeding pass plus Lloyd rounds (default 11 = seed + 10).
/// If descs.size() <= k each descriptor becomes its own center. Empty
/// clusters are reseeded with the point farthest from its current center.
KmeansResult kmeans(const DescriptorSet& descs, std::uint32_t k, std::uint64_t seed,
                    std::uint32_t max_iters = 11);

/// Training input: per-image descriptor sets that survived match filtering.
struct TrainingPool {
  std::vector<DescriptorSet> images;
  std::size_t pairs_consumed = 0;

  std::size_t total_descriptors() const;
};

/// The matched subset of frame_a (one row per match pair, match order).
/// Match indices are validated against both frames.
DescriptorSet filter_matched_features(const DescriptorSet& frame_a,
                                      const DescriptorSet& frame_b,
                                      std::span<const MatchPair> matches);

/// Recursive top-down clustering of all pooled descriptors: kmeans(k) at the
/// root, recursing into each cluster until depth L or cluster size <= 1.
/// Word ids are assigned to leaves in breadth-first order. (pool, k, L, seed)
/// fully determine the result, bit for bit.
Vocabulary build_vocabulary(const TrainingPool& pool, std::uint32_t k, std::uint32_t levels,
                            std::uint64_t seed);

/// IDF weights: for each word, weight = ln(N / n_i) with N the image count
/// and n_i the number of images containing the word; unseen words get 0.
Vocabulary assign_idf(Vocabulary vocab, std::span<const DescriptorSet> images);

// Vocabulary file ".voc" (magic VOC1):
//   "VOC1" | dtype u8 | dim u16 | k u32 | L u32 | node_count u32
//   | per node, breadth-first: parent u32 (root 0xFFFFFFFF) | is_leaf u8
//     | weight f32 | center payload (one DSC1 row)
std::vector<std::uint8_t> serialize_vocabulary(const Vocabulary& vocab);
Vocabulary parse_vocabulary(std::span<const std::uint8_t> data,
                            const std::string& context = "VOC1");
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

using VocabFingerprint = std::array<std::uint8_t, 32>;

/// SHA-256 of the serialized vocabulary; identifies which vocabulary a
/// database was built with.
VocabFingerprint vocabulary_fingerprint(const Vocabulary& vocab);
std::string fingerprint_hex(const VocabFingerprint& fp);

}  // namespace irloc
