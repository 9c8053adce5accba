#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>

#include "irloc/bow.hpp"

namespace irloc {

struct QueryResult {
  std::uint32_t entry_id = 0;
  double score = 0.0;
};

/// Inclusive entry id range excluded from query results (e.g. the most
/// recent entries of a sequential stream).
struct EntryRange {
  std::uint32_t first = 0;
  std::uint32_t last = 0;
};

/// Inverted-file image database. Entries are dense ids from 0 in insertion
/// order; per-word posting lists are (entry_id, weight) pairs sorted by
/// entry id. Descriptor sets attached to entries are kept for geometric
/// verification and decoded lazily after loading from disk.
class ImageDatabase {
 public:
  ImageDatabase() = default;
  explicit ImageDatabase(VocabFingerprint fingerprint);

  const VocabFingerprint& fingerprint() const { return fingerprint_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Appends an entry; returns its id (== previous size()). The BowVector
  /// must be normalized (or empty).
  std::uint32_t add(BowVector bow, FeatureVector fv,
                    std::optional<DescriptorSet> descriptors = std::nullopt);

  /// Ranked candidates sharing at least one word with the query, scored with
  /// l1_score semantics through the inverted file, ties broken by ascending
  /// entry id, truncated to max_results, minus the excluded range.
  std::vector<QueryResult> query(const BowVector& bow, std::size_t max_results,
                                 std::optional<EntryRange> exclude = std::nullopt) const;

  const BowVector& bow(std::uint32_t entry_id) const { return entries_.at(entry_id).bow; }
  const FeatureVector& feature_vector(std::uint32_t entry_id) const {
    return entries_.at(entry_id).fv;
  }

  /// Descriptor set attached to an entry, or nullptr if none was stored.
  /// Thread-safe; decodes from the loaded blob region on first access.
  const DescriptorSet* descriptors(std::uint32_t entry_id) const;

  bool has_descriptors(std::uint32_t entry_id) const;

 private:
  friend std::vector<std::uint8_t> serialize_database(const ImageDatabase&);
  friend ImageDatabase parse_database(std::span<const std::uint8_t>, const std::string&);

  static constexpr std::uint64_t kNoBlob = 0xFFFFFFFFFFFFFFFFull;

  struct Entry {
    BowVector bow;
    FeatureVector fv;
    std::uint64_t blob_offset = kNoBlob;  // absolute offset into the serialized stream
  };

  void index_entry(std::uint32_t id, const BowVector& bow);

  VocabFingerprint fingerprint_{};
  std::vector<Entry> entries_;
  // word id -> postings
  std::vector<std::vector<std::pair<std::uint32_t, double>>> inverted_;
  // Raw blob region from a loaded file; decoded sets are cached per entry.
  std::vector<std::uint8_t> blob_;
  std::uint64_t blob_base_ = 0;
  mutable std::vector<std::unique_ptr<DescriptorSet>> cache_;
  mutable std::unique_ptr<std::mutex> cache_mutex_ = std::make_unique<std::mutex>();
};

// Database file ".idb" (magic IDB1):
//   "IDB1" | vocabulary fingerprint (32 bytes) | entry count u32
//   | per entry: bow count u32, count x (u32 word, f32 weight)
//     | fv count u32, per node: u32 node_id, u32 n, n x u32 indices
//     | descriptor blob offset u64 (0xFFFF.. = none; absolute stream offset)
//   | blob region: concatenated DSC1 records
std::vector<std::uint8_t> serialize_database(const ImageDatabase& db);
ImageDatabase parse_database(std::span<const std::uint8_t> data,
                             const std::string& context = "IDB1");
void save_database(const ImageDatabase& db, const std::filesystem::path& path);
ImageDatabase load_database(const std::filesystem::path& path);
/// Loads and rejects the file if it was built with a different vocabulary.
ImageDatabase load_database(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace irloc
