#include "irloc/database.hpp"

#include <algorithm>
#include <cstring>

#include "binio.hpp"

namespace irloc {

ImageDatabase::ImageDatabase(VocabFingerprint fingerprint) : fingerprint_(fingerprint) {}

void ImageDatabase::index_entry(std::uint32_t id, const BowVector& bow) {
  for (const auto& [word, weight] : bow.entries) {
    if (word >= inverted_.size()) inverted_.resize(word + 1);
    inverted_[word].emplace_back(id, weight);  // ids are appended in order: postings stay sorted
  }
}

std::uint32_t ImageDatabase::add(BowVector bow, FeatureVector fv,
                                 std::optional<DescriptorSet> descriptors) {
  if (!bow.empty() && !bow.is_normalized())
    throw InvalidArgument("db add: BowVector must be L1-normalized");
  const std::uint32_t id = static_cast<std::uint32_t>(entries_.size());
  index_entry(id, bow);
  entries_.push_back(Entry{std::move(bow), std::move(fv), kNoBlob});
  cache_.push_back(descriptors ? std::make_unique<DescriptorSet>(std::move(*descriptors))
                               : nullptr);
  return id;
}

std::vector<QueryResult> ImageDatabase::query(const BowVector& bow, std::size_t max_results,
                                              std::optional<EntryRange> exclude) const {
  if (!bow.empty() && !bow.is_normalized())
    throw InvalidArgument("db query: BowVector must be L1-normalized");
  // Only entries sharing at least one word are candidates; for normalized
  // vectors the L1 score reduces to sum_shared min(u, v).
  std::vector<double> acc(entries_.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& [word, wq] : bow.entries) {
    if (word >= inverted_.size()) continue;
    for (const auto& [entry, we] : inverted_[word]) {
      if (acc[entry] == 0.0) touched.push_back(entry);
      acc[entry] += std::min(wq, we);
    }
  }
  std::vector<QueryResult> results;
  results.reserve(touched.size());
  for (std::uint32_t e : touched) {
    if (exclude && e >= exclude->first && e <= exclude->last) continue;
    results.push_back({e, acc[e]});
  }
  std::sort(results.begin(), results.end(), [](const QueryResult& a, const QueryResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entry_id < b.entry_id;
  });
  if (results.size() > max_results) results.resize(max_results);
  return results;
}

bool ImageDatabase::has_descriptors(std::uint32_t entry_id) const {
  std::lock_guard lock(*cache_mutex_);
  return cache_.at(entry_id) != nullptr || entries_.at(entry_id).blob_offset != kNoBlob;
}

const DescriptorSet* ImageDatabase::descriptors(std::uint32_t entry_id) const {
  std::lock_guard lock(*cache_mutex_);
  if (cache_.at(entry_id)) return cache_[entry_id].get();
  const std::uint64_t offset = entries_.at(entry_id).blob_offset;
  if (offset == kNoBlob) return nullptr;
  const std::size_t rel = static_cast<std::size_t>(offset - blob_base_);
  cache_[entry_id] = std::make_unique<DescriptorSet>(
      parse_descriptor_set(std::span(blob_).subspan(rel), nullptr, "IDB1 descriptor blob"));
  return cache_[entry_id].get();
}

std::vector<std::uint8_t> serialize_database(const ImageDatabase& db) {
  // Entry section size is computed up front so blob offsets can be emitted
  // in one pass.
  std::size_t entry_section = 0;
  for (const auto& e : db.entries_) {
    entry_section += 4 + 8 * e.bow.entries.size();
    entry_section += 4;
    for (const auto& [node, indices] : e.fv.nodes) entry_section += 8 + 4 * indices.size();
    entry_section += 8;
  }
  const std::size_t header = 4 + 32 + 4;
  std::uint64_t blob_cursor = header + entry_section;

  std::vector<std::vector<std::uint8_t>> blobs(db.entries_.size());
  std::vector<std::uint64_t> offsets(db.entries_.size(), ImageDatabase::kNoBlob);
  for (std::size_t i = 0; i < db.entries_.size(); ++i) {
    const DescriptorSet* set = db.descriptors(static_cast<std::uint32_t>(i));
    if (!set) continue;
    blobs[i] = serialize_descriptor_set(*set);
    offsets[i] = blob_cursor;
    blob_cursor += blobs[i].size();
  }

  detail::ByteWriter w;
  w.magic("IDB1");
  w.bytes(db.fingerprint_);
  w.u32(static_cast<std::uint32_t>(db.entries_.size()));
  for (std::size_t i = 0; i < db.entries_.size(); ++i) {
    const auto& e = db.entries_[i];
    w.u32(static_cast<std::uint32_t>(e.bow.entries.size()));
    for (const auto& [word, weight] : e.bow.entries) {
      w.u32(word);
      w.f32(static_cast<float>(weight));
    }
    w.u32(static_cast<std::uint32_t>(e.fv.nodes.size()));
    for (const auto& [node, indices] : e.fv.nodes) {
      w.u32(node);
      w.u32(static_cast<std::uint32_t>(indices.size()));
      for (std::uint32_t idx : indices) w.u32(idx);
    }
    w.u64(offsets[i]);
  }
  for (const auto& blob : blobs) w.bytes(blob);
  return w.take();
}

ImageDatabase parse_database(std::span<const std::uint8_t> data, const std::string& context) {
  detail::ByteReader r(data, context);
  r.expect_magic("IDB1");
  ImageDatabase db;
  {
    auto fp = r.bytes(32);
    std::memcpy(db.fingerprint_.data(), fp.data(), 32);
  }
  const std::uint32_t count = r.u32();
  if (count > r.remaining() / 16)  // 16 bytes = minimum possible entry record
    r.fail("entry count " + std::to_string(count) + " larger than remaining data allows");
  db.entries_.reserve(count);
  db.cache_.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ImageDatabase::Entry e;
    const std::uint32_t bow_count = r.u32();
    e.bow.entries.reserve(bow_count);
    std::int64_t prev_word = -1;
    for (std::uint32_t j = 0; j < bow_count; ++j) {
      const std::uint32_t word = r.u32();
      const float weight = r.f32();
      if (static_cast<std::int64_t>(word) <= prev_word)
        r.fail("BowVector words not strictly ascending in entry " + std::to_string(i));
      prev_word = word;
      e.bow.entries.emplace_back(word, static_cast<double>(weight));
    }
    const std::uint32_t fv_count = r.u32();
    e.fv.nodes.reserve(fv_count);
    for (std::uint32_t j = 0; j < fv_count; ++j) {
      const std::uint32_t node = r.u32();
      const std::uint32_t n = r.u32();
      std::vector<std::uint32_t> indices(n);
      for (std::uint32_t m = 0; m < n; ++m) indices[m] = r.u32();
      e.fv.nodes.emplace_back(node, std::move(indices));
    }
    e.blob_offset = r.u64();
    db.index_entry(i, e.bow);
    db.entries_.push_back(std::move(e));
  }
  db.blob_base_ = r.offset();
  {
    auto rest = r.bytes(r.remaining());
    db.blob_.assign(rest.begin(), rest.end());
  }
  for (const auto& e : db.entries_) {
    if (e.blob_offset == ImageDatabase::kNoBlob) continue;
    if (e.blob_offset < db.blob_base_ || e.blob_offset >= db.blob_base_ + db.blob_.size())
      throw FormatError(context + ": descriptor blob offset " + std::to_string(e.blob_offset) +
                        " outside blob region");
  }
  return db;
}

void save_database(const ImageDatabase& db, const std::filesystem::path& path) {
  detail::write_file(path.string(), serialize_database(db));
}

ImageDatabase load_database(const std::filesystem::path& path) {
  const auto buf = detail::read_file(path.string());
  return parse_database(buf, path.string());
}

ImageDatabase load_database(const std::filesystem::path& path, const Vocabulary& vocab) {
  ImageDatabase db = load_database(path);
  if (db.fingerprint() != vocabulary_fingerprint(vocab))
    throw InvalidArgument(path.string() +
                          ": database was built with a different vocabulary (fingerprint " +
                          fingerprint_hex(db.fingerprint()) + ")");
  return db;
}

}  // namespace irloc
