#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "irloc/error.hpp"

namespace irloc {

/// Plain-text scenario manifest: one `key=value` per line, '#' comments,
/// keys written in sorted order so identical manifests are byte-identical.
class Manifest {
 public:
  Manifest() = default;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set_u64(const std::string& key, std::uint64_t value);
  void set_double(const std::string& key, double value);

  const std::string& get(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;

  std::string get_or(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  void save(const std::filesystem::path& path) const;
  static Manifest load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace irloc
