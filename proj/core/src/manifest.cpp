#include "irloc/manifest.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

namespace irloc {

void Manifest::set_u64(const std::string& key, std::uint64_t value) {
  values_[key] = std::to_string(value);
}

void Manifest::set_double(const std::string& key, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  values_[key] = buf;
}

const std::string& Manifest::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw FormatError("manifest: missing key '" + key + "'");
  return it->second;
}

std::uint64_t Manifest::get_u64(const std::string& key) const {
  const std::string& s = get(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("manifest: key '" + key + "' is not an unsigned integer: '" + s + "'");
  return v;
}

double Manifest::get_double(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw FormatError("manifest: key '" + key + "' is not a number: '" + s + "'");
  }
}

std::string Manifest::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

void Manifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open file for writing");
  for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
  if (!out) throw FormatError(path.string() + ": write failed");
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    m.values_[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

}  // namespace irloc
