// Internal little-endian byte stream helpers shared by the file formats.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "irloc/error.hpp"

namespace irloc::detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    u32(bits);
  }
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void magic(const char m[4]) {
    buf_.insert(buf_.end(), reinterpret_cast<const std::uint8_t*>(m),
                reinterpret_cast<const std::uint8_t*>(m) + 4);
  }

  std::size_t size() const { return buf_.size(); }
  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

  /// Overwrite a previously written u64 at `pos` (for offset back-patching).
  void patch_u64(std::size_t pos, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_[pos + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string context)
      : data_(data), context_(std::move(context)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  std::uint8_t u8() {
    need(1, "u8");
    return data_[pos_++];
  }
  std::uint16_t u16() {
    need(2, "u16");
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8, "u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n, "byte block");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  /// Consumes 4 bytes and checks them against the expected magic.
  void expect_magic(const char m[4]) {
    const std::size_t at = pos_;
    need(4, "magic");
    if (std::memcmp(data_.data() + pos_, m, 4) != 0) {
      std::ostringstream os;
      os << context_ << ": bad magic at offset " << at << " (expected " << std::string(m, 4)
         << ")";
      throw FormatError(os.str());
    }
    pos_ += 4;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << context_ << ": " << msg << " at offset " << pos_;
    throw FormatError(os.str());
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (pos_ + n > data_.size()) {
      std::ostringstream os;
      os << context_ << ": truncated payload, needed " << n << "-byte " << what
         << " at offset " << pos_ << " but only " << (data_.size() - pos_)
         << " bytes remain";
      throw FormatError(os.str());
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace irloc::detail
