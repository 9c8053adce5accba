#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irloc/error.hpp"

namespace irloc {

/// Element type of a descriptor. Binary descriptors are bit strings whose
/// dim counts bytes; float descriptors are f32 vectors whose dim counts
/// elements.
enum class DType : std::uint8_t { binary = 0, f32 = 1 };

const char* dtype_name(DType t);

struct Keypoint {
  float x = 0.0f;
  float y = 0.0f;
  bool operator==(const Keypoint&) const = default;
};

/// A single owning descriptor. Exactly one of the two payloads is populated,
/// selected by dtype().
class Descriptor {
 public:
  Descriptor() = default;

  static Descriptor binary(std::vector<std::uint8_t> bytes);
  static Descriptor f32(std::vector<float> values);

  DType dtype() const { return dtype_; }
  /// Bytes for binary descriptors, element count for float descriptors.
  std::uint32_t dim() const {
    return dtype_ == DType::binary ? static_cast<std::uint32_t>(bytes_.size())
                                   : static_cast<std::uint32_t>(values_.size());
  }

  std::span<const std::uint8_t> bytes() const { return bytes_; }
  std::span<const float> values() const { return values_; }

  bool operator==(const Descriptor&) const = default;

 private:
  DType dtype_ = DType::binary;
  std::vector<std::uint8_t> bytes_;
  std::vector<float> values_;
};

/// Struct-of-arrays container for the descriptors of one image, with
/// optional keypoints and (for synthetic data) ground-truth landmark ids.
/// dtype and dim are uniform across rows; the optional side arrays always
/// have exactly size() entries when present.
class DescriptorSet {
 public:
  DescriptorSet() = default;
  DescriptorSet(DType dtype, std::uint32_t dim);

  DType dtype() const { return dtype_; }
  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  void reserve(std::size_t n);
  void push_back(const Descriptor& d);
  void push_back_binary(std::span<const std::uint8_t> row);
  void push_back_f32(std::span<const float> row);

  std::span<const std::uint8_t> binary_row(std::size_t i) const {
    return {bin_.data() + i * dim_, dim_};
  }
  std::span<const float> f32_row(std::size_t i) const {
    return {flt_.data() + i * dim_, dim_};
  }
  Descriptor descriptor(std::size_t i) const;

  bool has_keypoints() const { return has_keypoints_; }
  std::span<const Keypoint> keypoints() const { return keypoints_; }
  void set_keypoints(std::vector<Keypoint> kps);

  bool has_landmark_ids() const { return has_landmark_ids_; }
  std::span<const std::uint32_t> landmark_ids() const { return landmark_ids_; }
  void set_landmark_ids(std::vector<std::uint32_t> ids);

  /// New set holding rows `indices` in the given order, carrying along
  /// keypoints / landmark ids when present.
  DescriptorSet subset(std::span<const std::uint32_t> indices) const;

  bool operator==(const DescriptorSet&) const = default;

 private:
  DType dtype_ = DType::binary;
  std::uint32_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> bin_;
  std::vector<float> flt_;
  bool has_keypoints_ = false;
  std::vector<Keypoint> keypoints_;
  bool has_landmark_ids_ = false;
  std::vector<std::uint32_t> landmark_ids_;
};

/// Population count of the XOR of two equal-length binary descriptors.
std::uint32_t hamming_distance(std::span<const std::uint8_t> a,
                               std::span<const std::uint8_t> b);
/// Typed-checked variant: both descriptors must be binary with equal dim.
std::uint32_t hamming_distance(const Descriptor& a, const Descriptor& b);

/// Squared Euclidean distance; the hot path used by clustering and matching.
double l2_distance_sq(std::span<const float> a, std::span<const float> b);
/// Typed-checked Euclidean distance: both float, equal dim, finite values.
double l2_distance(const Descriptor& a, const Descriptor& b);

/// Mean descriptor: elementwise arithmetic mean for float sets, bitwise
/// strict-majority vote for binary sets (a bit is set iff strictly more
/// than half of the members set it, so exact ties clear the bit).
Descriptor centroid(std::span<const Descriptor> members);
/// Same computation over selected rows of a set.
Descriptor centroid(const DescriptorSet& set, std::span<const std::uint32_t> indices);

}  // namespace irloc
