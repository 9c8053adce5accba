#include "irloc/descriptor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>

namespace irloc {

const char* dtype_name(DType t) { return t == DType::binary ? "binary" : "float"; }

Descriptor Descriptor::binary(std::vector<std::uint8_t> bytes) {
  Descriptor d;
  d.dtype_ = DType::binary;
  d.bytes_ = std::move(bytes);
  return d;
}

Descriptor Descriptor::f32(std::vector<float> values) {
  Descriptor d;
  d.dtype_ = DType::f32;
  d.values_ = std::move(values);
  return d;
}

DescriptorSet::DescriptorSet(DType dtype, std::uint32_t dim) : dtype_(dtype), dim_(dim) {
  if (dim == 0) throw InvalidArgument("descriptor dim must be positive");
}

void DescriptorSet::reserve(std::size_t n) {
  if (dtype_ == DType::binary)
    bin_.reserve(n * dim_);
  else
    flt_.reserve(n * dim_);
}

void DescriptorSet::push_back(const Descriptor& d) {
  if (d.dtype() != dtype_ || d.dim() != dim_) {
    std::ostringstream os;
    os << "descriptor signature mismatch: set is " << dtype_name(dtype_) << "/" << dim_
       << ", got " << dtype_name(d.dtype()) << "/" << d.dim();
    throw InvalidArgument(os.str());
  }
  if (dtype_ == DType::binary)
    push_back_binary(d.bytes());
  else
    push_back_f32(d.values());
}

void DescriptorSet::push_back_binary(std::span<const std::uint8_t> row) {
  bin_.insert(bin_.end(), row.begin(), row.end());
  ++count_;
}

void DescriptorSet::push_back_f32(std::span<const float> row) {
  flt_.insert(flt_.end(), row.begin(), row.end());
  ++count_;
}

Descriptor DescriptorSet::descriptor(std::size_t i) const {
  if (dtype_ == DType::binary) {
    auto r = binary_row(i);
    return Descriptor::binary({r.begin(), r.end()});
  }
  auto r = f32_row(i);
  return Descriptor::f32({r.begin(), r.end()});
}

void DescriptorSet::set_keypoints(std::vector<Keypoint> kps) {
  if (kps.size() != count_)
    throw InvalidArgument("keypoint count does not match descriptor count");
  keypoints_ = std::move(kps);
  has_keypoints_ = true;
}

void DescriptorSet::set_landmark_ids(std::vector<std::uint32_t> ids) {
  if (ids.size() != count_)
    throw InvalidArgument("landmark id count does not match descriptor count");
  landmark_ids_ = std::move(ids);
  has_landmark_ids_ = true;
}

DescriptorSet DescriptorSet::subset(std::span<const std::uint32_t> indices) const {
  DescriptorSet out(dtype_, dim_);
  out.reserve(indices.size());
  std::vector<Keypoint> kps;
  std::vector<std::uint32_t> lms;
  for (std::uint32_t i : indices) {
    if (i >= count_) throw InvalidArgument("subset index out of range");
    if (dtype_ == DType::binary)
      out.push_back_binary(binary_row(i));
    else
      out.push_back_f32(f32_row(i));
    if (has_keypoints_) kps.push_back(keypoints_[i]);
    if (has_landmark_ids_) lms.push_back(landmark_ids_[i]);
  }
  if (has_keypoints_) out.set_keypoints(std::move(kps));
  if (has_landmark_ids_) out.set_landmark_ids(std::move(lms));
  return out;
}

std::uint32_t hamming_distance(std::span<const std::uint8_t> a,
                               std::span<const std::uint8_t> b) {
  const std::size_t n = a.size();
  std::uint32_t dist = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    std::uint64_t wa, wb;
    std::memcpy(&wa, a.data() + i, 8);
    std::memcpy(&wb, b.data() + i, 8);
    dist += static_cast<std::uint32_t>(std::popcount(wa ^ wb));
  }
  for (; i < n; ++i)
    dist += static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
  return dist;
}

std::uint32_t hamming_distance(const Descriptor& a, const Descriptor& b) {
  if (a.dtype() != DType::binary || b.dtype() != DType::binary)
    throw InvalidArgument("hamming_distance requires binary descriptors");
  if (a.dim() != b.dim())
    throw InvalidArgument("hamming_distance dimension mismatch");
  return hamming_distance(a.bytes(), b.bytes());
}

double l2_distance_sq(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = a.size();
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    const double d1 = static_cast<double>(a[i + 1]) - static_cast<double>(b[i + 1]);
    const double d2 = static_cast<double>(a[i + 2]) - static_cast<double>(b[i + 2]);
    const double d3 = static_cast<double>(a[i + 3]) - static_cast<double>(b[i + 3]);
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

double l2_distance(const Descriptor& a, const Descriptor& b) {
  if (a.dtype() != DType::f32 || b.dtype() != DType::f32)
    throw InvalidArgument("l2_distance requires float descriptors");
  if (a.dim() != b.dim())
    throw InvalidArgument("l2_distance dimension mismatch");
  for (float v : a.values())
    if (!std::isfinite(v)) throw InvalidArgument("l2_distance: non-finite input");
  for (float v : b.values())
    if (!std::isfinite(v)) throw InvalidArgument("l2_distance: non-finite input");
  return std::sqrt(l2_distance_sq(a.values(), b.values()));
}

namespace {

Descriptor centroid_binary(std::uint32_t dim, std::size_t n,
                           const std::function<std::span<const std::uint8_t>(std::size_t)>& row) {
  std::vector<std::uint32_t> ones(dim * 8, 0);
  for (std::size_t m = 0; m < n; ++m) {
    auto r = row(m);
    for (std::uint32_t byte = 0; byte < dim; ++byte) {
      const std::uint8_t v = r[byte];
      if (!v) continue;
      for (int bit = 0; bit < 8; ++bit)
        if (v & (1u << bit)) ++ones[byte * 8 + bit];
    }
  }
  std::vector<std::uint8_t> out(dim, 0);
  for (std::uint32_t i = 0; i < dim * 8; ++i) {
    // strict majority: exact ties leave the bit clear
    if (2ull * ones[i] > n) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return Descriptor::binary(std::move(out));
}

Descriptor centroid_f32(std::uint32_t dim, std::size_t n,
                        const std::function<std::span<const float>(std::size_t)>& row) {
  std::vector<double> acc(dim, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    auto r = row(m);
    for (std::uint32_t i = 0; i < dim; ++i) acc[i] += static_cast<double>(r[i]);
  }
  std::vector<float> out(dim);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::uint32_t i = 0; i < dim; ++i) out[i] = static_cast<float>(acc[i] * inv);
  return Descriptor::f32(std::move(out));
}

}  // namespace

Descriptor centroid(std::span<const Descriptor> members) {
  if (members.empty()) throw InvalidArgument("centroid of empty descriptor set");
  const DType dtype = members[0].dtype();
  const std::uint32_t dim = members[0].dim();
  for (const auto& d : members)
    if (d.dtype() != dtype || d.dim() != dim)
      throw InvalidArgument("centroid: descriptors have mixed signatures");
  if (dtype == DType::binary)
    return centroid_binary(dim, members.size(),
                           [&](std::size_t i) { return members[i].bytes(); });
  return centroid_f32(dim, members.size(),
                      [&](std::size_t i) { return members[i].values(); });
}

Descriptor centroid(const DescriptorSet& set, std::span<const std::uint32_t> indices) {
  if (indices.empty()) throw InvalidArgument("centroid of empty descriptor set");
  if (set.dtype() == DType::binary)
    return centroid_binary(set.dim(), indices.size(),
                           [&](std::size_t i) { return set.binary_row(indices[i]); });
  return centroid_f32(set.dim(), indices.size(),
                      [&](std::size_t i) { return set.f32_row(indices[i]); });
}

}  // namespace irloc
