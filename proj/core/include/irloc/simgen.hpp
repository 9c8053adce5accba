#pragma once

#include <cstdint>
#include <vector>

#include "irloc/descriptor.hpp"
#include "irloc/geometry.hpp"

namespace irloc {

// Synthetic frame size mirroring the FLIR Boson ADK (640 wide x 512 high).
inline constexpr std::uint32_t kFrameWidth = 640;
inline constexpr std::uint32_t kFrameHeight = 512;

/// Intrinsics for the synthetic camera: 75 degree horizontal field of view
/// across the 640-pixel width, principal point at the image center.
Intrinsics default_intrinsics();

struct WorldParams {
  DType dtype = DType::f32;
  std::uint32_t dim = 256;       // floats, or bytes for binary descriptors
  double loop_radius_m = 30.0;   // camera path radius
  double density_per_m = 5.0;    // landmarks per meter of corridor
};

struct Landmark {
  Eigen::Vector3d position;
  // float appearance endpoints (unit norm)
  std::vector<float> base;
  std::vector<float> night;
  // binary base appearance; the diurnal flip mask is a stable function of
  // the landmark id and the drift model's flip_mask_fraction
  std::vector<std::uint8_t> base_bits;
};

/// Landmarks placed along the outer wall of a circular corridor. Appearance
/// vectors are drawn from a stream independent of the geometry stream, so
/// worlds sharing a seed have identical landmark positions across dtypes.
class World {
 public:
  World(WorldParams params, std::vector<Landmark> landmarks)
      : params_(params), landmarks_(std::move(landmarks)) {}

  const WorldParams& params() const { return params_; }
  std::size_t size() const { return landmarks_.size(); }
  const Landmark& landmark(std::uint32_t id) const { return landmarks_[id]; }

 private:
  WorldParams params_;
  std::vector<Landmark> landmarks_;
};

World generate_world(const WorldParams& params, std::uint64_t seed);

/// Diurnal appearance drift. lambda(tau) = sin^2(pi tau) blends float
/// descriptors from base (day) to night appearance; binary descriptors flip
/// each masked bit with probability lambda/2 and unmasked bits with
/// probability sigma_obs.
struct DriftModel {
  double sigma_obs = 0.02;          // per-element appearance noise std (float),
                                    // per-bit flip probability for unmasked bits (binary)
  double pixel_noise = 0.3;         // keypoint noise std, pixels
  double flip_mask_fraction = 1.0;  // fraction of bits subject to diurnal flipping

  static double lambda(double tau);
};

struct FrameTruth {
  Pose pose;
  double tau = 0.0;
  std::vector<std::uint32_t> landmark_ids;  // aligned with the emitted descriptors
};

struct Observation {
  DescriptorSet set;  // descriptors + keypoints + landmark ids
  FrameTruth truth;
};

/// Projects every landmark through K at the given pose; landmarks behind the
/// camera or whose true projection falls outside the frame are excluded.
/// Keypoints get Gaussian pixel noise; descriptors follow the drift model.
/// Same (pose, tau, seed) always produces identical output.
Observation observe(const World& world, const Pose& pose, double tau, const Intrinsics& K,
                    const DriftModel& drift, std::uint64_t seed);

/// Ground-truth correspondences: all index pairs sharing a landmark id.
std::vector<std::pair<std::uint32_t, std::uint32_t>> truth_matches(const FrameTruth& a,
                                                                   const FrameTruth& b);

/// Side-facing camera on the loop at angle theta: x_cam along travel
/// direction (reversed), y_cam down, z_cam radially outward at the wall.
Pose loop_pose(double radius_m, double theta_rad);

struct PassParams {
  double arc_start_deg = 0.0;
  double arc_end_deg = 360.0;
  std::uint32_t frames = 120;
  double tau_start = 0.0;
  double tau_end = 0.0;
  std::uint64_t obs_seed = 1;  // per-frame seed = obs_seed ^ frame index
};

/// A sequence of observations along the loop arc with linearly interpolated
/// tau. Per-frame observation seeds derive as obs_seed ^ frame_index.
std::vector<Observation> generate_pass(const World& world, const PassParams& pass,
                                       const Intrinsics& K, const DriftModel& drift);

}  // namespace irloc
