#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "irloc/error.hpp"

namespace irloc {

/// World-to-camera rigid transform: x_cam = R * x_world + t.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d camera_center() const { return -rotation.transpose() * translation; }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation * world + translation;
  }
};

struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;

  Eigen::Vector2d project(const Eigen::Vector3d& cam_point) const {
    return {fx * cam_point.x() / cam_point.z() + cx, fy * cam_point.y() / cam_point.z() + cy};
  }
};

/// Similarity transform x -> scale * R * x + t.
struct SimTransform {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return scale * (rotation * p) + translation;
  }
};

using PixelPair = std::pair<Eigen::Vector2d, Eigen::Vector2d>;

/// Normalized (Hartley) eight-point fundamental matrix: rank 2 enforced by
/// zeroing the smallest singular value, unit Frobenius norm, sign chosen so
/// the largest-magnitude entry is positive. Satisfies x2^T F x1 = 0.
Eigen::Matrix3d fundamental_8point(std::span<const PixelPair> pairs);

/// First-order (Sampson) epipolar distance of a correspondence, in pixels.
double epipolar_error(const Eigen::Matrix3d& F, const Eigen::Vector2d& x1,
                      const Eigen::Vector2d& x2);

struct FundamentalRansacResult {
  Eigen::Matrix3d model = Eigen::Matrix3d::Zero();
  std::vector<std::uint8_t> inlier_mask;
  std::size_t inlier_count = 0;
};

/// Seeded 8-sample RANSAC with Sampson inlier test and final re-estimation
/// on the inlier set; iteration count adapts to a 99% confidence bound.
FundamentalRansacResult ransac_fundamental(std::span<const PixelPair> pairs,
                                           double threshold_px = 2.0,
                                           std::uint32_t max_iters = 500,
                                           std::uint64_t seed = 7);

struct Correspondence3D2D {
  Eigen::Vector3d point;  // world, meters
  Eigen::Vector2d pixel;
};

/// Perspective-n-point pose (world-to-camera) from >= 6 correspondences:
/// DLT initialization followed by Gauss-Newton refinement of the pixel
/// reprojection error, with step halving so the cost never increases.
Pose pnp_solve(std::span<const Correspondence3D2D> corrs, const Intrinsics& K);

struct PnpRansacResult {
  Pose pose;
  std::vector<std::uint8_t> inlier_mask;
  std::size_t inlier_count = 0;
};

/// Seeded 6-sample RANSAC over pnp_solve with a pixel reprojection inlier
/// test and final refinement on the inlier set.
PnpRansacResult ransac_pnp(std::span<const Correspondence3D2D> corrs, const Intrinsics& K,
                           double threshold_px = 2.0, std::uint32_t max_iters = 500,
                           std::uint64_t seed = 7);

/// Closed-form least-squares alignment minimizing
/// sum || dst - (s R src + t) ||^2 (Umeyama), with the reflection-correcting
/// sign matrix; scale is fixed to 1 when with_scale is false.
SimTransform umeyama(std::span<const Eigen::Vector3d> src, std::span<const Eigen::Vector3d> dst,
                     bool with_scale);

/// Relocalization error after locally aligning the map to ground truth:
/// rigid (no-scale) Umeyama over the keyframes within +- window of
/// anchor_kf present in both maps, applied to the relocalized camera
/// center, measured against the query's ground-truth position.
double local_alignment_error(const std::map<std::uint32_t, Eigen::Vector3d>& map_positions,
                             const std::map<std::uint32_t, Eigen::Vector3d>& gt_positions,
                             std::uint32_t anchor_kf, std::uint32_t window, const Pose& reloc_pose,
                             const Eigen::Vector3d& query_gt);

/// Nearest rotation matrix in the Frobenius sense (det +1).
Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& m);

}  // namespace irloc
