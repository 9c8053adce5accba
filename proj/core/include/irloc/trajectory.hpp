#pragma once

#include <cstdint>
#include <filesystem>
#include <map>

#include "irloc/geometry.hpp"

namespace irloc {

struct TrajectoryPoint {
  double t_unix_s = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // east-north-up, meters
};

using Trajectory = std::map<std::uint32_t, TrajectoryPoint>;

/// Ground-truth trajectory CSV: header then `entry_id,t_unix_s,x_m,y_m,z_m`.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

std::map<std::uint32_t, Eigen::Vector3d> trajectory_positions(const Trajectory& traj);

/// Pose CSV: header then `entry_id,qw,qx,qy,qz,tx,ty,tz` (world-to-camera,
/// quaternion sign fixed so qw >= 0).
void write_pose_csv(const std::map<std::uint32_t, Pose>& poses,
                    const std::filesystem::path& path);
std::map<std::uint32_t, Pose> read_pose_csv(const std::filesystem::path& path);

}  // namespace irloc
