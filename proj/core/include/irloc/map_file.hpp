#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "irloc/database.hpp"
#include "irloc/simgen.hpp"

namespace irloc {

inline constexpr std::uint32_t kNoLandmark = 0xFFFFFFFFu;

struct MapKeyframe {
  Pose pose;                                 // world-to-camera, in the map frame
  DescriptorSet observations;                // descriptors + keypoints
  std::vector<std::uint32_t> landmark_index; // per feature, into the landmark table
};

/// Relocalization target: keyframes with poses and feature-to-landmark
/// links, a 3D landmark table, and an embedded image database over the
/// keyframes' descriptors.
struct MapFile {
  std::vector<MapKeyframe> keyframes;
  std::vector<Eigen::Vector3f> landmarks;
  ImageDatabase database;

  std::map<std::uint32_t, Eigen::Vector3d> keyframe_positions() const;
};

// Map file ".map" (magic MAP1):
//   "MAP1" | keyframe count u32
//   | per keyframe: pose 12 x f32 (R row-major, then t) | DSC1 blob
//     (descriptors only) | count x (f32 x, f32 y) keypoints
//     | count x u32 landmark index (0xFFFFFFFF = none)
//   | landmark table: count u32, count x 3 f32
//   | embedded IDB1 database (to end of file)
void save_map(const MapFile& map, const std::filesystem::path& path);
MapFile load_map(const std::filesystem::path& path);
/// Loads and rejects maps whose embedded database was built with a
/// different vocabulary.
MapFile load_map(const std::filesystem::path& path, const Vocabulary& vocab);

/// Assembles a map from a synthetic pass: keyframe poses are the true poses
/// with a linear translation drift applied along the pass (mimicking SLAM
/// drift), landmark positions take the drift offset of the first keyframe
/// observing them, and the database indexes every keyframe.
MapFile build_map(std::span<const Observation> pass, const World& world,
                  const Vocabulary& vocab, std::uint32_t di_levels,
                  const Eigen::Vector3d& drift_total = Eigen::Vector3d::Zero());

}  // namespace irloc
