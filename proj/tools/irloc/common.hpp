// Shared helpers for the irloc subcommands.
#pragma once

#include <CLI11.hpp>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "irloc/descriptor_io.hpp"
#include "irloc/manifest.hpp"
#include "irloc/simgen.hpp"
#include "irloc/trajectory.hpp"

namespace irloc::cli {

using nlohmann::json;

/// Sorted list of the *.dsc files in a directory.
std::vector<std::filesystem::path> list_descriptor_files(const std::filesystem::path& dir);

/// Loads every *.dsc in the directory, sorted by filename.
std::vector<DescriptorSet> load_frames(const std::filesystem::path& dir);

/// Frame filename for index i: "%06u.dsc".
std::string frame_name(std::uint32_t index);
/// Matches filename for a consecutive pair: "%06u_%06u.mch".
std::string pair_match_name(std::uint32_t a, std::uint32_t b);
/// Matches filename for a query/entry pair: "q%06u_e%06u.mch".
std::string query_match_name(std::uint32_t query, std::uint32_t entry);

/// Parses "8x8" style tile grids.
std::pair<std::uint32_t, std::uint32_t> parse_tiles(const std::string& s);
/// Parses "dx,dy,dz".
Eigen::Vector3d parse_vec3(const std::string& s);

void write_json(const json& j, const std::filesystem::path& path);

// Manifest keys shared by simgen, db-build --map, and timelapse.
Manifest scenario_manifest(const WorldParams& world, std::uint64_t world_seed,
                           const PassParams& pass, const DriftModel& drift,
                           const Intrinsics& K);
WorldParams world_params_from_manifest(const Manifest& m);
std::uint64_t world_seed_from_manifest(const Manifest& m);
PassParams pass_from_manifest(const Manifest& m);
DriftModel drift_from_manifest(const Manifest& m);
Intrinsics intrinsics_from_manifest(const Manifest& m);

}  // namespace irloc::cli
