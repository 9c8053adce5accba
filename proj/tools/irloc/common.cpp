#include "common.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace irloc::cli {

std::vector<std::filesystem::path> list_descriptor_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw FormatError(dir.string() + ": not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".dsc")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<DescriptorSet> load_frames(const std::filesystem::path& dir) {
  std::vector<DescriptorSet> frames;
  for (const auto& path : list_descriptor_files(dir)) frames.push_back(read_descriptor_set(path));
  if (frames.empty()) throw FormatError(dir.string() + ": no .dsc files found");
  return frames;
}

std::string frame_name(std::uint32_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06u.dsc", index);
  return buf;
}

std::string pair_match_name(std::uint32_t a, std::uint32_t b) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%06u_%06u.mch", a, b);
  return buf;
}

std::string query_match_name(std::uint32_t query, std::uint32_t entry) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "q%06u_e%06u.mch", query, entry);
  return buf;
}

std::pair<std::uint32_t, std::uint32_t> parse_tiles(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos)
    throw CLI::ValidationError("--tiles", "expected WxH, e.g. 8x8");
  try {
    const unsigned long a = std::stoul(s.substr(0, x));
    const unsigned long b = std::stoul(s.substr(x + 1));
    if (a == 0 || b == 0) throw std::invalid_argument("zero");
    return {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--tiles", "expected WxH, e.g. 8x8");
  }
}

Eigen::Vector3d parse_vec3(const std::string& s) {
  Eigen::Vector3d v;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const auto comma = i < 2 ? s.find(',', pos) : s.size();
    if (comma == std::string::npos)
      throw CLI::ValidationError("vector", "expected dx,dy,dz");
    try {
      v(i) = std::stod(s.substr(pos, comma - pos));
    } catch (const std::exception&) {
      throw CLI::ValidationError("vector", "expected dx,dy,dz");
    }
    pos = comma + 1;
  }
  return v;
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open file for writing");
  out << j.dump(2) << "\n";
}

Manifest scenario_manifest(const WorldParams& world, std::uint64_t world_seed,
                           const PassParams& pass, const DriftModel& drift,
                           const Intrinsics& K) {
  Manifest m;
  m.set("dtype", world.dtype == DType::binary ? "binary" : "float");
  m.set_u64("dim", world.dim);
  m.set_double("radius_m", world.loop_radius_m);
  m.set_double("density_per_m", world.density_per_m);
  m.set_u64("world_seed", world_seed);
  m.set_u64("obs_seed", pass.obs_seed);
  m.set_u64("frames", pass.frames);
  m.set_double("arc_start_deg", pass.arc_start_deg);
  m.set_double("arc_end_deg", pass.arc_end_deg);
  m.set_double("tau_start", pass.tau_start);
  m.set_double("tau_end", pass.tau_end);
  m.set_double("sigma_obs", drift.sigma_obs);
  m.set_double("pixel_noise", drift.pixel_noise);
  m.set_double("flip_mask_fraction", drift.flip_mask_fraction);
  m.set_double("fx", K.fx);
  m.set_double("fy", K.fy);
  m.set_double("cx", K.cx);
  m.set_double("cy", K.cy);
  return m;
}

WorldParams world_params_from_manifest(const Manifest& m) {
  WorldParams p;
  const std::string dtype = m.get("dtype");
  if (dtype == "binary")
    p.dtype = DType::binary;
  else if (dtype == "float")
    p.dtype = DType::f32;
  else
    throw FormatError("manifest: dtype must be 'float' or 'binary', got '" + dtype + "'");
  p.dim = static_cast<std::uint32_t>(m.get_u64("dim"));
  p.loop_radius_m = m.get_double("radius_m");
  p.density_per_m = m.get_double("density_per_m");
  return p;
}

std::uint64_t world_seed_from_manifest(const Manifest& m) { return m.get_u64("world_seed"); }

PassParams pass_from_manifest(const Manifest& m) {
  PassParams p;
  p.obs_seed = m.get_u64("obs_seed");
  p.frames = static_cast<std::uint32_t>(m.get_u64("frames"));
  p.arc_start_deg = m.get_double("arc_start_deg");
  p.arc_end_deg = m.get_double("arc_end_deg");
  p.tau_start = m.get_double("tau_start");
  p.tau_end = m.get_double("tau_end");
  return p;
}

DriftModel drift_from_manifest(const Manifest& m) {
  DriftModel d;
  d.sigma_obs = m.get_double("sigma_obs");
  d.pixel_noise = m.get_double("pixel_noise");
  d.flip_mask_fraction = m.get_double("flip_mask_fraction");
  return d;
}

Intrinsics intrinsics_from_manifest(const Manifest& m) {
  return Intrinsics{m.get_double("fx"), m.get_double("fy"), m.get_double("cx"),
                    m.get_double("cy")};
}

}  // namespace irloc::cli
