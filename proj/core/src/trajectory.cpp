#include "irloc/trajectory.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace irloc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw FormatError(path + ":" + std::to_string(line_no) + ": malformed number '" + s + "'");
  }
}

std::uint32_t parse_id(const std::string& s, const std::string& path, std::size_t line_no) {
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError(path + ":" + std::to_string(line_no) + ": malformed entry id '" + s + "'");
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open file for writing");
  out << "entry_id,t_unix_s,x_m,y_m,z_m\n";
  for (const auto& [id, pt] : traj) {
    out << id << "," << fmt(pt.t_unix_s) << "," << fmt(pt.position.x()) << ","
        << fmt(pt.position.y()) << "," << fmt(pt.position.z()) << "\n";
  }
  if (!out) throw FormatError(path.string() + ": write failed");
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line.rfind("entry_id", 0) == 0) continue;  // header
    const auto fields = split_csv_line(line);
    if (fields.size() != 5)
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 5 fields, got " + std::to_string(fields.size()));
    TrajectoryPoint pt;
    const std::uint32_t id = parse_id(fields[0], path.string(), line_no);
    pt.t_unix_s = parse_double(fields[1], path.string(), line_no);
    pt.position = {parse_double(fields[2], path.string(), line_no),
                   parse_double(fields[3], path.string(), line_no),
                   parse_double(fields[4], path.string(), line_no)};
    traj[id] = pt;
  }
  return traj;
}

std::map<std::uint32_t, Eigen::Vector3d> trajectory_positions(const Trajectory& traj) {
  std::map<std::uint32_t, Eigen::Vector3d> out;
  for (const auto& [id, pt] : traj) out[id] = pt.position;
  return out;
}

void write_pose_csv(const std::map<std::uint32_t, Pose>& poses,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open file for writing");
  out << "entry_id,qw,qx,qy,qz,tx,ty,tz\n";
  for (const auto& [id, pose] : poses) {
    Eigen::Quaterniond q(pose.rotation);
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    out << id << "," << fmt(q.w()) << "," << fmt(q.x()) << "," << fmt(q.y()) << ","
        << fmt(q.z()) << "," << fmt(pose.translation.x()) << "," << fmt(pose.translation.y())
        << "," << fmt(pose.translation.z()) << "\n";
  }
  if (!out) throw FormatError(path.string() + ": write failed");
}

std::map<std::uint32_t, Pose> read_pose_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::map<std::uint32_t, Pose> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line.rfind("entry_id", 0) == 0) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 8)
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 8 fields, got " + std::to_string(fields.size()));
    const std::uint32_t id = parse_id(fields[0], path.string(), line_no);
    const double qw = parse_double(fields[1], path.string(), line_no);
    const double qx = parse_double(fields[2], path.string(), line_no);
    const double qy = parse_double(fields[3], path.string(), line_no);
    const double qz = parse_double(fields[4], path.string(), line_no);
    Pose pose;
    pose.rotation = Eigen::Quaterniond(qw, qx, qy, qz).normalized().toRotationMatrix();
    pose.translation = {parse_double(fields[5], path.string(), line_no),
                        parse_double(fields[6], path.string(), line_no),
                        parse_double(fields[7], path.string(), line_no)};
    poses[id] = pose;
  }
  return poses;
}

}  // namespace irloc
