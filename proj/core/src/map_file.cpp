#include "irloc/map_file.hpp"

#include <unordered_map>

#include "binio.hpp"
#include "irloc/bow.hpp"

namespace irloc {

std::map<std::uint32_t, Eigen::Vector3d> MapFile::keyframe_positions() const {
  std::map<std::uint32_t, Eigen::Vector3d> out;
  for (std::uint32_t i = 0; i < keyframes.size(); ++i)
    out[i] = keyframes[i].pose.camera_center();
  return out;
}

void save_map(const MapFile& map, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic("MAP1");
  w.u32(static_cast<std::uint32_t>(map.keyframes.size()));
  for (const auto& kf : map.keyframes) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) w.f32(static_cast<float>(kf.pose.rotation(r, c)));
    for (int r = 0; r < 3; ++r) w.f32(static_cast<float>(kf.pose.translation(r)));

    if (!kf.observations.has_keypoints())
      throw InvalidArgument("save_map: keyframe observations must carry keypoints");
    if (kf.landmark_index.size() != kf.observations.size())
      throw InvalidArgument("save_map: landmark index size mismatch");

    DescriptorSet bare(kf.observations.dtype(), kf.observations.dim());
    bare.reserve(kf.observations.size());
    for (std::size_t i = 0; i < kf.observations.size(); ++i) {
      if (bare.dtype() == DType::binary)
        bare.push_back_binary(kf.observations.binary_row(i));
      else
        bare.push_back_f32(kf.observations.f32_row(i));
    }
    w.bytes(serialize_descriptor_set(bare));
    for (const Keypoint& kp : kf.observations.keypoints()) {
      w.f32(kp.x);
      w.f32(kp.y);
    }
    for (std::uint32_t idx : kf.landmark_index) w.u32(idx);
  }
  w.u32(static_cast<std::uint32_t>(map.landmarks.size()));
  for (const auto& p : map.landmarks) {
    w.f32(p.x());
    w.f32(p.y());
    w.f32(p.z());
  }
  w.bytes(serialize_database(map.database));
  detail::write_file(path.string(), w.data());
}

MapFile load_map(const std::filesystem::path& path) {
  const auto buf = detail::read_file(path.string());
  detail::ByteReader r(buf, path.string());
  r.expect_magic("MAP1");
  MapFile map;
  const std::uint32_t kf_count = r.u32();
  if (kf_count > r.remaining() / (12 * 4))
    r.fail("keyframe count " + std::to_string(kf_count) + " larger than remaining data allows");
  map.keyframes.reserve(kf_count);
  for (std::uint32_t k = 0; k < kf_count; ++k) {
    MapKeyframe kf;
    for (int row = 0; row < 3; ++row)
      for (int c = 0; c < 3; ++c) kf.pose.rotation(row, c) = static_cast<double>(r.f32());
    for (int row = 0; row < 3; ++row) kf.pose.translation(row) = static_cast<double>(r.f32());
    // Rotations are stored as 12 x f32, so loaded keyframe poses are
    // orthonormal only to f32 precision (~1e-7). They are kept verbatim:
    // re-orthonormalizing would break save(load(f)) == f byte stability.

    std::size_t consumed = 0;
    kf.observations = parse_descriptor_set(std::span(buf).subspan(r.offset()), &consumed,
                                           path.string() + " keyframe " + std::to_string(k));
    r.bytes(consumed);
    const std::size_t n = kf.observations.size();
    std::vector<Keypoint> kps(n);
    for (std::size_t i = 0; i < n; ++i) {
      kps[i].x = r.f32();
      kps[i].y = r.f32();
    }
    kf.observations.set_keypoints(std::move(kps));
    kf.landmark_index.resize(n);
    for (std::size_t i = 0; i < n; ++i) kf.landmark_index[i] = r.u32();
    map.keyframes.push_back(std::move(kf));
  }
  const std::uint32_t lm_count = r.u32();
  if (lm_count > r.remaining() / 12)
    r.fail("landmark count " + std::to_string(lm_count) + " larger than remaining data allows");
  map.landmarks.resize(lm_count);
  for (std::uint32_t i = 0; i < lm_count; ++i) {
    map.landmarks[i].x() = r.f32();
    map.landmarks[i].y() = r.f32();
    map.landmarks[i].z() = r.f32();
  }
  map.database = parse_database(std::span(buf).subspan(r.offset()),
                                path.string() + " embedded database");
  for (const auto& kf : map.keyframes)
    for (std::uint32_t idx : kf.landmark_index)
      if (idx != kNoLandmark && idx >= lm_count)
        throw FormatError(path.string() + ": landmark index " + std::to_string(idx) +
                          " outside table of size " + std::to_string(lm_count));
  return map;
}

MapFile load_map(const std::filesystem::path& path, const Vocabulary& vocab) {
  MapFile map = load_map(path);
  if (map.database.fingerprint() != vocabulary_fingerprint(vocab))
    throw InvalidArgument(path.string() +
                          ": map database was built with a different vocabulary (fingerprint " +
                          fingerprint_hex(map.database.fingerprint()) + ")");
  return map;
}

MapFile build_map(std::span<const Observation> pass, const World& world,
                  const Vocabulary& vocab, std::uint32_t di_levels,
                  const Eigen::Vector3d& drift_total) {
  if (pass.empty()) throw InvalidArgument("build_map: empty pass");
  MapFile map;
  map.database = ImageDatabase(vocabulary_fingerprint(vocab));

  const double denom = pass.size() > 1 ? static_cast<double>(pass.size() - 1) : 1.0;
  std::unordered_map<std::uint32_t, std::uint32_t> landmark_table;  // world id -> table index

  for (std::size_t k = 0; k < pass.size(); ++k) {
    const Observation& obs = pass[k];
    const Eigen::Vector3d drift = (static_cast<double>(k) / denom) * drift_total;

    MapKeyframe kf;
    kf.pose = obs.truth.pose;
    // translation-only drift of the camera center
    kf.pose.translation = -kf.pose.rotation * (obs.truth.pose.camera_center() + drift);
    kf.observations = obs.set;

    kf.landmark_index.reserve(obs.truth.landmark_ids.size());
    for (std::uint32_t world_id : obs.truth.landmark_ids) {
      auto it = landmark_table.find(world_id);
      if (it == landmark_table.end()) {
        const std::uint32_t idx = static_cast<std::uint32_t>(map.landmarks.size());
        const Eigen::Vector3d p = world.landmark(world_id).position + drift;
        map.landmarks.push_back(p.cast<float>());
        it = landmark_table.emplace(world_id, idx).first;
      }
      kf.landmark_index.push_back(it->second);
    }

    auto [bow, fv] = transform(vocab, obs.set, di_levels);
    map.database.add(std::move(bow), std::move(fv), obs.set);
    map.keyframes.push_back(std::move(kf));
  }
  return map;
}

}  // namespace irloc
