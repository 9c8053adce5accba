#include "irloc/simgen.hpp"

#include <cmath>
#include <unordered_map>

#include "irloc/rng.hpp"

namespace irloc {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<float> random_unit_vector(std::uint32_t dim, Rng& rng) {
  std::vector<float> v(dim);
  double norm_sq = 0.0;
  for (std::uint32_t i = 0; i < dim; ++i) {
    const double x = rng.normal();
    v[i] = static_cast<float>(x);
    norm_sq += x * x;
  }
  const double inv = 1.0 / std::sqrt(std::max(norm_sq, 1e-300));
  for (auto& x : v) x = static_cast<float>(x * inv);
  return v;
}

std::vector<std::uint8_t> random_bits(std::uint32_t bytes, Rng& rng) {
  std::vector<std::uint8_t> v(bytes);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng.next_below(256));
  return v;
}

}  // namespace

Intrinsics default_intrinsics() {
  const double hfov = 75.0 * kPi / 180.0;
  const double fx = (kFrameWidth / 2.0) / std::tan(hfov / 2.0);
  return Intrinsics{fx, fx, kFrameWidth / 2.0, kFrameHeight / 2.0};
}

double DriftModel::lambda(double tau) {
  const double s = std::sin(kPi * tau);
  return s * s;
}

World generate_world(const WorldParams& params, std::uint64_t seed) {
  if (params.dim == 0) throw InvalidArgument("generate_world: dim must be positive");
  if (params.loop_radius_m <= 0.0)
    throw InvalidArgument("generate_world: loop radius must be positive");
  if (params.density_per_m < 0.0)
    throw InvalidArgument("generate_world: density must be non-negative");

  const double corridor_length = 2.0 * kPi * params.loop_radius_m;
  const auto count = static_cast<std::size_t>(params.density_per_m * corridor_length);

  // Two streams: geometry placement and appearance. Worlds with equal seeds
  // share landmark positions regardless of descriptor type or dimension.
  Rng geo(seed);
  Rng app(splitmix64(seed ^ 0x41505045415231ull));

  std::vector<Landmark> landmarks;
  landmarks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Landmark lm;
    const double theta =
        (static_cast<double>(i) + geo.next_double()) / std::max<double>(count, 1) * 2.0 * kPi;
    const double wall_offset = 1.5 + 2.0 * geo.next_double();   // outer wall band
    const double height = -0.5 + 3.0 * geo.next_double();
    const double r = params.loop_radius_m + wall_offset;
    lm.position = Eigen::Vector3d(r * std::cos(theta), r * std::sin(theta), height);

    if (params.dtype == DType::f32) {
      lm.base = random_unit_vector(params.dim, app);
      lm.night = random_unit_vector(params.dim, app);
    } else {
      lm.base_bits = random_bits(params.dim, app);
    }
    landmarks.push_back(std::move(lm));
  }
  return World(params, std::move(landmarks));
}

Observation observe(const World& world, const Pose& pose, double tau, const Intrinsics& K,
                    const DriftModel& drift, std::uint64_t seed) {
  const WorldParams& wp = world.params();
  const double lambda = DriftModel::lambda(tau);
  Rng rng(seed);

  Observation obs;
  obs.set = DescriptorSet(wp.dtype, wp.dim);
  obs.truth.pose = pose;
  obs.truth.tau = tau;
  std::vector<Keypoint> keypoints;
  std::vector<std::uint32_t> ids;

  std::vector<float> fdesc(wp.dim);
  std::vector<std::uint8_t> bdesc(wp.dim);

  for (std::uint32_t id = 0; id < world.size(); ++id) {
    const Landmark& lm = world.landmark(id);
    const Eigen::Vector3d cam = pose.to_camera(lm.position);
    if (cam.z() <= 1e-9) continue;
    const Eigen::Vector2d px = K.project(cam);
    if (px.x() < 0.0 || px.x() >= kFrameWidth || px.y() < 0.0 || px.y() >= kFrameHeight)
      continue;

    Keypoint kp;
    kp.x = static_cast<float>(px.x() + drift.pixel_noise * rng.normal());
    kp.y = static_cast<float>(px.y() + drift.pixel_noise * rng.normal());

    if (wp.dtype == DType::f32) {
      double norm_sq = 0.0;
      for (std::uint32_t i = 0; i < wp.dim; ++i) {
        const double v = (1.0 - lambda) * lm.base[i] + lambda * lm.night[i] +
                         drift.sigma_obs * rng.normal();
        fdesc[i] = static_cast<float>(v);
        norm_sq += v * v;
      }
      const double inv = 1.0 / std::sqrt(std::max(norm_sq, 1e-300));
      for (auto& v : fdesc) v = static_cast<float>(v * inv);
      obs.set.push_back_f32(fdesc);
    } else {
      // Masked bits flip as a systematic function of the time of day: each
      // (landmark, bit) has a stable threshold u, and the bit is inverted
      // whenever u < lambda(tau)/2. The flipped fraction is lambda/2 and the
      // flip state is consistent across frames at the same tau, mirroring
      // gradient inversion. Unmasked bits carry per-observation noise.
      Rng mask_rng(splitmix64(id) ^ 0x4D41534B32ull);
      for (std::uint32_t byte = 0; byte < wp.dim; ++byte) {
        std::uint8_t v = lm.base_bits[byte];
        for (int bit = 0; bit < 8; ++bit) {
          const bool masked = mask_rng.next_double() < drift.flip_mask_fraction;
          const double flip_threshold = mask_rng.next_double();
          const bool flipped = masked ? flip_threshold < lambda / 2.0
                                      : rng.next_double() < drift.sigma_obs;
          if (flipped) v ^= static_cast<std::uint8_t>(1u << bit);
        }
        bdesc[byte] = v;
      }
      obs.set.push_back_binary(bdesc);
    }
    keypoints.push_back(kp);
    ids.push_back(id);
  }
  obs.set.set_keypoints(std::move(keypoints));
  obs.truth.landmark_ids = ids;
  obs.set.set_landmark_ids(std::move(ids));
  return obs;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> truth_matches(const FrameTruth& a,
                                                                   const FrameTruth& b) {
  std::unordered_map<std::uint32_t, std::uint32_t> index_a;
  index_a.reserve(a.landmark_ids.size());
  for (std::uint32_t i = 0; i < a.landmark_ids.size(); ++i) index_a[a.landmark_ids[i]] = i;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t j = 0; j < b.landmark_ids.size(); ++j) {
    const auto it = index_a.find(b.landmark_ids[j]);
    if (it != index_a.end()) out.emplace_back(it->second, j);
  }
  return out;
}

Pose loop_pose(double radius_m, double theta_rad) {
  const double c = std::cos(theta_rad), s = std::sin(theta_rad);
  // camera axes in world coordinates: x right (reverse travel direction),
  // y down, z radially outward toward the wall
  const Eigen::Vector3d x_cam(s, -c, 0.0);
  const Eigen::Vector3d y_cam(0.0, 0.0, -1.0);
  const Eigen::Vector3d z_cam(c, s, 0.0);
  Pose pose;
  pose.rotation.row(0) = x_cam;
  pose.rotation.row(1) = y_cam;
  pose.rotation.row(2) = z_cam;
  const Eigen::Vector3d center(radius_m * c, radius_m * s, 0.0);
  pose.translation = -pose.rotation * center;
  return pose;
}

std::vector<Observation> generate_pass(const World& world, const PassParams& pass,
                                       const Intrinsics& K, const DriftModel& drift) {
  if (pass.frames == 0) throw InvalidArgument("generate_pass: need at least one frame");
  std::vector<Observation> out;
  out.reserve(pass.frames);
  for (std::uint32_t i = 0; i < pass.frames; ++i) {
    const double f = pass.frames == 1 ? 0.0
                                      : static_cast<double>(i) / (pass.frames - 1);
    const double theta =
        (pass.arc_start_deg + f * (pass.arc_end_deg - pass.arc_start_deg)) * kPi / 180.0;
    const double tau = pass.tau_start + f * (pass.tau_end - pass.tau_start);
    const Pose pose = loop_pose(world.params().loop_radius_m, theta);
    out.push_back(observe(world, pose, tau, K, drift, pass.obs_seed ^ i));
  }
  return out;
}

}  // namespace irloc
