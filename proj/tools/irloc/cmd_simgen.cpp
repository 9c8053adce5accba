#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/rng.hpp"

namespace irloc::cli {

namespace {

struct SimgenOpts {
  std::string out;
  std::string from_manifest;
  std::string dtype = "float";
  std::uint32_t dim = 256;
  double radius = 30.0;
  double density = 5.0;
  std::uint32_t frames = 120;
  double arc_start = 0.0, arc_end = 360.0;
  double tau_start = 0.0, tau_end = 0.0;
  double sigma_obs = 0.02, pixel_noise = 0.3, flip_fraction = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t obs_seed = 0;
  bool obs_seed_set = false;
  bool truth_matches_out = false;
};

}  // namespace

void register_simgen(CLI::App& app) {
  auto opts = std::make_shared<SimgenOpts>();

  CLI::App* cmd =
      app.add_subcommand("simgen", "synthetic diurnal-drift scene and descriptor generator");
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--from-manifest", opts->from_manifest,
                  "regenerate exactly from an existing scenario manifest (other options ignored)");
  cmd->add_option("--dtype", opts->dtype, "float|binary")
      ->check(CLI::IsMember({"float", "binary"}));
  cmd->add_option("--dim", opts->dim, "descriptor dim (floats, or bytes if binary)");
  cmd->add_option("--radius", opts->radius, "loop radius, meters");
  cmd->add_option("--density", opts->density, "landmarks per meter of corridor wall");
  cmd->add_option("--frames", opts->frames, "frames in the pass");
  cmd->add_option("--arc-start", opts->arc_start, "pass start angle, degrees");
  cmd->add_option("--arc-end", opts->arc_end,
                  "pass end angle, degrees (equal to --arc-start = static camera)");
  cmd->add_option("--tau-start", opts->tau_start, "time-of-day fraction at the first frame");
  cmd->add_option("--tau-end", opts->tau_end, "time-of-day fraction at the last frame");
  cmd->add_option("--sigma-obs", opts->sigma_obs, "per-observation appearance noise std");
  cmd->add_option("--pixel-noise", opts->pixel_noise, "keypoint noise std, pixels");
  cmd->add_option("--flip-fraction", opts->flip_fraction,
                  "fraction of binary descriptor bits subject to diurnal flipping");
  cmd->add_option("--seed", opts->seed, "world seed");
  cmd->add_option("--obs-seed", opts->obs_seed, "observation seed (default: derived from --seed)")
      ->each([opts](const std::string&) { opts->obs_seed_set = true; });
  cmd->add_flag("--truth-matches", opts->truth_matches_out,
                "also write ground-truth matches for consecutive frame pairs (.mch)");

  cmd->callback([opts]() {
    Manifest manifest;
    if (!opts->from_manifest.empty()) {
      manifest = Manifest::load(opts->from_manifest);
    } else {
      WorldParams wp;
      wp.dtype = opts->dtype == "binary" ? DType::binary : DType::f32;
      wp.dim = opts->dim;
      wp.loop_radius_m = opts->radius;
      wp.density_per_m = opts->density;
      PassParams pass;
      pass.frames = opts->frames;
      pass.arc_start_deg = opts->arc_start;
      pass.arc_end_deg = opts->arc_end;
      pass.tau_start = opts->tau_start;
      pass.tau_end = opts->tau_end;
      pass.obs_seed = opts->obs_seed_set ? opts->obs_seed : splitmix64(opts->seed ^ 0x0B5ull);
      DriftModel drift;
      drift.sigma_obs = opts->sigma_obs;
      drift.pixel_noise = opts->pixel_noise;
      drift.flip_mask_fraction = opts->flip_fraction;
      manifest = scenario_manifest(wp, opts->seed, pass, drift, default_intrinsics());
    }

    const WorldParams wp = world_params_from_manifest(manifest);
    const PassParams pass = pass_from_manifest(manifest);
    const DriftModel drift = drift_from_manifest(manifest);
    const Intrinsics K = intrinsics_from_manifest(manifest);
    const World world = generate_world(wp, world_seed_from_manifest(manifest));
    const auto observations = generate_pass(world, pass, K, drift);

    const std::filesystem::path dir(opts->out);
    std::filesystem::create_directories(dir);
    manifest.save(dir / "manifest.txt");

    Trajectory gt;
    std::map<std::uint32_t, Pose> poses;
    for (std::uint32_t i = 0; i < observations.size(); ++i) {
      const Observation& obs = observations[i];
      write_descriptor_set(obs.set, dir / frame_name(i));
      gt[i] = TrajectoryPoint{obs.truth.tau * 86400.0, obs.truth.pose.camera_center()};
      poses[i] = obs.truth.pose;
      if (opts->truth_matches_out && i + 1 < observations.size()) {
        const auto matches = truth_matches(obs.truth, observations[i + 1].truth);
        write_matches(matches, dir / pair_match_name(i, i + 1));
      }
    }
    write_trajectory_csv(gt, dir / "gt.csv");
    write_pose_csv(poses, dir / "poses.csv");

    std::size_t features = 0;
    for (const auto& obs : observations) features += obs.set.size();
    std::cout << "simgen: " << observations.size() << " frames, " << world.size()
              << " landmarks, " << features << " observations -> " << dir.string() << "\n";
  });
}

}  // namespace irloc::cli
