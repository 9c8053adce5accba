#include <fstream>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/eval.hpp"

namespace irloc::cli {

namespace {
struct TimelapseOpts {
  std::string frames_dir;
  std::string manifest;
  std::string out;
  std::string summary;
  std::size_t ref_index = 0;
  double px_tol = 3.0;
  MatchParams match;
};
}  // namespace

void register_timelapse(CLI::App& app) {
  auto opts = std::make_shared<TimelapseOpts>();

  CLI::App* cmd = app.add_subcommand(
      "timelapse", "per-tau correct-match counts of a static-camera series against a reference");
  cmd->add_option("--frames", opts->frames_dir, "directory of timelapse frames (*.dsc)")
      ->required();
  cmd->add_option("--manifest", opts->manifest, "scenario manifest written by simgen")
      ->required();
  cmd->add_option("--out", opts->out, "output counts CSV")->required();
  cmd->add_option("--summary", opts->summary, "output JSON summary");
  cmd->add_option("--ref-index", opts->ref_index, "reference frame index (tau_0)");
  cmd->add_option("--px-tol", opts->px_tol, "correctness tolerance in pixels");
  cmd->add_option("--ratio", opts->match.ratio, "matching ratio test");
  cmd->add_option("--binary-threshold", opts->match.binary_threshold,
                  "binary matching Hamming threshold");

  cmd->callback([opts]() {
    const Manifest manifest = Manifest::load(opts->manifest);
    const World world = generate_world(world_params_from_manifest(manifest),
                                       world_seed_from_manifest(manifest));
    const PassParams pass = pass_from_manifest(manifest);
    const DriftModel drift = drift_from_manifest(manifest);
    const Intrinsics K = intrinsics_from_manifest(manifest);

    // The frames on disk must match the manifest; regenerating the pass
    // recovers poses, taus, and landmark ids for the ground-truth test.
    const auto observations = generate_pass(world, pass, K, drift);
    const auto frames = load_frames(opts->frames_dir);
    if (frames.size() != observations.size())
      throw InvalidArgument("timelapse: frame dir has " + std::to_string(frames.size()) +
                            " frames but the manifest describes " +
                            std::to_string(observations.size()));
    for (std::size_t i = 0; i < frames.size(); ++i)
      if (!(frames[i] == observations[i].set))
        throw InvalidArgument("timelapse: frame " + std::to_string(i) +
                              " does not match the manifest scenario (stale directory?)");

    const auto counts =
        timelapse_eval(world, observations, opts->ref_index, K, opts->px_tol, opts->match);

    std::ofstream out(opts->out, std::ios::trunc);
    if (!out) throw FormatError(opts->out + ": cannot open file for writing");
    out << "frame,tau,correct_matches,total_matches,visible\n";
    for (std::size_t i = 0; i < counts.size(); ++i)
      out << i << "," << counts[i].tau << "," << counts[i].correct_matches << ","
          << counts[i].total_matches << "," << counts[i].visible << "\n";
    if (!out) throw FormatError(opts->out + ": write failed");
    out.close();

    std::cout << "timelapse: " << counts.size() << " frames vs reference " << opts->ref_index
              << " -> " << opts->out << "\n";
    if (!opts->summary.empty()) {
      write_json(json{{"frames", counts.size()},
                      {"ref_index", opts->ref_index},
                      {"px_tol", opts->px_tol},
                      {"counts_csv", opts->out}},
                 opts->summary);
    }
  });
}

}  // namespace irloc::cli
