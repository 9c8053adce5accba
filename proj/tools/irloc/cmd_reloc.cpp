#include <fstream>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/reloc.hpp"

namespace irloc::cli {

namespace {
struct RelocOpts {
  std::string map;
  std::string vocab;
  std::string queries_dir;
  std::string map_gt;
  std::string query_gt;
  std::string manifest;
  std::string out;
  std::string summary;
  RelocParams params;
};
}  // namespace

void register_reloc(CLI::App& app) {
  auto opts = std::make_shared<RelocOpts>();

  CLI::App* cmd =
      app.add_subcommand("reloc", "relocalize query frames against a saved map");
  cmd->add_option("--map", opts->map, "map file (.map)")->required();
  cmd->add_option("--vocab", opts->vocab, "vocabulary (.voc)")->required();
  cmd->add_option("--queries", opts->queries_dir, "directory of query frames (*.dsc)")
      ->required();
  cmd->add_option("--gt", opts->map_gt, "ground-truth trajectory CSV of the map pass")
      ->required();
  cmd->add_option("--query-gt", opts->query_gt, "ground-truth trajectory CSV of the query pass")
      ->required();
  cmd->add_option("--manifest", opts->manifest,
                  "scenario manifest providing camera intrinsics (default: built-in camera)");
  cmd->add_option("--out", opts->out, "output records CSV")->required();
  cmd->add_option("--summary", opts->summary, "output JSON summary");
  cmd->add_option("--window", opts->params.window, "+- keyframes for local alignment");
  cmd->add_option("--gate-m", opts->params.gate_m,
                  "max distance to the matched keyframe's camera center, meters");
  cmd->add_option("--min-inliers", opts->params.min_inliers, "PnP RANSAC inlier floor");
  cmd->add_option("--alpha", opts->params.loop.alpha, "normalized-score floor");
  cmd->add_option("--island-gap", opts->params.loop.max_island_gap, "island entry gap");
  cmd->add_option("--ratio", opts->params.loop.match.ratio, "matching ratio test");
  cmd->add_option("--binary-threshold", opts->params.loop.match.binary_threshold,
                  "binary matching Hamming threshold");
  cmd->add_option("--pnp-px", opts->params.pnp_threshold_px, "PnP reprojection inlier threshold");
  cmd->add_option("--di-levels", opts->params.loop.di_levels, "direct index level");

  cmd->callback([opts]() {
    const Vocabulary vocab = load_vocabulary(opts->vocab);
    const MapFile map = load_map(opts->map, vocab);
    const auto frames = load_frames(opts->queries_dir);
    const auto map_gt = trajectory_positions(read_trajectory_csv(opts->map_gt));
    const auto query_gt = trajectory_positions(read_trajectory_csv(opts->query_gt));
    const Intrinsics K = opts->manifest.empty()
                             ? default_intrinsics()
                             : intrinsics_from_manifest(Manifest::load(opts->manifest));

    const auto records =
        relocalize_sequence(map, vocab, frames, opts->params, map_gt, query_gt, K);

    std::ofstream out(opts->out, std::ios::trunc);
    if (!out) throw FormatError(opts->out + ": cannot open file for writing");
    out << "query_id,status,matched_keyframe,inliers,x_m,y_m,z_m,error_m\n";
    std::size_t accepted = 0;
    double error_sum = 0.0;
    for (const auto& r : records) {
      out << r.query_id << "," << reloc_status_name(r.status) << ",";
      if (r.matched_keyframe) out << *r.matched_keyframe;
      out << "," << r.inliers << ",";
      if (r.position)
        out << r.position->x() << "," << r.position->y() << "," << r.position->z();
      else
        out << ",,";
      out << ",";
      if (r.error_m) {
        out << *r.error_m;
        ++accepted;
        error_sum += *r.error_m;
      }
      out << "\n";
    }
    if (!out) throw FormatError(opts->out + ": write failed");
    out.close();

    const double mean_error = accepted > 0 ? error_sum / static_cast<double>(accepted) : 0.0;
    std::cout << "reloc: " << records.size() << " queries, " << accepted
              << " accepted, mean error " << mean_error << " m -> " << opts->out << "\n";
    if (!opts->summary.empty()) {
      write_json(json{{"queries", records.size()},
                      {"accepted", accepted},
                      {"mean_error_m", mean_error},
                      {"gate_m", opts->params.gate_m},
                      {"min_inliers", opts->params.min_inliers},
                      {"records_csv", opts->out}},
                 opts->summary);
    }
  });
}

}  // namespace irloc::cli
