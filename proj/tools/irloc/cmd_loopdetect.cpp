#include <fstream>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/eval.hpp"

namespace irloc::cli {

namespace {
struct LoopDetectOpts {
  std::string db;
  std::string vocab;
  std::string queries_dir;
  std::string mode = "best";
  std::string out;
  std::string summary;
  std::string matches_dir;
  std::string db_gt, query_gt;
  double radius = 10.0;
  bool sequential = false;
  LoopParams params;
};
}  // namespace

void register_loopdetect(CLI::App& app) {
  auto opts = std::make_shared<LoopDetectOpts>();

  CLI::App* cmd = app.add_subcommand("loopdetect", "run loop-closure detection over a query set");
  cmd->add_option("--db", opts->db, "database (.idb)")->required();
  cmd->add_option("--vocab", opts->vocab, "vocabulary (.voc)")->required();
  cmd->add_option("--queries", opts->queries_dir, "directory of query frames (*.dsc)")
      ->required();
  cmd->add_option("--mode", opts->mode, "best | islands")
      ->check(CLI::IsMember({"best", "islands"}));
  cmd->add_option("--out", opts->out, "output records CSV")->required();
  cmd->add_option("--summary", opts->summary, "output JSON summary");
  cmd->add_option("--matches-dir", opts->matches_dir,
                  "precomputed matches qNNNNNN_eNNNNNN.mch overriding internal matching");
  cmd->add_option("--db-gt", opts->db_gt, "ground-truth trajectory CSV of the database pass");
  cmd->add_option("--query-gt", opts->query_gt, "ground-truth trajectory CSV of the query pass");
  cmd->add_option("--radius", opts->radius, "true-positive radius, meters");
  cmd->add_flag("--sequential", opts->sequential,
                "queries are the database sequence itself; exclude entries at/after each query");
  cmd->add_option("--alpha", opts->params.alpha, "normalized-score floor (islands mode)");
  cmd->add_option("--island-gap", opts->params.max_island_gap, "max entry gap within an island");
  cmd->add_option("--temporal-k", opts->params.temporal_k, "temporal consistency depth");
  cmd->add_option("--dislocal", opts->params.dislocal, "recent-entry exclusion count");
  cmd->add_option("--min-inliers", opts->params.min_inliers,
                  "RANSAC inlier floor (0 = pure BoW ranking)");
  cmd->add_option("--ratio", opts->params.match.ratio, "matching ratio test");
  cmd->add_option("--binary-threshold", opts->params.match.binary_threshold,
                  "binary matching Hamming threshold");
  cmd->add_option("--ransac-px", opts->params.ransac_threshold_px, "Sampson inlier threshold");
  cmd->add_option("--di-levels", opts->params.di_levels, "direct index level");

  cmd->callback([opts]() {
    const Vocabulary vocab = load_vocabulary(opts->vocab);
    const ImageDatabase db = load_database(opts->db, vocab);
    const auto frames = load_frames(opts->queries_dir);

    const bool with_truth = !opts->db_gt.empty() && !opts->query_gt.empty();
    std::map<std::uint32_t, Eigen::Vector3d> db_pos, query_pos;
    if (with_truth) {
      db_pos = trajectory_positions(read_trajectory_csv(opts->db_gt));
      query_pos = trajectory_positions(read_trajectory_csv(opts->query_gt));
    }

    LoopDetector detector(vocab, db, opts->params);
    const std::filesystem::path matches_dir(opts->matches_dir);
    const LoopMode mode = opts->mode == "islands" ? LoopMode::islands : LoopMode::best_candidate;

    std::ofstream out(opts->out, std::ios::trunc);
    if (!out) throw FormatError(opts->out + ": cannot open file for writing");
    out << "query_id,status,candidate_id,bow_score,inlier_count,match_count";
    if (with_truth) out << ",is_true_positive";
    out << "\n";

    std::size_t accepted = 0;
    for (std::uint32_t q = 0; q < frames.size(); ++q) {
      if (!matches_dir.empty()) {
        detector.set_match_provider(
            [&, q](std::uint32_t entry) -> std::optional<std::vector<MatchPair>> {
              const auto path = matches_dir / query_match_name(q, entry);
              if (!std::filesystem::exists(path)) return std::nullopt;
              return read_matches(path);
            });
      }
      const LoopResult res = opts->sequential ? detector.detect(frames[q], mode, q)
                                              : detector.detect(frames[q], mode);
      if (res.status == LoopStatus::accepted) ++accepted;
      out << q << "," << loop_status_name(res.status) << ",";
      if (res.candidate) {
        out << res.candidate->entry_id << "," << res.candidate->score << ","
            << res.candidate->inlier_count << "," << res.candidate->matches.size();
      } else {
        out << ",,0,0";
      }
      if (with_truth) {
        bool tp = false;
        if (res.candidate) {
          const auto dit = db_pos.find(res.candidate->entry_id);
          const auto qit = query_pos.find(q);
          if (dit == db_pos.end() || qit == query_pos.end())
            throw InvalidArgument("loopdetect: ground truth missing entry " +
                                  std::to_string(res.candidate->entry_id) + " or query " +
                                  std::to_string(q));
          tp = (dit->second - qit->second).norm() <= opts->radius;
        }
        out << "," << (tp ? 1 : 0);
      }
      out << "\n";
    }
    if (!out) throw FormatError(opts->out + ": write failed");
    out.close();

    std::cout << "loopdetect: " << frames.size() << " queries, " << accepted << " accepted -> "
              << opts->out << "\n";
    if (!opts->summary.empty()) {
      write_json(json{{"queries", frames.size()},
                      {"accepted", accepted},
                      {"mode", opts->mode},
                      {"min_inliers", opts->params.min_inliers},
                      {"records_csv", opts->out}},
                 opts->summary);
    }
  });
}

}  // namespace irloc::cli
