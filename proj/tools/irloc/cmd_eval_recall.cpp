#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "irloc/eval.hpp"

namespace irloc::cli {

namespace {
struct EvalRecallOpts {
  std::string records;
  std::string summary;
};

std::vector<EvalRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::string header;
  if (!std::getline(in, header)) throw FormatError(path.string() + ": empty records file");

  std::vector<std::string> columns;
  {
    std::istringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) columns.push_back(col);
  }
  const auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw FormatError(path.string() + ": records CSV lacks column '" + name + "'");
  };
  const std::size_t c_query = column("query_id");
  const std::size_t c_cand = column("candidate_id");
  const std::size_t c_score = column("bow_score");
  const std::size_t c_inliers = column("inlier_count");
  const std::size_t c_tp = column("is_true_positive");

  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    while (fields.size() < columns.size()) fields.emplace_back();
    if (fields.size() != columns.size())
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": field count mismatch");
    try {
      EvalRecord r;
      r.query_id = static_cast<std::uint32_t>(std::stoul(fields[c_query]));
      r.candidate_id = fields[c_cand].empty()
                           ? kNoCandidate
                           : static_cast<std::uint32_t>(std::stoul(fields[c_cand]));
      r.bow_score = fields[c_score].empty() ? 0.0 : std::stod(fields[c_score]);
      r.inlier_count = static_cast<std::uint32_t>(std::stoul(fields[c_inliers]));
      r.is_true_positive = fields[c_tp] == "1" || fields[c_tp] == "true";
      records.push_back(r);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": malformed record");
    }
  }
  return records;
}
}  // namespace

void register_eval_recall(CLI::App& app) {
  auto opts = std::make_shared<EvalRecallOpts>();

  CLI::App* cmd = app.add_subcommand(
      "eval-recall", "recall at 100% precision from loopdetect records with ground truth");
  cmd->add_option("--records", opts->records, "records CSV from `irloc loopdetect`")->required();
  cmd->add_option("--summary", opts->summary, "output JSON summary");

  cmd->callback([opts]() {
    const auto records = read_records_csv(opts->records);
    const RecallResult result = recall_at_full_precision(records);

    // re-verify zero false positives at the returned threshold
    for (const auto& r : records)
      if (!r.is_true_positive && r.inlier_count >= result.threshold)
        throw Error("eval-recall: internal error, false positive survives the threshold");

    std::cout << "eval-recall: threshold=" << result.threshold << " recall=" << result.recall
              << " over " << records.size() << " queries\n";
    if (!opts->summary.empty()) {
      write_json(json{{"queries", records.size()},
                      {"threshold", result.threshold},
                      {"recall", result.recall}},
                 opts->summary);
    }
  });
}

}  // namespace irloc::cli
