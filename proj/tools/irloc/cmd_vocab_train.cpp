#include <cmath>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/matching.hpp"

namespace irloc::cli {

namespace {
struct VocabTrainOpts {
  std::string pairs_dir;
  std::string matches_dir;
  std::string out;
  std::uint32_t k = 10;
  std::uint32_t levels = 5;
  std::uint64_t seed = 1;
  double ratio = 0.8;
  std::uint32_t binary_threshold = 64;
};
}  // namespace

void register_vocab_train(CLI::App& app) {
  auto opts = std::make_shared<VocabTrainOpts>();

  CLI::App* cmd = app.add_subcommand(
      "vocab-train", "train a vocabulary tree from matched features of sequential frame pairs");
  cmd->add_option("--pairs", opts->pairs_dir, "directory of sequential frames (*.dsc)")
      ->required();
  cmd->add_option("--matches-dir", opts->matches_dir,
                  "directory of precomputed pair matches (NNNNNN_NNNNNN.mch); pairs without a "
                  "file fall back to internal matching");
  cmd->add_option("--out", opts->out, "output vocabulary (.voc)")->required();
  cmd->add_option("--k", opts->k, "branching factor");
  cmd->add_option("--levels", opts->levels, "tree depth in levels");
  cmd->add_option("--seed", opts->seed, "training seed");
  cmd->add_option("--ratio", opts->ratio, "internal matcher ratio test (float descriptors)");
  cmd->add_option("--binary-threshold", opts->binary_threshold,
                  "internal matcher Hamming threshold (binary descriptors)");

  cmd->callback([opts]() {
    const auto frames = load_frames(opts->pairs_dir);
    if (frames.size() < 2)
      throw InvalidArgument("vocab-train: need at least two frames to form pairs");

    if (std::pow(static_cast<double>(opts->k), static_cast<double>(opts->levels)) > 1e5)
      std::cerr << "warning: k^L > 100000; vocabularies larger than k=10/L=5 tend to "
                   "overfit day-night appearance changes\n";

    MatchParams match;
    match.ratio = opts->ratio;
    match.binary_threshold = opts->binary_threshold;

    std::function<std::optional<std::vector<MatchPair>>(std::size_t)> provided;
    if (!opts->matches_dir.empty()) {
      const std::filesystem::path dir(opts->matches_dir);
      provided = [dir](std::size_t i) -> std::optional<std::vector<MatchPair>> {
        const auto path = dir / pair_match_name(static_cast<std::uint32_t>(i),
                                                static_cast<std::uint32_t>(i + 1));
        if (!std::filesystem::exists(path)) return std::nullopt;
        return read_matches(path);
      };
    }

    const TrainingPool pool = build_training_pool(frames, match, provided);
    if (pool.total_descriptors() == 0)
      throw InvalidArgument("vocab-train: no matched features survived filtering");

    Vocabulary vocab = build_vocabulary(pool, opts->k, opts->levels, opts->seed);
    vocab = assign_idf(std::move(vocab), pool.images);
    save_vocabulary(vocab, opts->out);

    std::cout << "vocab-train: " << pool.pairs_consumed << " pairs, "
              << pool.total_descriptors() << " matched descriptors -> " << vocab.word_count()
              << " words (" << vocab.node_count() << " nodes), fingerprint "
              << fingerprint_hex(vocabulary_fingerprint(vocab)).substr(0, 16) << "... -> "
              << opts->out << "\n";
  });
}

}  // namespace irloc::cli
