#include <iostream>
#include <memory>

#include "common.hpp"
#include "irloc/bench.hpp"
#include "irloc/rng.hpp"

namespace irloc::cli {

namespace {
struct BenchDistanceOpts {
  std::uint32_t dim_float = 256;
  std::uint32_t bits = 256;
  std::uint32_t pairs = 1000000;
  std::uint64_t seed = 1;
  std::string summary;
};

struct BenchDatabaseOpts {
  std::uint32_t entries = 1000;
  std::uint32_t features = 500;
  std::uint32_t k = 10;
  std::uint32_t levels = 5;
  std::uint32_t dim = 256;
  std::uint32_t train_images = 40;
  std::uint64_t seed = 1;
  std::string vocab;
  std::string summary;
};

/// Throwaway vocabulary over random descriptors for throughput measurement.
Vocabulary train_synthetic_vocabulary(std::uint32_t k, std::uint32_t levels, std::uint32_t dim,
                                      std::uint32_t images, std::uint32_t features,
                                      std::uint64_t seed) {
  TrainingPool pool;
  for (std::uint32_t i = 0; i < images; ++i) {
    Rng rng(seed ^ (0x1000ull + i));
    DescriptorSet set(DType::f32, dim);
    set.reserve(features);
    std::vector<float> row(dim);
    for (std::uint32_t f = 0; f < features; ++f) {
      double norm_sq = 0.0;
      for (auto& v : row) {
        const double x = rng.normal();
        v = static_cast<float>(x);
        norm_sq += x * x;
      }
      const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
      for (auto& v : row) v *= inv;
      set.push_back_f32(row);
    }
    pool.images.push_back(std::move(set));
  }
  Vocabulary vocab = build_vocabulary(pool, k, levels, seed);
  return assign_idf(std::move(vocab), pool.images);
}

}  // namespace

void register_bench(CLI::App& app) {
  CLI::App* cmd = app.add_subcommand("bench", "micro-benchmarks");
  cmd->require_subcommand(1);

  auto dopts = std::make_shared<BenchDistanceOpts>();
  CLI::App* dist = cmd->add_subcommand("distances", "L2 vs Hamming per-pair cost");
  dist->add_option("--dim-float", dopts->dim_float, "float descriptor dimension");
  dist->add_option("--bits", dopts->bits, "binary descriptor bits (multiple of 8)");
  dist->add_option("--pairs", dopts->pairs, "number of random pairs");
  dist->add_option("--seed", dopts->seed, "seed");
  dist->add_option("--summary", dopts->summary, "output JSON summary");
  dist->callback([dopts]() {
    const DistanceBenchReport r =
        bench_distances(dopts->dim_float, dopts->bits, dopts->pairs, dopts->seed);
    std::cout << "bench distances: l2(" << dopts->dim_float << ") " << r.l2_ns_per_op
              << " ns/op, hamming(" << dopts->bits << ") " << r.hamming_ns_per_op
              << " ns/op, ratio " << r.ratio << "x\n";
    if (!dopts->summary.empty()) {
      write_json(json{{"dim_float", dopts->dim_float},
                      {"bits_binary", dopts->bits},
                      {"pairs", dopts->pairs},
                      {"l2_ns_per_op", r.l2_ns_per_op},
                      {"hamming_ns_per_op", r.hamming_ns_per_op},
                      {"ratio", r.ratio}},
                 dopts->summary);
    }
  });

  auto bopts = std::make_shared<BenchDatabaseOpts>();
  CLI::App* database = cmd->add_subcommand("database", "single-threaded add+query throughput");
  database->add_option("--entries", bopts->entries, "database size");
  database->add_option("--features", bopts->features, "descriptors per image");
  database->add_option("--k", bopts->k, "vocabulary branching factor");
  database->add_option("--levels", bopts->levels, "vocabulary depth");
  database->add_option("--dim", bopts->dim, "descriptor dimension");
  database->add_option("--train-images", bopts->train_images,
                       "synthetic images used to train the throwaway vocabulary");
  database->add_option("--seed", bopts->seed, "seed");
  database->add_option("--vocab", bopts->vocab, "use an existing vocabulary instead of training");
  database->add_option("--summary", bopts->summary, "output JSON summary");
  database->callback([bopts]() {
    Vocabulary vocab;
    if (!bopts->vocab.empty()) {
      vocab = load_vocabulary(bopts->vocab);
    } else {
      std::cout << "bench database: training throwaway k=" << bopts->k << " L=" << bopts->levels
                << " vocabulary...\n";
      vocab = train_synthetic_vocabulary(bopts->k, bopts->levels, bopts->dim,
                                         bopts->train_images, bopts->features, bopts->seed);
    }
    const DatabaseBenchReport r =
        bench_database(bopts->entries, bopts->features, vocab, bopts->seed);
    std::cout << "bench database: " << r.entries << " entries x " << r.features_per_image
              << " features: " << r.images_per_s_with_di << " images/s (direct index), "
              << r.images_per_s_without_di << " images/s (BoW only)\n";
    if (!bopts->summary.empty()) {
      write_json(json{{"entries", r.entries},
                      {"features_per_image", r.features_per_image},
                      {"images_per_s_with_di", r.images_per_s_with_di},
                      {"images_per_s_without_di", r.images_per_s_without_di},
                      {"vocab_words", vocab.word_count()}},
                 bopts->summary);
    }
  });
}

}  // namespace irloc::cli
