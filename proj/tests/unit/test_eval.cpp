#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "irloc/eval.hpp"
#include "irloc/manifest.hpp"
#include "irloc/rng.hpp"

using namespace irloc;

namespace {

EvalRecord rec(std::uint32_t inliers, bool tp) {
  EvalRecord r;
  r.inlier_count = inliers;
  r.is_true_positive = tp;
  return r;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("recall: all true positives -> threshold = min inliers, recall 1") {
  const std::vector<EvalRecord> records = {rec(30, true), rec(12, true), rec(55, true)};
  const RecallResult r = recall_at_full_precision(records);
  CHECK(r.threshold == 12);
  CHECK(r.recall == doctest::Approx(1.0));
}

TEST_CASE("recall: single false positive with the highest inlier count forces recall 0") {
  const std::vector<EvalRecord> records = {rec(30, true), rec(12, true), rec(60, false)};
  const RecallResult r = recall_at_full_precision(records);
  CHECK(r.threshold == 61);
  CHECK(r.recall == doctest::Approx(0.0));
}

TEST_CASE("recall: threshold clears mid-range false positives") {
  const std::vector<EvalRecord> records = {rec(50, true),  rec(45, true), rec(20, false),
                                           rec(18, true),  rec(5, false), rec(60, true)};
  const RecallResult r = recall_at_full_precision(records);
  CHECK(r.threshold == 21);
  // survivors: 50, 45, 60 -> 3 of 6 queries
  CHECK(r.recall == doctest::Approx(0.5));
  for (const auto& record : records)
    if (!record.is_true_positive) CHECK(record.inlier_count < r.threshold);
}

TEST_CASE("recall: empty records are a typed error") {
  CHECK_THROWS_AS(recall_at_full_precision({}), InvalidArgument);
}

TEST_CASE("uniform_indices spreads evenly and clamps") {
  const auto idx = uniform_indices(120, 100);
  REQUIRE(idx.size() == 100);
  CHECK(idx.front() == 0);
  CHECK(idx.back() < 120);
  for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i] > idx[i - 1]);
  CHECK(uniform_indices(5, 100).size() == 5);
  CHECK(uniform_indices(0, 10).empty());
}

TEST_CASE("manifest: typed getters and sorted round-trip") {
  Manifest m;
  m.set("name", "scenario");
  m.set_u64("frames", 120);
  m.set_double("radius_m", 30.0);
  const auto path = std::filesystem::temp_directory_path() / "irloc_manifest.txt";
  m.save(path);
  const Manifest loaded = Manifest::load(path);
  CHECK(loaded.get("name") == "scenario");
  CHECK(loaded.get_u64("frames") == 120);
  CHECK(loaded.get_double("radius_m") == 30.0);
  CHECK_THROWS_AS(loaded.get("missing"), FormatError);
  CHECK_THROWS_AS(loaded.get_u64("name"), FormatError);
  // identical manifests serialize to identical bytes
  Manifest m2;
  m2.set_double("radius_m", 30.0);
  m2.set_u64("frames", 120);
  m2.set("name", "scenario");
  const auto path2 = std::filesystem::temp_directory_path() / "irloc_manifest2.txt";
  m2.save(path2);
  std::ifstream a(path), b(path2);
  const std::string sa{std::istreambuf_iterator<char>(a), std::istreambuf_iterator<char>()};
  const std::string sb{std::istreambuf_iterator<char>(b), std::istreambuf_iterator<char>()};
  CHECK(sa == sb);
}

}  // TEST_SUITE

TEST_SUITE("timelapse") {

namespace {

struct StaticScene {
  World world;
  Intrinsics K;
  std::vector<Observation> frames;
};

StaticScene make_static_scene(DType dtype, double sigma_obs, double pixel_noise,
                              std::uint32_t n_taus, std::uint64_t seed) {
  WorldParams wp;
  wp.dtype = dtype;
  wp.dim = dtype == DType::binary ? 16 : 32;
  wp.loop_radius_m = 15.0;
  wp.density_per_m = 25.0;
  StaticScene s{generate_world(wp, seed), default_intrinsics(), {}};
  DriftModel drift;
  drift.sigma_obs = sigma_obs;
  drift.pixel_noise = pixel_noise;
  PassParams pp;
  pp.frames = n_taus;
  pp.arc_start_deg = pp.arc_end_deg = 30.0;  // static camera
  pp.tau_start = 0.0;
  pp.tau_end = 1.0;
  pp.obs_seed = seed ^ 0xABCD;
  s.frames = generate_pass(s.world, pp, s.K, drift);
  return s;
}

}  // namespace

TEST_CASE("tau = tau0 noiseless counts every visible landmark") {
  const StaticScene s = make_static_scene(DType::f32, 0.0, 0.0, 9, 50);
  const auto counts = timelapse_eval(s.world, s.frames, 0, s.K, 3.0);
  REQUIRE(!counts.empty());
  CHECK(counts[0].correct_matches == counts[0].visible);
  CHECK(counts[0].visible > 30);
}

TEST_CASE("px_tol = 0 with pixel noise gives near-zero counts") {
  const StaticScene s = make_static_scene(DType::f32, 0.01, 1.0, 5, 51);
  const auto counts = timelapse_eval(s.world, s.frames, 0, s.K, 0.0);
  for (const auto& c : counts)
    CHECK(c.correct_matches <= c.visible / 20);
}

TEST_CASE("count curve is symmetric around tau = 0.5 in expectation (20 seeds, 10%)") {
  // 5-point tau grid {0, 0.25, 0.5, 0.75, 1.0}: compare the mirrored pair.
  double sum_q1 = 0.0, sum_q3 = 0.0, sum_mid = 0.0, sum_end = 0.0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const StaticScene s = make_static_scene(DType::f32, 0.02, 0.3, 5, seed);
    const auto counts = timelapse_eval(s.world, s.frames, 0, s.K, 3.0);
    REQUIRE(counts.size() == 5);
    sum_q1 += counts[1].correct_matches;
    sum_mid += counts[2].correct_matches;
    sum_q3 += counts[3].correct_matches;
    sum_end += counts[4].correct_matches;
  }
  const double tol = 0.10 * std::max({sum_q1, sum_q3, 1.0});
  CHECK(std::abs(sum_q1 - sum_q3) <= tol + 40.0);  // small absolute slack for count noise
  // the curve dips in the middle and recovers at tau = 1
  CHECK(sum_mid < 0.5 * sum_q1);
  CHECK(sum_end > 0.9 * sum_q1);
}

}  // TEST_SUITE
