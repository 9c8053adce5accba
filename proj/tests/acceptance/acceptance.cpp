// Acceptance suite: end-to-end checks of the place-recognition and
// relocalization pipeline on synthetic diurnal-drift scenarios, plus the
// numeric oracles and throughput floors. Prints one [PASS]/[FAIL] line per
// criterion; exit code is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "irloc/bench.hpp"
#include "irloc/eval.hpp"
#include "irloc/map_file.hpp"
#include "irloc/reloc.hpp"
#include "irloc/rng.hpp"
#include "oracles.hpp"

using namespace irloc;

namespace {

// ---------------------------------------------------------------------------
// Shared KRI-style scenario: a circular corridor mapped with two passes per
// condition. "Day" passes sit at tau ~ 0.03 (lambda ~ 0.01); "night" passes
// at tau ~ 0.282 (lambda ~ 0.6), deep into the diurnal drift but short of
// lambda = 1, where the drift model deliberately destroys all cross-condition
// signal. Repeat passes are offset by a fraction of the frame spacing so
// revisits never coincide exactly with database frames.
// ---------------------------------------------------------------------------

constexpr double kRadiusM = 30.0;
constexpr double kDensityPerM = 40.0;
constexpr std::uint32_t kPassFrames = 150;
constexpr double kTauDay1 = 0.030, kTauDay2 = 0.035;
constexpr double kTauNight1 = 0.282, kTauNight2 = 0.285;
constexpr std::uint64_t kWorldSeed = 42;
constexpr std::size_t kQueryCount = 100;
constexpr double kTpRadiusM = 10.0;

struct Pass {
  std::vector<Observation> observations;
  std::vector<DescriptorSet> frames;
  std::vector<Eigen::Vector3d> positions;
};

Pass make_pass(const World& world, const Intrinsics& K, const DriftModel& drift,
               double arc_offset_deg, double tau, std::uint64_t obs_seed,
               double arc_span_deg = 360.0, std::uint32_t frames = kPassFrames) {
  PassParams pp;
  pp.arc_start_deg = arc_offset_deg;
  pp.arc_end_deg = arc_offset_deg + arc_span_deg;
  pp.frames = frames;
  pp.tau_start = pp.tau_end = tau;
  pp.obs_seed = obs_seed;
  Pass pass;
  pass.observations = generate_pass(world, pp, K, drift);
  for (const auto& obs : pass.observations) {
    pass.frames.push_back(obs.set);
    pass.positions.push_back(obs.truth.pose.camera_center());
  }
  return pass;
}

struct Scenario {
  World world;
  Intrinsics K;
  DriftModel drift;
  Pass day1, day2, night1, night2;
  Vocabulary vocab;
};

Scenario build_scenario(DType dtype) {
  WorldParams wp;
  wp.dtype = dtype;
  wp.dim = dtype == DType::binary ? 32 : 256;
  wp.loop_radius_m = kRadiusM;
  wp.density_per_m = kDensityPerM;
  Scenario s{generate_world(wp, kWorldSeed), default_intrinsics(), DriftModel{},
             {},  {},  {},  {},  {}};
  s.day1 = make_pass(s.world, s.K, s.drift, 0.0, kTauDay1, 101);
  s.day2 = make_pass(s.world, s.K, s.drift, 1.2, kTauDay2, 102);
  s.night1 = make_pass(s.world, s.K, s.drift, 0.6, kTauNight1, 103);
  s.night2 = make_pass(s.world, s.K, s.drift, 1.8, kTauNight2, 104);

  // The vocabulary trains on matched features of sequential pairs from one
  // day and one night pass (mixed-time training). Depth 3 keeps words coarse
  // enough to absorb a landmark's day and night appearance into one word.
  std::vector<DescriptorSet> training;
  for (const auto& f : s.day1.frames) training.push_back(f);
  for (const auto& f : s.night1.frames) training.push_back(f);
  const TrainingPool pool = build_training_pool(training, MatchParams{});
  s.vocab = assign_idf(build_vocabulary(pool, 10, 3, 7), pool.images);
  return s;
}

ImageDatabase index_pass(const Vocabulary& vocab, const Pass& pass) {
  ImageDatabase db(vocabulary_fingerprint(vocab));
  for (const auto& obs : pass.observations) {
    auto [bow, fv] = transform(vocab, obs.set, 2);
    db.add(std::move(bow), std::move(fv), obs.set);
  }
  return db;
}

RecallResult protocol_cell(const Vocabulary& vocab, const ImageDatabase& db,
                           const Pass& db_pass, const Pass& query_pass) {
  const auto indices = uniform_indices(query_pass.frames.size(), kQueryCount);
  LoopParams params;  // best-candidate protocol; dislocal/min_inliers set by the harness
  const auto records = run_recall_protocol(vocab, db, db_pass.positions, query_pass.frames,
                                           query_pass.positions, indices, params, kTpRadiusM);
  return recall_at_full_precision(records);
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::ostringstream&)> run;
};

bool check(std::ostringstream& log, bool ok, const std::string& what) {
  log << "    " << (ok ? "ok  " : "FAIL") << " " << what << "\n";
  return ok;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --- criterion 1: Table II analog -----------------------------------------

bool criterion_table2(std::ostringstream& log) {
  bool ok = true;

  const Scenario f = build_scenario(DType::f32);
  const ImageDatabase f_day = index_pass(f.vocab, f.day1);
  const ImageDatabase f_night = index_pass(f.vocab, f.night1);
  const RecallResult dd = protocol_cell(f.vocab, f_day, f.day1, f.day2);
  const RecallResult nn = protocol_cell(f.vocab, f_night, f.night1, f.night2);
  const RecallResult dn = protocol_cell(f.vocab, f_day, f.day1, f.night2);
  const RecallResult nd = protocol_cell(f.vocab, f_night, f.night1, f.day2);
  log << "    float vocabulary (" << f.vocab.word_count() << " words):"
      << " day-day " << fmt(dd.recall) << ", night-night " << fmt(nn.recall)
      << ", day db <- night " << fmt(dn.recall) << ", night db <- day " << fmt(nd.recall)
      << " (paper: 1.00 / 1.00 / 0.93 / 0.91)\n";
  ok &= check(log, dd.recall == 1.0, "float same-condition day-day recall = 1.00");
  ok &= check(log, nn.recall == 1.0, "float same-condition night-night recall = 1.00");
  ok &= check(log, dn.recall >= 0.85, "float cross-condition day<-night recall >= 0.85");
  ok &= check(log, nd.recall >= 0.85, "float cross-condition night<-day recall >= 0.85");

  const Scenario b = build_scenario(DType::binary);
  const ImageDatabase b_day = index_pass(b.vocab, b.day1);
  const ImageDatabase b_night = index_pass(b.vocab, b.night1);
  const RecallResult bdd = protocol_cell(b.vocab, b_day, b.day1, b.day2);
  const RecallResult bnn = protocol_cell(b.vocab, b_night, b.night1, b.night2);
  const RecallResult bdn = protocol_cell(b.vocab, b_day, b.day1, b.night2);
  const RecallResult bnd = protocol_cell(b.vocab, b_night, b.night1, b.day2);
  log << "    binary vocabulary (" << b.vocab.word_count() << " words):"
      << " day-day " << fmt(bdd.recall) << ", night-night " << fmt(bnn.recall)
      << ", day db <- night " << fmt(bdn.recall) << ", night db <- day " << fmt(bnd.recall)
      << " (paper ORB: 1.00 / 0.97 / 0.12 / 0.10)\n";
  ok &= check(log, bdn.recall <= 0.30, "binary cross-condition day<-night recall <= 0.30");
  ok &= check(log, bnd.recall <= 0.30, "binary cross-condition night<-day recall <= 0.30");
  return ok;
}

// --- criterion 2: database throughput --------------------------------------

Vocabulary synthetic_vocab_k10_l5(std::uint32_t dim, std::uint32_t images,
                                  std::uint32_t features, std::uint64_t seed) {
  TrainingPool pool;
  for (std::uint32_t i = 0; i < images; ++i) {
    Rng rng(seed ^ (0x2000ull + i));
    DescriptorSet set(DType::f32, dim);
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
  Vocabulary vocab = build_vocabulary(pool, 10, 5, seed);
  return assign_idf(std::move(vocab), pool.images);
}

bool criterion_throughput(std::ostringstream& log) {
  const Vocabulary vocab = synthetic_vocab_k10_l5(256, 40, 500, 11);
  const DatabaseBenchReport r = bench_database(1000, 500, vocab, 1);
  log << "    " << r.images_per_s_with_di << " images/s with direct index, "
      << r.images_per_s_without_di << " images/s BoW-only (floor: 50)\n";
  bool ok = check(log, r.images_per_s_with_di >= 50.0,
                  "add+query throughput >= 50 images/s single-threaded");
  ok &= check(log, r.images_per_s_without_di > 0.0, "BoW-only throughput reported");
  return ok;
}

// --- criterion 3: distance cost ratio ---------------------------------------

bool criterion_distance_ratio(std::ostringstream& log) {
  const DistanceBenchReport r = bench_distances(256, 256, 1u << 20, 1);
  log << "    l2(256f) " << fmt(r.l2_ns_per_op) << " ns, hamming(256b) "
      << fmt(r.hamming_ns_per_op) << " ns, ratio " << fmt(r.ratio)
      << "x (paper reports ~80x on its hardware; floor asserted: 5x)\n";
  return check(log, r.ratio >= 5.0, "L2 per-pair cost >= 5x Hamming");
}

// --- criterion 4: geometry oracles ------------------------------------------

bool criterion_geometry(std::ostringstream& log) {
  bool ok = true;
  {
    const auto scene = oracles::make_two_view_scene(80, 91);
    const Eigen::Matrix3d F = fundamental_8point(scene.pairs);
    double max_residual = 0.0;
    for (const auto& [x1, x2] : scene.pairs)
      max_residual = std::max(max_residual, epipolar_error(F, x1, x2));
    log << "    eight-point max Sampson residual " << fmt(max_residual) << "\n";
    ok &= check(log, max_residual < 1e-6, "noiseless 8-point residual < 1e-6");
  }
  {
    Pose truth;
    truth.rotation =
        Eigen::AngleAxisd(10.0 * M_PI / 180.0, Eigen::Vector3d::UnitY()).toRotationMatrix();
    truth.translation = Eigen::Vector3d(1.0, 0.0, -5.0);
    const Intrinsics K{400.0, 410.0, 320.0, 256.0};
    Rng rng(92);
    std::vector<Correspondence3D2D> corrs;
    for (int i = 0; i < 60; ++i) {
      const Eigen::Vector3d p(-2 + 4 * rng.next_double(), -2 + 4 * rng.next_double(),
                              7 + 5 * rng.next_double());
      corrs.push_back({p, K.project(truth.to_camera(p))});
    }
    const Pose pose = pnp_solve(corrs, K);
    const double rot_err = (pose.rotation - truth.rotation).norm();
    const double t_err = (pose.translation - truth.translation).norm();
    log << "    pnp noiseless: rotation error " << fmt(rot_err) << ", translation error "
        << fmt(t_err) << "\n";
    ok &= check(log, rot_err < 1e-6 && t_err < 1e-6, "noiseless PnP within 1e-6");

    // 30% outliers under RANSAC
    auto poisoned = corrs;
    for (std::size_t i = 0; i < corrs.size() * 3 / 7; ++i) {
      poisoned.push_back({Eigen::Vector3d(-2 + 4 * rng.next_double(),
                                          -2 + 4 * rng.next_double(),
                                          7 + 5 * rng.next_double()),
                          Eigen::Vector2d(rng.next_double() * 640, rng.next_double() * 512)});
    }
    const PnpRansacResult res = ransac_pnp(poisoned, K, 2.0, 1000, 93);
    const double rr = (res.pose.rotation - truth.rotation).norm();
    const double tr = (res.pose.translation - truth.translation).norm();
    log << "    pnp with 30% outliers: rotation error " << fmt(rr) << ", translation error "
        << fmt(tr) << ", inliers " << res.inlier_count << "/" << poisoned.size() << "\n";
    ok &= check(log, rr < 1e-3 && tr < 1e-3, "RANSAC PnP within 1e-3 at 30% outliers");
  }
  {
    Rng rng(94);
    const Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
    const double scale = 0.5 + 2.0 * rng.next_double();
    const Eigen::Matrix3d R = Eigen::AngleAxisd(1.1, axis.normalized()).toRotationMatrix();
    const Eigen::Vector3d t(rng.normal(), rng.normal(), rng.normal());
    std::vector<Eigen::Vector3d> src, dst;
    for (int i = 0; i < 20; ++i) {
      src.emplace_back(rng.normal() * 2, rng.normal() * 2, rng.normal() * 2);
      dst.push_back(scale * (R * src.back()) + t);
    }
    const SimTransform T = umeyama(src, dst, true);
    const double err = std::abs(T.scale - scale) + (T.rotation - R).norm() +
                       (T.translation - t).norm();
    log << "    umeyama similarity recovery error " << fmt(err) << "\n";
    ok &= check(log, err < 1e-9, "Umeyama recovers a random similarity within 1e-9");
  }
  return ok;
}

// --- criterion 5: relocalization analog --------------------------------------

bool criterion_relocalization(std::ostringstream& log) {
  // Day-built map over 300 of 360 degrees with mild linear drift; night
  // queries cover the full loop. "In map" means within the 10 m gate of some
  // map keyframe's true position.
  WorldParams wp;
  wp.dtype = DType::f32;
  wp.dim = 256;
  wp.loop_radius_m = kRadiusM;
  wp.density_per_m = kDensityPerM;
  const World world = generate_world(wp, kWorldSeed);
  const Intrinsics K = default_intrinsics();
  const DriftModel drift;

  const Pass day = make_pass(world, K, drift, 0.0, kTauDay1, 201, 300.0, 130);
  const Pass night = make_pass(world, K, drift, 0.9, kTauNight1, 202, 360.0, 160);

  std::vector<DescriptorSet> training;
  for (const auto& f : day.frames) training.push_back(f);
  for (const auto& f : night.frames) training.push_back(f);
  const TrainingPool pool = build_training_pool(training, MatchParams{});
  const Vocabulary vocab = assign_idf(build_vocabulary(pool, 10, 3, 7), pool.images);

  const Eigen::Vector3d drift_total(1.0, 0.5, 0.2);
  const MapFile map = build_map(day.observations, world, vocab, 2, drift_total);

  std::map<std::uint32_t, Eigen::Vector3d> map_gt, query_gt;
  for (std::uint32_t i = 0; i < day.positions.size(); ++i) map_gt[i] = day.positions[i];
  for (std::uint32_t i = 0; i < night.positions.size(); ++i) query_gt[i] = night.positions[i];

  RelocParams params;
  params.loop.alpha = 0.1;  // tuned harness parameter (cross-condition eta floor)
  params.min_inliers = 12;
  params.gate_m = 10.0;
  params.window = 10;

  const auto records =
      relocalize_sequence(map, vocab, night.frames, params, map_gt, query_gt, K);

  const double diameter = 2.0 * kRadiusM;
  std::size_t in_map = 0, in_map_accepted = 0, outside_accepted = 0;
  double max_error = 0.0;
  bool all_errors_small = true;
  for (const auto& r : records) {
    double nearest = 1e30;
    for (const auto& [kf, p] : map_gt)
      nearest = std::min(nearest, (p - query_gt.at(r.query_id)).norm());
    const bool is_in_map = nearest <= params.gate_m;
    if (is_in_map) ++in_map;
    if (r.status == RelocStatus::accepted) {
      if (!is_in_map) {
        ++outside_accepted;
      } else {
        ++in_map_accepted;
        max_error = std::max(max_error, *r.error_m);
        if (*r.error_m >= 0.01 * diameter) all_errors_small = false;
      }
    }
  }
  log << "    " << in_map_accepted << "/" << in_map << " in-map night queries accepted, "
      << outside_accepted << " accepted outside the mapped section, max aligned error "
      << fmt(max_error) << " m (ceiling " << fmt(0.01 * diameter) << " m)\n";
  bool ok = check(log,
                  in_map > 0 && static_cast<double>(in_map_accepted) >=
                                    0.9 * static_cast<double>(in_map),
                  ">= 90% of in-map night frames relocalize");
  ok &= check(log, all_errors_small, "every accepted error < 1% of trajectory diameter");
  ok &= check(log, outside_accepted == 0, "zero accepted frames outside the mapped section");
  return ok;
}

// --- criterion 6: oracle equivalence -----------------------------------------

bool criterion_oracles(std::ostringstream& log) {
  bool ok = true;
  {
    Rng rng(61);
    std::size_t compared = 0;
    bool all_match = true;
    for (int trial = 0; trial < 200; ++trial) {
      ImageDatabase db;
      const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.next_below(30));
      const std::uint32_t words = 4 + static_cast<std::uint32_t>(rng.next_below(40));
      for (std::uint32_t i = 0; i < n; ++i) {
        BowVector bow;
        for (std::uint32_t w = 0; w < words; ++w)
          if (rng.next_double() < 0.3) bow.entries.emplace_back(w, 0.05 + rng.next_double());
        if (bow.entries.empty()) bow.entries.emplace_back(0, 1.0);
        double norm = 0.0;
        for (auto& [w, v] : bow.entries) norm += v;
        for (auto& [w, v] : bow.entries) v /= norm;
        db.add(std::move(bow), FeatureVector{});
      }
      const BowVector query = db.bow(static_cast<std::uint32_t>(rng.next_below(n)));
      const auto fast = db.query(query, n);
      const auto brute = oracles::brute_force_query(db, query, n, std::nullopt);
      if (fast.size() != brute.size()) {
        all_match = false;
        break;
      }
      for (std::size_t i = 0; i < fast.size(); ++i) {
        const bool same = fast[i].entry_id == brute[i].entry_id;
        const bool tie = std::abs(fast[i].score - brute[i].score) < 1e-9;
        if (!(same || tie) || std::abs(fast[i].score - brute[i].score) > 1e-9) {
          all_match = false;
          break;
        }
        ++compared;
      }
    }
    log << "    " << compared << " ranked results compared across 200 random databases\n";
    ok &= check(log, all_match, "inverted-file ranking equals brute-force scoring");
  }
  {
    bool bound_ok = true, monotone_ok = true, fixed_point_ok = true;
    int optimal_hits = 0, trials = 60;
    Rng rng(62);
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint32_t n = 4 + static_cast<std::uint32_t>(rng.next_below(5));  // <= 8
      const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.next_below(2));
      DescriptorSet descs(DType::f32, 2);
      for (std::uint32_t i = 0; i < n; ++i) {
        descs.push_back_f32(std::vector<float>{static_cast<float>(rng.normal() * 3),
                                               static_cast<float>(rng.normal() * 3)});
      }
      const KmeansResult res = kmeans(descs, k, trial);
      for (std::size_t i = 1; i < res.iteration_cost.size(); ++i)
        if (res.iteration_cost[i] > res.iteration_cost[i - 1] + 1e-9) monotone_ok = false;

      const double opt = oracles::exhaustive_kmeans_cost(descs, k);
      const double got = oracles::clustering_cost(descs, res.assignment, res.centers);
      if (got < opt - 1e-9) bound_ok = false;  // impossible below the optimum
      if (got <= opt + 1e-9) ++optimal_hits;

      // Lloyd's guarantee is a fixed point: every point sits with its
      // nearest center and every center is its cluster's centroid
      for (std::uint32_t i = 0; i < n && fixed_point_ok; ++i) {
        const double assigned = l2_distance_sq(descs.f32_row(i),
                                               res.centers.f32_row(res.assignment[i]));
        for (std::size_t c = 0; c < res.centers.size(); ++c)
          if (l2_distance_sq(descs.f32_row(i), res.centers.f32_row(c)) < assigned - 1e-9)
            fixed_point_ok = false;
      }
      for (std::size_t c = 0; c < res.centers.size() && fixed_point_ok; ++c) {
        std::vector<std::uint32_t> members;
        for (std::uint32_t i = 0; i < n; ++i)
          if (res.assignment[i] == c) members.push_back(i);
        if (members.empty()) {
          fixed_point_ok = false;
          break;
        }
        const Descriptor mean = centroid(descs, members);
        for (std::uint32_t d = 0; d < descs.dim(); ++d)
          if (std::abs(mean.values()[d] - res.centers.f32_row(c)[d]) > 1e-6)
            fixed_point_ok = false;
      }
    }
    log << "    kmeans hit the exhaustive optimum on " << optimal_hits << "/" << trials
        << " small instances\n";
    ok &= check(log, monotone_ok, "kmeans cost non-increasing per iteration on every run");
    ok &= check(log, bound_ok, "kmeans cost never beats the exhaustive optimum");
    ok &= check(log, fixed_point_ok,
                "kmeans results are Lloyd fixed points (local-optimum guarantee)");
    ok &= check(log, optimal_hits >= trials / 2,
                "kmeans reaches the exhaustive optimum on most small instances");
  }
  return ok;
}

// --- criterion 7: determinism -------------------------------------------------

bool criterion_determinism(std::ostringstream& log) {
  bool ok = true;
  WorldParams wp;
  wp.dtype = DType::f32;
  wp.dim = 64;
  wp.loop_radius_m = 20.0;
  wp.density_per_m = 25.0;

  const auto produce = [&]() {
    const World world = generate_world(wp, 555);
    const Intrinsics K = default_intrinsics();
    const DriftModel drift;
    const Pass pass = make_pass(world, K, drift, 0.0, 0.05, 556, 360.0, 60);
    const TrainingPool pool = build_training_pool(pass.frames, MatchParams{});
    const Vocabulary vocab = assign_idf(build_vocabulary(pool, 8, 2, 557), pool.images);
    ImageDatabase db(vocabulary_fingerprint(vocab));
    for (const auto& obs : pass.observations) {
      auto [bow, fv] = transform(vocab, obs.set, 2);
      db.add(std::move(bow), std::move(fv), obs.set);
    }
    const MapFile map = build_map(pass.observations, world, vocab, 2, {0.5, 0.2, 0.1});

    struct Artifacts {
      std::vector<std::uint8_t> vocab_bytes, db_bytes, frame0;
      std::vector<std::uint8_t> map_bytes;
    } a;
    a.vocab_bytes = serialize_vocabulary(vocab);
    a.db_bytes = serialize_database(db);
    a.frame0 = serialize_descriptor_set(pass.frames[0]);
    // serialize the map through its file writer
    const auto tmp = std::filesystem::temp_directory_path() / "irloc_acc_det.map";
    save_map(map, tmp);
    std::ifstream in(tmp, std::ios::binary);
    a.map_bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return a;
  };

  const auto first = produce();
  const auto second = produce();
  ok &= check(log, first.vocab_bytes == second.vocab_bytes,
              "vocabulary bytes identical across two runs");
  ok &= check(log, first.db_bytes == second.db_bytes, "database bytes identical");
  ok &= check(log, first.map_bytes == second.map_bytes, "map bytes identical");
  ok &= check(log, first.frame0 == second.frame0, "generated descriptor sets identical");
  log << "    vocabulary " << first.vocab_bytes.size() << " B, database "
      << first.db_bytes.size() << " B, map " << first.map_bytes.size() << " B\n";
  return ok;
}

// --- criterion 8: timelapse analog ---------------------------------------------

bool criterion_timelapse(std::ostringstream& log) {
  const auto run_pipeline = [&](DType dtype) {
    WorldParams wp;
    wp.dtype = dtype;
    wp.dim = dtype == DType::binary ? 32 : 256;
    wp.loop_radius_m = kRadiusM;
    wp.density_per_m = kDensityPerM;
    const World world = generate_world(wp, 81);
    const Intrinsics K = default_intrinsics();
    const DriftModel drift;
    PassParams pp;
    pp.arc_start_deg = pp.arc_end_deg = 45.0;  // static camera
    pp.frames = 25;                            // tau grid includes 0.5 exactly
    pp.tau_start = 0.0;
    pp.tau_end = 1.0;
    pp.obs_seed = 82;
    const auto frames = generate_pass(world, pp, K, drift);
    return std::pair{timelapse_eval(world, frames, 0, K, 3.0), frames.size()};
  };

  const auto [float_counts, nf] = run_pipeline(DType::f32);
  const auto [binary_counts, nb] = run_pipeline(DType::binary);
  const std::size_t mid = 12;  // tau = 0.5 on the 25-point grid
  const std::size_t edge = 1;  // first nonzero tau

  log << "    float: edge " << float_counts[edge].correct_matches << ", mid "
      << float_counts[mid].correct_matches << ", end "
      << float_counts.back().correct_matches << "; binary: edge "
      << binary_counts[edge].correct_matches << ", mid "
      << binary_counts[mid].correct_matches << ", end "
      << binary_counts.back().correct_matches << "\n";

  bool ok = check(log,
                  float_counts[mid].correct_matches >= 3 * binary_counts[mid].correct_matches,
                  "float correct matches at lambda = 1 >= 3x binary");
  ok &= check(log,
              float_counts[mid].correct_matches < float_counts[edge].correct_matches / 2 &&
                  float_counts[mid].correct_matches < float_counts.back().correct_matches / 2,
              "float count curve dips at mid-tau");
  ok &= check(log,
              binary_counts[mid].correct_matches < binary_counts[edge].correct_matches / 2 &&
                  binary_counts[mid].correct_matches <
                      binary_counts.back().correct_matches / 2,
              "binary count curve dips at mid-tau");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria = {
      {1, "Table II analog: recall at 100% precision across day/night passes",
       criterion_table2},
      {2, "database add+query throughput >= 50 images/s", criterion_throughput},
      {3, "L2 vs Hamming per-pair cost ratio >= 5x", criterion_distance_ratio},
      {4, "geometry oracles: 8-point, PnP, RANSAC PnP, Umeyama", criterion_geometry},
      {5, "relocalization analog: night pass against the day map", criterion_relocalization},
      {6, "oracle equivalence: inverted file and kmeans", criterion_oracles},
      {7, "determinism: identical seeds give byte-identical artifacts", criterion_determinism},
      {8, "timelapse analog: match-count curve over the day", criterion_timelapse},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    std::ostringstream log;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = c.run(log);
    } catch (const std::exception& e) {
      log << "    exception: " << e.what() << "\n";
      ok = false;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name << " ("
              << std::fixed << std::setprecision(1) << elapsed << "s)\n"
              << log.str();
    std::cout.unsetf(std::ios::fixed);
    if (!ok) ++failures;
  }
  if (failures == 0)
    std::cout << "all acceptance criteria passed\n";
  else
    std::cout << failures << " acceptance criteria FAILED\n";
  return failures;
}
