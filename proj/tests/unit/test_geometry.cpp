#include <doctest.h>

#include "irloc/geometry.hpp"
#include "irloc/rng.hpp"
#include "oracles.hpp"

using namespace irloc;

namespace {

Pose make_pose(double angle_deg, const Eigen::Vector3d& axis, const Eigen::Vector3d& t) {
  Pose p;
  p.rotation = Eigen::AngleAxisd(angle_deg * M_PI / 180.0, axis.normalized()).toRotationMatrix();
  p.translation = t;
  return p;
}

std::vector<Correspondence3D2D> project_scene(const oracles::TwoViewScene& scene,
                                              const Pose& pose) {
  std::vector<Correspondence3D2D> corrs;
  for (const auto& p : scene.points)
    corrs.push_back({p, scene.K.project(pose.to_camera(p))});
  return corrs;
}

double rotation_error(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (a - b).norm();
}

}  // namespace

TEST_SUITE("geometry.fundamental") {

TEST_CASE("noiseless two-view scene: max Sampson residual < 1e-6") {
  const auto scene = oracles::make_two_view_scene(60, 1);
  const Eigen::Matrix3d F = fundamental_8point(scene.pairs);
  double max_residual = 0.0;
  for (const auto& [x1, x2] : scene.pairs)
    max_residual = std::max(max_residual, epipolar_error(F, x1, x2));
  CHECK(max_residual < 1e-6);
  // and the estimate agrees with the ground-truth matrix
  CHECK((F - scene.F).norm() < 1e-6);
}

TEST_CASE("pure x-translation with identity intrinsics gives F ~ [[0,0,0],[0,0,-1],[0,1,0]]") {
  // identity K: work directly in normalized coordinates
  const Intrinsics K{1.0, 1.0, 0.0, 0.0};
  Pose cam1;  // identity
  Pose cam2;
  cam2.translation = Eigen::Vector3d(1.0, 0.0, 0.0);
  Rng rng(2);
  std::vector<PixelPair> pairs;
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d p(-1 + 2 * rng.next_double(), -1 + 2 * rng.next_double(),
                            3 + 4 * rng.next_double());
    pairs.emplace_back(K.project(cam1.to_camera(p)), K.project(cam2.to_camera(p)));
  }
  const Eigen::Matrix3d F = fundamental_8point(pairs);
  Eigen::Matrix3d expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  expected /= expected.norm();
  // proportional up to sign (the +-1 entries tie for largest magnitude)
  CHECK(std::min((F - expected).norm(), (F + expected).norm()) < 1e-9);
}

TEST_CASE("returned F always has rank 2") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scene = oracles::make_two_view_scene(25, seed);
    const Eigen::Matrix3d F = fundamental_8point(scene.pairs);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(F);
    CHECK(svd.singularValues()(2) < 1e-12);
    CHECK(std::abs(F.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("fewer than 8 pairs or degenerate input are typed errors") {
  const auto scene = oracles::make_two_view_scene(7, 3);
  CHECK_THROWS_AS(fundamental_8point(scene.pairs), DegenerateInput);
  // all-coincident points
  std::vector<PixelPair> same(10, {Eigen::Vector2d(5, 5), Eigen::Vector2d(7, 7)});
  CHECK_THROWS_AS(fundamental_8point(same), DegenerateInput);
}

TEST_CASE("epipolar_error: zero on exact geometry, symmetric under transpose") {
  const auto scene = oracles::make_two_view_scene(30, 4);
  for (const auto& [x1, x2] : scene.pairs) {
    CHECK(epipolar_error(scene.F, x1, x2) < 1e-10);
    const Eigen::Vector2d off = x2 + Eigen::Vector2d(1.7, -0.6);
    CHECK(epipolar_error(scene.F, x1, off) ==
          doctest::Approx(epipolar_error(scene.F.transpose(), off, x1)).epsilon(1e-12));
  }
}

TEST_CASE("epipolar_error matches direct formula evaluation on perturbed points") {
  const auto scene = oracles::make_two_view_scene(30, 5);
  Rng rng(6);
  for (const auto& [x1, x2] : scene.pairs) {
    const Eigen::Vector2d noisy = x2 + Eigen::Vector2d(rng.normal(), rng.normal());
    CHECK(epipolar_error(scene.F, x1, noisy) ==
          doctest::Approx(oracles::sampson_direct(scene.F, x1, noisy)).epsilon(1e-12));
  }
}

TEST_CASE("ransac: all noiseless inliers stay inliers") {
  const auto scene = oracles::make_two_view_scene(100, 7);
  const auto res = ransac_fundamental(scene.pairs, 2.0, 500, 1);
  CHECK(res.inlier_count == scene.pairs.size());
}

TEST_CASE("ransac: 70 inliers + 30 uniform outliers, >=95% recovered, zero outliers admitted") {
  auto scene = oracles::make_two_view_scene(70, 8);
  Rng rng(9);
  std::vector<PixelPair> pairs = scene.pairs;
  // planted outliers are rejection-sampled off the true epipolar geometry;
  // a random pair falling inside the inlier band is indistinguishable from
  // a real correspondence and no estimator could reject it
  while (pairs.size() < 100) {
    const PixelPair p{Eigen::Vector2d(rng.next_double() * 640, rng.next_double() * 512),
                      Eigen::Vector2d(rng.next_double() * 640, rng.next_double() * 512)};
    if (epipolar_error(scene.F, p.first, p.second) > 5.0) pairs.push_back(p);
  }
  const auto res = ransac_fundamental(pairs, 2.0, 1000, 2);
  std::size_t true_inliers = 0, admitted_outliers = 0;
  for (std::size_t i = 0; i < 70; ++i) true_inliers += res.inlier_mask[i];
  for (std::size_t i = 70; i < 100; ++i) admitted_outliers += res.inlier_mask[i];
  CHECK(true_inliers >= 67);  // >= 95% of 70
  CHECK(admitted_outliers == 0);
  // RANSAC postcondition: every flagged inlier satisfies the threshold
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (res.inlier_mask[i])
      CHECK(epipolar_error(res.model, pairs[i].first, pairs[i].second) <= 2.0);
}

TEST_CASE("ransac: same seed gives identical masks") {
  auto scene = oracles::make_two_view_scene(40, 10);
  Rng rng(11);
  for (int i = 0; i < 10; ++i)
    scene.pairs.emplace_back(Eigen::Vector2d(rng.next_double() * 640, rng.next_double() * 512),
                             Eigen::Vector2d(rng.next_double() * 640, rng.next_double() * 512));
  const auto a = ransac_fundamental(scene.pairs, 2.0, 300, 42);
  const auto b = ransac_fundamental(scene.pairs, 2.0, 300, 42);
  CHECK(a.inlier_mask == b.inlier_mask);
  CHECK((a.model - b.model).norm() == 0.0);
}

}  // TEST_SUITE

TEST_SUITE("geometry.pnp") {

TEST_CASE("identity pose recovered within 1e-9") {
  const auto scene = oracles::make_two_view_scene(40, 12);
  const Pose identity;
  const auto corrs = project_scene(scene, identity);
  const Pose pose = pnp_solve(corrs, scene.K);
  CHECK(rotation_error(pose.rotation, Eigen::Matrix3d::Identity()) < 1e-9);
  CHECK(pose.translation.norm() < 1e-9);
}

TEST_CASE("known pose (10 deg about y, t=(1,0,-5)) recovered within 1e-6 noiseless") {
  const Pose truth = make_pose(10.0, {0, 1, 0}, {1.0, 0.0, -5.0});
  const Intrinsics K{400.0, 410.0, 320.0, 256.0};
  // deep cloud so every point stays in front of this camera
  Rng rng(13);
  std::vector<Correspondence3D2D> corrs;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d p(-2 + 4 * rng.next_double(), -2 + 4 * rng.next_double(),
                            7 + 5 * rng.next_double());
    corrs.push_back({p, K.project(truth.to_camera(p))});
  }
  const Pose pose = pnp_solve(corrs, K);
  CHECK(rotation_error(pose.rotation, truth.rotation) < 1e-6);
  CHECK((pose.translation - truth.translation).norm() < 1e-6);
}

TEST_CASE("solution reprojects no worse than the ground-truth pose under 0.5 px noise") {
  const auto scene = oracles::make_two_view_scene(60, 14);
  const Pose truth = make_pose(-7.0, {0.3, 1, 0.1}, {0.4, -0.2, 1.0});
  auto corrs = project_scene(scene, truth);
  Rng rng(15);
  for (auto& c : corrs) c.pixel += 0.5 * Eigen::Vector2d(rng.normal(), rng.normal());

  const Pose pose = pnp_solve(corrs, scene.K);
  // the solver minimizes the total squared reprojection error
  const auto reproj_cost = [&](const Pose& p) {
    double sum = 0.0;
    for (const auto& c : corrs)
      sum += (scene.K.project(p.to_camera(c.point)) - c.pixel).squaredNorm();
    return sum / static_cast<double>(corrs.size());
  };
  CHECK(reproj_cost(pose) <= reproj_cost(truth) + 1e-12);
}

TEST_CASE("rotation stays orthonormal") {
  const auto scene = oracles::make_two_view_scene(30, 16);
  const Pose truth = make_pose(25.0, {1, 0.5, 0.2}, {0.5, 0.1, 2.0});
  const Pose pose = pnp_solve(project_scene(scene, truth), scene.K);
  CHECK((pose.rotation * pose.rotation.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-9);
  CHECK(pose.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fewer than 6 or coplanar correspondences are typed errors") {
  const auto scene = oracles::make_two_view_scene(5, 17);
  CHECK_THROWS_AS(pnp_solve(project_scene(scene, Pose{}), scene.K), DegenerateInput);

  // coplanar points make the 11-dof DLT rank-deficient
  std::vector<Correspondence3D2D> coplanar;
  Rng rng(18);
  const Intrinsics K{400, 400, 320, 256};
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d p(-1 + 2 * rng.next_double(), -1 + 2 * rng.next_double(), 5.0);
    coplanar.push_back({p, K.project(p)});
  }
  CHECK_THROWS_AS(pnp_solve(coplanar, K), DegenerateInput);
}

TEST_CASE("ransac_pnp: all-inlier input matches pnp_solve within 1e-9") {
  const auto scene = oracles::make_two_view_scene(40, 19);
  const Pose truth = make_pose(12.0, {0, 1, 0.3}, {0.2, 0.4, 1.2});
  const auto corrs = project_scene(scene, truth);
  const Pose direct = pnp_solve(corrs, scene.K);
  const auto res = ransac_pnp(corrs, scene.K, 2.0, 300, 3);
  CHECK(res.inlier_count == corrs.size());
  CHECK(rotation_error(res.pose.rotation, direct.rotation) < 1e-9);
  CHECK((res.pose.translation - direct.translation).norm() < 1e-9);
}

TEST_CASE("ransac_pnp: 30% outliers, pose within 1e-3, planted outliers rejected") {
  const auto scene = oracles::make_two_view_scene(70, 20);
  const Pose truth = make_pose(-15.0, {0.2, 1, 0}, {0.6, -0.3, 1.8});
  auto corrs = project_scene(scene, truth);
  const std::size_t n_inliers = corrs.size();
  Rng rng(21);
  for (std::size_t i = 0; i < n_inliers * 3 / 7; ++i) {
    Correspondence3D2D bad;
    bad.point = Eigen::Vector3d(-2 + 4 * rng.next_double(), -2 + 4 * rng.next_double(),
                                4 + 6 * rng.next_double());
    bad.pixel = Eigen::Vector2d(rng.next_double() * 640, rng.next_double() * 512);
    corrs.push_back(bad);
  }
  const auto res = ransac_pnp(corrs, scene.K, 2.0, 1000, 4);
  CHECK(rotation_error(res.pose.rotation, truth.rotation) < 1e-3);
  CHECK((res.pose.translation - truth.translation).norm() < 1e-3);
  for (std::size_t i = n_inliers; i < corrs.size(); ++i) CHECK(res.inlier_mask[i] == 0);
}

TEST_CASE("ransac_pnp: inlier count non-increasing as the threshold tightens") {
  const auto scene = oracles::make_two_view_scene(50, 22);
  const Pose truth = make_pose(8.0, {0, 1, 0}, {0.3, 0.2, 1.0});
  auto corrs = project_scene(scene, truth);
  Rng rng(23);
  for (auto& c : corrs) c.pixel += 1.5 * Eigen::Vector2d(rng.normal(), rng.normal());
  std::size_t previous = corrs.size() + 1;
  for (double threshold : {8.0, 4.0, 2.0, 1.0, 0.5}) {
    const auto res = ransac_pnp(corrs, scene.K, threshold, 500, 5);
    CHECK(res.inlier_count <= previous);
    previous = res.inlier_count;
  }
}

}  // TEST_SUITE

TEST_SUITE("geometry.alignment") {

TEST_CASE("umeyama: dst == src gives identity with scale 1") {
  Rng rng(24);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 10; ++i)
    pts.emplace_back(rng.normal(), rng.normal(), rng.normal());
  const SimTransform T = umeyama(pts, pts, true);
  CHECK(T.scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rotation_error(T.rotation, Eigen::Matrix3d::Identity()) < 1e-12);
  CHECK(T.translation.norm() < 1e-12);
}

TEST_CASE("umeyama: analytic similarity (s=2, Rz(90), t=(1,2,3)) recovered within 1e-9") {
  const Eigen::Matrix3d Rz = Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()).matrix();
  const Eigen::Vector3d t(1, 2, 3);
  Rng rng(25);
  std::vector<Eigen::Vector3d> src, dst;
  for (int i = 0; i < 12; ++i) {
    src.emplace_back(rng.normal(), rng.normal(), rng.normal());
    dst.push_back(2.0 * (Rz * src.back()) + t);
  }
  const SimTransform T = umeyama(src, dst, true);
  CHECK(T.scale == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rotation_error(T.rotation, Rz) < 1e-9);
  CHECK((T.translation - t).norm() < 1e-9);
}

TEST_CASE("umeyama: random rigid transform with 1e-6 noise recovered within 1e-4") {
  for (std::uint64_t seed = 30; seed < 35; ++seed) {
    Rng rng(seed);
    const Pose rigid = make_pose(20.0 + 50.0 * rng.next_double(),
                                 {rng.normal(), rng.normal(), rng.normal()},
                                 {rng.normal(), rng.normal(), rng.normal()});
    std::vector<Eigen::Vector3d> src, dst;
    for (int i = 0; i < 15; ++i) {
      src.emplace_back(rng.normal() * 3, rng.normal() * 3, rng.normal() * 3);
      dst.push_back(rigid.rotation * src.back() + rigid.translation +
                    1e-6 * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
    }
    const SimTransform T = umeyama(src, dst, false);
    CHECK(rotation_error(T.rotation, rigid.rotation) < 1e-4);
    CHECK((T.translation - rigid.translation).norm() < 1e-4);

    // residual agrees with the Eigen::umeyama oracle
    const SimTransform oracle = oracles::eigen_umeyama(src, dst, false);
    double res_ours = 0.0, res_oracle = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      res_ours += (dst[i] - T.apply(src[i])).squaredNorm();
      res_oracle += (dst[i] - oracle.apply(src[i])).squaredNorm();
    }
    CHECK(res_ours == doctest::Approx(res_oracle).epsilon(1e-9));
  }
}

TEST_CASE("umeyama residual is a local (and global) minimum under random perturbation") {
  Rng rng(36);
  std::vector<Eigen::Vector3d> src, dst;
  const Pose rigid = make_pose(33.0, {0.1, 1, 0.4}, {2, -1, 0.5});
  for (int i = 0; i < 10; ++i) {
    src.emplace_back(rng.normal() * 2, rng.normal() * 2, rng.normal() * 2);
    dst.push_back(rigid.rotation * src.back() + rigid.translation +
                  0.01 * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()));
  }
  const SimTransform T = umeyama(src, dst, false);
  const auto residual = [&](const SimTransform& S) {
    double r = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i)
      r += (dst[i] - S.apply(src[i])).squaredNorm();
    return r;
  };
  const double base = residual(T);
  for (int trial = 0; trial < 1000; ++trial) {
    SimTransform perturbed = T;
    const Eigen::Vector3d dw(rng.normal(), rng.normal(), rng.normal());
    perturbed.rotation =
        Eigen::AngleAxisd(1e-3, dw.normalized()).toRotationMatrix() * T.rotation;
    perturbed.translation += 1e-3 * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    CHECK(residual(perturbed) >= base - 1e-15);
  }
}

TEST_CASE("umeyama: degenerate configurations are typed errors") {
  std::vector<Eigen::Vector3d> two = {{0, 0, 0}, {1, 1, 1}};
  CHECK_THROWS_AS(umeyama(two, two, false), DegenerateInput);
  std::vector<Eigen::Vector3d> collinear, collinear_dst;
  for (int i = 0; i < 6; ++i) {
    collinear.emplace_back(i, 2.0 * i, -i);
    collinear_dst.emplace_back(i + 1, 2.0 * i, -i);
  }
  CHECK_THROWS_AS(umeyama(collinear, collinear_dst, false), DegenerateInput);
}

TEST_CASE("local_alignment_error: exact map and pose give zero") {
  std::map<std::uint32_t, Eigen::Vector3d> positions;
  Rng rng(37);
  for (std::uint32_t i = 0; i < 30; ++i)
    positions[i] = Eigen::Vector3d(std::cos(i * 0.2) * 10, std::sin(i * 0.2) * 10,
                                   0.1 * rng.normal());
  Pose reloc;
  reloc.translation = -positions[15];  // camera center at keyframe 15, identity rotation
  const double err = local_alignment_error(positions, positions, 15, 10, reloc, positions[15]);
  CHECK(err < 1e-9);
}

TEST_CASE("local_alignment_error: global map transform is removed") {
  std::map<std::uint32_t, Eigen::Vector3d> gt, map;
  const Pose global = make_pose(40.0, {0.3, 0.2, 1}, {5, -3, 2});
  for (std::uint32_t i = 0; i < 40; ++i) {
    const Eigen::Vector3d p(std::cos(i * 0.15) * 8, std::sin(i * 0.15) * 8, 0.05 * i);
    gt[i] = p;
    map[i] = global.rotation * p + global.translation;
  }
  // relocalized camera center consistent with the transformed map at kf 20
  Pose reloc;
  reloc.translation = -map[20];
  const double err = local_alignment_error(map, gt, 20, 10, reloc, gt[20]);
  CHECK(err < 1e-9);
}

TEST_CASE("local_alignment_error: linear drift scenario matches the scripted oracle") {
  std::map<std::uint32_t, Eigen::Vector3d> gt, map;
  const Eigen::Vector3d drift_dir(0.03, 0.015, 0.005);
  for (std::uint32_t i = 0; i < 60; ++i) {
    const Eigen::Vector3d p(std::cos(i * 0.1) * 12, std::sin(i * 0.1) * 12, 0.0);
    gt[i] = p;
    map[i] = p + drift_dir * static_cast<double>(i);
  }
  Pose reloc;
  reloc.translation = -(map[30] + Eigen::Vector3d(0.2, -0.1, 0.05));
  const Eigen::Vector3d query_gt = gt[30] + Eigen::Vector3d(0.1, 0.0, 0.0);

  const double ours = local_alignment_error(map, gt, 30, 10, reloc, query_gt);
  const double oracle = oracles::scripted_alignment_error(map, gt, 30, 10, reloc, query_gt);
  CHECK(ours == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("local_alignment_error: too few window keyframes is a typed error") {
  std::map<std::uint32_t, Eigen::Vector3d> gt, map;
  map[0] = gt[0] = {0, 0, 0};
  map[1] = gt[1] = {1, 0, 0};
  map[50] = gt[50] = {5, 5, 0};
  CHECK_THROWS_AS(local_alignment_error(map, gt, 0, 2, Pose{}, gt[0]), DegenerateInput);
}

}  // TEST_SUITE
