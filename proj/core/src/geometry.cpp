#include "irloc/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "irloc/rng.hpp"

namespace irloc {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = skew(w);
  if (theta < 1e-12) return Eigen::Matrix3d::Identity() + W;
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Eigen::Matrix3d::Identity() + a * W + b * W * W;
}

/// Hartley normalization: centroid at the origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(std::span<const PixelPair> pairs, bool second) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pairs) mean += second ? p.second : p.first;
  mean /= static_cast<double>(pairs.size());
  double scale = 0.0;
  for (const auto& p : pairs) scale += ((second ? p.second : p.first) - mean).norm();
  scale /= static_cast<double>(pairs.size());
  if (scale < 1e-12) throw DegenerateInput("fundamental_8point: coincident points");
  const double s = std::sqrt(2.0) / scale;
  Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
  T(0, 0) = s;
  T(1, 1) = s;
  T(0, 2) = -s * mean.x();
  T(1, 2) = -s * mean.y();
  return T;
}

void fix_sign_and_scale(Eigen::Matrix3d& F) {
  F /= F.norm();
  double best = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (std::abs(F(r, c)) > std::abs(best)) best = F(r, c);
  if (best < 0.0) F = -F;
}

std::size_t adaptive_iterations(double inlier_ratio, int sample_size, std::uint32_t max_iters) {
  // 99% confidence of drawing at least one all-inlier sample.
  if (inlier_ratio <= 0.0) return max_iters;
  const double w = std::min(inlier_ratio, 1.0 - 1e-12);
  const double denom = std::log(1.0 - std::pow(w, sample_size));
  if (denom >= 0.0) return 1;
  const double n = std::log(0.01) / denom;
  if (n >= static_cast<double>(max_iters)) return max_iters;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(n)));
}

/// First `size` entries of a partially shuffled index array.
std::vector<std::uint32_t> sample_indices(std::vector<std::uint32_t>& pool, std::size_t size,
                                          Rng& rng) {
  for (std::size_t j = 0; j < size; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng.next_below(pool.size() - j));
    std::swap(pool[j], pool[r]);
  }
  return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size)};
}

}  // namespace

Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

Eigen::Matrix3d fundamental_8point(std::span<const PixelPair> pairs) {
  if (pairs.size() < 8)
    throw DegenerateInput("fundamental_8point: need at least 8 correspondences, got " +
                          std::to_string(pairs.size()));
  const Eigen::Matrix3d T1 = normalizing_transform(pairs, false);
  const Eigen::Matrix3d T2 = normalizing_transform(pairs, true);

  Eigen::MatrixXd A(pairs.size(), 9);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Eigen::Vector3d p1 = T1 * pairs[i].first.homogeneous();
    const Eigen::Vector3d p2 = T2 * pairs[i].second.homogeneous();
    const double x1 = p1.x(), y1 = p1.y(), x2 = p2.x(), y2 = p2.y();
    A.row(static_cast<Eigen::Index>(i)) << x2 * x1, x2 * y1, x2, y2 * x1, y2 * y1, y2, x1, y1,
        1.0;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A one-dimensional nullspace needs the 8 leading singular values nonzero.
  if (sv(7) < 1e-12 * sv(0))
    throw DegenerateInput("fundamental_8point: rank-deficient design matrix");
  const Eigen::VectorXd f = svd.matrixV().col(8);
  Eigen::Matrix3d Fn;
  Fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

  Eigen::JacobiSVD<Eigen::Matrix3d> fsvd(Fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d s = fsvd.singularValues();
  s(2) = 0.0;
  Fn = fsvd.matrixU() * s.asDiagonal() * fsvd.matrixV().transpose();

  Eigen::Matrix3d F = T2.transpose() * Fn * T1;
  fix_sign_and_scale(F);
  return F;
}

double epipolar_error(const Eigen::Matrix3d& F, const Eigen::Vector2d& x1,
                      const Eigen::Vector2d& x2) {
  const Eigen::Vector3d p1 = x1.homogeneous();
  const Eigen::Vector3d p2 = x2.homogeneous();
  const Eigen::Vector3d Fp1 = F * p1;
  const Eigen::Vector3d Ftp2 = F.transpose() * p2;
  const double e = p2.dot(Fp1);
  const double denom =
      Fp1.x() * Fp1.x() + Fp1.y() * Fp1.y() + Ftp2.x() * Ftp2.x() + Ftp2.y() * Ftp2.y();
  if (denom <= 0.0) return 0.0;
  return std::abs(e) / std::sqrt(denom);
}

FundamentalRansacResult ransac_fundamental(std::span<const PixelPair> pairs, double threshold_px,
                                           std::uint32_t max_iters, std::uint64_t seed) {
  if (pairs.size() < 8)
    throw DegenerateInput("ransac_fundamental: need at least 8 correspondences, got " +
                          std::to_string(pairs.size()));
  const std::size_t n = pairs.size();
  Rng rng(seed);
  std::vector<std::uint32_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);

  const auto count_inliers = [&](const Eigen::Matrix3d& F, std::vector<std::uint8_t>& mask) {
    std::size_t count = 0;
    mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (epipolar_error(F, pairs[i].first, pairs[i].second) <= threshold_px) {
        mask[i] = 1;
        ++count;
      }
    }
    return count;
  };

  FundamentalRansacResult best;
  std::vector<std::uint8_t> mask;
  std::size_t needed = max_iters;
  std::vector<PixelPair> sample(8);
  for (std::size_t iter = 0; iter < needed; ++iter) {
    const auto idx = sample_indices(pool, 8, rng);
    for (std::size_t j = 0; j < 8; ++j) sample[j] = pairs[idx[j]];
    Eigen::Matrix3d F;
    try {
      F = fundamental_8point(sample);
    } catch (const DegenerateInput&) {
      continue;
    }
    const std::size_t count = count_inliers(F, mask);
    if (count > best.inlier_count) {
      best.model = F;
      best.inlier_count = count;
      best.inlier_mask = mask;
      needed = std::min<std::size_t>(
          max_iters,
          adaptive_iterations(static_cast<double>(count) / static_cast<double>(n), 8, max_iters));
    }
  }
  if (best.inlier_count == 0)
    throw DegenerateInput("ransac_fundamental: no model found (all samples degenerate)");

  if (best.inlier_count >= 8) {
    std::vector<PixelPair> inliers;
    inliers.reserve(best.inlier_count);
    for (std::size_t i = 0; i < n; ++i)
      if (best.inlier_mask[i]) inliers.push_back(pairs[i]);
    try {
      const Eigen::Matrix3d refined = fundamental_8point(inliers);
      const std::size_t count = count_inliers(refined, mask);
      if (count >= best.inlier_count) {
        best.model = refined;
        best.inlier_count = count;
        best.inlier_mask = mask;
      }
    } catch (const DegenerateInput&) {
      // keep the sample model
    }
  }
  return best;
}

namespace {

double reprojection_cost(std::span<const Correspondence3D2D> corrs, const Intrinsics& K,
                         const Pose& pose) {
  double cost = 0.0;
  for (const auto& c : corrs) {
    const Eigen::Vector3d x = pose.to_camera(c.point);
    if (x.z() <= 1e-12) return std::numeric_limits<double>::infinity();
    cost += (K.project(x) - c.pixel).squaredNorm();
  }
  return cost;
}

Pose pnp_dlt(std::span<const Correspondence3D2D> corrs, const Intrinsics& K) {
  const std::size_t n = corrs.size();
  Eigen::MatrixXd A(2 * n, 12);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d X = corrs[i].point;
    const double mx = (corrs[i].pixel.x() - K.cx) / K.fx;
    const double my = (corrs[i].pixel.y() - K.cy) / K.fy;
    const Eigen::Index r = static_cast<Eigen::Index>(2 * i);
    A.row(r) << X.x(), X.y(), X.z(), 1, 0, 0, 0, 0, -mx * X.x(), -mx * X.y(), -mx * X.z(), -mx;
    A.row(r + 1) << 0, 0, 0, 0, X.x(), X.y(), X.z(), 1, -my * X.x(), -my * X.y(), -my * X.z(),
        -my;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(10) < 1e-12 * sv(0))
    throw DegenerateInput("pnp_solve: degenerate correspondences (coplanar or coincident)");
  const Eigen::VectorXd p = svd.matrixV().col(11);

  Eigen::Matrix3d M;
  M << p(0), p(1), p(2), p(4), p(5), p(6), p(8), p(9), p(10);
  Eigen::Vector3d b(p(3), p(7), p(11));
  if (M.determinant() < 0.0) {
    M = -M;
    b = -b;
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> msvd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double scale = msvd.singularValues().mean();
  if (scale < 1e-15) throw DegenerateInput("pnp_solve: zero-scale projection matrix");
  Pose pose;
  pose.rotation = msvd.matrixU() * msvd.matrixV().transpose();
  pose.translation = b / scale;
  return pose;
}

}  // namespace

Pose pnp_solve(std::span<const Correspondence3D2D> corrs, const Intrinsics& K) {
  if (corrs.size() < 6)
    throw DegenerateInput("pnp_solve: need at least 6 correspondences, got " +
                          std::to_string(corrs.size()));
  Pose pose = pnp_dlt(corrs, K);

  // Gauss-Newton on (rotation, translation) with step halving. The update is
  // R <- exp(dw) R, t <- t + dt, so d(x_cam)/dw = -[R X]^ and d(x_cam)/dt = I.
  double cost = reprojection_cost(corrs, K, pose);
  if (!std::isfinite(cost)) throw NonConvergence("pnp_solve: points behind camera", cost);
  constexpr int kMaxIters = 100;
  double last_rel_improvement = 0.0;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    Eigen::Matrix<double, 6, 6> H = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& c : corrs) {
      const Eigen::Vector3d x = pose.to_camera(c.point);
      const double z = x.z();
      const Eigen::Vector2d r = K.project(x) - c.pixel;
      Eigen::Matrix<double, 2, 3> Jproj;
      Jproj << K.fx / z, 0, -K.fx * x.x() / (z * z), 0, K.fy / z, -K.fy * x.y() / (z * z);
      Eigen::Matrix<double, 2, 6> J;
      J.block<2, 3>(0, 0) = -Jproj * skew(x - pose.translation);
      J.block<2, 3>(0, 3) = Jproj;
      H += J.transpose() * J;
      g += J.transpose() * r;
    }
    Eigen::Matrix<double, 6, 1> delta = H.ldlt().solve(-g);
    if (!delta.allFinite()) throw NonConvergence("pnp_solve: singular normal equations", cost);
    if (delta.norm() < 1e-14) break;

    double step = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 25; ++halving) {
      Pose trial;
      trial.rotation = exp_so3(step * delta.head<3>()) * pose.rotation;
      trial.translation = pose.translation + step * delta.tail<3>();
      const double trial_cost = reprojection_cost(corrs, K, trial);
      if (trial_cost < cost) {
        last_rel_improvement = (cost - trial_cost) / std::max(cost, 1e-300);
        pose = trial;
        cost = trial_cost;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;  // local minimum at numeric precision
    if (last_rel_improvement < 1e-15) break;
    if (iter == kMaxIters - 1 && last_rel_improvement > 1e-9)
      throw NonConvergence("pnp_solve: Gauss-Newton did not converge", std::sqrt(cost));
  }
  pose.rotation = orthonormalized(pose.rotation);
  return pose;
}

PnpRansacResult ransac_pnp(std::span<const Correspondence3D2D> corrs, const Intrinsics& K,
                           double threshold_px, std::uint32_t max_iters, std::uint64_t seed) {
  if (corrs.size() < 6)
    throw DegenerateInput("ransac_pnp: need at least 6 correspondences, got " +
                          std::to_string(corrs.size()));
  const std::size_t n = corrs.size();
  Rng rng(seed);
  std::vector<std::uint32_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);

  const auto count_inliers = [&](const Pose& pose, std::vector<std::uint8_t>& mask) {
    std::size_t count = 0;
    mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector3d x = pose.to_camera(corrs[i].point);
      if (x.z() <= 1e-12) continue;
      if ((K.project(x) - corrs[i].pixel).norm() <= threshold_px) {
        mask[i] = 1;
        ++count;
      }
    }
    return count;
  };

  PnpRansacResult best;
  bool found = false;
  std::vector<std::uint8_t> mask;
  std::vector<Correspondence3D2D> sample(6);
  std::size_t needed = max_iters;
  for (std::size_t iter = 0; iter < needed; ++iter) {
    const auto idx = sample_indices(pool, 6, rng);
    for (std::size_t j = 0; j < 6; ++j) sample[j] = corrs[idx[j]];
    Pose pose;
    try {
      pose = pnp_solve(sample, K);
    } catch (const Error&) {
      continue;
    }
    const std::size_t count = count_inliers(pose, mask);
    if (count > best.inlier_count || !found) {
      found = true;
      best.pose = pose;
      best.inlier_count = count;
      best.inlier_mask = mask;
      needed = std::min<std::size_t>(
          max_iters,
          adaptive_iterations(static_cast<double>(count) / static_cast<double>(n), 6, max_iters));
    }
  }
  if (!found) throw DegenerateInput("ransac_pnp: no model found (all samples degenerate)");

  if (best.inlier_count >= 6) {
    std::vector<Correspondence3D2D> inliers;
    inliers.reserve(best.inlier_count);
    for (std::size_t i = 0; i < n; ++i)
      if (best.inlier_mask[i]) inliers.push_back(corrs[i]);
    try {
      const Pose refined = pnp_solve(inliers, K);
      const std::size_t count = count_inliers(refined, mask);
      if (count >= best.inlier_count) {
        best.pose = refined;
        best.inlier_count = count;
        best.inlier_mask = mask;
      }
    } catch (const Error&) {
      // keep the sample model
    }
  }
  return best;
}

SimTransform umeyama(std::span<const Eigen::Vector3d> src, std::span<const Eigen::Vector3d> dst,
                     bool with_scale) {
  if (src.size() != dst.size())
    throw InvalidArgument("umeyama: point counts differ");
  if (src.size() < 3)
    throw DegenerateInput("umeyama: need at least 3 points, got " + std::to_string(src.size()));
  const double n = static_cast<double>(src.size());

  Eigen::Vector3d mu_s = Eigen::Vector3d::Zero(), mu_d = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= n;
  mu_d /= n;

  Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Eigen::Vector3d ds = src[i] - mu_s;
    sigma += (dst[i] - mu_d) * ds.transpose();
    var_src += ds.squaredNorm();
  }
  sigma /= n;
  var_src /= n;
  if (var_src < 1e-24) throw DegenerateInput("umeyama: source points coincide");

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv(1) < 1e-12 * std::max(sv(0), 1e-300))
    throw DegenerateInput("umeyama: degenerate (collinear) configuration");

  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) S(2, 2) = -1.0;

  SimTransform T;
  T.rotation = svd.matrixU() * S * svd.matrixV().transpose();
  T.scale = with_scale ? (sv.dot(S.diagonal())) / var_src : 1.0;
  if (T.scale <= 0.0) throw DegenerateInput("umeyama: non-positive scale");
  T.translation = mu_d - T.scale * (T.rotation * mu_s);
  return T;
}

double local_alignment_error(const std::map<std::uint32_t, Eigen::Vector3d>& map_positions,
                             const std::map<std::uint32_t, Eigen::Vector3d>& gt_positions,
                             std::uint32_t anchor_kf, std::uint32_t window, const Pose& reloc_pose,
                             const Eigen::Vector3d& query_gt) {
  const std::uint32_t lo = anchor_kf >= window ? anchor_kf - window : 0;
  const std::uint32_t hi = anchor_kf + window;  // inclusive
  std::vector<Eigen::Vector3d> src, dst;
  for (auto it = map_positions.lower_bound(lo); it != map_positions.end() && it->first <= hi;
       ++it) {
    const auto gt = gt_positions.find(it->first);
    if (gt == gt_positions.end()) continue;
    src.push_back(it->second);
    dst.push_back(gt->second);
  }
  if (src.size() < 3)
    throw DegenerateInput("local_alignment_error: fewer than 3 keyframes in window [" +
                          std::to_string(lo) + ", " + std::to_string(hi) +
                          "] present in both trajectories");
  const SimTransform align = umeyama(src, dst, /*with_scale=*/false);
  return (align.apply(reloc_pose.camera_center()) - query_gt).norm();
}

}  // namespace irloc
