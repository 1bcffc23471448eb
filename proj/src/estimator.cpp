// SPDX-License-Identifier: Apache-2.0

#include "rislens/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace rislens {

namespace {

constexpr std::complex<double> kJ(0.0, 1.0);

// j^n for any integer n.
std::complex<double> jpow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// J_n(x) for any integer n, x >= 0.
double bessel_jn(int n, double x) {
  const double v = std::cyl_bessel_j(static_cast<double>(std::abs(n)), x);
  return (n < 0 && (n & 1)) ? -v : v;
}

void check_observation_shapes(const Eigen::VectorXcd& y,
                              const Eigen::MatrixXcd& W, int elements) {
  if (W.rows() != elements)
    throw std::invalid_argument("profile matrix must have one row per element");
  if (y.size() != W.cols())
    throw std::invalid_argument("observation count must match pilot count");
}

}  // namespace

double SearchGrids::theta(int k) const {
  return static_cast<double>(k) * (0.5 * kPi) / static_cast<double>(theta_bins);
}

double SearchGrids::phi(int k) const {
  return static_cast<double>(k) * (2.0 * kPi) / static_cast<double>(phi_bins);
}

double SearchGrids::dist(int k) const {
  if (d_bins == 1) return d_min;
  const double frac = static_cast<double>(k) / static_cast<double>(d_bins - 1);
  return d_min * std::pow(d_max / d_min, frac);
}

void SearchGrids::validate() const {
  if (theta_bins < 1 || phi_bins < 1 || d_bins < 1)
    throw std::invalid_argument("search grids need at least one bin each");
  if (!(d_min > 0.0) || !(d_max >= d_min))
    throw std::invalid_argument("need 0 < d_min <= d_max");
}

Eigen::MatrixXcd bessel_basis(double theta, const RisArray& ris,
                              double wavelength, int order_cap) {
  if (order_cap < 0) throw std::invalid_argument("order cap must be >= 0");
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  const double kappa = 2.0 * kPi / wavelength;
  const double st = std::sin(theta);
  const int m = ris.size();
  Eigen::MatrixXcd basis(2 * order_cap + 1, m);
  for (int i = 0; i < m; ++i) {
    const double x = kappa * ris.radial(i) * st;
    for (int n = -order_cap; n <= order_cap; ++n) {
      basis(n + order_cap, i) =
          jpow(n) * bessel_jn(n, x) *
          std::exp(-kJ * (static_cast<double>(n) * ris.azimuth(i)));
    }
  }
  return basis;
}

std::complex<double> gain_estimate(const Eigen::VectorXcd& y,
                                   const Eigen::MatrixXcd& W,
                                   const Eigen::VectorXcd& a,
                                   double symbol_energy) {
  const Eigen::VectorXcd c = W.transpose() * a;
  const double cc = c.squaredNorm();
  if (!(cc > 0.0)) return {0.0, 0.0};
  return c.dot(y) / (std::sqrt(symbol_energy) * cc);
}

double ml_objective(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                    const Eigen::VectorXcd& a) {
  const Eigen::VectorXcd c = W.transpose() * a;
  const double cc = c.squaredNorm();
  const double yy = y.squaredNorm();
  if (!(cc > 0.0)) return yy;
  return yy - std::norm(c.dot(y)) / cc;
}

Localizer::Localizer(const Scenario& sc, const RisArray& ris,
                     const SearchGrids& grids, const LocalizeOptions& opts)
    : sc_(sc), ris_(ris), grids_(grids), opts_(opts) {
  grids_.validate();
  if (opts_.order_cap < 0)
    throw std::invalid_argument("order cap must be >= 0");
  if (ris_.size() < 1) throw std::invalid_argument("array is empty");
  kappa_ = 2.0 * kPi / sc_.wavelength;

  // Group elements by their (exactly repeated) distance from the center so
  // the per-elevation Bessel tables only cover distinct radii.
  std::map<double, int> index_of;
  for (int i = 0; i < ris_.size(); ++i) index_of.emplace(ris_.radial(i), 0);
  int next = 0;
  for (auto& [r, idx] : index_of) idx = next++;
  radii_.resize(next);
  for (const auto& [r, idx] : index_of) radii_(idx) = r;
  radius_group_.resize(ris_.size());
  for (int i = 0; i < ris_.size(); ++i)
    radius_group_(i) = index_of.at(ris_.radial(i));

  const int n_rows = 2 * opts_.order_cap + 1;
  harmonics_.resize(ris_.size(), n_rows);
  for (int i = 0; i < ris_.size(); ++i)
    for (int n = -opts_.order_cap; n <= opts_.order_cap; ++n)
      harmonics_(i, n + opts_.order_cap) =
          std::exp(-kJ * (static_cast<double>(n) * ris_.azimuth(i)));

  jn_.resize(grids_.theta_bins);
  for (int k = 0; k < grids_.theta_bins; ++k) {
    const double st = std::sin(grids_.theta(k));
    Eigen::MatrixXcd table(n_rows, next);
    for (int g = 0; g < next; ++g) {
      const double x = kappa_ * radii_(g) * st;
      for (int n = -opts_.order_cap; n <= opts_.order_cap; ++n)
        table(n + opts_.order_cap, g) = jpow(n) * bessel_jn(n, x);
    }
    jn_[k] = std::move(table);
  }

  phi_table_.resize(n_rows, grids_.phi_bins);
  for (int k = 0; k < grids_.phi_bins; ++k)
    for (int n = -opts_.order_cap; n <= opts_.order_cap; ++n)
      phi_table_(n + opts_.order_cap, k) =
          std::exp(kJ * (static_cast<double>(n) * grids_.phi(k)));

  d_grid_.resize(grids_.d_bins);
  for (int k = 0; k < grids_.d_bins; ++k) d_grid_(k) = grids_.dist(k);

  r2_ = ris_.positions.rowwise().squaredNorm();
}

namespace {

// S_n[g, t] = sum over elements in radius group g of W[i, t] e^{-j n psi_i};
// with these, the projected basis at any elevation bin costs 2N+1 small
// matrix-vector products instead of an M-sized contraction.
std::vector<Eigen::MatrixXcd> build_s_tables(const Eigen::MatrixXcd& W,
                                             const Eigen::MatrixXcd& harmonics,
                                             const Eigen::VectorXi& group,
                                             int n_radii) {
  const int n_rows = static_cast<int>(harmonics.cols());
  const int t_count = static_cast<int>(W.cols());
  std::vector<Eigen::MatrixXcd> s(n_rows);
  for (int n = 0; n < n_rows; ++n)
    s[n] = Eigen::MatrixXcd::Zero(n_radii, t_count);
  for (int n = 0; n < n_rows; ++n) {
    for (int t = 0; t < t_count; ++t) {
      auto col = s[n].col(t);
      for (int i = 0; i < W.rows(); ++i)
        col(group(i)) += W(i, t) * harmonics(i, n);
    }
  }
  return s;
}

}  // namespace

Eigen::MatrixXcd Localizer::basis_at_bin(const Eigen::MatrixXcd* s_tables,
                                         int theta_bin) const {
  const int n_rows = 2 * opts_.order_cap + 1;
  const int t_count = static_cast<int>(s_tables[0].cols());
  Eigen::MatrixXcd basis(t_count, n_rows);
  for (int n = 0; n < n_rows; ++n)
    basis.col(n) = s_tables[n].transpose() * jn_[theta_bin].row(n).transpose();
  return basis;
}

double Localizer::stage1_elevation(const Eigen::VectorXcd& y,
                                   const Eigen::MatrixXcd& W, int* bin) const {
  check_observation_shapes(y, W, ris_.size());
  const int n_rows = 2 * opts_.order_cap + 1;
  if (W.cols() < n_rows)
    throw std::invalid_argument(
        "need at least 2*order_cap + 1 pilots for the elevation stage");
  const auto s = build_s_tables(W, harmonics_, radius_group_,
                                static_cast<int>(radii_.size()));
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grids_.theta_bins; ++k) {
    const Eigen::MatrixXcd basis = basis_at_bin(s.data(), k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    Eigen::VectorXcd projected = svd.matrixU().adjoint() * y;
    for (Eigen::Index r = 0; r < sv.size(); ++r)
      projected(r) = (sv(r) > cutoff) ? projected(r) / sv(r)
                                      : std::complex<double>(0.0, 0.0);
    const Eigen::VectorXcd coeffs = svd.matrixV() * projected;
    const double cost = (y - basis * coeffs).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  if (bin) *bin = best;
  return grids_.theta(best);
}

double Localizer::stage2_azimuth(const Eigen::VectorXcd& y,
                                 const Eigen::MatrixXcd& W, double theta_hat,
                                 int* bin) const {
  check_observation_shapes(y, W, ris_.size());
  // Build the basis at the given elevation directly (it need not be a bin).
  const Eigen::MatrixXcd basis =
      W.transpose() *
      bessel_basis(theta_hat, ris_, sc_.wavelength, opts_.order_cap)
          .transpose();
  const Eigen::MatrixXcd beams = basis * phi_table_;  // T x phi_bins
  const Eigen::VectorXd num = (beams.adjoint() * y).cwiseAbs2();
  const Eigen::VectorXd den = beams.colwise().squaredNorm();
  const double yy = y.squaredNorm();
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grids_.phi_bins; ++k) {
    const double cost = (den(k) > 0.0) ? yy - num(k) / den(k) : yy;
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  if (bin) *bin = best;
  return grids_.phi(best);
}

Localizer::RayResult Localizer::scan_ray(const Eigen::VectorXcd& y,
                                         const Eigen::MatrixXcd& W,
                                         double theta, double phi) const {
  const double yy = y.squaredNorm();
  RayResult result;
  if (opts_.stage3_model == SteeringModel::kPlanar) {
    // The planar model has no distance dependence: every bin scores the same.
    const SphericalCoords c{1.0, theta, phi};
    result.cost = ml_objective(y, W, cm1_steering(c, ris_, sc_.wavelength));
    result.d_bin = 0;
    result.flat = true;
    return result;
  }
  const double st = std::sin(theta);
  const Eigen::Vector3d u(st * std::cos(phi), st * std::sin(phi),
                          std::cos(theta));
  const Eigen::VectorXd mdot = ris_.positions * u;
  result.cost = std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  constexpr int kChunk = 64;
  Eigen::MatrixXcd steer(ris_.size(), kChunk);
  for (int k0 = 0; k0 < grids_.d_bins; k0 += kChunk) {
    const int cols = std::min(kChunk, grids_.d_bins - k0);
    for (int j = 0; j < cols; ++j) {
      const double d = d_grid_(k0 + j);
      const Eigen::ArrayXd dist =
          (d * d - 2.0 * d * mdot.array() + r2_.array()).sqrt();
      steer.col(j) = ((-kJ * kappa_) * (dist - d)).exp().matrix();
    }
    const Eigen::MatrixXcd beams = W.transpose() * steer.leftCols(cols);
    const Eigen::VectorXd num = (beams.adjoint() * y).cwiseAbs2();
    const Eigen::VectorXd den = beams.colwise().squaredNorm();
    for (int j = 0; j < cols; ++j) {
      const double cost = (den(j) > 0.0) ? yy - num(j) / den(j) : yy;
      if (cost < result.cost) {
        result.cost = cost;
        result.d_bin = k0 + j;
      }
      worst = std::max(worst, cost);
    }
  }
  // Spread relative to the observation energy; a degenerate ray (or y = 0)
  // shows no distance contrast at all.
  result.flat = !(worst - result.cost > 1e-12 * yy);
  return result;
}

Estimate Localizer::stage3_distance(const Eigen::VectorXcd& y,
                                    const Eigen::MatrixXcd& W,
                                    double theta_hat, double phi_hat) const {
  check_observation_shapes(y, W, ris_.size());
  const RayResult ray = scan_ray(y, W, theta_hat, phi_hat);
  return finish(y, W, theta_hat, phi_hat, -1, -1, ray);
}

Estimate Localizer::finish(const Eigen::VectorXcd& y,
                           const Eigen::MatrixXcd& W, double theta, double phi,
                           int theta_bin, int phi_bin,
                           const RayResult& ray) const {
  Estimate est;
  est.theta_hat = theta;
  est.phi_hat = phi;
  est.theta_bin = theta_bin;
  est.phi_bin = phi_bin;
  est.d_bin = ray.d_bin;
  est.d_hat = d_grid_(ray.d_bin);
  est.residual = ray.cost;
  est.low_confidence = ray.flat;
  est.p_hat = cartesian_from_spherical({est.d_hat, theta, phi}, sc_.wavelength);
  const Eigen::VectorXcd a =
      (opts_.stage3_model == SteeringModel::kPlanar)
          ? cm1_steering({est.d_hat, theta, phi}, ris_, sc_.wavelength)
          : cm2_steering(est.p_hat, ris_, sc_.wavelength);
  est.alpha_hat = gain_estimate(y, W, a, sc_.symbol_energy);
  return est;
}

Estimate Localizer::operator()(const Eigen::VectorXcd& y,
                               const Eigen::MatrixXcd& W) const {
  check_observation_shapes(y, W, ris_.size());
  int kth = 0, kph = 0;
  stage1_elevation(y, W, &kth);
  stage2_azimuth(y, W, grids_.theta(kth), &kph);

  std::map<long long, RayResult> visited;
  const auto ray_at = [&](int kt, int kp) -> const RayResult& {
    const long long key =
        static_cast<long long>(kt) * grids_.phi_bins + kp;
    auto it = visited.find(key);
    if (it == visited.end())
      it = visited.emplace(key, scan_ray(y, W, grids_.theta(kt),
                                         grids_.phi(kp))).first;
    return it->second;
  };

  RayResult current = ray_at(kth, kph);
  if (opts_.local_search) {
    // Exact-objective hill climb over neighboring angle bins: the truncated
    // harmonic basis occasionally picks an adjacent (or worse) bin, and the
    // full steering model separates those cleanly.
    for (int move = 0; move < opts_.max_moves; ++move) {
      int best_kt = kth, best_kp = kph;
      double best_cost = current.cost;
      const int kt_lo = std::max(kth - 1, 0);
      const int kt_hi = std::min(kth + 1, grids_.theta_bins - 1);
      for (int kt = kt_lo; kt <= kt_hi; ++kt) {
        if (kt == kth) continue;
        const RayResult& r = ray_at(kt, kph);
        if (r.cost < best_cost) {
          best_cost = r.cost;
          best_kt = kt;
          best_kp = kph;
        }
      }
      for (int dp = -1; dp <= 1; dp += 2) {
        const int kp = (kph + dp + grids_.phi_bins) % grids_.phi_bins;
        if (kp == kph) continue;
        const RayResult& r = ray_at(kth, kp);
        if (r.cost < best_cost) {
          best_cost = r.cost;
          best_kt = kth;
          best_kp = kp;
        }
      }
      if (best_kt == kth && best_kp == kph) break;
      kth = best_kt;
      kph = best_kp;
      current = ray_at(kth, kph);
    }
  }

  Estimate est =
      finish(y, W, grids_.theta(kth), grids_.phi(kph), kth, kph, current);

  if (opts_.zoom && opts_.stage3_model == SteeringModel::kCurved) {
    // Two-level local refinement of the exact objective around the best bin.
    // Estimates leave the grid only when this flag is set.
    double th = est.theta_hat, ph = est.phi_hat;
    double logd = std::log(est.d_hat);
    const double dth0 = 0.5 * (0.5 * kPi) / grids_.theta_bins;
    const double dph0 = 0.5 * (2.0 * kPi) / grids_.phi_bins;
    const double dld0 =
        (grids_.d_bins > 1)
            ? 0.5 * std::log(grids_.d_max / grids_.d_min) / (grids_.d_bins - 1)
            : 0.0;
    double best_cost = est.residual;
    for (int level = 0; level < 2; ++level) {
      const double scale = (level == 0) ? 1.0 : 0.5;
      double cand_th = th, cand_ph = ph, cand_ld = logd;
      for (int it = -1; it <= 1; ++it) {
        for (int ip = -1; ip <= 1; ++ip) {
          for (int id = -1; id <= 1; ++id) {
            if (it == 0 && ip == 0 && id == 0) continue;
            const double t = std::clamp(th + it * dth0 * scale, 0.0, 0.5 * kPi);
            const double p = ph + ip * dph0 * scale;
            const double ld = std::clamp(logd + id * dld0 * scale,
                                         std::log(grids_.d_min),
                                         std::log(grids_.d_max));
            const CartesianPosition pos =
                cartesian_from_spherical({std::exp(ld), t, p}, sc_.wavelength);
            const double cost =
                ml_objective(y, W, cm2_steering(pos, ris_, sc_.wavelength));
            if (cost < best_cost) {
              best_cost = cost;
              cand_th = t;
              cand_ph = p;
              cand_ld = ld;
            }
          }
        }
      }
      th = cand_th;
      ph = cand_ph;
      logd = cand_ld;
    }
    if (best_cost < est.residual) {
      est.theta_hat = th;
      est.phi_hat = (ph < 0.0) ? ph + 2.0 * kPi
                               : std::fmod(ph, 2.0 * kPi);
      est.d_hat = std::exp(logd);
      est.residual = best_cost;
      est.p_hat = cartesian_from_spherical({est.d_hat, est.theta_hat,
                                            est.phi_hat},
                                           sc_.wavelength);
      est.alpha_hat = gain_estimate(
          y, W, cm2_steering(est.p_hat, ris_, sc_.wavelength),
          sc_.symbol_energy);
    }
  }
  return est;
}

Estimate localize(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                  const Scenario& sc, const RisArray& ris,
                  const SearchGrids& grids, const LocalizeOptions& opts) {
  const Localizer loc(sc, ris, grids, opts);
  return loc(y, W);
}

}  // namespace rislens
