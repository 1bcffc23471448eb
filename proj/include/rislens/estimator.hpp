// SPDX-License-Identifier: Apache-2.0
//
// Maximum-likelihood source localization over a fixed elevation x azimuth x
// distance search grid, split into three stages:
//   1. elevation  — project observations onto a truncated azimuthal-harmonic
//                   (Bessel) basis per elevation bin; pick the bin whose
//                   least-squares fit explains the most energy,
//   2. azimuth    — within that basis, scan the azimuth phase ramp,
//   3. distance   — scan the exact near-field steering model along the ray.
// A local re-evaluation of the exact objective on neighboring angle bins
// (on by default) removes the bin-selection errors the truncated basis makes.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rislens/channel.hpp"
#include "rislens/geometry.hpp"

namespace rislens {

// Elevation bins k*(pi/2)/theta_bins, azimuth bins k*(2*pi)/phi_bins,
// distances log-spaced over [d_min, d_max] inclusive.
struct SearchGrids {
  int theta_bins = 90;
  int phi_bins = 360;
  int d_bins = 500;
  double d_min = 0.05;
  double d_max = 20.0;

  double theta(int k) const;
  double phi(int k) const;
  double dist(int k) const;
  void validate() const;  // throws std::invalid_argument
};

// Rows n = -order_cap..order_cap of the harmonic basis at elevation theta:
// [G]_{n,i} = j^n * J_n((2*pi/lambda) * r_i * sin(theta)) * e^{-j*n*psi_i}.
// The planar steering vector factors through it as
// a(theta, phi)_i = sum_n [G]_{n,i} * e^{j*n*phi} up to the truncation error.
Eigen::MatrixXcd bessel_basis(double theta, const RisArray& ris,
                              double wavelength, int order_cap);

// alpha_hat = c^H y / (sqrt(Es) * |c|^2) with c = W^T a. Returns 0 for a
// degenerate (all-zero) c.
std::complex<double> gain_estimate(const Eigen::VectorXcd& y,
                                   const Eigen::MatrixXcd& W,
                                   const Eigen::VectorXcd& a,
                                   double symbol_energy);

// Concentrated negative log-likelihood (up to constants):
// |y|^2 - |c^H y|^2 / |c|^2. Degenerate c scores |y|^2.
double ml_objective(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                    const Eigen::VectorXcd& a);

enum class SteeringModel {
  kCurved,  // near-field: per-element exact distances (default)
  kPlanar,  // far-field: distance drops out of the objective
};

struct LocalizeOptions {
  int order_cap = 5;        // harmonic truncation N; requires T >= 2N+1
  bool local_search = true; // hill-climb the exact objective across angle bins
  int max_moves = 8;        // cap on hill-climb steps
  bool zoom = false;        // optional two-level continuous refinement around
                            // the best bin (off: estimates stay on the grid)
  SteeringModel stage3_model = SteeringModel::kCurved;
};

struct Estimate {
  double theta_hat = 0.0;
  double phi_hat = 0.0;
  double d_hat = 0.0;
  CartesianPosition p_hat = CartesianPosition::Zero();
  std::complex<double> alpha_hat{0.0, 0.0};
  double residual = 0.0;        // ml_objective at the reported estimate
  int theta_bin = -1;
  int phi_bin = -1;
  int d_bin = -1;
  bool low_confidence = false;  // flat distance objective (e.g. planar model)
};

// Reusable search workspace. The constructor precomputes everything that
// depends only on (scenario, array, grids, options): per-elevation Bessel
// tables over the distinct element radii, the azimuth phase table, and the
// distance grid. operator() runs the full estimator on one observation set.
class Localizer {
 public:
  Localizer(const Scenario& sc, const RisArray& ris, const SearchGrids& grids,
            const LocalizeOptions& opts = {});

  Estimate operator()(const Eigen::VectorXcd& y,
                      const Eigen::MatrixXcd& W) const;

  const SearchGrids& grids() const { return grids_; }
  const LocalizeOptions& options() const { return opts_; }

  // Stage entry points, exposed for direct use and testing. stage1 returns
  // the selected elevation (radians), stage2 the azimuth given an elevation,
  // stage3 the distance scan along a fixed ray (fills d/alpha/residual and
  // the low_confidence flag of the returned estimate).
  double stage1_elevation(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                          int* bin = nullptr) const;
  double stage2_azimuth(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                        double theta_hat, int* bin = nullptr) const;
  Estimate stage3_distance(const Eigen::VectorXcd& y,
                           const Eigen::MatrixXcd& W, double theta_hat,
                           double phi_hat) const;

 private:
  struct RayResult {
    double cost = 0.0;
    int d_bin = -1;
    bool flat = false;
  };
  RayResult scan_ray(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                     double theta, double phi) const;
  Estimate finish(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                  double theta, double phi, int theta_bin, int phi_bin,
                  const RayResult& ray) const;
  Eigen::MatrixXcd basis_at_bin(const Eigen::MatrixXcd* s_tables,
                                int theta_bin) const;

  Scenario sc_;
  RisArray ris_;
  SearchGrids grids_;
  LocalizeOptions opts_;
  double kappa_;                    // 2*pi/lambda
  Eigen::VectorXd radii_;           // distinct element radii (ascending)
  Eigen::VectorXi radius_group_;    // element -> radius index
  Eigen::MatrixXcd harmonics_;      // M x (2N+1): e^{-j*n*psi_i}
  std::vector<Eigen::MatrixXcd> jn_;  // per theta bin: (2N+1) x R tables of
                                      // j^n * J_n(kappa * r * sin(theta))
  Eigen::MatrixXcd phi_table_;      // (2N+1) x phi_bins: e^{+j*n*phi_k}
  Eigen::VectorXd d_grid_;
  Eigen::VectorXd r2_;              // per-element r_i^2
};

// One-shot convenience wrapper around Localizer for a single observation set.
Estimate localize(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& W,
                  const Scenario& sc, const RisArray& ris,
                  const SearchGrids& grids, const LocalizeOptions& opts = {});

}  // namespace rislens
