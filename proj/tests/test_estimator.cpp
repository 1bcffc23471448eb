// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"

using namespace rislens;

TEST_SUITE("estimator") {

TEST_CASE("search grids: pinned bin values") {
  SearchGrids g;  // defaults: 90 x 360 x 500 over [0.05, 20]
  CHECK(g.theta(0) == 0.0);
  CHECK(g.theta(55) == doctest::Approx(55.0 * kPi / 180.0).epsilon(1e-14));
  CHECK(g.phi(45) == doctest::Approx(45.0 * kPi / 180.0).epsilon(1e-14));
  CHECK(g.dist(0) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(g.dist(341) ==
        doctest::Approx(3.00006898284716383).epsilon(1e-13));
  CHECK(g.dist(499) == doctest::Approx(20.0).epsilon(1e-13));
  SearchGrids bad = g;
  bad.d_min = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.theta_bins = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("harmonic basis reconstructs the planar steering vector") {
  const Scenario sc = Scenario::defaults();
  const RisArray ris = build_ris_grid(10, 10, sc.element_spacing);
  const double theta = 0.955, phi = 0.785;
  const int order = 60;
  const Eigen::MatrixXcd basis =
      bessel_basis(theta, ris, sc.wavelength, order);
  REQUIRE(basis.rows() == 2 * order + 1);
  REQUIRE(basis.cols() == ris.size());
  Eigen::VectorXcd ph(2 * order + 1);
  for (int n = -order; n <= order; ++n)
    ph(n + order) = std::exp(std::complex<double>(0.0, n * phi));
  const Eigen::VectorXcd reconstructed = basis.transpose() * ph;
  const Eigen::VectorXcd exact =
      cm1_steering({1.0, theta, phi}, ris, sc.wavelength);
  CHECK((reconstructed - exact).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("harmonic basis at broadside keeps only the zero order") {
  const Scenario sc = Scenario::defaults();
  const RisArray ris = build_ris_grid(6, 6, sc.element_spacing);
  const Eigen::MatrixXcd basis = bessel_basis(0.0, ris, sc.wavelength, 4);
  for (int n = -4; n <= 4; ++n) {
    const double mag = basis.row(n + 4).cwiseAbs().maxCoeff();
    if (n == 0)
      CHECK(mag == doctest::Approx(1.0).epsilon(1e-14));
    else
      CHECK(mag == 0.0);
  }
}

TEST_CASE("gain estimate recovers a synthetic gain exactly") {
  const Scenario sc = rltest::small_scenario(8, 8, 16);
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  const Eigen::MatrixXcd W = rltest::random_unit_w(ris.size(), 16, 21);
  const CartesianPosition p(0.3, -0.2, 1.4);
  const Eigen::VectorXcd a = cm2_steering(p, ris, sc.wavelength);
  const std::complex<double> alpha(3.2e-4, -1.1e-4);
  const Eigen::VectorXcd y =
      alpha * std::sqrt(sc.symbol_energy) * (W.transpose() * a);
  const std::complex<double> hat = gain_estimate(y, W, a, sc.symbol_energy);
  CHECK(std::abs(hat - alpha) < 1e-12 * std::abs(alpha));
  // Degenerate beams.
  const Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(ris.size(), 16);
  CHECK(gain_estimate(y, Z, a, sc.symbol_energy) ==
        std::complex<double>(0.0, 0.0));
}

TEST_CASE("ml objective vanishes at the true channel") {
  const Scenario sc = rltest::small_scenario(8, 8, 16);
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  const Eigen::MatrixXcd W = rltest::random_unit_w(ris.size(), 16, 22);
  const CartesianPosition p(0.3, -0.2, 1.4);
  const Eigen::VectorXcd a = cm2_steering(p, ris, sc.wavelength);
  const Eigen::VectorXcd y =
      std::complex<double>(2e-4, 1e-4) * (W.transpose() * a);
  CHECK(ml_objective(y, W, a) <= 1e-14 * y.squaredNorm());
  const Eigen::VectorXcd other =
      cm2_steering({-0.5, 0.4, 0.8}, ris, sc.wavelength);
  CHECK(ml_objective(y, W, other) > 0.1 * y.squaredNorm());
  const Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(ris.size(), 16);
  CHECK(ml_objective(y, Z, a) == doctest::Approx(y.squaredNorm()));
}

TEST_CASE("pilot-count precondition") {
  const Scenario sc = rltest::small_scenario(8, 8, 10);
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  SearchGrids grids;
  grids.theta_bins = 10;
  grids.phi_bins = 16;
  grids.d_bins = 10;
  grids.d_min = 0.5;
  grids.d_max = 2.0;
  const Localizer loc(sc, ris, grids);  // order_cap 5 -> needs T >= 11
  const Eigen::MatrixXcd W = rltest::random_unit_w(ris.size(), 10, 23);
  const Eigen::VectorXcd y = Eigen::VectorXcd::Ones(10);
  CHECK_THROWS_AS(loc.stage1_elevation(y, W), std::invalid_argument);
  CHECK_THROWS_AS(loc(y, W), std::invalid_argument);
  // Mismatched element count.
  const Eigen::MatrixXcd bad = Eigen::MatrixXcd::Ones(63, 12);
  const Eigen::VectorXcd y12 = Eigen::VectorXcd::Ones(12);
  CHECK_THROWS_AS(loc(y12, bad), std::invalid_argument);
}

TEST_CASE("exact recovery when the data matches the estimator model") {
  // Scalar gain times curved phase fronts: the estimator's own model class.
  // On-grid truth must come back bit-exact with a machine-zero residual.
  Scenario sc = rltest::small_scenario(8, 8, 30);
  sc.noise_variance = 0.0;
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  SearchGrids grids;
  grids.theta_bins = 30;
  grids.phi_bins = 72;
  grids.d_bins = 80;
  grids.d_min = 0.3;
  grids.d_max = 3.0;
  const Localizer loc(sc, ris, grids);

  const int kth = 13, kph = 10, kd = 40;
  const CartesianPosition p_true = cartesian_from_spherical(
      {grids.dist(kd), grids.theta(kth), grids.phi(kph)}, sc.wavelength);
  const Eigen::VectorXcd h = antenna_coupling(sc, ris);
  RandomStream prof(9, 0, StreamPurpose::kProfile);
  const Eigen::MatrixXcd W = assemble_w(
      random_profiles(ris.size(), 30, prof), antenna_compensation(h), h);
  const SphericalCoords truth = spherical_from_cartesian(p_true);
  const std::complex<double> alpha =
      cm1_amplitude(truth, sc) * std::exp(std::complex<double>(0.0, 0.7));
  const Eigen::VectorXcd y =
      alpha * std::sqrt(sc.symbol_energy) *
      (W.transpose() * cm2_steering(p_true, ris, sc.wavelength));

  const Estimate est = loc(y, W);
  CHECK(est.theta_bin == kth);
  CHECK(est.phi_bin == kph);
  CHECK(est.d_bin == kd);
  CHECK(est.residual <= 1e-12 * y.squaredNorm());
  CHECK(!est.low_confidence);
  CHECK((est.p_hat - p_true).norm() < 1e-10);
  // The recovered complex gain matches the synthetic one.
  CHECK(std::abs(est.alpha_hat - alpha) < 1e-8 * std::abs(alpha));
}

TEST_CASE("planar distance stage flags the flat objective") {
  Scenario sc = rltest::small_scenario(8, 8, 30);
  sc.noise_variance = 0.0;
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  SearchGrids grids;
  grids.theta_bins = 30;
  grids.phi_bins = 72;
  grids.d_bins = 80;
  grids.d_min = 0.3;
  grids.d_max = 3.0;
  LocalizeOptions planar;
  planar.stage3_model = SteeringModel::kPlanar;
  const Localizer loc(sc, ris, grids, planar);
  const Eigen::MatrixXcd W = rltest::random_unit_w(ris.size(), 30, 24);
  const Eigen::VectorXcd y =
      rltest::noiseless_y(W, {0.4, 0.3, 1.1}, sc, ris, 0.0);
  const Estimate est = loc.stage3_distance(y, W, 0.45, 0.64);
  CHECK(est.low_confidence);
  CHECK(est.d_bin == 0);
  CHECK(est.d_hat == doctest::Approx(grids.dist(0)));
}

TEST_CASE("zoom refinement never worsens the residual") {
  Scenario sc = rltest::small_scenario(8, 8, 30);
  sc.noise_variance = 0.0;
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  SearchGrids grids;
  grids.theta_bins = 30;
  grids.phi_bins = 72;
  grids.d_bins = 80;
  grids.d_min = 0.3;
  grids.d_max = 3.0;
  // Off-grid truth.
  const CartesianPosition p_true =
      cartesian_from_spherical({1.234, 0.71, 0.93}, sc.wavelength);
  const Eigen::VectorXcd h = antenna_coupling(sc, ris);
  RandomStream prof(10, 0, StreamPurpose::kProfile);
  const Eigen::MatrixXcd W = assemble_w(
      random_profiles(ris.size(), 30, prof), antenna_compensation(h), h);
  const Eigen::VectorXcd y = rltest::noiseless_y(W, p_true, sc, ris, 0.2);

  const Localizer plain(sc, ris, grids);
  LocalizeOptions zoomed;
  zoomed.zoom = true;
  const Localizer fine(sc, ris, grids, zoomed);
  const Estimate grid_est = plain(y, W);
  const Estimate zoom_est = fine(y, W);
  CHECK(zoom_est.residual <= grid_est.residual + 1e-15);
  CHECK((zoom_est.p_hat - p_true).norm() <=
        (grid_est.p_hat - p_true).norm() + 1e-12);
}

TEST_CASE("noiseless recovery on the full default scenario") {
  Scenario sc = Scenario::defaults();
  sc.noise_variance = 0.0;
  const RisArray ris = build_ris_grid(50, 50, sc.element_spacing);
  const SearchGrids grids;
  const Localizer loc(sc, ris, grids);

  // On-grid truth: the diagonal direction at ~3 m.
  const int kth = 55, kph = 45, kd = 341;
  const CartesianPosition p_true = cartesian_from_spherical(
      {grids.dist(kd), grids.theta(kth), grids.phi(kph)}, sc.wavelength);
  const Eigen::VectorXcd h = antenna_coupling(sc, ris);
  RandomStream prof(1, 0, StreamPurpose::kProfile);
  const Eigen::MatrixXcd W = assemble_w(
      random_profiles(ris.size(), sc.num_pilots, prof),
      antenna_compensation(h), h);
  const Eigen::VectorXcd y = rltest::noiseless_y(W, p_true, sc, ris, 1.9);

  const Estimate est = loc(y, W);
  CHECK(est.theta_bin == kth);
  CHECK(est.phi_bin == kph);
  CHECK(est.d_bin == kd);
  // The data carry the integrated per-element amplitude taper while the
  // estimator fits a common gain on curved phase fronts, so the noiseless
  // residual has a small model-mismatch floor instead of machine zero.
  CHECK(est.residual <= 1e-3 * y.squaredNorm());
  CHECK(est.residual > 0.0);

  // Stage entry points land on (or immediately next to) the true bins; the
  // final composed estimate above is exact.
  int s1 = -1, s2 = -1;
  loc.stage1_elevation(y, W, &s1);
  CHECK(std::abs(s1 - kth) <= 1);
  loc.stage2_azimuth(y, W, grids.theta(s1), &s2);
  CHECK(std::abs(s2 - kph) <= 2);
  const Estimate ray =
      loc.stage3_distance(y, W, grids.theta(kth), grids.phi(kph));
  CHECK(ray.d_bin == kd);
}

}  // TEST_SUITE
