// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"

using namespace rislens;

TEST_SUITE("profiles") {

TEST_CASE("profile kind names round-trip") {
  CHECK(to_string(ProfileKind::kRandom) == std::string("random"));
  CHECK(profile_kind_from_string("positional") == ProfileKind::kPositional);
  CHECK(profile_kind_from_string("directional") == ProfileKind::kDirectional);
  CHECK(!profile_kind_from_string("beamformed").has_value());
}

TEST_CASE("random profiles: range, shape, determinism") {
  RandomStream rng(3, 0, StreamPurpose::kProfile);
  const Eigen::MatrixXd a = random_profiles(64, 20, rng);
  REQUIRE(a.rows() == 64);
  REQUIRE(a.cols() == 20);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() < 2.0 * kPi);
  CHECK(a.mean() == doctest::Approx(kPi).epsilon(0.05));
  RandomStream rng2(3, 0, StreamPurpose::kProfile);
  const Eigen::MatrixXd b = random_profiles(64, 20, rng2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("directional profiles point the beam at the prior mean") {
  const Scenario sc = Scenario::defaults();
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  PriorBelief prior;
  prior.mean = {0.5, 0.5, 1.0};
  prior.sigma = 0.0;  // degenerate: every pilot sees the mean
  RandomStream rng(1, 0, StreamPurpose::kPrior);
  const Eigen::MatrixXd ang =
      directional_profiles(prior, ris, sc.wavelength, 5, rng);
  REQUIRE(ang.cols() == 5);
  // All pilots identical under a degenerate prior.
  for (int t = 1; t < 5; ++t)
    CHECK((ang.col(t) - ang.col(0)).cwiseAbs().maxCoeff() == 0.0);
  // The profile phase is the conjugate planar steering phase.
  const SphericalCoords c = spherical_from_cartesian(prior.mean);
  const Eigen::VectorXcd steer = cm1_steering(c, ris, sc.wavelength);
  for (int i = 0; i < ris.size(); ++i) {
    const std::complex<double> prod =
        std::exp(std::complex<double>(0.0, ang(i, 0))) * steer(i);
    CHECK(std::abs(std::arg(prod)) < 1e-10);
  }
}

TEST_CASE("positional profiles focus exactly on the prior mean") {
  const Scenario sc = Scenario::defaults();
  const RisArray ris = build_ris_grid(8, 8, sc.element_spacing);
  PriorBelief prior;
  prior.mean = {0.2, -0.1, 0.7};
  prior.sigma = 0.0;
  RandomStream rng(1, 0, StreamPurpose::kPrior);
  const Eigen::MatrixXd ang =
      positional_profiles(prior, ris, sc.wavelength, 3, rng);
  const Eigen::VectorXcd steer =
      cm2_steering(prior.mean, ris, sc.wavelength);
  for (int i = 0; i < ris.size(); ++i) {
    const std::complex<double> prod =
        std::exp(std::complex<double>(0.0, ang(i, 0))) * steer(i);
    CHECK(std::abs(std::arg(prod)) < 1e-10);
  }
}

TEST_CASE("prior sampling respects the front half-space") {
  PriorBelief prior;
  prior.mean = {0.0, 0.0, 1.0};
  prior.sigma = 0.0;
  RandomStream rng(1, 0, StreamPurpose::kPrior);
  const CartesianPosition p = prior.sample_front(rng);
  CHECK(p == prior.mean);

  PriorBelief wide;
  wide.mean = {0.1, 0.1, 0.1};
  wide.sigma = 0.1;
  int behind = 0;
  for (int i = 0; i < 200; ++i) {
    RandomStream r(2, i, StreamPurpose::kPrior);
    CHECK(wide.sample_front(r).z() > 0.0);
  }
  (void)behind;

  PriorBelief hopeless;
  hopeless.mean = {0.0, 0.0, -5.0};
  hopeless.sigma = 0.01;
  RandomStream r(3, 0, StreamPurpose::kPrior);
  CHECK_THROWS_AS(hopeless.sample_front(r), std::runtime_error);
}

TEST_CASE("sampled positions vary when sigma is positive") {
  PriorBelief prior;
  prior.mean = {0.1, 0.1, 0.5};
  prior.sigma = 0.05;
  RandomStream rng(4, 0, StreamPurpose::kPrior);
  const CartesianPosition a = prior.sample_front(rng);
  const CartesianPosition b = prior.sample_front(rng);
  CHECK((a - b).norm() > 0.0);
}

TEST_CASE("quantization snaps to the expected levels") {
  RandomStream rng(5, 0, StreamPurpose::kProfile);
  Eigen::MatrixXd ang = random_profiles(32, 8, rng);
  const Eigen::MatrixXd orig = ang;

  Eigen::MatrixXd untouched = ang;
  quantize_profiles(untouched, 0);
  CHECK((untouched - orig).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd one_bit = ang;
  quantize_profiles(one_bit, 1);
  for (int i = 0; i < one_bit.size(); ++i) {
    const double v = one_bit(i) / kPi;  // multiples of pi
    CHECK(v == doctest::Approx(std::round(v)).epsilon(1e-12));
  }
  CHECK((one_bit - orig).cwiseAbs().maxCoeff() <= kPi / 2.0 + 1e-12);

  Eigen::MatrixXd three_bit = ang;
  quantize_profiles(three_bit, 3);
  const double step = 2.0 * kPi / 8.0;
  for (int i = 0; i < three_bit.size(); ++i) {
    const double v = three_bit(i) / step;
    CHECK(v == doctest::Approx(std::round(v)).epsilon(1e-12));
  }
  CHECK((three_bit - orig).cwiseAbs().maxCoeff() <= step / 2.0 + 1e-12);
}

TEST_CASE("antenna compensation cancels the coupling phase") {
  const Scenario sc = Scenario::defaults();
  const RisArray ris = build_ris_grid(6, 6, sc.element_spacing);
  const Eigen::VectorXcd h = antenna_coupling(sc, ris);
  const Eigen::VectorXd comp = antenna_compensation(h);
  for (int i = 0; i < h.size(); ++i) {
    const std::complex<double> rotated =
        std::exp(std::complex<double>(0.0, comp(i))) * h(i);
    CHECK(std::abs(std::arg(rotated)) < 1e-12);
    CHECK(std::abs(rotated) == doctest::Approx(std::abs(h(i))));
  }
  // Zero entries pass through with zero compensation.
  Eigen::VectorXcd with_zero(3);
  with_zero << std::complex<double>(0.0, 0.0), std::complex<double>(0.0, 2.0),
      std::complex<double>(-1.0, 0.0);
  const Eigen::VectorXd c0 = antenna_compensation(with_zero);
  CHECK(c0(0) == 0.0);
}

TEST_CASE("assembled W folds phases onto coupling magnitudes") {
  const Scenario sc = Scenario::defaults();
  const RisArray ris = build_ris_grid(6, 6, sc.element_spacing);
  const Eigen::VectorXcd h = antenna_coupling(sc, ris);
  RandomStream rng(6, 0, StreamPurpose::kProfile);
  const Eigen::MatrixXd ang = random_profiles(ris.size(), 4, rng);
  const Eigen::MatrixXcd w = assemble_w(ang, antenna_compensation(h), h);
  REQUIRE(w.rows() == ris.size());
  REQUIRE(w.cols() == 4);
  for (int t = 0; t < 4; ++t) {
    for (int i = 0; i < ris.size(); ++i) {
      const std::complex<double> expected =
          std::exp(std::complex<double>(0.0, ang(i, t))) * std::abs(h(i));
      CHECK(std::abs(w(i, t) - expected) < 1e-12);
    }
  }
  CHECK_THROWS_AS(
      assemble_w(ang, antenna_compensation(h).head(3), h),
      std::invalid_argument);
}

TEST_CASE("profile construction helper covers all kinds") {
  const Scenario sc = rltest::small_scenario(6, 6, 8);
  const RisArray ris = build_ris_grid(6, 6, sc.element_spacing);
  const Eigen::VectorXcd h = antenna_coupling(sc, ris);
  PriorBelief prior;
  prior.mean = {0.1, 0.1, 0.5};
  prior.sigma = 0.05;
  for (ProfileKind kind : {ProfileKind::kRandom, ProfileKind::kDirectional,
                           ProfileKind::kPositional}) {
    RandomStream rng(7, 0, StreamPurpose::kProfile);
    RandomStream prior_rng(7, 0, StreamPurpose::kPrior);
    const Eigen::MatrixXcd w =
        make_profile_w(kind, prior, sc, ris, h, 0, rng, prior_rng);
    REQUIRE(w.rows() == ris.size());
    REQUIRE(w.cols() == 8);
    // Magnitudes always equal the coupling magnitudes.
    for (int i = 0; i < ris.size(); ++i)
      CHECK(std::abs(w(i, 0)) == doctest::Approx(std::abs(h(i))).epsilon(1e-12));
  }
}

}  // TEST_SUITE
