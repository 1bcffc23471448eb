// SPDX-License-Identifier: Apache-2.0

#include "rislens/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace rislens {

namespace {

void check_profile_shape(const Eigen::MatrixXcd& W, const RisArray& ris) {
  if (W.rows() != ris.size())
    throw std::invalid_argument("profile matrix must have one row per element");
  if (W.cols() < 1)
    throw std::invalid_argument("profile matrix must have at least one pilot");
}

}  // namespace

double correction_factor(double theta, double phi) {
  const double s = std::sin(theta) * std::sin(phi);
  return 1.0 - s * s;
}

double cm1_amplitude(const SphericalCoords& c, const Scenario& sc) {
  if (!(c.d > 0.0)) throw std::invalid_argument("distance must be > 0");
  const double f = correction_factor(c.theta, c.phi);
  const double rho2 =
      f * sc.element_area() * std::cos(c.theta) / (4.0 * kPi * c.d * c.d);
  return std::sqrt(std::max(rho2, 0.0));
}

Eigen::VectorXcd cm1_steering(const SphericalCoords& c, const RisArray& ris,
                              double wavelength) {
  const Eigen::Vector3d k = wavevector(c, wavelength);
  const Eigen::VectorXd phase = -(ris.positions * k);
  return (std::complex<double>(0.0, 1.0) * phase.array()).exp().matrix();
}

Eigen::VectorXcd cm2_steering(const CartesianPosition& p, const RisArray& ris,
                              double wavelength) {
  const double d = p.norm();
  if (!(d > 0.0)) throw std::invalid_argument("source cannot sit at the origin");
  const double kappa = 2.0 * kPi / wavelength;
  const Eigen::VectorXd dist =
      (ris.positions.rowwise() - p.transpose()).rowwise().norm();
  const Eigen::ArrayXd phase = -kappa * (dist.array() - d);
  return (std::complex<double>(0.0, 1.0) * phase).exp().matrix();
}

Eigen::VectorXd cm3_amplitudes(const CartesianPosition& p, const RisArray& ris,
                               const Scenario& sc) {
  const double z = std::abs(p.z());
  if (z == 0.0)
    throw std::domain_error(
        "integrated amplitude model undefined in the array plane");
  const double half = 0.5 * sc.element_side;
  const int m = ris.size();
  Eigen::VectorXd rho(m);
  for (int i = 0; i < m; ++i) {
    const double dx = ris.positions(i, 0) - p.x();
    const double dy = ris.positions(i, 1) - p.y();
    double total = 0.0;
    // Closed-form solid-angle integral, summed over the four element corners.
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        const double x = half + sx * dx;
        const double y = half + sy * dy;
        const double g = std::sqrt(x * x / (z * z) + y * y / (z * z) + 1.0);
        total += x * y / ((y * y + z * z) * g) +
                 2.0 * std::atan(x * y / (z * z * g));
      }
    }
    rho(i) = std::sqrt(std::max(total / (12.0 * kPi), 0.0));
  }
  return rho;
}

Eigen::VectorXcd antenna_coupling(const Scenario& sc, const RisArray& ris) {
  const Eigen::VectorXd rho = cm3_amplitudes(sc.antenna_position, ris, sc);
  const Eigen::VectorXcd steer =
      cm2_steering(sc.antenna_position, ris, sc.wavelength);
  return rho.array() * steer.array();
}

ChannelRealization make_channel(const CartesianPosition& p, const Scenario& sc,
                                const RisArray& ris, double theta_sync) {
  ChannelRealization ch;
  ch.rho = cm3_amplitudes(p, ris, sc);
  ch.a = cm2_steering(p, ris, sc.wavelength);
  const SphericalCoords c = spherical_from_cartesian(p);
  ch.theta_channel = -(2.0 * kPi / sc.wavelength) * c.d + theta_sync;
  ch.alpha = cm1_amplitude(c, sc) *
             std::exp(std::complex<double>(0.0, ch.theta_channel));
  return ch;
}

ObservationSet synthesize_observations(const Eigen::MatrixXcd& W,
                                       const CartesianPosition& p,
                                       const Scenario& sc, const RisArray& ris,
                                       RandomStream& sync_rng,
                                       RandomStream& noise_rng) {
  check_profile_shape(W, ris);
  ObservationSet obs;
  obs.theta_sync = sync_rng.uniform(0.0, 2.0 * kPi);
  const ChannelRealization ch = make_channel(p, sc, ris, obs.theta_sync);
  const Eigen::VectorXcd channel = ch.rho.array() * ch.a.array();
  const std::complex<double> scale =
      std::exp(std::complex<double>(0.0, ch.theta_channel)) *
      std::sqrt(sc.symbol_energy);
  obs.y = scale * (W.transpose() * channel);
  for (Eigen::Index t = 0; t < obs.y.size(); ++t)
    obs.y(t) += noise_rng.cnormal(sc.noise_variance);
  return obs;
}

}  // namespace rislens
