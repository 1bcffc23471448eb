// SPDX-License-Identifier: Apache-2.0

#include "rislens/geometry.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace rislens {

Scenario Scenario::defaults() {
  Scenario sc;
  sc.wavelength = kSpeedOfLight / 28.0e9;
  sc.ris_rows = 50;
  sc.ris_cols = 50;
  sc.element_spacing = 0.5 * sc.wavelength;
  sc.element_side = 0.5 * sc.wavelength;
  sc.antenna_position = CartesianPosition(0.0, 0.0, -sc.wavelength);
  sc.tx_power = 1.0e-3;
  sc.noise_psd = std::pow(10.0, (-174.0 - 30.0) / 10.0);  // dBm/Hz -> W/Hz
  sc.noise_figure = std::pow(10.0, 8.0 / 10.0);
  sc.bandwidth = 1.0e6;
  sc.num_pilots = 200;
  sc.symbol_energy = sc.tx_power / sc.bandwidth;
  sc.noise_variance = sc.noise_psd * sc.noise_figure;
  return sc;
}

void Scenario::validate() const {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  if (ris_rows < 1 || ris_cols < 1)
    throw std::invalid_argument("array must have at least one element");
  if (!(element_spacing > 0.0))
    throw std::invalid_argument("element spacing must be > 0");
  if (!(element_side > 0.0))
    throw std::invalid_argument("element side must be > 0");
  if (!(tx_power > 0.0)) throw std::invalid_argument("tx power must be > 0");
  if (!(noise_psd > 0.0)) throw std::invalid_argument("noise PSD must be > 0");
  if (!(noise_figure >= 1.0))
    throw std::invalid_argument("noise figure must be >= 1 (linear)");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  if (num_pilots < 1) throw std::invalid_argument("need at least one pilot");
  if (element_area() > 0.25 * wavelength * wavelength + 1e-15) {
    std::cerr << "warning: element area " << element_area()
              << " m^2 exceeds (wavelength/2)^2; the per-element response "
                 "model assumes electrically small elements\n";
  }
}

Eigen::Vector3d wavevector(const SphericalCoords& c, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
  const double k = 2.0 * kPi / wavelength;
  const double st = std::sin(c.theta);
  return -k * Eigen::Vector3d(st * std::cos(c.phi), st * std::sin(c.phi),
                              std::cos(c.theta));
}

CartesianPosition cartesian_from_spherical(const SphericalCoords& c,
                                           double wavelength) {
  if (!(c.d > 0.0)) throw std::invalid_argument("distance must be > 0");
  return -(wavelength * c.d / (2.0 * kPi)) * wavevector(c, wavelength);
}

SphericalCoords spherical_from_cartesian(const CartesianPosition& p) {
  const double d = p.norm();
  if (!(d > 0.0))
    throw std::domain_error("spherical coordinates undefined at the origin");
  SphericalCoords c;
  c.d = d;
  c.theta = std::acos(std::clamp(p.z() / d, -1.0, 1.0));
  c.phi = std::atan2(p.y(), p.x());
  if (c.phi < 0.0) c.phi += 2.0 * kPi;
  return c;
}

RisArray build_ris_grid(int rows, int cols, double spacing) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("grid must have at least one element");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be > 0");
  RisArray ris;
  const int m = rows * cols;
  ris.positions.resize(m, 3);
  ris.radial.resize(m);
  ris.azimuth.resize(m);
  const double x0 = 0.5 * (cols - 1);
  const double y0 = 0.5 * (rows - 1);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      const double x = (c - x0) * spacing;
      const double y = (r - y0) * spacing;
      ris.positions(i, 0) = x;
      ris.positions(i, 1) = y;
      ris.positions(i, 2) = 0.0;
      ris.radial(i) = std::hypot(x, y);
      ris.azimuth(i) = std::atan2(y, x);
    }
  }
  return ris;
}

}  // namespace rislens
