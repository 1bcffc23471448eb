// SPDX-License-Identifier: Apache-2.0
//
// Scenario constants, the reflecting-array element layout, and conversions
// between Cartesian and spherical source coordinates.
#pragma once

#include <Eigen/Dense>

namespace rislens {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

using CartesianPosition = Eigen::Vector3d;

// Source location as seen from the array center: distance d > 0, elevation
// theta measured from the array normal (+Z), azimuth phi from +X in [0, 2*pi).
struct SphericalCoords {
  double d = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

// Physical constants of one simulation setup. Derived energies are stored so
// hot loops never recompute them: symbol_energy = tx_power / bandwidth,
// noise_variance = noise_psd * noise_figure (both in joules).
struct Scenario {
  double wavelength = 0.0;     // m
  int ris_rows = 0;
  int ris_cols = 0;
  double element_spacing = 0.0;  // m, center-to-center
  double element_side = 0.0;     // m, square elements; area = side^2
  CartesianPosition antenna_position = CartesianPosition::Zero();
  double tx_power = 0.0;       // W
  double noise_psd = 0.0;      // W/Hz
  double noise_figure = 1.0;   // linear
  double bandwidth = 0.0;      // Hz
  int num_pilots = 0;
  double symbol_energy = 0.0;  // J
  double noise_variance = 0.0; // J

  int elements() const { return ris_rows * ris_cols; }
  double element_area() const { return element_side * element_side; }
  double wavenumber() const { return 2.0 * kPi / wavelength; }

  // 28 GHz lens: 50x50 half-wavelength grid of quarter-wavelength-square
  // elements, receive antenna one wavelength behind the center, 1 mW
  // transmitter, -174 dBm/Hz noise floor, 8 dB noise figure, 1 MHz bandwidth,
  // 200 pilot symbols.
  static Scenario defaults();

  // Throws std::invalid_argument on broken invariants. Warns on stderr when
  // the element area exceeds (wavelength/2)^2, where the element response
  // model loses validity.
  void validate() const;
};

// Element positions in the Z=0 plane plus the polar form used by the
// azimuthal-harmonic expansion of the array response.
struct RisArray {
  Eigen::Matrix<double, Eigen::Dynamic, 3> positions;  // M x 3, z column zero
  Eigen::VectorXd radial;   // r_i = |q_i|
  Eigen::VectorXd azimuth;  // psi_i = atan2(y_i, x_i)

  int size() const { return static_cast<int>(positions.rows()); }
};

// Incident wavevector -(2*pi/lambda) * [sin(t)cos(p), sin(t)sin(p), cos(t)].
Eigen::Vector3d wavevector(const SphericalCoords& c, double wavelength);

// Position of the source: d times the unit direction encoded in the
// wavevector, i.e. -(lambda*d / 2*pi) * wavevector.
CartesianPosition cartesian_from_spherical(const SphericalCoords& c,
                                           double wavelength);

// Inverse map. Throws std::domain_error on a zero-norm position; azimuth is
// wrapped into [0, 2*pi).
SphericalCoords spherical_from_cartesian(const CartesianPosition& p);

// rows x cols element grid with the given spacing, centered on the origin so
// the array centroid sits exactly at (0, 0, 0).
RisArray build_ris_grid(int rows, int cols, double spacing);

}  // namespace rislens
