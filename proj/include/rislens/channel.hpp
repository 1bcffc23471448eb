// SPDX-License-Identifier: Apache-2.0
//
// Channel synthesis. Three nested response models for a source at p seen by
// the array:
//   planar      — far-field: one shared amplitude, linear phase front
//   curved      — near-field phase: exact per-element distances, shared amp
//   integrated  — near-field amplitude: exact radiated-power integral over
//                 each element surface
// plus the fixed array-to-antenna coupling and the pilot observation model.
#pragma once

#include <complex>

#include <Eigen/Dense>

#include "rislens/geometry.hpp"
#include "rislens/random.hpp"

namespace rislens {

// Polarization/projection loss factor f(theta, phi) = 1 - sin^2 t * sin^2 p.
double correction_factor(double theta, double phi);

// Shared far-field amplitude: rho^2 = f * A * cos(theta) / (4*pi*d^2).
double cm1_amplitude(const SphericalCoords& c, const Scenario& sc);

// Far-field steering vector a_i = exp(-j * q_i . k(theta, phi)).
Eigen::VectorXcd cm1_steering(const SphericalCoords& c, const RisArray& ris,
                              double wavelength);

// Near-field steering vector a_i = exp(-j * (2*pi/lambda) * (|p - q_i| - d)),
// referenced to the array center so a -> planar steering as d grows.
Eigen::VectorXcd cm2_steering(const CartesianPosition& p, const RisArray& ris,
                              double wavelength);

// Exact per-element amplitudes: rho_i^2 is the fraction of isotropically
// radiated power crossing element i's surface (closed-form surface integral).
// Throws std::domain_error when p lies in the array plane (z == 0).
Eigen::VectorXd cm3_amplitudes(const CartesianPosition& p, const RisArray& ris,
                               const Scenario& sc);

// Element-to-antenna coupling h_i = rho_ant_i * exp(-j*(2*pi/lambda) *
// (|p_ant - q_i| - |p_ant|)), with the integrated amplitude model evaluated
// at the antenna position.
Eigen::VectorXcd antenna_coupling(const Scenario& sc, const RisArray& ris);

// Everything position-dependent that the observation model needs.
struct ChannelRealization {
  Eigen::VectorXd rho;       // per-element amplitudes (integrated model)
  Eigen::VectorXcd a;        // near-field steering at p
  double theta_channel = 0;  // total phase: -(2*pi/lambda)*d + theta_sync
  std::complex<double> alpha;  // far-field gain alpha = rho_ff * e^{j theta}
};

ChannelRealization make_channel(const CartesianPosition& p, const Scenario& sc,
                                const RisArray& ris, double theta_sync);

struct ObservationSet {
  Eigen::VectorXcd y;        // T noisy pilot observations
  double theta_sync = 0.0;   // drawn synchronization offset
};

// y_t = e^{j theta} * sqrt(Es) * w_t . (rho o a) + n_t,  n_t ~ CN(0, N0),
// where w_t is column t of W and theta = -(2*pi/lambda)*d + theta_sync with
// theta_sync ~ U[0, 2*pi). W must be M x T.
ObservationSet synthesize_observations(const Eigen::MatrixXcd& W,
                                       const CartesianPosition& p,
                                       const Scenario& sc, const RisArray& ris,
                                       RandomStream& sync_rng,
                                       RandomStream& noise_rng);

}  // namespace rislens
