// SPDX-License-Identifier: Apache-2.0
//
// Fisher information of the observation model and the position error bound.
// The full parameter vector is [rho, theta, p] (gain amplitude, phase, 3-D
// position); the position bound comes from the equivalent information after
// eliminating the two nuisance parameters.
#pragma once

#include <Eigen/Dense>

#include "rislens/channel.hpp"
#include "rislens/geometry.hpp"

namespace rislens {

// Derivative of the near-field steering vector with respect to position:
// column-wise D = j*(2*pi/lambda) * (diag(a) * K^T + a * p^T / d), where
// column i of K is (q_i - p)/|q_i - p|. Throws std::domain_error when p
// coincides with an element or the origin.
Eigen::MatrixX3cd steering_derivative(const CartesianPosition& p,
                                      const RisArray& ris, double wavelength);

// 5x5 Fisher information for [rho, theta, p] given profile matrix W (M x T)
// and gain amplitude rho.
Eigen::Matrix<double, 5, 5> fim_full(const CartesianPosition& p, double rho,
                                     const Eigen::MatrixXcd& W,
                                     const Scenario& sc, const RisArray& ris);

// Equivalent 3x3 position information via the Schur complement of the
// nuisance block. A singular nuisance block yields a zero matrix (infinite
// bound) rather than an exception.
Eigen::Matrix3d efim_schur(const Eigen::Matrix<double, 5, 5>& fim);

// Same quantity computed directly as a projection:
// (2*rho^2*Es/N0) * Re{ E^H (I - c c^H / |c|^2) E } with c = W^T a, E = W^T D.
Eigen::Matrix3d efim_projection(const CartesianPosition& p, double rho,
                                const Eigen::MatrixXcd& W, const Scenario& sc,
                                const RisArray& ris);

// sqrt(trace(J^-1)). Returns +inf when J is singular (any eigenvalue below
// 1e-12 times the largest).
double peb(const Eigen::Matrix3d& efim);

// Bound achieved by reporting the prior mean under an isotropic prior with
// per-axis standard deviation sigma: sigma * sqrt(3).
double prior_peb(double sigma);

// Pilot-averaged receive SNR for a source at p under profile W, using the
// far-field amplitude and near-field steering:
// (1/T) * sum_t Es * rho^2 * |w_t . a|^2 / N0, in dB.
double snr_db(const Eigen::MatrixXcd& W, const CartesianPosition& p,
              const Scenario& sc, const RisArray& ris);

}  // namespace rislens
