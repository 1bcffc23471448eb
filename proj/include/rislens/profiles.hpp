// SPDX-License-Identifier: Apache-2.0
//
// Phase-profile design. A profile is the M x T matrix of unit-modulus element
// coefficients; the effective observation matrix W folds in the fixed
// element-to-antenna coupling magnitudes after phase compensation.
#pragma once

#include <optional>

#include <Eigen/Dense>

#include "rislens/channel.hpp"
#include "rislens/geometry.hpp"
#include "rislens/random.hpp"

namespace rislens {

enum class ProfileKind { kRandom, kDirectional, kPositional };

const char* to_string(ProfileKind kind);
std::optional<ProfileKind> profile_kind_from_string(const std::string& name);

// Isotropic Gaussian belief about the transmitter position.
struct PriorBelief {
  CartesianPosition mean = CartesianPosition::Zero();
  double sigma = 0.0;  // per-axis standard deviation, >= 0

  // Draws mean + sigma * z, z ~ N(0, I), rejecting samples with z <= 0 in
  // the third coordinate (the source is in front of the array). Throws
  // std::runtime_error if 1000 consecutive samples land behind it.
  CartesianPosition sample_front(RandomStream& rng) const;
};

// Element phases i.i.d. uniform on [0, 2*pi). Returns M x T angles.
Eigen::MatrixXd random_profiles(int elements, int num_pilots,
                                RandomStream& rng);

// Per pilot: draw a position from the prior, point a far-field beam at its
// direction (conjugate planar steering phase).
Eigen::MatrixXd directional_profiles(const PriorBelief& prior,
                                     const RisArray& ris, double wavelength,
                                     int num_pilots, RandomStream& rng);

// Per pilot: draw a position from the prior, focus on it exactly (conjugate
// near-field steering phase).
Eigen::MatrixXd positional_profiles(const PriorBelief& prior,
                                    const RisArray& ris, double wavelength,
                                    int num_pilots, RandomStream& rng);

// Snap each angle to the nearest of 2^bits levels spaced 2*pi/2^bits apart.
// bits <= 0 means unquantized (no-op).
void quantize_profiles(Eigen::MatrixXd& angles, int bits);

// Phases that cancel the element-to-antenna coupling: -arg(h_i). A zero
// coupling entry gets angle 0 and a one-time stderr warning.
Eigen::VectorXd antenna_compensation(const Eigen::VectorXcd& h_ant);

// [W]_{i,t} = exp(j*(profile_{i,t} + compensation_i)) * h_ant_i, which by
// construction of the compensation equals exp(j*profile_{i,t}) * |h_ant_i|.
Eigen::MatrixXcd assemble_w(const Eigen::MatrixXd& profile_angles,
                            const Eigen::VectorXd& compensation_angles,
                            const Eigen::VectorXcd& h_ant);

// Convenience: design angles for `kind`, optionally quantize, compensate the
// coupling, and assemble W. `rng` feeds the profile draw; `prior_rng` feeds
// the per-pilot prior samples of the directional/positional designs.
Eigen::MatrixXcd make_profile_w(ProfileKind kind, const PriorBelief& prior,
                                const Scenario& sc, const RisArray& ris,
                                const Eigen::VectorXcd& h_ant, int quant_bits,
                                RandomStream& rng, RandomStream& prior_rng);

}  // namespace rislens
