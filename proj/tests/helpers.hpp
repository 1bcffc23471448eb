// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include "rislens/channel.hpp"
#include "rislens/estimator.hpp"
#include "rislens/fisher.hpp"
#include "rislens/geometry.hpp"
#include "rislens/profiles.hpp"
#include "rislens/random.hpp"

namespace rltest {

inline rislens::Scenario small_scenario(int rows, int cols, int pilots) {
  rislens::Scenario sc = rislens::Scenario::defaults();
  sc.ris_rows = rows;
  sc.ris_cols = cols;
  sc.num_pilots = pilots;
  return sc;
}

// Unit-modulus random profile matrix (no coupling magnitudes), for plain
// linear-algebra identities.
inline Eigen::MatrixXcd random_unit_w(int elements, int pilots,
                                      std::uint64_t seed) {
  rislens::RandomStream rng(seed, 0, rislens::StreamPurpose::kProfile);
  Eigen::MatrixXcd w(elements, pilots);
  for (int t = 0; t < pilots; ++t)
    for (int i = 0; i < elements; ++i)
      w(i, t) = std::exp(std::complex<double>(0.0, rng.uniform(0.0, 2.0 * rislens::kPi)));
  return w;
}

// Noise-free observations for a source at p under profile W with a given
// synchronization phase.
inline Eigen::VectorXcd noiseless_y(const Eigen::MatrixXcd& W,
                                    const rislens::CartesianPosition& p,
                                    const rislens::Scenario& sc,
                                    const rislens::RisArray& ris,
                                    double theta_sync) {
  const rislens::ChannelRealization ch =
      rislens::make_channel(p, sc, ris, theta_sync);
  const Eigen::VectorXcd channel = ch.rho.array() * ch.a.array();
  return std::exp(std::complex<double>(0.0, ch.theta_channel)) *
         std::sqrt(sc.symbol_energy) * (W.transpose() * channel);
}

}  // namespace rltest
