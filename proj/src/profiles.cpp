// SPDX-License-Identifier: Apache-2.0

#include "rislens/profiles.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace rislens {

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::kRandom: return "random";
    case ProfileKind::kDirectional: return "directional";
    case ProfileKind::kPositional: return "positional";
  }
  return "unknown";
}

std::optional<ProfileKind> profile_kind_from_string(const std::string& name) {
  if (name == "random") return ProfileKind::kRandom;
  if (name == "directional") return ProfileKind::kDirectional;
  if (name == "positional") return ProfileKind::kPositional;
  return std::nullopt;
}

CartesianPosition PriorBelief::sample_front(RandomStream& rng) const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("prior sigma must be >= 0");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    CartesianPosition p = mean;
    if (sigma > 0.0) {
      p.x() += sigma * rng.normal();
      p.y() += sigma * rng.normal();
      p.z() += sigma * rng.normal();
    }
    if (p.z() > 0.0) return p;
    if (sigma == 0.0) break;  // degenerate prior can never move
  }
  throw std::runtime_error(
      "prior mass lies behind the array: could not draw a usable position");
}

Eigen::MatrixXd random_profiles(int elements, int num_pilots,
                                RandomStream& rng) {
  if (elements < 1 || num_pilots < 1)
    throw std::invalid_argument("profile dimensions must be positive");
  Eigen::MatrixXd angles(elements, num_pilots);
  // Column-major draw order: pilot by pilot, element by element.
  for (int t = 0; t < num_pilots; ++t)
    for (int i = 0; i < elements; ++i)
      angles(i, t) = rng.uniform(0.0, 2.0 * kPi);
  return angles;
}

Eigen::MatrixXd directional_profiles(const PriorBelief& prior,
                                     const RisArray& ris, double wavelength,
                                     int num_pilots, RandomStream& rng) {
  if (num_pilots < 1)
    throw std::invalid_argument("profile dimensions must be positive");
  Eigen::MatrixXd angles(ris.size(), num_pilots);
  for (int t = 0; t < num_pilots; ++t) {
    const CartesianPosition p = prior.sample_front(rng);
    const SphericalCoords c = spherical_from_cartesian(p);
    // Conjugate of the planar steering phase: beam toward the drawn direction.
    const Eigen::Vector3d k = wavevector(c, wavelength);
    angles.col(t) = ris.positions * k;
  }
  return angles;
}

Eigen::MatrixXd positional_profiles(const PriorBelief& prior,
                                    const RisArray& ris, double wavelength,
                                    int num_pilots, RandomStream& rng) {
  if (num_pilots < 1)
    throw std::invalid_argument("profile dimensions must be positive");
  const double kappa = 2.0 * kPi / wavelength;
  Eigen::MatrixXd angles(ris.size(), num_pilots);
  for (int t = 0; t < num_pilots; ++t) {
    const CartesianPosition p = prior.sample_front(rng);
    // Conjugate of the near-field steering phase: focus on the drawn point.
    const Eigen::VectorXd dist =
        (ris.positions.rowwise() - p.transpose()).rowwise().norm();
    angles.col(t) = kappa * (dist.array() - p.norm());
  }
  return angles;
}

void quantize_profiles(Eigen::MatrixXd& angles, int bits) {
  if (bits <= 0) return;
  if (bits > 62) throw std::invalid_argument("quantizer depth out of range");
  const double step = 2.0 * kPi / static_cast<double>(1ull << bits);
  angles = (angles / step).array().round() * step;
}

Eigen::VectorXd antenna_compensation(const Eigen::VectorXcd& h_ant) {
  Eigen::VectorXd comp(h_ant.size());
  bool warned = false;
  for (Eigen::Index i = 0; i < h_ant.size(); ++i) {
    if (h_ant(i) == std::complex<double>(0.0, 0.0)) {
      if (!warned) {
        std::cerr << "warning: zero antenna-coupling entry; compensation "
                     "phase set to 0\n";
        warned = true;
      }
      comp(i) = 0.0;
    } else {
      comp(i) = -std::arg(h_ant(i));
    }
  }
  return comp;
}

Eigen::MatrixXcd assemble_w(const Eigen::MatrixXd& profile_angles,
                            const Eigen::VectorXd& compensation_angles,
                            const Eigen::VectorXcd& h_ant) {
  if (profile_angles.rows() != h_ant.size() ||
      compensation_angles.size() != h_ant.size())
    throw std::invalid_argument("profile/compensation/coupling sizes differ");
  const std::complex<double> j(0.0, 1.0);
  Eigen::MatrixXcd w(profile_angles.rows(), profile_angles.cols());
  for (Eigen::Index t = 0; t < w.cols(); ++t)
    w.col(t) = ((j * (profile_angles.col(t) + compensation_angles).array())
                    .exp()) *
               h_ant.array();
  return w;
}

Eigen::MatrixXcd make_profile_w(ProfileKind kind, const PriorBelief& prior,
                                const Scenario& sc, const RisArray& ris,
                                const Eigen::VectorXcd& h_ant, int quant_bits,
                                RandomStream& rng, RandomStream& prior_rng) {
  Eigen::MatrixXd angles;
  switch (kind) {
    case ProfileKind::kRandom:
      angles = random_profiles(ris.size(), sc.num_pilots, rng);
      break;
    case ProfileKind::kDirectional:
      angles = directional_profiles(prior, ris, sc.wavelength, sc.num_pilots,
                                    prior_rng);
      break;
    case ProfileKind::kPositional:
      angles = positional_profiles(prior, ris, sc.wavelength, sc.num_pilots,
                                   prior_rng);
      break;
  }
  quantize_profiles(angles, quant_bits);
  return assemble_w(angles, antenna_compensation(h_ant), h_ant);
}

}  // namespace rislens
