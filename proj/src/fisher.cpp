// SPDX-License-Identifier: Apache-2.0

#include "rislens/fisher.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rislens {

Eigen::MatrixX3cd steering_derivative(const CartesianPosition& p,
                                      const RisArray& ris, double wavelength) {
  const double d = p.norm();
  if (!(d > 0.0)) throw std::domain_error("derivative undefined at the origin");
  const double kappa = 2.0 * kPi / wavelength;
  const Eigen::VectorXcd a = cm2_steering(p, ris, wavelength);
  const int m = ris.size();
  Eigen::MatrixX3cd deriv(m, 3);
  const Eigen::Vector3d radial = p / d;
  const std::complex<double> jk(0.0, kappa);
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d diff = ris.positions.row(i).transpose() - p;
    const double dist = diff.norm();
    if (!(dist > 0.0))
      throw std::domain_error("derivative undefined on an element");
    const Eigen::Vector3d dir = diff / dist + radial;
    deriv.row(i) = (jk * a(i)) * dir.transpose().cast<std::complex<double>>();
  }
  return deriv;
}

Eigen::Matrix<double, 5, 5> fim_full(const CartesianPosition& p, double rho,
                                     const Eigen::MatrixXcd& W,
                                     const Scenario& sc, const RisArray& ris) {
  if (W.rows() != ris.size())
    throw std::invalid_argument("profile matrix must have one row per element");
  if (!(rho >= 0.0)) throw std::invalid_argument("gain amplitude must be >= 0");
  const Eigen::VectorXcd a = cm2_steering(p, ris, sc.wavelength);
  const Eigen::MatrixX3cd D = steering_derivative(p, ris, sc.wavelength);
  const Eigen::VectorXcd c = W.transpose() * a;
  const Eigen::MatrixX3cd E = W.transpose() * D;

  const double gamma = 2.0 * sc.symbol_energy / sc.noise_variance;
  const double cc = c.squaredNorm();
  const Eigen::RowVector3cd cE = c.adjoint() * E;
  const Eigen::Matrix3cd EE = E.adjoint() * E;

  Eigen::Matrix<double, 5, 5> fim = Eigen::Matrix<double, 5, 5>::Zero();
  fim(0, 0) = gamma * cc;                    // rho-rho
  fim(1, 1) = gamma * rho * rho * cc;        // theta-theta
  // rho-theta is exactly zero: Re(j |c|^2) = 0.
  fim.block<1, 3>(0, 2) = gamma * rho * cE.real();
  fim.block<1, 3>(1, 2) = gamma * rho * rho * cE.imag();
  fim.block<3, 3>(2, 2) = gamma * rho * rho * EE.real();
  fim.block<3, 1>(2, 0) = fim.block<1, 3>(0, 2).transpose();
  fim.block<3, 1>(2, 1) = fim.block<1, 3>(1, 2).transpose();
  return fim;
}

Eigen::Matrix3d efim_schur(const Eigen::Matrix<double, 5, 5>& fim) {
  const Eigen::Matrix2d nuisance = fim.block<2, 2>(0, 0);
  const Eigen::Matrix<double, 2, 3> cross = fim.block<2, 3>(0, 2);
  const Eigen::Matrix3d position = fim.block<3, 3>(2, 2);
  // The nuisance block is diagonal by construction; treat it as singular when
  // either entry vanishes relative to the other.
  const double scale = nuisance.diagonal().cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(nuisance);
  if (scale <= 0.0 || eig.eigenvalues().minCoeff() <= 1e-12 * scale)
    return Eigen::Matrix3d::Zero();
  return position - cross.transpose() * nuisance.inverse() * cross;
}

Eigen::Matrix3d efim_projection(const CartesianPosition& p, double rho,
                                const Eigen::MatrixXcd& W, const Scenario& sc,
                                const RisArray& ris) {
  if (W.rows() != ris.size())
    throw std::invalid_argument("profile matrix must have one row per element");
  const Eigen::VectorXcd a = cm2_steering(p, ris, sc.wavelength);
  const Eigen::MatrixX3cd D = steering_derivative(p, ris, sc.wavelength);
  const Eigen::VectorXcd c = W.transpose() * a;
  const Eigen::MatrixX3cd E = W.transpose() * D;
  const double cc = c.squaredNorm();
  if (!(cc > 0.0)) return Eigen::Matrix3d::Zero();
  const Eigen::RowVector3cd cE = c.adjoint() * E;
  const Eigen::Matrix3cd proj =
      E.adjoint() * E - cE.adjoint() * cE / cc;
  const double gamma =
      2.0 * rho * rho * sc.symbol_energy / sc.noise_variance;
  return gamma * proj.real();
}

double peb(const Eigen::Matrix3d& efim) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(efim);
  const Eigen::Vector3d ev = eig.eigenvalues();
  const double cutoff = 1e-12 * ev.cwiseAbs().maxCoeff();
  double trace_inv = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (ev(i) <= cutoff) return std::numeric_limits<double>::infinity();
    trace_inv += 1.0 / ev(i);
  }
  return std::sqrt(trace_inv);
}

double prior_peb(double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  return sigma * std::sqrt(3.0);
}

double snr_db(const Eigen::MatrixXcd& W, const CartesianPosition& p,
              const Scenario& sc, const RisArray& ris) {
  if (W.rows() != ris.size())
    throw std::invalid_argument("profile matrix must have one row per element");
  const SphericalCoords c = spherical_from_cartesian(p);
  const double rho = cm1_amplitude(c, sc);
  const Eigen::VectorXcd a = cm2_steering(p, ris, sc.wavelength);
  const Eigen::VectorXcd beams = W.transpose() * a;
  const double mean_gain = beams.squaredNorm() / static_cast<double>(W.cols());
  const double snr =
      sc.symbol_energy * rho * rho * mean_gain / sc.noise_variance;
  return 10.0 * std::log10(snr);
}

}  // namespace rislens
