#pragma once

#include <Eigen/Dense>

#include "heisenet/network.hpp"

namespace heisenet {

/// Single-mode squeezed-vacuum probe: real squeezing parameter r >= 0
/// injected into one channel; mean photon number N = sinh^2 r.
struct ProbeSpec {
    double r = 0.0;
    int channel = 1;

    double mean_photons() const;

    /// Probe whose mean photon number is exactly N (r = arcsinh(sqrt(N))).
    static ProbeSpec from_photon_number(double n_photons, int channel = 1);
};

/// 2M x 2M real quadrature covariance in (x_1..x_M, p_1..p_M) block
/// ordering; vacuum variance is 1/2. Construction validates symmetry
/// (1e-12) and positive definiteness (smallest eigenvalue > 1e-12).
class CovarianceMatrix {
  public:
    static CovarianceMatrix from_matrix(Eigen::MatrixXd m);

    int modes() const { return static_cast<int>(mat_.rows()) / 2; }
    const Eigen::MatrixXd& matrix() const { return mat_; }

  private:
    explicit CovarianceMatrix(Eigen::MatrixXd m) : mat_(std::move(m)) {}
    Eigen::MatrixXd mat_;
};

/// Phase-space representation [[Re u, -Im u], [Im u, Re u]] of a passive
/// unitary; orthogonal and symplectic.
class SymplecticOrthogonal {
  public:
    friend SymplecticOrthogonal symplectic_from_unitary(const UnitaryMatrix& u);

    int modes() const { return static_cast<int>(mat_.rows()) / 2; }
    const Eigen::MatrixXd& matrix() const { return mat_; }

  private:
    explicit SymplecticOrthogonal(Eigen::MatrixXd m) : mat_(std::move(m)) {}
    Eigen::MatrixXd mat_;
};

/// Gamma_0 = 1/2 diag(e^{2R}, e^{-2R}) with R = diag(..., r at the probe
/// channel, ...).
CovarianceMatrix input_covariance(const ProbeSpec& probe, int modes);

SymplecticOrthogonal symplectic_from_unitary(const UnitaryMatrix& u);

/// Gamma' = R Gamma R^T.
CovarianceMatrix evolve_covariance(const CovarianceMatrix& gamma, const SymplecticOrthogonal& r);

/// 2x2 [(dX^2)_cc, (dXP)_cc; (dXP)_cc, (dP^2)_cc] of one mode.
Eigen::Matrix2d reduced_covariance(const CovarianceMatrix& gamma, int channel);

/// Variance of x_theta: (O_theta Gamma' O_theta^T)_11 with the clockwise
/// rotation O_theta = [[cos, sin], [-sin, cos]].
double quadrature_variance(const Eigen::Matrix2d& gamma2, double theta);

/// sigma^2 = 1/2 + P (sinh^2 r + cos(2f - 2theta) sinh r cosh r).
double variance_closed_form(double prob, double f, double theta, double r);

/// tr(Gamma)/2 - M/2; invariant under passive evolution.
double mean_photon_number(const CovarianceMatrix& gamma);

}  // namespace heisenet
