#pragma once

#include <Eigen/Dense>
#include <functional>

namespace heisenet {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference gradient. Successive evaluations are unwrapped by 2*pi
/// multiples before differencing, so maps returning principal-value phases
/// differentiate cleanly across the branch cut; for ordinary smooth maps the
/// unwrapping never triggers at small steps.
///
/// The single-argument overload uses the per-component step
/// h_i = eps^(1/3) * max(1, |phi_i|).
Eigen::VectorXd numeric_gradient(const ScalarField& func, const Eigen::VectorXd& phi);
Eigen::VectorXd numeric_gradient(const ScalarField& func, const Eigen::VectorXd& phi, double h);

/// I = (grad sigma^2)(grad sigma^2)^T / (2 sigma^4) with a numeric gradient
/// of the variance map.
Eigen::MatrixXd fisher_exact(const ScalarField& sigma2, const Eigen::VectorXd& phi);
Eigen::MatrixXd fisher_exact(const ScalarField& sigma2, const Eigen::VectorXd& phi, double h);

/// rho(k, ell) = (8k / (1 + 16k^2 + 4 ell))^2.
double rho(double k, double ell);

/// argmax_k rho(k, ell) = sqrt(1 + 4 ell) / 4.
double optimal_k(double ell);

/// I ~ 8 rho(k, ell) N^2 (grad f)(grad f)^T.
Eigen::MatrixXd fisher_asymptotic(double k, double ell, double mean_photons,
                                  const Eigen::VectorXd& grad_f);

/// Cramer-Rao bound (dg/df)^2 / (8 rho N^2); throws std::domain_error when
/// rho(k, ell) = 0.
double crb(double k, double ell, double mean_photons, double dg_df = 1.0);

/// Whether grad_alpha is parallel to grad_f: estimable iff sin(angle) <= tol.
/// The angle is folded to [0, pi/2] (proportionality with either sign).
struct Estimability {
    bool estimable = false;
    double angle = 0.0;
};

Estimability estimability_check(const Eigen::VectorXd& grad_alpha, const Eigen::VectorXd& grad_f,
                                double tol);

/// Dominant eigenpair by power iteration (deterministic start (1,..,1)/sqrt(l),
/// tolerance 1e-12, perturbation fallback when the start is orthogonal to the
/// dominant direction).
struct EigenPair {
    double value = 0.0;
    Eigen::VectorXd vector;
};

EigenPair eigen_rank_one(const Eigen::MatrixXd& matrix);

/// Refocusing deficit ell, detuning k, and photon number of one operating
/// point (conditions ell >= 0, k != 0, N > 0 checked at use sites).
struct ConditionParams {
    double ell = 0.0;
    double k = 0.25;
    double mean_photons = 1.0;
};

struct FisherReport {
    Eigen::MatrixXd exact;
    Eigen::MatrixXd asymptotic;
    double rho = 0.0;
    double crb = 0.0;  // +inf when rho = 0
    double eigenvalue = 0.0;
    Eigen::VectorXd eigenvector;
    double ell = 0.0;
};

/// Full report at phi: exact Fisher from the variance map, asymptotic Fisher
/// from the phase map's gradient, rho/CRB/eigenstructure.
FisherReport fisher_report(const ScalarField& sigma2_map, const ScalarField& f_map,
                           const Eigen::VectorXd& phi, const ConditionParams& params);

}  // namespace heisenet
