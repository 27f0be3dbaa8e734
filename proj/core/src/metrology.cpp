#include "heisenet/metrology.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "heisenet/angles.hpp"

namespace heisenet {

namespace {

double default_step(double component) {
    constexpr double cbrt_eps = 6.055454452393343e-06;  // eps^(1/3)
    return cbrt_eps * std::max(1.0, std::abs(component));
}

double unwrapped_difference(double plus, double minus) {
    double d = plus - minus;
    if (std::abs(d) > pi) {
        d -= 2.0 * pi * std::round(d / (2.0 * pi));
    }
    return d;
}

Eigen::VectorXd gradient_impl(const ScalarField& func, const Eigen::VectorXd& phi,
                              double fixed_h) {
    Eigen::VectorXd grad(phi.size());
    Eigen::VectorXd point = phi;
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        double h = fixed_h > 0.0 ? fixed_h : default_step(phi(i));
        point(i) = phi(i) + h;
        double plus = func(point);
        point(i) = phi(i) - h;
        double minus = func(point);
        point(i) = phi(i);
        grad(i) = unwrapped_difference(plus, minus) / (2.0 * h);
    }
    return grad;
}

}  // namespace

Eigen::VectorXd numeric_gradient(const ScalarField& func, const Eigen::VectorXd& phi) {
    return gradient_impl(func, phi, 0.0);
}

Eigen::VectorXd numeric_gradient(const ScalarField& func, const Eigen::VectorXd& phi, double h) {
    if (h <= 0.0) {
        throw std::invalid_argument("numeric_gradient: step must be > 0");
    }
    return gradient_impl(func, phi, h);
}

namespace {

Eigen::MatrixXd fisher_exact_impl(const ScalarField& sigma2, const Eigen::VectorXd& phi,
                                  double h) {
    double value = sigma2(phi);
    if (value <= 0.0) {
        throw std::domain_error("fisher_exact: variance must be > 0 at phi");
    }
    Eigen::VectorXd grad = h > 0.0 ? numeric_gradient(sigma2, phi, h) : numeric_gradient(sigma2, phi);
    return grad * grad.transpose() / (2.0 * value * value);
}

}  // namespace

Eigen::MatrixXd fisher_exact(const ScalarField& sigma2, const Eigen::VectorXd& phi) {
    return fisher_exact_impl(sigma2, phi, 0.0);
}

Eigen::MatrixXd fisher_exact(const ScalarField& sigma2, const Eigen::VectorXd& phi, double h) {
    if (h <= 0.0) {
        throw std::invalid_argument("fisher_exact: step must be > 0");
    }
    return fisher_exact_impl(sigma2, phi, h);
}

double rho(double k, double ell) {
    double ratio = 8.0 * k / (1.0 + 16.0 * k * k + 4.0 * ell);
    return ratio * ratio;
}

double optimal_k(double ell) {
    if (ell < 0.0) {
        throw std::invalid_argument("optimal_k: ell must be >= 0");
    }
    return std::sqrt(1.0 + 4.0 * ell) / 4.0;
}

Eigen::MatrixXd fisher_asymptotic(double k, double ell, double mean_photons,
                                  const Eigen::VectorXd& grad_f) {
    if (mean_photons <= 0.0) {
        throw std::invalid_argument("fisher_asymptotic: mean photon number must be > 0");
    }
    return 8.0 * rho(k, ell) * mean_photons * mean_photons * (grad_f * grad_f.transpose());
}

double crb(double k, double ell, double mean_photons, double dg_df) {
    double prefactor = rho(k, ell);
    if (prefactor <= 0.0) {
        throw std::domain_error("crb: rho(k, ell) = 0, bound undefined");
    }
    if (mean_photons <= 0.0) {
        throw std::invalid_argument("crb: mean photon number must be > 0");
    }
    return dg_df * dg_df / (8.0 * prefactor * mean_photons * mean_photons);
}

Estimability estimability_check(const Eigen::VectorXd& grad_alpha, const Eigen::VectorXd& grad_f,
                                double tol) {
    double norm_f = grad_f.norm();
    if (norm_f == 0.0) {
        throw std::invalid_argument("estimability_check: grad_f must be nonzero");
    }
    if (grad_alpha.size() != grad_f.size()) {
        throw std::invalid_argument("estimability_check: gradient lengths differ");
    }
    double norm_a = grad_alpha.norm();
    if (norm_a == 0.0) {
        // The zero function is a (degenerate) function of f.
        return Estimability{true, 0.0};
    }
    Eigen::VectorXd unit_f = grad_f / norm_f;
    double along = grad_alpha.dot(unit_f);
    double perp = (grad_alpha - along * unit_f).norm();
    double angle = std::atan2(perp, std::abs(along));
    return Estimability{std::sin(angle) <= tol, angle};
}

EigenPair eigen_rank_one(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) {
        throw std::invalid_argument("eigen_rank_one: matrix must be square");
    }
    const Eigen::Index l = matrix.rows();
    const double scale = matrix.cwiseAbs().maxCoeff();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(l) / std::sqrt(static_cast<double>(l));
    if (scale == 0.0) {
        return EigenPair{0.0, v};
    }
    constexpr int max_iterations = 10000;
    double value = 0.0;
    for (int iteration = 0; iteration < max_iterations; ++iteration) {
        Eigen::VectorXd w = matrix * v;
        double norm = w.norm();
        if (norm <= 1e-14 * scale) {
            // Start vector (numerically) orthogonal to the dominant
            // eigenvector; restart from a fixed perturbed direction.
            for (Eigen::Index i = 0; i < l; ++i) {
                v(i) = 1.0 + static_cast<double>(i + 1);
            }
            v.normalize();
            continue;
        }
        v = w / norm;
        value = v.dot(matrix * v);
        if ((matrix * v - value * v).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
            break;
        }
    }
    return EigenPair{value, v};
}

FisherReport fisher_report(const ScalarField& sigma2_map, const ScalarField& f_map,
                           const Eigen::VectorXd& phi, const ConditionParams& params) {
    FisherReport report;
    report.exact = fisher_exact(sigma2_map, phi);
    Eigen::VectorXd grad_f = numeric_gradient(f_map, phi);
    report.asymptotic = fisher_asymptotic(params.k, params.ell, params.mean_photons, grad_f);
    report.rho = rho(params.k, params.ell);
    report.crb = report.rho > 0.0 ? crb(params.k, params.ell, params.mean_photons)
                                  : std::numeric_limits<double>::infinity();
    EigenPair pair = eigen_rank_one(report.asymptotic);
    report.eigenvalue = pair.value;
    report.eigenvector = pair.vector;
    report.ell = params.ell;
    return report;
}

}  // namespace heisenet
