#include "heisenet/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heisenet {

double ProbeSpec::mean_photons() const {
    double sh = std::sinh(r);
    return sh * sh;
}

ProbeSpec ProbeSpec::from_photon_number(double n_photons, int channel) {
    if (n_photons < 0.0) {
        throw std::invalid_argument("ProbeSpec: photon number must be >= 0");
    }
    return ProbeSpec{std::asinh(std::sqrt(n_photons)), channel};
}

CovarianceMatrix CovarianceMatrix::from_matrix(Eigen::MatrixXd m) {
    if (m.rows() != m.cols() || m.rows() < 2 || m.rows() % 2 != 0) {
        throw std::invalid_argument("CovarianceMatrix: needs a 2M x 2M matrix");
    }
    double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) {
        throw std::invalid_argument("CovarianceMatrix: asymmetry " + std::to_string(asym));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() <= 1e-12) {
        throw std::invalid_argument("CovarianceMatrix: not positive definite");
    }
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix input_covariance(const ProbeSpec& probe, int modes) {
    if (probe.r < 0.0) {
        throw std::invalid_argument("input_covariance: squeezing parameter must be >= 0");
    }
    if (probe.channel < 1 || probe.channel > modes) {
        throw std::out_of_range("input_covariance: probe channel outside [1, M]");
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(2 * modes, 0.5);
    diag(probe.channel - 1) = 0.5 * std::exp(2.0 * probe.r);
    diag(modes + probe.channel - 1) = 0.5 * std::exp(-2.0 * probe.r);
    return CovarianceMatrix::from_matrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymplecticOrthogonal symplectic_from_unitary(const UnitaryMatrix& u) {
    const int m = u.dim();
    Eigen::MatrixXd r(2 * m, 2 * m);
    Eigen::MatrixXd re = u.matrix().real();
    Eigen::MatrixXd im = u.matrix().imag();
    r.topLeftCorner(m, m) = re;
    r.topRightCorner(m, m) = -im;
    r.bottomLeftCorner(m, m) = im;
    r.bottomRightCorner(m, m) = re;
    return SymplecticOrthogonal(std::move(r));
}

CovarianceMatrix evolve_covariance(const CovarianceMatrix& gamma, const SymplecticOrthogonal& r) {
    if (gamma.modes() != r.modes()) {
        throw std::invalid_argument("evolve_covariance: dimension mismatch");
    }
    Eigen::MatrixXd evolved = r.matrix() * gamma.matrix() * r.matrix().transpose();
    evolved = 0.5 * (evolved + evolved.transpose()).eval();
    return CovarianceMatrix::from_matrix(std::move(evolved));
}

Eigen::Matrix2d reduced_covariance(const CovarianceMatrix& gamma, int channel) {
    const int m = gamma.modes();
    if (channel < 1 || channel > m) {
        throw std::out_of_range("reduced_covariance: channel outside [1, M]");
    }
    const int x = channel - 1;
    const int p = m + channel - 1;
    Eigen::Matrix2d reduced;
    reduced << gamma.matrix()(x, x), gamma.matrix()(x, p), gamma.matrix()(p, x),
        gamma.matrix()(p, p);
    return reduced;
}

double quadrature_variance(const Eigen::Matrix2d& gamma2, double theta) {
    double c = std::cos(theta);
    double s = std::sin(theta);
    return c * c * gamma2(0, 0) + 2.0 * c * s * gamma2(0, 1) + s * s * gamma2(1, 1);
}

double variance_closed_form(double prob, double f, double theta, double r) {
    double sh = std::sinh(r);
    double ch = std::cosh(r);
    return 0.5 + prob * (sh * sh + std::cos(2.0 * (f - theta)) * sh * ch);
}

double mean_photon_number(const CovarianceMatrix& gamma) {
    return 0.5 * gamma.matrix().trace() - 0.5 * gamma.modes();
}

}  // namespace heisenet
