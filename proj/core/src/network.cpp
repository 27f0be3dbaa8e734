#include "heisenet/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heisenet {

namespace {

void check_channel(int ch, int dim, const char* what) {
    if (ch < 1 || ch > dim) {
        throw std::out_of_range(std::string(what) + " channel " + std::to_string(ch) +
                                " outside [1, " + std::to_string(dim) + "]");
    }
}

double max_abs(const Eigen::MatrixXcd& m) {
    return m.cwiseAbs().maxCoeff();
}

}  // namespace

UnitaryMatrix UnitaryMatrix::from_matrix(Eigen::MatrixXcd m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument("UnitaryMatrix: matrix must be square and non-empty");
    }
    Eigen::MatrixXcd gram = m.adjoint() * m;
    gram.diagonal().array() -= 1.0;
    double err = max_abs(gram);
    if (err > unitarity_tolerance) {
        throw std::invalid_argument("UnitaryMatrix: max|U^H U - I| = " + std::to_string(err) +
                                    " exceeds tolerance");
    }
    return UnitaryMatrix(std::move(m));
}

UnitaryMatrix UnitaryMatrix::identity(int dim) {
    if (dim < 1) {
        throw std::invalid_argument("UnitaryMatrix: dim must be >= 1");
    }
    return UnitaryMatrix(Eigen::MatrixXcd::Identity(dim, dim));
}

Complex UnitaryMatrix::entry(int out_ch, int in_ch) const {
    check_channel(out_ch, dim(), "output");
    check_channel(in_ch, dim(), "input");
    return mat_(out_ch - 1, in_ch - 1);
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
    return UnitaryMatrix(mat_.adjoint());
}

double UnitaryMatrix::unitarity_error() const {
    Eigen::MatrixXcd gram = mat_.adjoint() * mat_;
    gram.diagonal().array() -= 1.0;
    return max_abs(gram);
}

UnitaryMatrix beam_splitter(int dim, int i, int j, double phi) {
    check_channel(i, dim, "beam splitter");
    check_channel(j, dim, "beam splitter");
    if (i == j) {
        throw std::invalid_argument("beam_splitter: channels must differ");
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
    double c = std::cos(phi);
    double s = std::sin(phi);
    m(i - 1, i - 1) = c;
    m(i - 1, j - 1) = s;
    m(j - 1, i - 1) = -s;
    m(j - 1, j - 1) = c;
    return UnitaryMatrix::from_matrix(std::move(m));
}

UnitaryMatrix phase_shift(const std::vector<double>& lambdas) {
    if (lambdas.empty()) {
        throw std::invalid_argument("phase_shift: needs at least one channel");
    }
    int dim = static_cast<int>(lambdas.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        m(k, k) = std::polar(1.0, lambdas[static_cast<std::size_t>(k)]);
    }
    return UnitaryMatrix::from_matrix(std::move(m));
}

UnitaryMatrix compose(std::span<const UnitaryMatrix> stages) {
    if (stages.empty()) {
        throw std::invalid_argument("compose: empty stage list");
    }
    int dim = stages.front().dim();
    Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(dim, dim);
    for (const UnitaryMatrix& stage : stages) {
        if (stage.dim() != dim) {
            throw std::invalid_argument("compose: stage dimension mismatch");
        }
        product = stage.matrix() * product;
    }
    return UnitaryMatrix::from_matrix(std::move(product));
}

UnitaryMatrix compose(std::initializer_list<UnitaryMatrix> stages) {
    return compose(std::span<const UnitaryMatrix>(stages.begin(), stages.size()));
}

TransitionResult transition(const UnitaryMatrix& u, int in_ch, int out_ch) {
    TransitionResult result;
    result.chi = u.entry(out_ch, in_ch);
    result.prob = std::min(1.0, std::norm(result.chi));
    if (result.prob < 1e-15) {
        result.phase = 0.0;
        result.phase_defined = false;
    } else {
        result.phase = std::atan2(result.chi.imag(), result.chi.real());
        result.phase_defined = true;
    }
    return result;
}

Angle Angle::parameter(int index) {
    if (index < 1) {
        throw std::invalid_argument("Angle: parameter index must be >= 1");
    }
    return Angle(0.0, index);
}

double Angle::resolve(std::span<const double> phi) const {
    if (!bound()) {
        return value_;
    }
    if (index_ > static_cast<int>(phi.size())) {
        throw std::invalid_argument("Angle: parameter index " + std::to_string(index_) +
                                    " exceeds parameter vector length");
    }
    return phi[static_cast<std::size_t>(index_ - 1)];
}

ParamNetwork::ParamNetwork(int dim, std::vector<NetworkElement> layout)
    : dim_(dim), num_params_(0), layout_(std::move(layout)) {
    if (dim_ < 1) {
        throw std::invalid_argument("ParamNetwork: dim must be >= 1");
    }
    for (const NetworkElement& element : layout_) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, BeamSplitterElement>) {
                    check_channel(e.i, dim_, "beam splitter");
                    check_channel(e.j, dim_, "beam splitter");
                    if (e.i == e.j) {
                        throw std::invalid_argument("ParamNetwork: beam splitter channels equal");
                    }
                    num_params_ = std::max(num_params_, e.angle.parameter_index());
                } else if constexpr (std::is_same_v<T, PhaseShiftElement>) {
                    check_channel(e.channel, dim_, "phase shift");
                    num_params_ = std::max(num_params_, e.angle.parameter_index());
                } else {
                    if (e.matrix.rows() != dim_ || e.matrix.cols() != dim_) {
                        throw std::invalid_argument("ParamNetwork: raw stage dimension mismatch");
                    }
                    (void)UnitaryMatrix::from_matrix(e.matrix);
                }
            },
            element);
    }
}

UnitaryMatrix ParamNetwork::evaluate(std::span<const double> phi) const {
    if (static_cast<int>(phi.size()) != num_params_) {
        throw std::invalid_argument("ParamNetwork: expected " + std::to_string(num_params_) +
                                    " parameters, got " + std::to_string(phi.size()));
    }
    Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(dim_, dim_);
    for (const NetworkElement& element : layout_) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, BeamSplitterElement>) {
                    product = beam_splitter(dim_, e.i, e.j, e.angle.resolve(phi)).matrix() * product;
                } else if constexpr (std::is_same_v<T, PhaseShiftElement>) {
                    std::vector<double> lambdas(static_cast<std::size_t>(dim_), 0.0);
                    lambdas[static_cast<std::size_t>(e.channel - 1)] = e.angle.resolve(phi);
                    product = phase_shift(lambdas).matrix() * product;
                } else {
                    product = e.matrix * product;
                }
            },
            element);
    }
    return UnitaryMatrix::from_matrix(std::move(product));
}

}  // namespace heisenet
