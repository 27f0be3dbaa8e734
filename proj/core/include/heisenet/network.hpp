#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <variant>
#include <vector>

namespace heisenet {

using Complex = std::complex<double>;

inline constexpr double unitarity_tolerance = 1e-12;

/// M x M scattering matrix of a passive linear stage. Construction and every
/// composition validate max|U^dag U - I| <= 1e-12. Channel indices are
/// 1-based throughout the public interface.
class UnitaryMatrix {
  public:
    /// Validating factory; throws std::invalid_argument on a non-unitary or
    /// non-square input.
    static UnitaryMatrix from_matrix(Eigen::MatrixXcd m);

    static UnitaryMatrix identity(int dim);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return mat_; }

    /// Scattering amplitude from in_ch into out_ch (1-based).
    Complex entry(int out_ch, int in_ch) const;

    UnitaryMatrix adjoint() const;
    double unitarity_error() const;

  private:
    explicit UnitaryMatrix(Eigen::MatrixXcd m) : mat_(std::move(m)) {}
    Eigen::MatrixXcd mat_;
};

/// U_BS(phi) = exp(i phi sigma_y) acting on channels (i, j) of an M-channel
/// network: [[cos phi, sin phi], [-sin phi, cos phi]] on the (i, j) block,
/// identity elsewhere.
UnitaryMatrix beam_splitter(int dim, int i, int j, double phi);

/// diag(e^{i lambda_1}, ..., e^{i lambda_M}).
UnitaryMatrix phase_shift(const std::vector<double>& lambdas);

/// Product of stages listed in traversal order (first element acts first on
/// the probe), i.e. compose({A, B, C}) = C * B * A.
UnitaryMatrix compose(std::span<const UnitaryMatrix> stages);
UnitaryMatrix compose(std::initializer_list<UnitaryMatrix> stages);

/// Single-photon transition quantities chi, P = |chi|^2, f = arg chi.
/// The phase is the full-quadrant arctangent of chi; it is flagged undefined
/// when P < 1e-15.
struct TransitionResult {
    Complex chi;
    double prob = 0.0;
    double phase = 0.0;
    bool phase_defined = true;
};

TransitionResult transition(const UnitaryMatrix& u, int in_ch = 1, int out_ch = 1);

/// Angle slot of a parametrised element: either a fixed value or a binding
/// to component `index` (1-based) of the evaluation parameter vector.
class Angle {
  public:
    static Angle fixed(double value) { return Angle(value, 0); }
    static Angle parameter(int index);

    bool bound() const { return index_ > 0; }
    int parameter_index() const { return index_; }
    double resolve(std::span<const double> phi) const;

  private:
    Angle(double value, int index) : value_(value), index_(index) {}
    double value_;
    int index_;
};

struct BeamSplitterElement {
    int i = 1;
    int j = 2;
    Angle angle = Angle::fixed(0.0);
};

struct PhaseShiftElement {
    int channel = 1;
    Angle angle = Angle::fixed(0.0);
};

struct RawElement {
    Eigen::MatrixXcd matrix;  // validated when the network is constructed
};

using NetworkElement = std::variant<BeamSplitterElement, PhaseShiftElement, RawElement>;

/// Ordered element layout whose angles may bind to components of a parameter
/// vector. Evaluation at any admissible phi yields a valid UnitaryMatrix.
class ParamNetwork {
  public:
    ParamNetwork(int dim, std::vector<NetworkElement> layout);

    int dim() const { return dim_; }
    /// Highest bound parameter index (the expected length of phi).
    int num_params() const { return num_params_; }

    UnitaryMatrix evaluate(std::span<const double> phi) const;

  private:
    int dim_;
    int num_params_;
    std::vector<NetworkElement> layout_;
};

}  // namespace heisenet
