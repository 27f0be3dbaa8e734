#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "heisenet/network.hpp"
#include "heisenet/rng.hpp"

namespace heisenet {

/// True parameters and a coarse classical estimate of them.
struct PriorKnowledge {
    Eigen::VectorXd phi_true;
    Eigen::VectorXd phi_cl;

    Eigen::VectorXd delta() const { return phi_true - phi_cl; }
};

/// phi_cl = phi_true - delta with delta_i uniform on [-c/sqrt(N), +c/sqrt(N)].
PriorKnowledge shot_noise_prior(const Eigen::VectorXd& phi_true, double mean_photons, double c,
                                Rng& rng);
PriorKnowledge shot_noise_prior(const Eigen::VectorXd& phi_true, double mean_photons, double c,
                                std::uint64_t seed);

/// Input-stage reflectivity omega = atan2(cos(phi_cl_1), sin(phi_cl_1) cos(dalpha)) / 2;
/// the doubly-degenerate point (both arguments zero) returns the +pi/4 branch.
double omega_from_prior(double phi_cl_1, double delta_alpha);

/// Two-channel family: U_phi carries a beam splitter (phi_1) and two phase
/// shifts (phi_2, phi_3); the auxiliary stages are parametrised by the
/// control phases alpha_1, alpha_2 and by the prior phi_cl.
struct TwoChannelConfig {
    std::array<double, 3> phi{0.0, 0.0, 0.0};
    std::array<double, 3> phi_cl{0.0, 0.0, 0.0};
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    double delta_alpha() const { return alpha1 - alpha2; }
    double omega() const { return omega_from_prior(phi_cl[0], delta_alpha()); }

    /// Control split alpha_1 = +dalpha/2, alpha_2 = -dalpha/2.
    static TwoChannelConfig with_delta_alpha(double dalpha) {
        TwoChannelConfig config;
        config.alpha1 = dalpha / 2.0;
        config.alpha2 = -dalpha / 2.0;
        return config;
    }
};

struct StageTriple {
    UnitaryMatrix f_in;
    UnitaryMatrix u_phi;
    UnitaryMatrix f_out;

    UnitaryMatrix composed() const { return compose({f_in, u_phi, f_out}); }
};

StageTriple build_two_channel(const TwoChannelConfig& config);

/// Closed-form acquired phase of the two-channel family, quadrant-aware.
/// Equals the composed-stage phase exactly when phi_2 - phi_cl_2 =
/// phi_3 - phi_cl_3 (in particular at a perfect prior); the antisymmetric
/// prior-error term enters with the convention in which dalpha = pi/2 gives
/// f = phi_1 + (dphi_2 + dphi_3)/2 and dalpha = 0 gives
/// f = (dphi_2 + dphi_3)/2 + ((dphi_2 - dphi_3)/2) sin(phi_1) + O(dphi^3).
/// Throws std::domain_error on the singular family where both arctangent
/// arguments vanish identically.
double f_two_channel_closed(const TwoChannelConfig& config);

/// Real orthogonal completion of the first column (sqrt(w_1), ..., sqrt(w_M))
/// by a Householder reflection; the (1,1) entry is non-negative.
UnitaryMatrix complete_unitary_from_weights(const std::vector<double>& weights);

/// V = Ups_PS(pi/4, -pi/4) U_BS(pi/4); V^dag U_BS(phi) V = diag(e^{i phi}, e^{-i phi}).
UnitaryMatrix v_gadget();

/// Two-channel local network of the generalized scheme, composed into one
/// 2x2 block. At delta_alpha = pi/2 with known local phase shifts it reduces
/// to the V-gadget conjugation diag(e^{i phi_1}, e^{-i phi_1}).
UnitaryMatrix build_generalized_local(double delta_alpha, const std::array<double, 3>& phi_local,
                                      const std::array<double, 3>& phi_cl_local);

enum class ChannelKind { PhaseShift, BeamSplitterViaV, GeneralizedLocal };

/// Per-channel tag of the linear-combination scenario. Beam-splitter and
/// generalized-local channels occupy a dedicated auxiliary mode pair; the
/// weight-bearing port is the first of the pair. For a generalized-local
/// channel the main parameter is the local phi_1; the local phase shifts
/// (phi_2, phi_3) and their priors ride along here.
struct LinearChannel {
    ChannelKind kind = ChannelKind::PhaseShift;
    double delta_alpha = 0.0;
    std::array<double, 2> local_phase_shifts{0.0, 0.0};
    std::array<double, 2> local_phase_priors{0.0, 0.0};
};

struct LinearCombConfig {
    std::vector<double> weights;        // non-negative, sum to 1
    std::vector<LinearChannel> channels;  // empty = all phase shifts
    Eigen::VectorXd phi;
    Eigen::VectorXd phi_cl;

    /// L(phi) = sum_i w_i phi_i.
    double linear_combination(const Eigen::VectorXd& values) const;
};

StageTriple build_linear_comb(const LinearCombConfig& config);

}  // namespace heisenet
