#include "heisenet/scenarios.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "heisenet/angles.hpp"

namespace heisenet {

PriorKnowledge shot_noise_prior(const Eigen::VectorXd& phi_true, double mean_photons, double c,
                                Rng& rng) {
    if (mean_photons <= 0.0) {
        throw std::invalid_argument("shot_noise_prior: mean photon number must be > 0");
    }
    double bound = c / std::sqrt(mean_photons);
    PriorKnowledge prior;
    prior.phi_true = phi_true;
    prior.phi_cl = phi_true;
    for (Eigen::Index i = 0; i < phi_true.size(); ++i) {
        prior.phi_cl(i) -= rng.uniform(-bound, bound);
    }
    return prior;
}

PriorKnowledge shot_noise_prior(const Eigen::VectorXd& phi_true, double mean_photons, double c,
                                std::uint64_t seed) {
    Rng rng(seed);
    return shot_noise_prior(phi_true, mean_photons, c, rng);
}

double omega_from_prior(double phi_cl_1, double delta_alpha) {
    double y = std::cos(phi_cl_1);
    double x = std::sin(phi_cl_1) * std::cos(delta_alpha);
    if (y == 0.0 && x == 0.0) {
        return pi / 4.0;
    }
    return 0.5 * std::atan2(y, x);
}

StageTriple build_two_channel(const TwoChannelConfig& config) {
    double omega = config.omega();
    // Traversal order within each stage: F_in = BS(omega) then the control
    // phases; U_phi = BS(phi_1) then the unknown phase shifts; F_out = the
    // prior-cancelling phases then BS(omega - pi/2).
    UnitaryMatrix f_in = compose({beam_splitter(2, 1, 2, omega),
                                  phase_shift({config.alpha1, config.alpha2})});
    UnitaryMatrix u_phi = compose({beam_splitter(2, 1, 2, config.phi[0]),
                                   phase_shift({config.phi[1], config.phi[2]})});
    UnitaryMatrix f_out = compose({phase_shift({-config.alpha1 - config.phi_cl[1],
                                                -config.alpha2 - config.phi_cl[2]}),
                                   beam_splitter(2, 1, 2, omega - pi / 2.0)});
    return StageTriple{std::move(f_in), std::move(u_phi), std::move(f_out)};
}

double f_two_channel_closed(const TwoChannelConfig& config) {
    double dphi2 = config.phi[1] - config.phi_cl[1];
    double dphi3 = config.phi[2] - config.phi_cl[2];
    double avg = 0.5 * (dphi2 + dphi3);
    double d = 0.5 * (dphi2 - dphi3);
    double dalpha = config.delta_alpha();
    double phi1 = config.phi[0];
    double c1 = config.phi_cl[0];
    double root = 1.0 - std::sin(c1) * std::sin(c1) * std::sin(dalpha) * std::sin(dalpha);
    double num = std::sin(phi1) * std::sin(dalpha + d) * std::sqrt(std::max(0.0, root));
    double den = std::cos(phi1) * std::cos(c1) * std::cos(d) +
                 std::sin(phi1) * std::sin(c1) * std::cos(dalpha) * std::cos(dalpha + d);
    if (std::abs(num) < 1e-15 && std::abs(den) < 1e-15) {
        throw std::domain_error("f_two_channel_closed: arctangent argument is 0/0");
    }
    return wrap_angle(avg + std::atan2(num, den));
}

UnitaryMatrix complete_unitary_from_weights(const std::vector<double>& weights) {
    const int m = static_cast<int>(weights.size());
    if (m < 1) {
        throw std::invalid_argument("complete_unitary_from_weights: empty weight vector");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) {
            throw std::invalid_argument("complete_unitary_from_weights: negative weight");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("complete_unitary_from_weights: weights sum to " +
                                    std::to_string(sum));
    }
    Eigen::VectorXd target(m);
    for (int i = 0; i < m; ++i) {
        target(i) = std::sqrt(weights[static_cast<std::size_t>(i)]);
    }
    // Householder reflection swapping e_1 and the target column; H e_1 =
    // target and H(1,1) = sqrt(w_1) >= 0.
    Eigen::VectorXd v = Eigen::VectorXd::Unit(m, 0) - target;
    double norm_sq = v.squaredNorm();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m);
    if (norm_sq > 1e-30) {
        h -= (2.0 / norm_sq) * (v * v.transpose());
    }
    return UnitaryMatrix::from_matrix(h.cast<Complex>());
}

UnitaryMatrix v_gadget() {
    return compose({beam_splitter(2, 1, 2, pi / 4.0), phase_shift({pi / 4.0, -pi / 4.0})});
}

UnitaryMatrix build_generalized_local(double delta_alpha, const std::array<double, 3>& phi_local,
                                      const std::array<double, 3>& phi_cl_local) {
    TwoChannelConfig local;
    local.phi = phi_local;
    local.phi_cl = phi_cl_local;
    local.alpha1 = delta_alpha / 2.0;
    local.alpha2 = -delta_alpha / 2.0;
    return build_two_channel(local).composed();
}

double LinearCombConfig::linear_combination(const Eigen::VectorXd& values) const {
    if (values.size() != static_cast<Eigen::Index>(weights.size())) {
        throw std::invalid_argument("linear_combination: length mismatch");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        acc += weights[static_cast<std::size_t>(i)] * values(i);
    }
    return acc;
}

namespace {

/// Prior-implied phase carried by one channel: the prior itself for a phase
/// shift or V-gadget channel, the local closed-form phase at the prior for a
/// generalized-local channel.
double channel_prior_phase(const LinearChannel& channel, double phi_cl_i) {
    if (channel.kind != ChannelKind::GeneralizedLocal) {
        return phi_cl_i;
    }
    TwoChannelConfig local;
    local.phi = {phi_cl_i, channel.local_phase_priors[0], channel.local_phase_priors[1]};
    local.phi_cl = local.phi;
    local.alpha1 = channel.delta_alpha / 2.0;
    local.alpha2 = -channel.delta_alpha / 2.0;
    return f_two_channel_closed(local);
}

void embed_block(Eigen::MatrixXcd& into, const Eigen::MatrixXcd& block, int a, int b) {
    into(a, a) = block(0, 0);
    into(a, b) = block(0, 1);
    into(b, a) = block(1, 0);
    into(b, b) = block(1, 1);
}

}  // namespace

StageTriple build_linear_comb(const LinearCombConfig& config) {
    const int m = static_cast<int>(config.weights.size());
    if (m < 1) {
        throw std::invalid_argument("build_linear_comb: empty configuration");
    }
    if (config.phi.size() != m || config.phi_cl.size() != m) {
        throw std::invalid_argument("build_linear_comb: phi/phi_cl length mismatch");
    }
    std::vector<LinearChannel> channels = config.channels;
    if (channels.empty()) {
        channels.resize(static_cast<std::size_t>(m));
    }
    if (static_cast<int>(channels.size()) != m) {
        throw std::invalid_argument("build_linear_comb: channel tag count mismatch");
    }

    // Auxiliary mode pair per beam-splitter / generalized-local channel,
    // appended after the m primary ports.
    std::vector<int> aux_port(static_cast<std::size_t>(m), -1);
    int dim = m;
    for (int i = 0; i < m; ++i) {
        if (channels[static_cast<std::size_t>(i)].kind != ChannelKind::PhaseShift) {
            aux_port[static_cast<std::size_t>(i)] = dim++;
        }
    }

    UnitaryMatrix scatter = complete_unitary_from_weights(config.weights);
    Eigen::MatrixXcd f_in = Eigen::MatrixXcd::Identity(dim, dim);
    f_in.topLeftCorner(m, m) = scatter.matrix();

    Eigen::MatrixXcd u_phi = Eigen::MatrixXcd::Identity(dim, dim);
    const UnitaryMatrix v = v_gadget();
    for (int i = 0; i < m; ++i) {
        const LinearChannel& channel = channels[static_cast<std::size_t>(i)];
        double phi_i = config.phi(i);
        switch (channel.kind) {
            case ChannelKind::PhaseShift:
                u_phi(i, i) = std::polar(1.0, phi_i);
                break;
            case ChannelKind::BeamSplitterViaV: {
                Eigen::MatrixXcd block = v.matrix().adjoint() *
                                         beam_splitter(2, 1, 2, phi_i).matrix() * v.matrix();
                embed_block(u_phi, block, i, aux_port[static_cast<std::size_t>(i)]);
                break;
            }
            case ChannelKind::GeneralizedLocal: {
                UnitaryMatrix block = build_generalized_local(
                    channel.delta_alpha,
                    {phi_i, channel.local_phase_shifts[0], channel.local_phase_shifts[1]},
                    {config.phi_cl(i), channel.local_phase_priors[0],
                     channel.local_phase_priors[1]});
                embed_block(u_phi, block.matrix(), i, aux_port[static_cast<std::size_t>(i)]);
                break;
            }
        }
    }

    Eigen::VectorXd prior_phases(m);
    for (int i = 0; i < m; ++i) {
        prior_phases(i) = channel_prior_phase(channels[static_cast<std::size_t>(i)],
                                              config.phi_cl(i));
    }
    double refocus_phase = config.linear_combination(prior_phases);

    Eigen::MatrixXcd f_out = f_in.adjoint();
    for (int i = 0; i < m; ++i) {
        f_out.col(i) *= std::polar(1.0, -prior_phases(i));
    }
    f_out.row(0) *= std::polar(1.0, refocus_phase);

    return StageTriple{UnitaryMatrix::from_matrix(std::move(f_in)),
                       UnitaryMatrix::from_matrix(std::move(u_phi)),
                       UnitaryMatrix::from_matrix(std::move(f_out))};
}

}  // namespace heisenet
