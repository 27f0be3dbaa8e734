#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "heisenet/homodyne.hpp"
#include "heisenet/network.hpp"
#include "heisenet/scenarios.hpp"

namespace heisenet {

enum class ThetaMode {
    Ideal,  // theta tuned from the true acquired phase (condition as stated)
    Prior,  // theta tuned from the prior-implied phase
};

struct TwoChannelScenario {
    std::array<double, 3> phi{0.7, 0.3, 0.2};
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

struct LinearCombScenario {
    std::vector<double> weights;
    std::vector<LinearChannel> channels;  // empty = all phase shifts
    Eigen::VectorXd phi;
};

/// User-specified network evaluated as-is; any auxiliary stages are part of
/// the layout.
struct RawScenario {
    ParamNetwork network;
    Eigen::VectorXd phi;
    int in_channel = 1;
    int out_channel = 1;
};

using ScenarioSpec = std::variant<TwoChannelScenario, LinearCombScenario, RawScenario>;

int scenario_num_params(const ScenarioSpec& scenario);
Eigen::VectorXd scenario_phi_true(const ScenarioSpec& scenario);

/// Transition quantities of the scenario with prior-dependent stages built
/// from phi_cl, evaluated at parameters phi.
TransitionResult scenario_transition(const ScenarioSpec& scenario, const Eigen::VectorXd& phi,
                                     const Eigen::VectorXd& phi_cl);

/// The three stages (or the raw network's single unitary repeated as U_phi
/// with identity auxiliaries) built from phi_cl and evaluated at phi.
StageTriple scenario_stages(const ScenarioSpec& scenario, const Eigen::VectorXd& phi,
                            const Eigen::VectorXd& phi_cl);

/// Transition quantities of a scenario whose prior-dependent stages are
/// built from phi_cl: probability and phase at the true parameters, plus the
/// prior-implied phase (the same network evaluated at phi_cl).
struct ScenarioEvaluation {
    double prob = 1.0;
    double f_true = 0.0;
    double f_prior = 0.0;
};

ScenarioEvaluation evaluate_scenario(const ScenarioSpec& scenario, const Eigen::VectorXd& phi_cl);

struct ExperimentConfig {
    ScenarioSpec scenario = TwoChannelScenario{};
    std::vector<double> photon_grid;  // N values
    int samples_per_run = 10000;      // n
    int repetitions = 200;            // R
    double k = 0.25;
    int sign = +1;
    double prior_scale = 1.0;  // c
    ThetaMode theta_mode = ThetaMode::Ideal;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct EstimationResult {
    double f_hat = 0.0;
    int n = 0;
    double theta = 0.0;
    bool converged = false;
};

/// Maximum-likelihood estimate of f over the bracket, with the Gaussian
/// model sigma^2(f) = variance_closed_form(prob, f, theta, r); located by
/// golden-section search to 1e-10 bracket width. Not converged when the
/// maximizer sits at a bracket edge or the likelihood carries no phase
/// information (r = 0 or prob = 0).
EstimationResult mle_f(const MeasurementRecord& record, double theta, double prob, double r,
                       double bracket_lo, double bracket_hi);

struct PointResult {
    double mean_photons = 0.0;
    std::vector<EstimationResult> estimates;
    /// Sample variance over converged repetitions of the estimation error
    /// f_hat - f_true (per-repetition truth).
    double variance_per_estimate = 0.0;
    /// samples_per_run * variance_per_estimate; comparable to crb().
    double variance_per_sample = 0.0;
    double crb_reference = 0.0;  // 1/(8 rho(k,0) N^2); +inf when rho = 0
    int unconverged = 0;
    bool unreliable = false;  // > 20% repetitions unconverged, or fewer than 2
};

PointResult run_point(const ExperimentConfig& config, double mean_photons);

struct ScalingRow {
    double mean_photons = 0.0;
    double variance = 0.0;  // per-sample normalized (see PointResult)
    double crb = 0.0;
    double ratio = 0.0;
    int unconverged = 0;
    bool unreliable = false;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double slope = 0.0;      // log10(variance) vs log10(N) least squares
    double intercept = 0.0;
    bool any_unreliable = false;
};

ScalingReport scaling_experiment(const ExperimentConfig& config);

struct PriorProbeRow {
    double mean_photons = 0.0;
    double mean_deficit = 0.0;  // mean of (1 - P) * N over draws
    double max_deficit = 0.0;   // max of (1 - P) * N over draws
};

struct PriorProbeOptions {
    std::vector<double> photon_grid;
    double prior_scale = 1.0;
    int repetitions = 200;
    std::uint64_t seed = 0;
    /// When set, the prior error is held at +-prior_scale independent of N
    /// (the growth control) instead of shrinking as 1/sqrt(N).
    bool fixed_error = false;
};

std::vector<PriorProbeRow> prior_sufficiency_probe(const ScenarioSpec& scenario,
                                                   const PriorProbeOptions& options);

}  // namespace heisenet
