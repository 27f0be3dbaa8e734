#include "heisenet/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

#include "heisenet/angles.hpp"
#include "heisenet/gaussian.hpp"
#include "heisenet/metrology.hpp"

namespace heisenet {

std::string format_value(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

void write_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << name << '[' << (i + 1) << "][" << (j + 1) << "].re,"
                << format_value(m(i, j).real()) << '\n';
            out << name << '[' << (i + 1) << "][" << (j + 1) << "].im,"
                << format_value(m(i, j).imag()) << '\n';
        }
    }
}

void write_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << name << '[' << (i + 1) << "][" << (j + 1) << "],"
                << format_value(m(i, j)) << '\n';
        }
    }
}

int run_scaling(const RunSpec& spec, std::ostream& out) {
    ScalingReport report = scaling_experiment(spec.experiment);
    out << "N,variance,crb,ratio,unconverged\n";
    std::string unreliable_list;
    for (const ScalingRow& row : report.rows) {
        out << format_value(row.mean_photons) << ',' << format_value(row.variance) << ','
            << format_value(row.crb) << ',' << format_value(row.ratio) << ','
            << row.unconverged << '\n';
        if (row.unreliable) {
            if (!unreliable_list.empty()) {
                unreliable_list += ';';
            }
            unreliable_list += format_value(row.mean_photons);
        }
    }
    out << "# slope=" << format_value(report.slope)
        << " intercept=" << format_value(report.intercept) << '\n';
    if (!unreliable_list.empty()) {
        out << "# unreliable=" << unreliable_list << '\n';
    }
    return 0;
}

int run_fisher(const RunSpec& spec, std::ostream& out) {
    const ScenarioSpec& scenario = spec.experiment.scenario;
    const Eigen::VectorXd phi0 = scenario_phi_true(scenario);
    const Eigen::VectorXd& phi_cl = spec.phi_cl;
    const double n_photons = spec.single_photons;
    const double r = std::asinh(std::sqrt(n_photons));

    TransitionResult at_truth = scenario_transition(scenario, phi0, phi_cl);
    HomodyneSetting setting =
        select_theta(at_truth.phase, spec.experiment.k, n_photons, spec.experiment.sign);
    double ell = (1.0 - at_truth.prob) * n_photons;

    ScalarField sigma2_map = [&](const Eigen::VectorXd& phi) {
        TransitionResult t = scenario_transition(scenario, phi, phi_cl);
        return variance_closed_form(t.prob, t.phase, setting.theta, r);
    };
    ScalarField f_map = [&](const Eigen::VectorXd& phi) {
        return scenario_transition(scenario, phi, phi_cl).phase;
    };
    FisherReport report =
        fisher_report(sigma2_map, f_map, phi0, ConditionParams{ell, spec.experiment.k, n_photons});

    out << "key,value\n";
    out << "N," << format_value(n_photons) << '\n';
    out << "k," << format_value(spec.experiment.k) << '\n';
    out << "ell," << format_value(report.ell) << '\n';
    out << "rho," << format_value(report.rho) << '\n';
    out << "crb," << format_value(report.crb) << '\n';
    out << "theta," << format_value(setting.theta) << '\n';
    out << "eigenvalue," << format_value(report.eigenvalue) << '\n';
    for (Eigen::Index i = 0; i < report.eigenvector.size(); ++i) {
        out << "eigenvector[" << (i + 1) << "]," << format_value(report.eigenvector(i)) << '\n';
    }
    write_matrix(out, "exact", report.exact);
    write_matrix(out, "asymptotic", report.asymptotic);
    return 0;
}

int run_variance(const RunSpec& spec, std::ostream& out) {
    const ScenarioSpec& scenario = spec.experiment.scenario;
    const Eigen::VectorXd phi0 = scenario_phi_true(scenario);
    const double n_photons = spec.single_photons;
    const double r = std::asinh(std::sqrt(n_photons));
    int in_ch = 1;
    int out_ch = 1;
    if (const auto* raw = std::get_if<RawScenario>(&scenario)) {
        in_ch = raw->in_channel;
        out_ch = raw->out_channel;
    }

    auto both_variances = [&](const Eigen::VectorXd& phi, double theta, double& pipeline,
                              double& closed) {
        UnitaryMatrix u = scenario_stages(scenario, phi, spec.phi_cl).composed();
        TransitionResult t = transition(u, in_ch, out_ch);
        closed = variance_closed_form(t.prob, t.phase, theta, r);
        CovarianceMatrix gamma0 = input_covariance(ProbeSpec{r, in_ch}, u.dim());
        CovarianceMatrix gamma =
            evolve_covariance(gamma0, symplectic_from_unitary(u));
        pipeline = quadrature_variance(reduced_covariance(gamma, out_ch), theta);
    };

    out << spec.sweep.axis << ",sigma2_pipeline,sigma2_closed\n";
    const int steps = spec.sweep.steps;
    for (int step = 0; step < steps; ++step) {
        double t = steps == 1 ? 0.0 : static_cast<double>(step) / (steps - 1);
        double value = spec.sweep.lo + t * (spec.sweep.hi - spec.sweep.lo);
        Eigen::VectorXd phi = phi0;
        double theta = spec.sweep.fixed_theta;
        if (spec.sweep.axis == "theta") {
            theta = value;
        } else {
            int index = std::atoi(spec.sweep.axis.c_str() + 3);
            phi(index - 1) = value;
        }
        double pipeline = 0.0;
        double closed = 0.0;
        both_variances(phi, theta, pipeline, closed);
        out << format_value(value) << ',' << format_value(pipeline) << ','
            << format_value(closed) << '\n';
    }
    return 0;
}

int run_scenario_dump(const RunSpec& spec, std::ostream& out) {
    const ScenarioSpec& scenario = spec.experiment.scenario;
    const Eigen::VectorXd phi0 = scenario_phi_true(scenario);
    StageTriple stages = scenario_stages(scenario, phi0, spec.phi_cl);
    TransitionResult t = transition(stages.composed());

    out << "key,value\n";
    if (const auto* two = std::get_if<TwoChannelScenario>(&scenario)) {
        TwoChannelConfig config;
        config.phi = two->phi;
        config.phi_cl = {spec.phi_cl(0), spec.phi_cl(1), spec.phi_cl(2)};
        config.alpha1 = two->alpha1;
        config.alpha2 = two->alpha2;
        out << "delta_alpha," << format_value(config.delta_alpha()) << '\n';
        out << "omega," << format_value(config.omega()) << '\n';
        out << "f_closed," << format_value(f_two_channel_closed(config)) << '\n';
    }
    if (const auto* lc = std::get_if<LinearCombScenario>(&scenario)) {
        LinearCombConfig config;
        config.weights = lc->weights;
        config.channels = lc->channels;
        config.phi = lc->phi;
        config.phi_cl = spec.phi_cl;
        out << "L_true," << format_value(config.linear_combination(config.phi)) << '\n';
        out << "L_prior," << format_value(config.linear_combination(config.phi_cl)) << '\n';
    }
    write_matrix(out, "F_in", stages.f_in.matrix());
    write_matrix(out, "U_phi", stages.u_phi.matrix());
    write_matrix(out, "F_out", stages.f_out.matrix());
    out << "chi.re," << format_value(t.chi.real()) << '\n';
    out << "chi.im," << format_value(t.chi.imag()) << '\n';
    out << "P," << format_value(t.prob) << '\n';
    out << "f," << format_value(t.phase) << '\n';
    out << "f_defined," << (t.phase_defined ? 1 : 0) << '\n';
    char line[64];
    std::snprintf(line, sizeof line, "# P=%.12f\n", t.prob);
    out << line;
    std::snprintf(line, sizeof line, "# f=%.12f\n", t.phase);
    out << line;
    return 0;
}

int run_prior_probe(const RunSpec& spec, std::ostream& out) {
    PriorProbeOptions options;
    options.photon_grid = spec.experiment.photon_grid;
    options.prior_scale = spec.experiment.prior_scale;
    options.repetitions = spec.experiment.repetitions;
    options.seed = spec.experiment.seed;
    options.fixed_error = spec.prior_fixed_error;
    std::vector<PriorProbeRow> rows = prior_sufficiency_probe(spec.experiment.scenario, options);
    out << "N,mean_deficit_times_N,max_deficit_times_N\n";
    for (const PriorProbeRow& row : rows) {
        out << format_value(row.mean_photons) << ',' << format_value(row.mean_deficit) << ','
            << format_value(row.max_deficit) << '\n';
    }
    return 0;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        switch (spec.mode) {
            case RunMode::Scaling:
                return run_scaling(spec, out);
            case RunMode::Fisher:
                return run_fisher(spec, out);
            case RunMode::Variance:
                return run_variance(spec, out);
            case RunMode::ScenarioTwoChannel:
            case RunMode::ScenarioLinearComb:
                return run_scenario_dump(spec, out);
            case RunMode::PriorProbe:
                return run_prior_probe(spec, out);
        }
    } catch (const std::exception& error) {
        err << "error: " << error.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace heisenet
