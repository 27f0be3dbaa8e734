#include <doctest.h>

#include <cmath>

#include "heisenet/angles.hpp"
#include "heisenet/gaussian.hpp"
#include "heisenet/metrology.hpp"
#include "heisenet/rng.hpp"

using namespace heisenet;

TEST_SUITE_BEGIN("metrology");

TEST_CASE("numeric gradient basics") {
    Eigen::VectorXd at(2);
    at << 0.4, -1.1;

    Eigen::VectorXd zero = numeric_gradient([](const Eigen::VectorXd&) { return 3.0; }, at);
    CHECK(zero.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Eigen::VectorXd linear = numeric_gradient(
        [](const Eigen::VectorXd& p) { return p(0) + 2.0 * p(1); }, at, 1e-5);
    CHECK(linear(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(linear(1) == doctest::Approx(2.0).epsilon(1e-8));

    Eigen::VectorXd point(1);
    point << 0.4;
    Eigen::VectorXd trig =
        numeric_gradient([](const Eigen::VectorXd& p) { return std::sin(p(0)); }, point, 1e-5);
    CHECK(std::abs(trig(0) - std::cos(0.4)) < 1e-9);

    CHECK_THROWS_AS(numeric_gradient([](const Eigen::VectorXd&) { return 0.0; }, at, 0.0),
                    std::invalid_argument);
}

TEST_CASE("gradient differencing unwraps branch cuts") {
    // f = wrap(phi + pi - 1e-7): the principal value jumps by 2 pi right at
    // the evaluation point; the unwrapped difference must still see slope 1.
    Eigen::VectorXd at(1);
    at << 0.0;
    Eigen::VectorXd grad = numeric_gradient(
        [](const Eigen::VectorXd& p) { return wrap_angle(p(0) + pi - 1e-7); }, at, 1e-5);
    CHECK(grad(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fisher exact outer product") {
    Eigen::VectorXd at(2);
    at << 0.2, 0.9;
    Eigen::MatrixXd flat = fisher_exact([](const Eigen::VectorXd&) { return 0.7; }, at);
    CHECK(flat.cwiseAbs().maxCoeff() < 1e-12);

    Eigen::VectorXd origin(1);
    origin << 0.0;
    Eigen::MatrixXd info =
        fisher_exact([](const Eigen::VectorXd& p) { return std::exp(2.0 * p(0)); }, origin);
    CHECK(info(0, 0) == doctest::Approx(2.0).epsilon(1e-7));

    // sigma^2 depending only on phi_1 + phi_2: all entries equal.
    Eigen::MatrixXd sym = fisher_exact(
        [](const Eigen::VectorXd& p) { return 1.0 + 0.3 * std::sin(p(0) + p(1)); }, at);
    CHECK(sym(0, 0) == doctest::Approx(sym(0, 1)).epsilon(1e-7));
    CHECK(sym(0, 0) == doctest::Approx(sym(1, 1)).epsilon(1e-7));

    // Rank <= 1 by construction: second singular value vanishes.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym);
    CHECK(svd.singularValues()(1) <= 1e-10 * svd.singularValues()(0));
}

TEST_CASE("rho values and bound") {
    CHECK(rho(0.0, 3.2) == doctest::Approx(0.0));
    CHECK(rho(0.25, 0.0) == doctest::Approx(1.0));
    CHECK(rho(0.5, 0.0) == doctest::Approx(0.64));

    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        double k = rng.uniform(-2.0, 2.0);
        double ell = rng.uniform(0.0, 5.0);
        CHECK(rho(k, ell) <= 1.0 + 1e-12);
    }
    // Equality exactly on 16 k^2 = 1 + 4 ell.
    double ell = 0.7;
    double k_star = std::sqrt(1.0 + 4.0 * ell) / 4.0;
    CHECK(rho(k_star, ell) == doctest::Approx(1.0 / (1.0 + 4.0 * ell)).epsilon(1e-12));
    CHECK(optimal_k(ell) == doctest::Approx(k_star));
}

TEST_CASE("optimal k") {
    CHECK(optimal_k(0.0) == doctest::Approx(0.25));
    CHECK(optimal_k(2.0) == doctest::Approx(0.75));
    Rng rng(13);
    for (double ell : {0.0, 0.5, 2.0}) {
        double best = rho(optimal_k(ell), ell);
        for (int trial = 0; trial < 100; ++trial) {
            CHECK(rho(rng.uniform(0.0, 3.0), ell) <= best + 1e-12);
        }
    }
}

TEST_CASE("fisher asymptotic rank-one form") {
    Eigen::VectorXd none = Eigen::VectorXd::Zero(2);
    CHECK(fisher_asymptotic(0.25, 0.0, 10.0, none).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Eigen::VectorXd one(1);
    one << 1.0;
    CHECK(fisher_asymptotic(0.25, 0.0, 10.0, one)(0, 0) == doctest::Approx(800.0));

    Eigen::VectorXd ones(2);
    ones << 1.0, 1.0;
    Eigen::MatrixXd m = fisher_asymptotic(0.25, 0.0, 10.0, ones);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(m(i, j) == doctest::Approx(800.0));
        }
    }
}

TEST_CASE("cramer-rao bound") {
    CHECK(crb(0.25, 0.0, 100.0) == doctest::Approx(1.25e-5));
    CHECK(crb(0.25, 0.0, 100.0, 2.0) == doctest::Approx(5e-5));
    CHECK_THROWS_AS(crb(0.0, 0.0, 100.0), std::domain_error);

    // Exact N^-2 scaling.
    for (double n_photons : {10.0, 100.0, 4567.0}) {
        double ratio = crb(0.3, 0.4, 10.0 * n_photons) * 100.0 / crb(0.3, 0.4, n_photons);
        CHECK(std::abs(ratio - 1.0) < 1e-12);
    }
}

TEST_CASE("estimability check") {
    Eigen::VectorXd f(2);
    f << 1.0, 2.0;
    Estimability same = estimability_check(f, f, 1e-10);
    CHECK(same.estimable);
    CHECK(same.angle == doctest::Approx(0.0));

    Eigen::VectorXd scaled(2);
    scaled << 2.0, 4.0;
    CHECK(estimability_check(scaled, f, 1e-10).estimable);
    Eigen::VectorXd negated = -3.0 * f;
    CHECK(estimability_check(negated, f, 1e-10).estimable);

    Eigen::VectorXd ex(2), ey(2);
    ex << 1.0, 0.0;
    ey << 0.0, 1.0;
    Estimability orth = estimability_check(ex, ey, 1e-10);
    CHECK_FALSE(orth.estimable);
    CHECK(orth.angle == doctest::Approx(pi / 2));

    CHECK_THROWS_AS(estimability_check(f, Eigen::VectorXd::Zero(2), 1e-10),
                    std::invalid_argument);
}

TEST_CASE("rank-one eigenpair by power iteration") {
    EigenPair zero = eigen_rank_one(Eigen::MatrixXd::Zero(3, 3));
    CHECK(zero.value == doctest::Approx(0.0));

    Eigen::VectorXd v(2);
    v << 0.6, 0.8;
    Eigen::MatrixXd m = 8.0 * 1.0 * 100.0 * (v * v.transpose());
    EigenPair pair = eigen_rank_one(m);
    CHECK(pair.value == doctest::Approx(800.0).epsilon(1e-10));
    CHECK(std::abs(std::abs(pair.vector.dot(v)) - 1.0) < 1e-10);
    CHECK((m * pair.vector - pair.value * pair.vector).cwiseAbs().maxCoeff() <=
          1e-10 * m.cwiseAbs().maxCoeff());

    Eigen::VectorXd w(3);
    w << 1.0, -2.0, 0.5;
    EigenPair outer = eigen_rank_one(3.0 * (w * w.transpose()));
    CHECK(outer.value == doctest::Approx(3.0 * w.squaredNorm()).epsilon(1e-10));

    // Start vector orthogonal to the dominant direction triggers the
    // perturbation fallback: (1,1)/sqrt(2) is orthogonal to (1,-1).
    Eigen::VectorXd anti(2);
    anti << 1.0, -1.0;
    EigenPair fallback = eigen_rank_one(anti * anti.transpose());
    CHECK(fallback.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("variance gradient w.r.t. f matches the analytic expression") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        double prob = rng.uniform(0.2, 1.0);
        double f0 = rng.uniform(-1.0, 1.0);
        double theta = rng.uniform(-1.0, 1.0);
        double r = rng.uniform(0.1, 2.0);
        Eigen::VectorXd at(1);
        at << f0;
        Eigen::VectorXd grad = numeric_gradient(
            [&](const Eigen::VectorXd& p) {
                return variance_closed_form(prob, p(0), theta, r);
            },
            at);
        double analytic =
            -2.0 * prob * std::sin(2.0 * (f0 - theta)) * std::sinh(r) * std::cosh(r);
        if (std::abs(analytic) > 1e-6) {
            CHECK(std::abs(grad(0) - analytic) / std::abs(analytic) < 1e-6);
        } else {
            CHECK(std::abs(grad(0) - analytic) < 1e-6);
        }
    }
}

TEST_CASE("chain-rule route reproduces the direct variance gradient") {
    // grad sigma^2 = grad P (sinh^2 r + cos(2f-2theta) shc)
    //              - 2 P grad f sin(2f-2theta) shc, with (P, f) from a toy
    // smooth model.
    auto prob_of = [](const Eigen::VectorXd& p) { return 0.9 - 0.1 * std::sin(p(0) - p(1)); };
    auto f_of = [](const Eigen::VectorXd& p) { return 0.5 * p(0) + 0.25 * p(1); };
    double theta = 0.4;
    double r = 1.1;
    Eigen::VectorXd at(2);
    at << 0.3, -0.2;

    Eigen::VectorXd direct = numeric_gradient(
        [&](const Eigen::VectorXd& p) {
            return variance_closed_form(prob_of(p), f_of(p), theta, r);
        },
        at);

    Eigen::VectorXd grad_p = numeric_gradient(prob_of, at);
    Eigen::VectorXd grad_f = numeric_gradient(f_of, at);
    double shc = std::sinh(r) * std::cosh(r);
    double f0 = f_of(at);
    Eigen::VectorXd chain =
        grad_p * (std::sinh(r) * std::sinh(r) + std::cos(2.0 * (f0 - theta)) * shc) -
        2.0 * prob_of(at) * std::sin(2.0 * (f0 - theta)) * shc * grad_f;
    CHECK((direct - chain).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fisher report assembles the pieces") {
    auto sigma2_map = [](const Eigen::VectorXd& p) { return 1.0 + 0.1 * std::sin(p(0)); };
    auto f_map = [](const Eigen::VectorXd& p) { return 2.0 * p(0); };
    Eigen::VectorXd at(1);
    at << 0.0;
    FisherReport report =
        fisher_report(sigma2_map, f_map, at, ConditionParams{0.0, 0.25, 50.0});
    CHECK(report.rho == doctest::Approx(1.0));
    CHECK(report.crb == doctest::Approx(1.0 / (8.0 * 2500.0)));
    CHECK(report.asymptotic(0, 0) == doctest::Approx(8.0 * 2500.0 * 4.0).epsilon(1e-9));
    CHECK(report.eigenvalue == doctest::Approx(8.0 * 2500.0 * 4.0).epsilon(1e-9));
    CHECK(report.exact(0, 0) == doctest::Approx(0.1 * 0.1 / 2.0).epsilon(1e-6));
}

TEST_SUITE_END();
