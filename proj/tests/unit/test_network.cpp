#include <doctest.h>

#include <cmath>

#include "heisenet/angles.hpp"
#include "heisenet/network.hpp"
#include "test_helpers.hpp"

using namespace heisenet;

TEST_SUITE_BEGIN("network");

TEST_CASE("beam splitter block values") {
    CHECK((beam_splitter(2, 1, 2, 0.0).matrix() - Eigen::MatrixXcd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));

    Eigen::MatrixXcd swap(2, 2);
    swap << 0, 1, -1, 0;
    CHECK((beam_splitter(2, 1, 2, pi / 2).matrix() - swap).cwiseAbs().maxCoeff() < 1e-15);

    double h = std::sqrt(0.5);
    Eigen::MatrixXcd balanced(2, 2);
    balanced << h, h, -h, h;
    CHECK((beam_splitter(2, 1, 2, pi / 4).matrix() - balanced).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("beam splitter embeds in larger networks and validates channels") {
    UnitaryMatrix u = beam_splitter(4, 2, 4, 0.3);
    CHECK(u.entry(1, 1) == Complex(1.0, 0.0));
    CHECK(u.entry(3, 3) == Complex(1.0, 0.0));
    CHECK(u.entry(2, 2).real() == doctest::Approx(std::cos(0.3)));
    CHECK(u.entry(4, 2).real() == doctest::Approx(-std::sin(0.3)));
    CHECK_THROWS_AS(beam_splitter(2, 1, 3, 0.1), std::out_of_range);
    CHECK_THROWS_AS(beam_splitter(2, 2, 2, 0.1), std::invalid_argument);
}

TEST_CASE("phase shift diagonals") {
    CHECK(phase_shift({0.0, 0.0}).unitarity_error() < 1e-15);
    CHECK((phase_shift({0.0, 0.0}).matrix() - Eigen::MatrixXcd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    UnitaryMatrix u = phase_shift({pi, 0.0});
    CHECK(u.entry(1, 1).real() == doctest::Approx(-1.0));
    CHECK(u.entry(2, 2).real() == doctest::Approx(1.0));
    UnitaryMatrix v = phase_shift({pi / 2, -pi / 2});
    CHECK(v.entry(1, 1).imag() == doctest::Approx(1.0));
    CHECK(v.entry(2, 2).imag() == doctest::Approx(-1.0));
}

TEST_CASE("compose basics") {
    UnitaryMatrix eye = UnitaryMatrix::identity(3);
    CHECK((compose({eye, eye}).matrix() - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-15);

    Rng rng(7);
    UnitaryMatrix u = UnitaryMatrix::from_matrix(test::random_unitary_matrix(4, rng));
    CHECK((compose({u, u.adjoint()}).matrix() - Eigen::MatrixXcd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    // Rotation composition: BS(a) then BS(b) equals BS(a+b).
    UnitaryMatrix ab = compose({beam_splitter(2, 1, 2, 0.3), beam_splitter(2, 1, 2, 0.5)});
    CHECK((ab.matrix() - beam_splitter(2, 1, 2, 0.8).matrix()).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(compose({eye, UnitaryMatrix::identity(2)}), std::invalid_argument);
}

TEST_CASE("compose applies stages in traversal order") {
    // A phase on channel 1 followed by a full swap must land the phase
    // factor in the channel-2 output amplitude.
    UnitaryMatrix u = compose({phase_shift({0.7, 0.0}), beam_splitter(2, 1, 2, pi / 2)});
    TransitionResult t = transition(u, 1, 2);
    CHECK(t.prob == doctest::Approx(1.0));
    CHECK(wrap_angle(t.phase - (0.7 + pi)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transition examples") {
    TransitionResult identity_t = transition(UnitaryMatrix::identity(2));
    CHECK(identity_t.chi == Complex(1.0, 0.0));
    CHECK(identity_t.prob == doctest::Approx(1.0));
    CHECK(identity_t.phase == doctest::Approx(0.0));
    CHECK(identity_t.phase_defined);

    TransitionResult phase_t = transition(phase_shift({pi / 3, 0.0}));
    CHECK(phase_t.prob == doctest::Approx(1.0));
    CHECK(phase_t.phase == doctest::Approx(pi / 3));

    TransitionResult balanced_t = transition(beam_splitter(2, 1, 2, pi / 4));
    CHECK(balanced_t.prob == doctest::Approx(0.5));
    CHECK(balanced_t.phase == doctest::Approx(0.0));

    // Dark port: the phase is undefined.
    TransitionResult dark = transition(beam_splitter(2, 1, 2, pi / 2), 1, 1);
    CHECK(dark.prob == doctest::Approx(0.0));
    CHECK_FALSE(dark.phase_defined);
}

TEST_CASE("transition probability is conserved across output channels") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int dim = 2 + static_cast<int>(rng.next_u64() % 7u);
        UnitaryMatrix u = compose(test::random_stage_stack(dim, 6, rng));
        int in_ch = 1 + static_cast<int>(rng.next_u64() % static_cast<unsigned>(dim));
        double total = 0.0;
        for (int out_ch = 1; out_ch <= dim; ++out_ch) {
            total += transition(u, in_ch, out_ch).prob;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("unitarity preserved for random stacks") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        int dim = 1 + static_cast<int>(rng.next_u64() % 8u);
        int count = 1 + static_cast<int>(rng.next_u64() % 20u);
        UnitaryMatrix u = compose(test::random_stage_stack(dim, count, rng));
        CHECK(u.unitarity_error() <= 1e-10);
        for (int c = 0; c < dim; ++c) {
            CHECK(std::abs(u.matrix().col(c).norm() - 1.0) < 1e-12);
            CHECK(std::abs(u.matrix().row(c).norm() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("phase of commuting diagonal stages adds") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<UnitaryMatrix> stages;
        double sum = 0.0;
        for (int e = 0; e < 6; ++e) {
            double lambda = rng.uniform(-pi, pi);
            sum += lambda;
            stages.push_back(phase_shift({lambda, rng.uniform(-pi, pi)}));
        }
        TransitionResult t = transition(compose(stages));
        CHECK(wrap_angle(t.phase - sum) == doctest::Approx(0.0).epsilon(1e-11));
    }
}

TEST_CASE("non-unitary matrices are rejected") {
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
    bad(0, 0) = 1.0 + 1e-6;
    CHECK_THROWS_AS(UnitaryMatrix::from_matrix(bad), std::invalid_argument);
}

TEST_CASE("param network evaluation") {
    SUBCASE("fixed layout, no parameters") {
        ParamNetwork net(2, {BeamSplitterElement{1, 2, Angle::fixed(pi / 4)},
                             PhaseShiftElement{1, Angle::fixed(0.3)}});
        CHECK(net.num_params() == 0);
        UnitaryMatrix expected =
            compose({beam_splitter(2, 1, 2, pi / 4), phase_shift({0.3, 0.0})});
        CHECK((net.evaluate({}).matrix() - expected.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("single bound phase") {
        ParamNetwork net(1, {PhaseShiftElement{1, Angle::parameter(1)}});
        std::vector<double> phi{0.7};
        TransitionResult t = transition(net.evaluate(phi));
        CHECK(t.phase == doctest::Approx(0.7));
    }

    SUBCASE("two-channel refocusing layout at zero parameters") {
        // F_in = BS(pi/4) then phases (+pi/4, -pi/4); U = BS(phi1);
        // F_out = phases then BS(-pi/4). At phi = 0 the probe refocuses.
        ParamNetwork net(2, {BeamSplitterElement{1, 2, Angle::fixed(pi / 4)},
                             PhaseShiftElement{1, Angle::fixed(pi / 4)},
                             PhaseShiftElement{2, Angle::fixed(-pi / 4)},
                             BeamSplitterElement{1, 2, Angle::parameter(1)},
                             PhaseShiftElement{1, Angle::fixed(-pi / 4)},
                             PhaseShiftElement{2, Angle::fixed(pi / 4)},
                             BeamSplitterElement{1, 2, Angle::fixed(-pi / 4)}});
        std::vector<double> phi{0.0};
        CHECK(std::abs(transition(net.evaluate(phi)).chi) == doctest::Approx(1.0));
    }

    SUBCASE("parameter length mismatch") {
        ParamNetwork net(1, {PhaseShiftElement{1, Angle::parameter(1)}});
        std::vector<double> wrong{0.1, 0.2};
        CHECK_THROWS_AS(net.evaluate(wrong), std::invalid_argument);
    }
}

TEST_SUITE_END();
