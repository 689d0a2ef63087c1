#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lpm/errors.hpp"
#include "lpm/noise.hpp"
#include "support.hpp"

using namespace lpm;

TEST_CASE("time grid normalises bounds and indexes nodes") {
    TimeGrid g(-1.0, 2.0, 0.25);
    CHECK(g.size() == 13);
    CHECK(g.zero_index() == 4);
    CHECK(g.time(g.index_of(1.5)) == doctest::Approx(1.5));
    CHECK(g.steps_in(-0.75) == -3);
    CHECK_THROWS_AS(g.index_of(0.1), AlignmentError);
    CHECK_THROWS_AS(g.index_of(3.0), CoverageError);
    CHECK_THROWS_AS(TimeGrid(0.5, 1.0, 0.1), ConfigError);
    CHECK_THROWS_AS(TimeGrid(-1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("brownian path is anchored and deterministic") {
    TimeGrid g(-5.0, 5.0, 0.01);
    const BrownianPath a = sample_brownian(g, 42), b = sample_brownian(g, 42), c = sample_brownian(g, 43);
    CHECK(a.at(0.0) == 0.0);
    CHECK((a.values.array() == b.values.array()).all());
    CHECK((a.values - c.values).norm() > 0.0);
}

TEST_CASE("brownian increments have variance dt") {
    TimeGrid g(0.0, 1.0, 0.01);
    const int n = 4000;
    double s2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = sample_brownian(g, static_cast<std::uint64_t>(k)).at(1.0);
        s2 += w * w;
    }
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("wiener shift") {
    TimeGrid g(-4.0, 4.0, 0.01);
    const BrownianPath p = sample_brownian(g, 3);
    SUBCASE("zero shift is the identity") {
        const BrownianPath q = wiener_shift(p, 0.0);
        CHECK((q.values - p.values).norm() == 0.0);
    }
    SUBCASE("composition") {
        const BrownianPath ab = wiener_shift(wiener_shift(p, 0.5), 0.7);
        const BrownianPath c = wiener_shift(p, 1.2);
        for (double s : {-2.0, -0.5, 0.0, 1.0, 2.5}) CHECK(ab.at(s) == doctest::Approx(c.at(s)).epsilon(1e-13));
        CHECK(c.at(0.0) == 0.0);
    }
    SUBCASE("definition arithmetic") {
        BrownianPath q{TimeGrid(0.0, 2.0, 1.0), test::vec({0.0, 0.3, 0.8}), 0};
        CHECK(wiener_shift(q, 1.0).at(1.0) == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(wiener_shift(p, 0.005), AlignmentError);
}

TEST_CASE("ou process") {
    const double dt = 1e-3;
    SUBCASE("zero path gives zero z") {
        const double tail = default_tail_cut(1.0, dt);
        BrownianPath zero{TimeGrid(-tail - 1.0, 1.0, dt), Eigen::VectorXd(), 0};
        zero.values = Eigen::VectorXd::Zero(zero.grid.size());
        const OUProcess ou = ou_stationary(zero, 1.0, tail);
        CHECK(ou.z_values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("insufficient tail and coverage") {
        const BrownianPath p = sample_brownian(TimeGrid(-10.0, 1.0, dt), 1);
        CHECK_THROWS_AS(ou_stationary(p, 1.0, 5.0), ConfigError);
        CHECK_THROWS_AS(ou_stationary(p, 1.0, default_tail_cut(1.0, dt)), CoverageError);
    }
    SUBCASE("matches the exact OU recursion to O(dt)") {
        for (double mu : {1.0, 2.5}) {
            const double tail = default_tail_cut(mu, dt);
            const BrownianPath p = sample_brownian(TimeGrid(-tail, 10.0, dt), 11);
            const OUProcess ou = ou_stationary(p, mu, tail);
            // Piecewise-linear path inside each step: the stochastic integral
            // collapses to dW (1 - e^{-mu dt}) / (mu dt).
            const double e = std::exp(-mu * dt), gain = (1.0 - e) / (mu * dt);
            double z = ou.z_at(0.0), worst = 0.0;
            for (int n = 0; n < 10000; ++n) {
                const double t = n * dt;
                z = e * z + gain * (p.at(t + dt) - p.at(t));
                worst = std::max(worst, std::abs(z - ou.z_at(t + dt)));
            }
            CHECK(worst < 5.0 * dt);
        }
    }
    SUBCASE("shift covariance") {
        const double tail = default_tail_cut(1.0, dt);
        const BrownianPath p = sample_brownian(TimeGrid(-tail - 3.0, 3.0, dt), 5);
        const OUProcess ou = ou_stationary(p, 1.0, tail);
        const OUProcess direct = ou_stationary(wiener_shift(p, 1.0), 1.0, tail);
        const OUProcess moved = shift(ou, 1.0);
        for (double t : {-2.0, -1.0, 0.0, 1.0})
            CHECK(direct.z_at(t) == doctest::Approx(moved.z_at(t)).epsilon(1e-9));
    }
}

TEST_CASE("integral of z") {
    const OUProcess ou = test::sampled_ou(9, 1e-3, -2.0, 2.0);
    CHECK(integral_z(ou, 0.5, 0.5) == 0.0);
    CHECK(integral_z(ou, -1.0, 1.5) == doctest::Approx(-integral_z(ou, 1.5, -1.0)));
    CHECK(integral_z(ou, -1.0, 1.5) ==
          doctest::Approx(integral_z(ou, -1.0, 0.3) + integral_z(ou, 0.3, 1.5)).epsilon(1e-12));
    const OUProcess c = constant_ou(TimeGrid(-2.0, 2.0, 1e-3), 0.7);
    CHECK(integral_z(c, -1.0, 1.5) == doctest::Approx(0.7 * 2.5));
    CHECK_THROWS_AS(integral_z(ou, 0.0, 0.0005), AlignmentError);
}

TEST_CASE("z grows sublinearly across the window") {
    const OUProcess ou = test::sampled_ou(21, 1e-2, -200.0, 200.0);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ou.grid.size(); ++i)
        worst = std::max(worst, std::abs(ou.z_values(i)) / (1.0 + std::abs(ou.grid.time(i))));
    CHECK(worst < 5.0);
    CHECK(ou.z_values.allFinite());
}

TEST_CASE("noise csv") {
    const double tail = default_tail_cut(1.0, 0.01);
    const BrownianPath p = sample_brownian(TimeGrid(-tail - 0.05, 0.05, 0.01), 1);
    const OUProcess ou = ou_stationary(p, 1.0, tail);
    std::ostringstream os;
    write_noise_csv(os, p, ou);
    const std::string s = os.str();
    CHECK(s.rfind("t,omega,z\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 12);
}
