#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lpm/errors.hpp"
#include "lpm/flow.hpp"
#include "support.hpp"

using namespace lpm;

TEST_CASE("random linear flow is a cocycle") {
    const auto m = test::demo_model();
    const OUProcess ou = test::sampled_ou(2, 1e-3, -2.0, 2.0);
    const Eigen::VectorXd x = test::vec({1.0, 0.5, -0.3, 0.2});
    const Eigen::VectorXd two = phi_flow(*m, ou, Subspace::all, 1.5, 0.4, phi_flow(*m, ou, Subspace::all, 0.4, -0.2, x));
    const Eigen::VectorXd one = phi_flow(*m, ou, Subspace::all, 1.5, -0.2, x);
    CHECK((two - one).norm() < 1e-13 * one.norm());
    // Unstable part may run backwards.
    const Eigen::VectorXd back = phi_flow(*m, ou, Subspace::u, -1.0, 0.0, x);
    CHECK(back(0) == doctest::Approx(std::exp(-1.0 + integral_z(ou, 0.0, -1.0))));
}

TEST_CASE("ornstein-uhlenbeck conjugation") {
    const Eigen::VectorXd u = test::vec({1.0, -2.0, 3.0});
    CHECK((inverse_transform(transform(u, 0.8), 0.8) - u).norm() < 1e-15);
    CHECK(transform(u, 0.0) == u);
    CHECK_THROWS_AS(transform(u, 701.0), RangeError);
    CHECK_THROWS_AS(inverse_transform(u, -701.0), RangeError);
}

TEST_CASE("integrator") {
    const auto m = test::demo_model();
    const double dt = 1e-3;
    const OUProcess ou = test::sampled_ou(6, dt, -1.0, 3.0);
    const Eigen::VectorXd x0 = test::vec({0.4, -0.3, 0.5, 0.2});
    SUBCASE("F = 0 reproduces the linear flow exactly") {
        const Nonlinearity zero = make_nonlinearity("zero", 0.0, *m);
        const Trajectory tr = integrate_mild(*m, zero, ou, x0, 2.0);
        CHECK(tr.size() == 2001);
        for (Eigen::Index j : {Eigen::Index(0), Eigen::Index(700), Eigen::Index(2000)})
            CHECK((tr.at(j) - phi_flow(*m, ou, Subspace::all, tr.time(j), 0.0, x0)).norm() < 1e-12);
    }
    SUBCASE("first-order convergence in the step") {
        const Nonlinearity nl = make_nonlinearity("cubic-saturated", 0.8, *m);
        const OUProcess frozen = constant_ou(TimeGrid(-1.0, 3.0, dt), 0.2);
        const Eigen::VectorXd ref = integrate_mild(*m, nl, frozen, x0, 2.0).values.rightCols(1);
        IntegratorOptions o;
        std::vector<double> err;
        for (int stride : {40, 20, 10}) {
            o.stride = stride;
            err.push_back((integrate_mild(*m, nl, frozen, x0, 2.0, o).values.rightCols(1) - ref).norm());
        }
        CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.25));
        CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.25));
    }
    SUBCASE("original frame") {
        const Nonlinearity nl = make_nonlinearity("cubic-saturated", 0.8, *m);
        const Trajectory u = integrate_original(*m, nl, ou, x0, 1.0);
        const Trajectory v = integrate_mild(*m, nl, ou, transform(x0, ou.z_at(0.0)), 1.0);
        CHECK(u.frame == Frame::u);
        CHECK((u.at(0) - x0).norm() < 1e-15);
        CHECK((u.at(500) - inverse_transform(v.at(500), ou.z_at(0.5))).norm() < 1e-14);
    }
    SUBCASE("guards") {
        const Nonlinearity zero = make_nonlinearity("zero", 0.0, *m);
        IntegratorOptions o;
        o.divergence_guard = 1.0;
        CHECK_THROWS_AS(integrate_mild(*m, zero, ou, 10.0 * x0, 2.0, o), DivergenceError);
        CHECK_THROWS_AS(integrate_mild(*m, zero, ou, x0, 5.0), CoverageError);
        CHECK_THROWS_AS(integrate_mild(*m, zero, ou, x0, 0.0005), AlignmentError);
        const BoundaryModel b(BoundaryModel::Options{});
        Eigen::VectorXd bad = Eigen::VectorXd::Ones(b.dim_x());
        CHECK_THROWS_AS(integrate_mild(b, make_nonlinearity("zero", 0.0, b), ou, bad, 1.0), DomainError);
    }
    SUBCASE("csv") {
        const Nonlinearity zero = make_nonlinearity("zero", 0.0, *m);
        IntegratorOptions o;
        o.stride = 500;
        std::ostringstream os;
        write_trajectory_csv(os, integrate_mild(*m, zero, ou, x0, 1.0, o));
        CHECK(os.str().rfind("t,x0,x1,x2,x3,frame\n0,0.40000000000000002,-0.29999999999999999,0.5,", 0) == 0);
    }
}
