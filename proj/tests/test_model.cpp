#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpm/errors.hpp"
#include "lpm/model.hpp"
#include "support.hpp"

using namespace lpm;

namespace {
const double kPi2 = M_PI * M_PI;

std::vector<double> times() { return {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}; }
}  // namespace

TEST_CASE("subspace names round-trip") {
    for (Subspace s : {Subspace::c, Subspace::u, Subspace::s, Subspace::cu, Subspace::cs, Subspace::all})
        CHECK(subspace_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(subspace_from_string("x"), ConfigError);
    CHECK(in_subspace(Subspace::c, Subspace::cu));
    CHECK_FALSE(in_subspace(Subspace::s, Subspace::cu));
}

TEST_CASE("parabolic preset") {
    const SpectralModel m = parabolic_preset(5, 1.0, 0.5);
    CHECK(m.eigenvalues()(0) == doctest::Approx(kPi2));
    CHECK(m.eigenvalues()(1) == 0.0);
    CHECK(m.eigenvalues()(2) == doctest::Approx(-3.0 * kPi2));
    CHECK(m.constants().alpha == doctest::Approx(kPi2 - 1.0));
    CHECK(m.constants().beta == doctest::Approx(kPi2 + 1.0));
    CHECK(m.modes_of(Subspace::s).size() == 3);
    CHECK(verify_trichotomy_bounds(m, times()).pass);
    CHECK_THROWS_AS(parabolic_preset(5, 20.0, 0.5), ConfigError);
}

TEST_CASE("spectral model validates labels against constants") {
    TrichotomyConstants k;
    k.alpha = 1.0;
    k.beta = 4.0;
    k.gamma = 0.2;
    k.theta_hy = 1.0;
    CHECK_THROWS_AS(SpectralModel(test::vec({1.0, 0.5, -4.0}), parse_labels("ucs"), k), ConfigError);
    CHECK_THROWS_AS(SpectralModel(test::vec({1.0, 0.0}), parse_labels("ucs"), k), ConfigError);
    CHECK_THROWS_AS(parse_labels("uxs"), ConfigError);
}

TEST_CASE("semigroup, resolvent and projections on the spectral model") {
    const auto m = test::demo_model();
    const Eigen::VectorXd x = test::vec({1.0, -2.0, 0.5, 3.0});
    const Eigen::VectorXd y = m->semigroup_apply(Subspace::all, 0.7, x);
    for (Eigen::Index k = 0; k < 4; ++k) CHECK(y(k) == doctest::Approx(std::exp(m->eigenvalues()(k) * 0.7) * x(k)));
    CHECK(m->semigroup_apply(Subspace::u, -1.0, x)(0) == doctest::Approx(std::exp(-1.0)));
    CHECK_THROWS_AS(m->semigroup_apply(Subspace::s, -1.0, x), DomainError);
    CHECK(m->resolvent_residual(5.0, x) < 1e-12);
    CHECK_THROWS_AS(m->resolvent_apply(0.5, x), SpectrumError);
    const Eigen::VectorXd sum = m->project(Subspace::c, x) + m->project(Subspace::u, x) + m->project(Subspace::s, x);
    CHECK((sum - x).norm() < 1e-14);
    CHECK((m->project(Subspace::cu, m->project(Subspace::cu, x)) - m->project(Subspace::cu, x)).norm() < 1e-14);
    // Yosida approximation tends to the identity on X0 at rate 1/lambda.
    const double e1 = (m->yosida_apply(1e3, x) - x).norm(), e2 = (m->yosida_apply(1e4, x) - x).norm();
    CHECK(e2 < e1 / 9.0);
}

TEST_CASE("boundary model") {
    BoundaryModel::Options opt;
    opt.n_interior = 40;
    const BoundaryModel m(opt);
    SUBCASE("spectrum approaches the continuum") {
        CHECK(m.eigenvalues()(0) == doctest::Approx(8.0 * kPi2 / 9.0).epsilon(0.01));
        CHECK(std::abs(m.eigenvalues()(1)) < 0.05);
        CHECK(m.eigenvalues()(2) == doctest::Approx(-16.0 * kPi2 / 9.0).epsilon(0.01));
        CHECK(m.labels()[0] == Subspace::u);
        CHECK(m.labels()[1] == Subspace::c);
        CHECK(m.constants().K == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("resolvent solves the boundary problem") {
        Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(m.dim_x(), -1.0, 2.0);
        CHECK(m.resolvent_residual(20.0, y) < 1e-9 * (1.0 + y.norm()));
        const Eigen::VectorXd r = m.resolvent_apply(20.0, y);
        CHECK(m.in_x0(r));
        // Independent check on X0: the interior matrix alone.
        Eigen::VectorXd f = m.restrict_x0(y);
        f(0) += y(0) / m.h();
        const Eigen::MatrixXd Mx = m.generator_matrix();
        const Eigen::VectorXd ref =
            (20.0 * Eigen::MatrixXd::Identity(Mx.rows(), Mx.cols()) - Mx).partialPivLu().solve(f);
        CHECK((m.restrict_x0(r) - ref).norm() < 1e-10 * ref.norm());
    }
    SUBCASE("modal coordinates and projections") {
        const Eigen::VectorXd x = m.embed_x0(Eigen::VectorXd::LinSpaced(opt.n_interior, 0.0, 1.0));
        CHECK((m.from_modal(m.to_modal(x)) - x).norm() < 1e-12);
        const Eigen::VectorXd p = m.project(Subspace::cu, x);
        CHECK((m.project(Subspace::cu, p) - p).norm() < 1e-12);
        CHECK(m.in_x0(m.project(Subspace::s, x), 1e-14));
        CHECK(verify_trichotomy_bounds(m, times()).pass);
    }
    SUBCASE("Yosida limit of a boundary datum") {
        // lambda R(lambda)(1, 0) stays bounded and converges to the e_1/h image.
        Eigen::VectorXd y = Eigen::VectorXd::Zero(m.dim_x());
        y(0) = 1.0;
        const Eigen::VectorXd lim = m.from_modal(m.to_modal(y));
        double prev = 1e300;
        for (double lam : {1e4, 1e5, 1e6}) {
            const double err = (m.yosida_apply(lam, y) - lim).norm();
            CHECK(err < prev);
            prev = err;
        }
    }
    CHECK_THROWS_AS(BoundaryModel(BoundaryModel::Options{2}), ConfigError);
}

TEST_CASE("nonlinearities") {
    const auto m = test::demo_model();
    BoundaryModel::Options bopt;
    bopt.n_interior = 6;
    const BoundaryModel b(bopt);
    for (const LinearModel* model : {static_cast<const LinearModel*>(m.get()), static_cast<const LinearModel*>(&b)})
        for (const auto& name : nonlinearity_names()) {
            CAPTURE(name);
            const Nonlinearity nl = make_nonlinearity(name, 0.3, *model);
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model->dim_x());
            CHECK(nl.F(zero).norm() == 0.0);
            CHECK(sample_lipschitz(nl, *model, 400, 5) <= 0.3 * (1.0 + 1e-9));
            if (nl.has_jacobian()) CHECK(jacobian_consistency(nl, *model, 20, 3) < 1e-6);
        }
    CHECK_THROWS_AS(make_nonlinearity("nope", 1.0, *m), ConfigError);
    CHECK_THROWS_AS(make_nonlinearity("cubic-saturated", -1.0, *m), ConfigError);

    const Nonlinearity nl = make_nonlinearity("cubic-saturated", 0.5, *m);
    const Eigen::VectorXd v = test::vec({0.3, -0.2, 0.4, 0.1});
    CHECK((transform_nonlinearity(nl, 0.0, v) - nl.F(v)).norm() == 0.0);
    CHECK((transform_nonlinearity(nl, 0.4, v) - std::exp(-0.4) * nl.F(std::exp(0.4) * v)).norm() < 1e-15);
    CHECK_THROWS_AS(transform_nonlinearity(nl, 800.0, v), RangeError);
}
