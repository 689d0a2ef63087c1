#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpm/errors.hpp"
#include "lpm/quadrature.hpp"
#include "lpm/semigroup.hpp"
#include "support.hpp"

using namespace lpm;

namespace {

// Composite 3-point Gauss-Legendre on [0, s].
template <class F>
Eigen::VectorXd gauss(F f, double s, int panels) {
    const double nodes[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double h = s / panels;
    Eigen::VectorXd acc;
    for (int p = 0; p < panels; ++p)
        for (int q = 0; q < 3; ++q) {
            const double r = (p + 0.5) * h + 0.5 * h * nodes[q];
            const Eigen::VectorXd v = 0.5 * h * weights[q] * f(r);
            if (acc.size() == 0)
                acc = v;
            else
                acc += v;
        }
    return acc;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("exponential step weights") {
    CHECK(phi1(0.0) == 1.0);
    CHECK(phi2(0.0) == 0.5);
    CHECK(phi1(1e-3) == doctest::Approx(std::expm1(1e-3) / 1e-3).epsilon(1e-14));
    CHECK(phi2(-2.0) == doctest::Approx((std::exp(-2.0) - 1.0 + 2.0) / 4.0).epsilon(1e-14));
    const StepWeights w = step_weights(StepRule::trapezoid, -0.3, 0.1);
    // Exact for linear forcing: integral of e^{x(1-s)} (l + (r - l) s) ds * dt.
    CHECK(w.wl + w.wr == doctest::Approx(0.1 * phi1(-0.3)));
}

TEST_CASE("c_kappa closed form") {
    CHECK(c_kappa(0.5, 1.0, 0.0, 1.0) == doctest::Approx(1.0 / (1.0 - std::exp(-1.0))).epsilon(1e-14));
    CHECK(c_kappa(1.0, 2.0, -1.0, -0.5) ==
          doctest::Approx(2.0 * std::exp(1.0) / (1.0 - std::exp(-1.0))).epsilon(1e-14));
    CHECK_THROWS_AS(c_kappa(0.5, 1.0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(c_kappa(0.0, 1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(c_kappa(0.5, 0.0, 0.0, 1.0), DomainError);
}

TEST_CASE("integrated semigroup identities on the parabolic preset") {
    const SpectralModel m = parabolic_preset(4, 1.0, 0.5);
    const Eigen::VectorXd x = test::vec({0.7, -1.2, 0.4, 2.0});
    const double lam = 50.0;
    SUBCASE("lambda independence") {
        for (double t : {0.1, 0.5, 1.0}) {
            const Eigen::VectorXd a = integrated_semigroup_apply(m, t, x, 20.0);
            const Eigen::VectorXd b = integrated_semigroup_apply(m, t, x, 2000.0);
            CHECK((a - b).norm() < 1e-8);
        }
    }
    SUBCASE("product identity S(t)S(s) = int_0^s (S(t+r) - S(r)) dr") {
        for (auto [t, s] : {std::pair{0.3, 0.2}, std::pair{0.1, 0.6}}) {
            const Eigen::VectorXd lhs = integrated_semigroup_apply(m, t, integrated_semigroup_apply(m, s, x, lam), lam);
            const Eigen::VectorXd rhs = gauss(
                [&](double r) {
                    return Eigen::VectorXd(integrated_semigroup_apply(m, t + r, x, lam) -
                                           integrated_semigroup_apply(m, r, x, lam));
                },
                s, 400);
            CHECK((lhs - rhs).norm() < 1e-8);
        }
    }
    SUBCASE("S(t) x is the time integral of T on X0") {
        const Eigen::VectorXd ref =
            gauss([&](double r) { return m.semigroup_apply(Subspace::all, r, x); }, 0.4, 400);
        CHECK((integrated_semigroup_apply(m, 0.4, x, lam) - ref).norm() < 1e-10);
    }
    CHECK_THROWS_AS(integrated_semigroup_apply(m, -0.1, x, lam), DomainError);
    CHECK_THROWS_AS(integrated_semigroup_apply(m, 0.1, x, 1.0), SpectrumError);
}

TEST_CASE("Yosida-regularised convolutions converge at rate 1/lambda") {
    const double dt = 1e-3;
    const OUProcess ou = test::sampled_ou(4, dt, -1.0, 1.0);
    const std::vector<double> ladder{1e3, 1e4, 1e5, 1e6};
    SUBCASE("spectral model: fitted exponent near 1") {
        const auto m = test::demo_model();
        Forcing f(4, 1001);
        for (Eigen::Index j = 0; j < f.cols(); ++j) f.col(j) = test::vec({1.0, -0.5, 2.0, 1.5}) * std::cos(j * dt);
        const Eigen::VectorXd exact = convolution_modal(*m, ou, f, 1.0, Quadrature::trapezoid, 0.0);
        std::vector<double> err;
        for (const auto& v : convolution_ladder(*m, ou, f, 1.0, ladder)) err.push_back((m->to_modal(v) - exact).norm());
        const double p = -slope(ladder, err);
        CHECK(p >= 0.9);
        CHECK(p <= 1.1);
    }
    SUBCASE("boundary model: monotone decrease, boundary forcing included") {
        BoundaryModel::Options opt;
        opt.n_interior = 8;
        const BoundaryModel m(opt);
        Forcing f = Forcing::Zero(m.dim_x(), 1001);
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            f(0, j) = 1.0;
            f.col(j).tail(8).setLinSpaced(8, 0.5, -0.5);
        }
        const Eigen::VectorXd exact = convolution_modal(m, ou, f, 1.0, Quadrature::trapezoid, 0.0);
        double prev = 1e300;
        for (const auto& v : convolution_ladder(m, ou, f, 1.0, {1e2, 1e3, 1e4, 1e5})) {
            const double e = (m.to_modal(v) - exact).norm();
            CHECK(e < prev);
            prev = e;
        }
    }
}

TEST_CASE("stieltjes convolution and its split") {
    const double dt = 1e-3;
    const OUProcess ou = test::sampled_ou(8, dt, -1.0, 1.0);
    const auto m = test::demo_model();
    Forcing f(4, 501);
    for (Eigen::Index j = 0; j < f.cols(); ++j) f.col(j) = test::vec({0.2, 1.0, -1.0, 0.5}) * (1.0 + j * dt);
    const ConvolutionPlan analytic;
    const ConvolutionResult ex = stieltjes_convolution(*m, ou, f, 0.5, analytic);
    const SplitConvolution sp = split_convolution(*m, ou, f, 0.5, analytic);
    CHECK((sp.sum() - ex.value).norm() < 1e-15);
    const ConvolutionPlan ladder = default_ladder_plan(*m);
    const ConvolutionResult lr = stieltjes_convolution(*m, ou, f, 0.5, ladder);
    CHECK(lr.by_lambda.size() == 4);
    CHECK((lr.value - ex.value).norm() < 10.0 * ladder.tol * (1.0 + ex.value.norm()));
    CHECK((split_convolution(*m, ou, f, 0.5, ladder).sum() - ex.value).norm() < 10.0 * ladder.tol * (1.0 + ex.value.norm()));
    // The closed-form exponential trapezoid is exact for forcing linear in time with z = 0.
    const OUProcess still = constant_ou(TimeGrid(-1.0, 1.0, dt), 0.0);
    const Eigen::VectorXd c = m->to_modal(stieltjes_convolution(*m, still, f, 0.5, analytic).value);
    const double a = -4.0, t = 0.5;
    const double ref = -1.0 * ((std::exp(a * t) - 1.0) / a + (std::exp(a * t) - 1.0 - a * t) / (a * a));
    CHECK(c(2) == doctest::Approx(ref).epsilon(1e-12));
    ConvolutionPlan bad;
    bad.lambda_ladder = {0.5, 10.0};
    CHECK_THROWS_AS(stieltjes_convolution(*m, ou, f, 0.5, bad), ConfigError);
    CHECK_THROWS_AS(stieltjes_convolution(*m, ou, Forcing(4, 3), 0.5, analytic), ConfigError);
}

TEST_CASE("delta bound and scanned C_kappa") {
    const auto m = test::demo_model();
    const DeltaBound d = delta_bound_estimate(*m, 1.0, 0, 0.01, Subspace::s);
    CHECK(d.at(0.0) == 0.0);
    for (std::size_t i = 1; i < d.delta.size(); ++i) CHECK(d.delta[i] >= d.delta[i - 1]);
    CHECK(d.at(1.0) == doctest::Approx((1.0 - std::exp(-4.0)) / 4.0));
    const ConvConstants c = scanned_c_kappa(*m, -2.5);
    CHECK(c.c_kappa > 0.0);
    CHECK(std::isfinite(c.c_kappa));
    CHECK(c.c_kappa == doctest::Approx(lpm::c_kappa(c.epsilon, c.tau_eps, -4.0, -2.5)));
    CHECK_THROWS_AS(scanned_c_kappa(*m, -5.0), DomainError);
}
