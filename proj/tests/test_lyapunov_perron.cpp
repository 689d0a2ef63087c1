#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpm/errors.hpp"
#include "lpm/lyapunov_perron.hpp"
#include "lpm/verify.hpp"
#include "support.hpp"

using namespace lpm;

namespace {

constexpr double kDt = 1e-2;

const OUProcess& fibre() {
    static const OUProcess ou = test::sampled_ou(11, kDt, -60.0, 60.0);
    return ou;
}

Nonlinearity cubic(const LinearModel& m, double L = 0.05) { return make_nonlinearity("cubic-saturated", L, m); }

}  // namespace

TEST_CASE("linear problems are solved exactly") {
    const auto m = test::demo_model();
    const Nonlinearity zero = make_nonlinearity("zero", 0.0, *m);
    const ManifoldGraph g(m, zero, fibre(), test::demo_config());
    const Eigen::VectorXd anchor = test::vec({0.3, 0.2, -0.4, 0.1});
    const FoliationLeaf leaf(m, zero, fibre(), anchor, test::demo_config());
    for (const auto& xi : sample_subspace(*m, Subspace::cu, 5, 1.0, 3)) {
        const CuSolution s = g.solve(xi);
        CHECK(s.h.norm() == 0.0);
        CHECK(s.stats.iterations <= 2);
        CHECK(derivative_cu(g, xi, s).Dh.norm() == 0.0);
        // The solution path is the linear flow.
        const Eigen::VectorXd back = phi_flow(*m, fibre(), Subspace::cu, -3.0, 0.0, xi);
        const Eigen::Index j = s.v.size() - 1 - 300;
        CHECK((m->from_modal(s.v.modal.col(j)) - back).norm() < 1e-12 * (1.0 + back.norm()));
    }
    for (const auto& iota : sample_subspace(*m, Subspace::cs, 5, 1.0, 4)) {
        const LeafSolution s = leaf.solve(iota);
        CHECK((s.l - m->project(Subspace::u, anchor)).norm() < 1e-15);
        CHECK(derivative_leaf(leaf, iota, s).Dl.norm() == 0.0);
    }
    const IntersectionResult x = intersect(g, leaf);
    CHECK((x.point - m->project(Subspace::u, anchor)).norm() < 1e-15);
    CHECK(x.iota.norm() == 0.0);
}

TEST_CASE("the operators contract at the certified rate") {
    const auto m = test::demo_model();
    const ManifoldGraph g(m, cubic(*m), fibre(), test::demo_config());
    const auto xis = sample_subspace(*m, Subspace::cu, 6, 1.5, 5);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < xis.size(); i += 2) {
        const WeightedPath a = g.linear_term(xis[i]);
        WeightedPath b = g.linear_term(xis[i + 1]);
        b.modal *= 3.0;
        const double before = g.weighted_norm(WeightedPath{a.side, a.eta, a.dt, a.modal - b.modal});
        const WeightedPath ja = g.apply(xis[0], a);
        const WeightedPath jb = g.apply(xis[0], b);
        const double after = g.weighted_norm(WeightedPath{a.side, a.eta, a.dt, ja.modal - jb.modal});
        worst = std::max(worst, after / before);
    }
    CHECK(worst <= g.gap().lhs + 0.05);
    for (const auto& xi : xis) {
        const CuSolution s = g.solve(xi);
        CHECK(s.stats.max_ratio <= s.stats.certified + 0.05);
        CHECK(s.stats.residual <= 1e-9);
        // Fixed point of J.
        const WeightedPath jv = g.apply(xi, s.v);
        CHECK(g.weighted_norm(WeightedPath{jv.side, jv.eta, jv.dt, jv.modal - s.v.modal}) < 1e-9);
    }
    CHECK(g.lipschitz_sample(xis) <= g.K_u());
}

TEST_CASE("admission and domain errors") {
    const auto m = test::demo_model();
    CHECK_THROWS_AS(ManifoldGraph(m, cubic(*m, 2.0), fibre(), test::demo_config()), AdmissionError);
    CHECK_THROWS_AS(FoliationLeaf(m, cubic(*m, 2.0), fibre(), test::vec({0, 0, 0, 0}), test::demo_config()),
                    AdmissionError);
    const ManifoldGraph g(m, cubic(*m), fibre(), test::demo_config());
    CHECK_THROWS_AS(g.solve(test::vec({0.1, 0.1, 0.1, 0.0})), DomainError);
    LPConfig bad = test::demo_config();
    bad.rule = StepRule::midpoint;
    CHECK_THROWS_AS(ManifoldGraph(m, cubic(*m), fibre(), bad), ConfigError);
    bad = test::demo_config();
    bad.T_horizon = 100.0;  // past the window
    CHECK_THROWS_AS(ManifoldGraph(m, cubic(*m), fibre(), bad), CoverageError);
    Nonlinearity no_jac = cubic(*m);
    no_jac.DF = nullptr;
    const ManifoldGraph h(m, no_jac, fibre(), test::demo_config());
    const Eigen::VectorXd xi = test::vec({0.2, 0.1, 0, 0});
    CHECK_THROWS_AS(derivative_cu(h, xi, h.solve(xi)), CapabilityError);
}

TEST_CASE("horizon and weight do not change the graph") {
    const auto m = test::demo_model();
    const Nonlinearity nl = cubic(*m);
    LPConfig a = test::demo_config();
    LPConfig b = a;
    b.rates.eta_cu = -2.0;
    LPConfig c = a;
    c.T_horizon = 1.5 * default_horizon_cu(*m, a.rates, kDt);
    const ManifoldGraph ga(m, nl, fibre(), a), gb(m, nl, fibre(), b), gc(m, nl, fibre(), c);
    CHECK(gb.horizon() < ga.horizon());
    double largest = 0.0;
    for (const auto& xi : sample_subspace(*m, Subspace::cu, 4, 1.0, 9)) {
        const Eigen::VectorXd h = ga.evaluate(xi);
        largest = std::max(largest, h.norm());
        CHECK((h - gb.evaluate(xi)).norm() < 10.0 * a.tol);
        CHECK((h - gc.evaluate(xi)).norm() < 10.0 * a.tol);
    }
    CHECK(largest > 1e-4);
}

TEST_CASE("leaf structure") {
    const auto m = test::demo_model();
    const Nonlinearity nl = cubic(*m);
    const Eigen::VectorXd anchor = test::vec({0.3, 0.2, -0.4, 0.1});
    const FoliationLeaf leaf(m, nl, fibre(), anchor, test::demo_config());
    // The leaf through x contains x.
    CHECK((leaf.point(m->project(Subspace::cs, anchor)) - anchor).norm() < 1e-14);
    const auto iotas = sample_subspace(*m, Subspace::cs, 5, 1.0, 12);
    CHECK(leaf.lipschitz_sample(iotas) <= leaf.K_s());
    for (const auto& iota : iotas) {
        const LeafSolution s = leaf.solve(iota);
        CHECK(s.stats.max_ratio <= s.stats.certified + 0.05);
    }
    // Leaves are equivalence classes: the leaf through one of its points is the same leaf.
    const Eigen::VectorXd p = leaf.point(iotas[0]);
    const FoliationLeaf other(m, nl, fibre(), p, test::demo_config());
    for (const auto& iota : iotas) CHECK((other.evaluate(iota) - leaf.evaluate(iota)).norm() < 1e-8);
}

TEST_CASE("intersection") {
    const auto m = test::demo_model();
    const Nonlinearity nl = cubic(*m);
    const ManifoldGraph g(m, nl, fibre(), test::demo_config());
    const Eigen::VectorXd anchor = test::vec({0.3, 0.2, -0.4, 0.1});
    const FoliationLeaf leaf(m, nl, fibre(), anchor, test::demo_config());
    const IntersectionResult a = intersect(g, leaf, std::nullopt, 1e-10);
    const IntersectionResult b = intersect(g, leaf, test::vec({0.0, 0.0, 0.8, -0.7}), 1e-10);
    CHECK((a.point - b.point).norm() < 1e-9);
    CHECK(a.residual_iota < 1e-9);
    // On the manifold and on the leaf.
    CHECK((g.evaluate(a.xi) - a.iota).norm() < 1e-9);
    CHECK((leaf.point(a.iota) - a.point).norm() < 1e-12);
}

TEST_CASE("pull-back to the original frame") {
    const auto m = test::demo_model();
    const ManifoldGraph g(m, cubic(*m), fibre(), test::demo_config());
    const double z0 = fibre().z_at(0.0);
    const Eigen::VectorXd xi = test::vec({0.4, -0.2, 0, 0});
    CHECK((pullback_manifold(g, xi) - std::exp(z0) * g.evaluate(std::exp(-z0) * xi)).norm() < 1e-15);
    CHECK(pullback_value(test::vec({1.0}), 0.5)(0) == doctest::Approx(std::exp(0.5)));
    CHECK_THROWS_AS(pullback_value(test::vec({1.0}), 800.0), RangeError);
    const Nonlinearity zero = make_nonlinearity("zero", 0.0, *m);
    const FoliationLeaf leaf(m, zero, fibre(), test::vec({0.3, 0, 0, 0}), test::demo_config());
    CHECK((pullback_leaf(leaf, test::vec({0, 0.1, 0, 0})) - std::exp(z0) * test::vec({0.3, 0, 0, 0})).norm() <
          1e-14);
}

TEST_CASE("lambda ladder reproduces the analytic operator") {
    const auto m = test::demo_model();
    LPConfig ladder = test::demo_config();
    ladder.plan = default_ladder_plan(*m);
    const ManifoldGraph ga(m, cubic(*m), fibre(), test::demo_config());
    const ManifoldGraph gl(m, cubic(*m), fibre(), ladder);
    const Eigen::VectorXd xi = test::vec({0.5, 0.3, 0, 0});
    const Eigen::VectorXd h = ga.evaluate(xi);
    CHECK((h - gl.evaluate(xi)).norm() < 10.0 * ladder.plan.tol * (1.0 + h.norm()));
}

TEST_CASE("boundary-control backend") {
    const auto m = std::make_shared<BoundaryModel>(BoundaryModel::Options{});
    LPConfig cfg;
    cfg.rates.eta_cu = -1.0;
    cfg.rates.zeta = -2.0;
    cfg.rates.eta_cs = 1.0;
    cfg.rates.chi = -1.0;
    const Nonlinearity nl = make_nonlinearity("cubic-saturated", 1e-3, *m);
    const ManifoldGraph g(m, nl, fibre(), cfg);
    const auto xis = sample_subspace(*m, Subspace::cu, 3, 0.5, 2);
    for (const auto& xi : xis) {
        const CuSolution s = g.solve(xi);
        CHECK(m->in_x0(s.h, 1e-12));
        CHECK(m->project(Subspace::cu, s.h).norm() < 1e-12);
        CHECK(s.stats.max_ratio <= s.stats.certified + 0.05);
    }
    CHECK(g.lipschitz_sample(xis) <= g.K_u());
}
