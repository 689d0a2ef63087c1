#include "lpm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lpm/errors.hpp"
#include "lpm/flow.hpp"

namespace lpm {

VerificationReport make_verification(std::string name, int samples, double worst, double tol, std::string note) {
    VerificationReport rep;
    rep.name = std::move(name);
    rep.samples = samples;
    rep.worst = worst;
    rep.tol = tol;
    rep.pass = worst <= tol;
    rep.note = std::move(note);
    return rep;
}

VerificationReport check_invariance_manifold(const ManifoldGraph& g, double r, const std::vector<Eigen::VectorXd>& xis,
                                             double tol) {
    const LinearModel& m = g.model();
    const double dt = g.ou().grid.dt();
    if (tol <= 0.0) tol = 10.0 * dt;
    ManifoldGraph shifted(g.model_ptr(), g.nonlinearity(), shift(g.ou(), r), g.config());
    double worst = 0.0;
    for (const auto& xi : xis) {
        const Eigen::VectorXd x = xi + g.evaluate(xi);
        const Trajectory tr = integrate_mild(m, g.nonlinearity(), g.ou(), x, r);
        const Eigen::VectorXd vr = tr.values.col(tr.size() - 1);
        const Eigen::VectorXd hr = shifted.evaluate(m.project(Subspace::cu, vr));
        worst = std::max(worst, (m.project(Subspace::s, vr) - hr).norm());
    }
    return make_verification("manifold_invariance", static_cast<int>(xis.size()), worst, tol);
}

namespace {

double growth_ratio(const FoliationLeaf& leaf, const Eigen::VectorXd& p, double T) {
    const LinearModel& m = leaf.model();
    const OUProcess& ou = leaf.ou();
    const double eta = leaf.config().rates.eta_cs;
    const Eigen::VectorXd& x = leaf.anchor();
    const double d0 = (p - x).norm();
    if (d0 == 0.0) return 0.0;
    IntegratorOptions io;
    io.divergence_guard = leaf.config().base_guard;
    const Trajectory a = integrate_mild(m, leaf.nonlinearity(), ou, p, T, io);
    const Trajectory b = integrate_mild(m, leaf.nonlinearity(), ou, x, T, io);
    double sup = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double t = a.time(j);
        const double w = std::exp(-eta * t - integral_z(ou, 0.0, t));
        sup = std::max(sup, w * (a.values.col(j) - b.values.col(j)).norm());
    }
    return sup / d0;
}

}  // namespace

VerificationReport check_leaf_convergence(const FoliationLeaf& leaf, const std::vector<Eigen::VectorXd>& iotas,
                                          double T, double growth_tol) {
    double worst = 0.0;
    for (const auto& iota : iotas) worst = std::max(worst, growth_ratio(leaf, leaf.point(iota), T));
    return make_verification("leaf_convergence", static_cast<int>(iotas.size()), worst, 1.0 + growth_tol);
}

VerificationReport check_off_leaf_violation(const FoliationLeaf& leaf, const std::vector<Eigen::VectorXd>& iotas,
                                            double T, double offset, double growth_tol) {
    const LinearModel& m = leaf.model();
    Eigen::VectorXd push = Eigen::VectorXd::Zero(m.dim_x());
    for (const auto& d : subspace_directions(m, Subspace::u)) push += d;
    if (push.norm() == 0.0) throw DomainError("off-leaf check needs an unstable direction");
    push *= offset / push.norm();
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& iota : iotas) smallest = std::min(smallest, growth_ratio(leaf, leaf.point(iota) + push, T));
    // Inverted gate: pass means every pushed pair breaks the bound.
    VerificationReport rep;
    rep.name = "off_leaf_violation";
    rep.samples = static_cast<int>(iotas.size());
    rep.worst = smallest;
    rep.tol = 1.0 + growth_tol;
    rep.pass = smallest > rep.tol;
    rep.note = "passes when the smallest ratio exceeds tol";
    return rep;
}

namespace {

double relative_error(const Eigen::VectorXd& fd, const Eigen::VectorXd& d) {
    const double err = (fd - d).norm();
    if (err == 0.0) return 0.0;
    return err / std::max(d.norm(), 1e-10);
}

}  // namespace

VerificationReport check_gradient_cu(const ManifoldGraph& g, const Eigen::VectorXd& xi, double fd_step, double tol) {
    const CuSolution sol = g.solve(xi);
    const CuDerivative D = derivative_cu(g, xi, sol);
    const auto dirs = subspace_directions(g.model(), Subspace::cu);
    double worst = 0.0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const Eigen::VectorXd fd = (g.solve(xi + fd_step * dirs[j]).h - g.solve(xi - fd_step * dirs[j]).h) /
                                   (2.0 * fd_step);
        worst = std::max(worst, relative_error(fd, D.Dh.col(static_cast<Eigen::Index>(j))));
    }
    return make_verification("gradient_cu", static_cast<int>(dirs.size()), worst, tol);
}

VerificationReport check_gradient_leaf(const FoliationLeaf& leaf, const Eigen::VectorXd& iota, double fd_step,
                                       double tol) {
    const LeafSolution sol = leaf.solve(iota);
    const LeafDerivative D = derivative_leaf(leaf, iota, sol);
    const auto dirs = subspace_directions(leaf.model(), Subspace::cs);
    double worst = 0.0;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const Eigen::VectorXd fd =
            (leaf.solve(iota + fd_step * dirs[j]).l - leaf.solve(iota - fd_step * dirs[j]).l) / (2.0 * fd_step);
        worst = std::max(worst, relative_error(fd, D.Dl.col(static_cast<Eigen::Index>(j))));
    }
    return make_verification("gradient_leaf", static_cast<int>(dirs.size()), worst, tol);
}

VerificationReport check_lipschitz_cu(const ManifoldGraph& g, const std::vector<Eigen::VectorXd>& xis) {
    return make_verification("lipschitz_cu", static_cast<int>(xis.size()), g.lipschitz_sample(xis), g.K_u());
}

VerificationReport check_lipschitz_leaf(const FoliationLeaf& leaf, const std::vector<Eigen::VectorXd>& iotas) {
    return make_verification("lipschitz_leaf", static_cast<int>(iotas.size()), leaf.lipschitz_sample(iotas),
                             leaf.K_s());
}

VerificationReport oracle_bvp_compare(const ManifoldGraph& g, const std::vector<Eigen::VectorXd>& xis, double tol,
                                      const BvpOracleOptions& opt) {
    const double T = opt.T > 0.0 ? opt.T : g.horizon();
    double worst = 0.0;
    for (const auto& xi : xis) {
        const Eigen::VectorXd ref = bvp_oracle_h(g.model(), g.nonlinearity(), g.ou(), xi, T, opt);
        worst = std::max(worst, (ref - g.evaluate(xi)).norm());
    }
    return make_verification("oracle_bvp", static_cast<int>(xis.size()), worst, tol);
}

std::vector<Eigen::VectorXd> sample_subspace(const LinearModel& model, Subspace sub, int count, double radius,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // Raw 53-bit draws: the standard distributions are not portable bit-for-bit.
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const auto modes = model.modes_of(sub);
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(model.n_modes());
        for (Eigen::Index k : modes) c(k) = radius * (2.0 * uniform() - 1.0);
        out.push_back(model.from_modal(c));
    }
    return out;
}

}  // namespace lpm
