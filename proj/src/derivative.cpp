#include <cmath>

#include "lp_core.hpp"
#include "lpm/errors.hpp"
#include "lpm/lyapunov_perron.hpp"

namespace lpm {

namespace {

Eigen::MatrixXd modal_operator(const LinearModel& m, bool to) {
    const Eigen::Index n = to ? m.dim_x() : m.n_modes();
    Eigen::MatrixXd out(to ? m.n_modes() : m.dim_x(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
        out.col(j) = to ? m.to_modal(e) : m.from_modal(e);
    }
    return out;
}

// Modal Jacobian of G(theta_{tau_i} omega, .) at every node of `points` (states).
std::vector<Eigen::MatrixXd> modal_jacobians(const LinearModel& m, const Nonlinearity& nl,
                                             const detail::LPCore& core, const Eigen::MatrixXd& points) {
    if (!nl.has_jacobian()) throw CapabilityError("nonlinearity '" + nl.name + "' provides no Jacobian");
    const Eigen::MatrixXd Tm = modal_operator(m, true), Fm = modal_operator(m, false);
    std::vector<Eigen::MatrixXd> out;
    out.reserve(points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i)
        out.push_back(Tm * transform_jacobian(nl, core.z(i), points.col(i)) * Fm);
    return out;
}

Eigen::MatrixXd apply_jacobians(const std::vector<Eigen::MatrixXd>& J, const Eigen::MatrixXd& w) {
    Eigen::MatrixXd g(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.cols(); ++i) g.col(i) = J[i] * w.col(i);
    return g;
}

Eigen::MatrixXd physical(const LinearModel& m, const Eigen::MatrixXd& modal) {
    Eigen::MatrixXd out(m.dim_x(), modal.cols());
    for (Eigen::Index i = 0; i < modal.cols(); ++i) out.col(i) = m.from_modal(modal.col(i));
    return out;
}

}  // namespace

CuDerivative derivative_cu(const ManifoldGraph& g, const Eigen::VectorXd& xi, const CuSolution& sol) {
    const LinearModel& m = g.model();
    const LPConfig& cfg = g.config();
    const GapInputs in = make_gap_inputs(m, g.nonlinearity().L, cfg.fixed_c, cfg.corrected_shift_term);
    const GapReport gate = check_cu_smooth(in, cfg.rates, 1).front();
    if (!gate.pass) throw AdmissionError("first-order smoothness gap fails for the manifold");
    const detail::LPCore& core = g.core();
    if (sol.v.size() != core.size()) throw ConfigError("derivative_cu: solution does not match the manifold grid");
    (void)xi;

    const auto J = modal_jacobians(m, g.nonlinearity(), core, physical(m, sol.v.modal));
    const auto dirs = m.modes_of(Subspace::cu);
    const Eigen::VectorXd ms = m.mask(Subspace::s);
    CuDerivative out;
    out.Dh.resize(m.dim_x(), static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const Eigen::VectorXd init = Eigen::VectorXd::Unit(m.n_modes(), dirs[j]);
        Eigen::MatrixXd w = core.sweep(init, Eigen::MatrixXd::Zero(m.n_modes(), core.size()));
        auto op = [&](const Eigen::MatrixXd& x) { return core.sweep(init, apply_jacobians(J, x)); };
        out.stats.push_back(core.picard(op, w, gate.lhs, cfg));
        out.Dh.col(static_cast<Eigen::Index>(j)) = m.from_modal(ms.cwiseProduct(w.col(core.zero_col())));
        out.dv.push_back(core.wrap(std::move(w)));
    }
    return out;
}

LeafDerivative derivative_leaf(const FoliationLeaf& leaf, const Eigen::VectorXd& iota, const LeafSolution& sol) {
    const LinearModel& m = leaf.model();
    const LPConfig& cfg = leaf.config();
    const GapInputs in = make_gap_inputs(m, leaf.nonlinearity().L, cfg.fixed_c, cfg.corrected_shift_term);
    const GapReport gate = check_cs_smooth(in, cfg.rates, 1).front();
    if (!gate.pass) throw AdmissionError("first-order smoothness gap fails for the leaf");
    const detail::LPCore& core = leaf.core();
    if (sol.psi.size() != core.size()) throw ConfigError("derivative_leaf: solution does not match the leaf grid");
    (void)iota;

    const Eigen::MatrixXd pts = leaf.base().values + physical(m, sol.psi.modal);
    const auto J = modal_jacobians(m, leaf.nonlinearity(), core, pts);
    const auto dirs = m.modes_of(Subspace::cs);
    const Eigen::VectorXd mu = m.mask(Subspace::u);
    LeafDerivative out;
    out.Dl.resize(m.dim_x(), static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const Eigen::VectorXd init = Eigen::VectorXd::Unit(m.n_modes(), dirs[j]);
        Eigen::MatrixXd w = core.sweep(init, Eigen::MatrixXd::Zero(m.n_modes(), core.size()));
        auto op = [&](const Eigen::MatrixXd& x) { return core.sweep(init, apply_jacobians(J, x)); };
        out.stats.push_back(core.picard(op, w, gate.lhs, cfg));
        out.Dl.col(static_cast<Eigen::Index>(j)) = m.from_modal(mu.cwiseProduct(w.col(0)));
        out.dpsi.push_back(core.wrap(std::move(w)));
    }
    return out;
}

}  // namespace lpm
