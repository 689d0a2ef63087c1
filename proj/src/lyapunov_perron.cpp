#include "lpm/lyapunov_perron.hpp"

#include <cmath>

#include "lp_core.hpp"
#include "lpm/errors.hpp"

namespace lpm {

namespace detail {

LPCore::LPCore(const LinearModel& model, const OUProcess& ou, HalfLine side, double T, double eta, StepRule rule,
               const ConvolutionPlan& plan, const Eigen::VectorXd& forward_mask)
    : side_(side), dt_(ou.grid.dt()), eta_(eta), forward_(forward_mask) {
    const long long steps = ou.grid.steps_in(T);
    if (steps < 1) throw ConfigError("LP horizon must span at least one step");
    const Eigen::Index N = static_cast<Eigen::Index>(steps);
    const double t_first = side == HalfLine::past ? -static_cast<double>(N) * dt_ : 0.0;
    const Eigen::Index i_first = ou.grid.index_of(t_first);
    ou.grid.index_of(t_first + static_cast<double>(N) * dt_);
    const double cum0 = ou.cumulative(ou.grid.index_of(0.0));

    tau_.resize(N + 1);
    z_.resize(N + 1);
    weight_.resize(N + 1);
    for (Eigen::Index i = 0; i <= N; ++i) {
        tau_(i) = t_first + static_cast<double>(i) * dt_;
        z_(i) = ou.z_values(i_first + i);
        const double e = -eta * tau_(i) - (ou.cumulative(i_first + i) - cum0);
        if (e > 700.0) throw RangeError("weighted norm exponent overflows; shorten the horizon");
        weight_(i) = std::exp(e);
    }

    const Eigen::VectorXd& a = model.eigenvalues();
    const Eigen::Index n = a.size();
    E_.resize(n, N);
    WL_.resize(n, N);
    WR_.resize(n, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double zint = ou.cumulative(i_first + i + 1) - ou.cumulative(i_first + i);
        for (Eigen::Index k = 0; k < n; ++k) {
            const StepWeights w = step_weights(rule, a(k) * dt_ + zint, dt_);
            E_(k, i) = w.e;
            WL_(k, i) = w.wl;
            WR_(k, i) = w.wr;
        }
    }

    plan.validate(model);
    ladder_ = plan.lambda_ladder;
    ladder_tol_ = plan.tol;
    const Eigen::VectorXd ms = model.mask(Subspace::s);
    for (double lam : ladder_) {
        // Yosida factor per stable mode, read off the model's resolvent.
        Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (ms(k) == 0.0) continue;
            const Eigen::VectorXd ek = model.from_modal(Eigen::VectorXd::Unit(n, k));
            scale(k) = model.to_modal(model.yosida_apply(lam, ek))(k);
        }
        ladder_scale_.push_back(scale);
    }
}

Eigen::MatrixXd LPCore::sweep_scaled(const Eigen::VectorXd& init, const Eigen::MatrixXd& g,
                                     const Eigen::VectorXd& scale) const {
    const Eigen::Index n = E_.rows(), N = cells();
    Eigen::MatrixXd y(n, N + 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double sk = scale(k);
        if (forward_(k) != 0.0) {
            y(k, 0) = init(k);
            for (Eigen::Index i = 0; i < N; ++i)
                y(k, i + 1) = E_(k, i) * y(k, i) + sk * (WL_(k, i) * g(k, i) + WR_(k, i) * g(k, i + 1));
        } else {
            y(k, N) = init(k);
            for (Eigen::Index i = N - 1; i >= 0; --i)
                y(k, i) = (y(k, i + 1) - sk * (WL_(k, i) * g(k, i) + WR_(k, i) * g(k, i + 1))) / E_(k, i);
        }
    }
    return y;
}

Eigen::MatrixXd LPCore::sweep(const Eigen::VectorXd& init, const Eigen::MatrixXd& g) const {
    if (ladder_.empty()) return sweep_scaled(init, g, Eigen::VectorXd::Ones(E_.rows()));
    std::vector<Eigen::MatrixXd> row;
    for (const auto& s : ladder_scale_) row.push_back(sweep_scaled(init, g, s));
    // Neville extrapolation in 1/lambda.
    Eigen::MatrixXd prev_diag = row[0], diag = row[0];
    double gap = 0.0;
    for (std::size_t k = 1; k < ladder_.size(); ++k) {
        std::vector<Eigen::MatrixXd> next;
        for (std::size_t i = k; i < ladder_.size(); ++i) {
            const double hi = 1.0 / ladder_[i], hik = 1.0 / ladder_[i - k];
            next.push_back(row[i - k + 1] + (row[i - k + 1] - row[i - k]) * (hi / (hik - hi)));
        }
        row = std::move(next);
        prev_diag = diag;
        diag = row[0];
        gap = norm(diag - prev_diag);
    }
    if (ladder_.size() > 1 && !(gap <= 10.0 * ladder_tol_ * (1.0 + norm(diag))))
        throw ConvergenceError("lambda ladder not converged inside the LP operator");
    return diag;
}

double LPCore::norm(const Eigen::MatrixXd& modal) const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < modal.cols(); ++i) m = std::max(m, weight_(i) * modal.col(i).norm());
    return m;
}

WeightedPath LPCore::wrap(Eigen::MatrixXd modal) const {
    WeightedPath p;
    p.side = side_;
    p.eta = eta_;
    p.dt = dt_;
    p.modal = std::move(modal);
    return p;
}

FixedPointStats LPCore::picard(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& op,
                               Eigen::MatrixXd& x, double certified, const LPConfig& cfg) const {
    FixedPointStats st;
    st.certified = certified;
    double prev = -1.0;
    for (int it = 1;; ++it) {
        Eigen::MatrixXd nx = op(x);
        const double d = norm(nx - x);
        const double scale = 1.0 + norm(nx);
        if (!std::isfinite(d)) throw NumericalError("Picard iterate is not finite");
        st.diffs.push_back(d);
        // Ratios are only meaningful while the previous step is well above rounding.
        if (prev > 1e-11 * scale) {
            const double r = d / prev;
            st.max_ratio = std::max(st.max_ratio, r);
            if (r > certified + cfg.ratio_slack)
                throw CertificationMismatch("observed contraction " + std::to_string(r) + " exceeds certified " +
                                            std::to_string(certified) + " + slack");
        }
        x = std::move(nx);
        prev = d;
        st.iterations = it;
        if (d <= cfg.tol * scale) break;
        if (it >= cfg.max_iter)
            throw ConvergenceError("Picard iteration did not reach tol in " + std::to_string(cfg.max_iter) +
                                   " steps (last change " + std::to_string(d) + ")");
    }
    st.residual = norm(op(x) - x);
    return st;
}

}  // namespace detail

namespace {

double align_up(double T, double dt) { return std::ceil(T / dt - 1e-9) * dt; }

std::vector<long long> quantise(const Eigen::VectorXd& v) {
    std::vector<long long> key(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) key[i] = std::llround(v(i) * 1e12);
    return key;
}

void check_config(const LPConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw ConfigError("LP: tol must be positive");
    if (cfg.max_iter < 1) throw ConfigError("LP: max_iter must be >= 1");
    if (!(cfg.ratio_slack >= 0.0)) throw ConfigError("LP: ratio_slack must be >= 0");
    if (cfg.rule == StepRule::midpoint) throw ConfigError("LP: step rule must be euler or trapezoid");
}

// Modal forcing G(theta_t omega, base + path) - G(theta_t omega, base) at every node.
Eigen::MatrixXd forcing(const LinearModel& model, const Nonlinearity& nl, const detail::LPCore& core,
                        const Eigen::MatrixXd& path, const Eigen::MatrixXd* base, const Eigen::MatrixXd* base_g) {
    Eigen::MatrixXd g(path.rows(), path.cols());
    for (Eigen::Index i = 0; i < path.cols(); ++i) {
        Eigen::VectorXd x = model.from_modal(path.col(i));
        if (base) x += base->col(i);
        Eigen::VectorXd gx = transform_nonlinearity(nl, core.z(i), x);
        if (base_g) gx -= base_g->col(i);
        g.col(i) = model.to_modal(gx);
    }
    return g;
}

double pair_lipschitz(const std::vector<Eigen::VectorXd>& pts, const std::vector<Eigen::VectorXd>& vals) {
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = (pts[i] - pts[j]).norm();
            if (d > 0.0) worst = std::max(worst, (vals[i] - vals[j]).norm() / d);
        }
    return worst;
}

}  // namespace

double weighted_norm(const WeightedPath& p, const OUProcess& ou) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double t = p.time(i);
        const double e = -p.eta * t - integral_z(ou, 0.0, t);
        m = std::max(m, std::exp(e) * p.modal.col(i).norm());
    }
    return m;
}

double default_horizon_cu(const LinearModel& model, const RateParams& r, double dt) {
    const double gap = model.constants().beta + r.eta_cu;
    if (!(gap > 0.0) || r.eta_cu == 0.0) throw DomainError("horizon: need -beta < eta_cu < 0");
    return align_up(std::max(30.0 / std::abs(r.eta_cu), std::log(1e8) / gap), dt);
}

double default_horizon_cs(const LinearModel& model, const RateParams& r, double dt) {
    const double gap = model.constants().alpha - r.eta_cs;
    if (!(gap > 0.0) || !(r.eta_cs > 0.0)) throw DomainError("horizon: need 0 < eta_cs < alpha");
    return align_up(std::max(30.0 / r.eta_cs, std::log(1e8) / gap), dt);
}

// ---------------------------------------------------------------------------
// ManifoldGraph

ManifoldGraph::ManifoldGraph(std::shared_ptr<const LinearModel> model, Nonlinearity nl, OUProcess ou, LPConfig cfg)
    : model_(std::move(model)), nl_(std::move(nl)), ou_(std::move(ou)), cfg_(std::move(cfg)) {
    check_config(cfg_);
    const GapInputs in = make_gap_inputs(*model_, nl_.L, cfg_.fixed_c, cfg_.corrected_shift_term);
    gap_ = check_cu(in, cfg_.rates);
    if (!gap_.pass)
        throw AdmissionError("centre-unstable gap condition fails (lhs = " + std::to_string(gap_.lhs) + ")");
    const double dt = ou_.grid.dt();
    T_ = cfg_.T_horizon > 0.0 ? align_up(cfg_.T_horizon, dt) : default_horizon_cu(*model_, cfg_.rates, dt);
    core_ = std::make_unique<detail::LPCore>(*model_, ou_, HalfLine::past, T_, cfg_.rates.eta_cu, cfg_.rule,
                                             cfg_.plan, model_->mask(Subspace::s));
}

ManifoldGraph::~ManifoldGraph() = default;

namespace {

Eigen::VectorXd cu_init(const LinearModel& model, const Eigen::VectorXd& xi) {
    if (xi.size() != model.dim_x() || !model.in_x0(xi, 1e-12 * (1.0 + xi.norm())))
        throw DomainError("xi must be a state in X0");
    if (model.project(Subspace::s, xi).norm() > 1e-10 * (1.0 + xi.norm()))
        throw DomainError("xi must lie in the centre-unstable subspace");
    return model.mask(Subspace::cu).cwiseProduct(model.to_modal(xi));
}

}  // namespace

WeightedPath ManifoldGraph::linear_term(const Eigen::VectorXd& xi) const {
    const Eigen::VectorXd init = cu_init(*model_, xi);
    return core_->wrap(core_->sweep(init, Eigen::MatrixXd::Zero(model_->n_modes(), core_->size())));
}

WeightedPath ManifoldGraph::apply(const Eigen::VectorXd& xi, const WeightedPath& v) const {
    if (v.size() != core_->size()) throw ConfigError("J: path does not match the LP grid");
    const Eigen::VectorXd init = cu_init(*model_, xi);
    return core_->wrap(core_->sweep(init, forcing(*model_, nl_, *core_, v.modal, nullptr, nullptr)));
}

CuSolution ManifoldGraph::solve(const Eigen::VectorXd& xi) const {
    const Eigen::VectorXd init = cu_init(*model_, xi);
    Eigen::MatrixXd v = core_->sweep(init, Eigen::MatrixXd::Zero(model_->n_modes(), core_->size()));
    auto op = [&](const Eigen::MatrixXd& w) {
        return core_->sweep(init, forcing(*model_, nl_, *core_, w, nullptr, nullptr));
    };
    CuSolution sol;
    sol.stats = core_->picard(op, v, gap_.lhs, cfg_);
    const Eigen::VectorXd v0 = v.col(core_->zero_col());
    sol.h = model_->from_modal(model_->mask(Subspace::s).cwiseProduct(v0));
    sol.v = core_->wrap(std::move(v));
    return sol;
}

Eigen::VectorXd ManifoldGraph::evaluate(const Eigen::VectorXd& xi) const {
    const auto key = quantise(xi);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Eigen::VectorXd h = solve(xi).h;
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return cache_.emplace(key, std::move(h)).first->second;
}

double ManifoldGraph::weighted_norm(const WeightedPath& p) const { return core_->norm(p.modal); }

double ManifoldGraph::lipschitz_sample(const std::vector<Eigen::VectorXd>& xis) const {
    std::vector<Eigen::VectorXd> vals;
    for (const auto& x : xis) vals.push_back(evaluate(x));
    return pair_lipschitz(xis, vals);
}

// ---------------------------------------------------------------------------
// FoliationLeaf

FoliationLeaf::FoliationLeaf(std::shared_ptr<const LinearModel> model, Nonlinearity nl, OUProcess ou,
                             Eigen::VectorXd anchor, LPConfig cfg)
    : model_(std::move(model)), nl_(std::move(nl)), ou_(std::move(ou)), anchor_(std::move(anchor)),
      cfg_(std::move(cfg)) {
    check_config(cfg_);
    if (anchor_.size() != model_->dim_x() || !model_->in_x0(anchor_, 1e-12 * (1.0 + anchor_.norm())))
        throw DomainError("leaf anchor must be a state in X0");
    const GapInputs in = make_gap_inputs(*model_, nl_.L, cfg_.fixed_c, cfg_.corrected_shift_term);
    gap_ = check_cs_foliation(in, cfg_.rates);
    if (!gap_.front().pass)
        throw AdmissionError("centre-stable gap condition fails (lhs = " + std::to_string(gap_.front().lhs) + ")");
    const double dt = ou_.grid.dt();
    T_ = cfg_.T_horizon > 0.0 ? align_up(cfg_.T_horizon, dt) : default_horizon_cs(*model_, cfg_.rates, dt);
    IntegratorOptions io;
    io.divergence_guard = cfg_.base_guard;
    base_ = integrate_mild(*model_, nl_, ou_, anchor_, T_, io);
    core_ = std::make_unique<detail::LPCore>(*model_, ou_, HalfLine::future, T_, cfg_.rates.eta_cs, cfg_.rule,
                                             cfg_.plan, model_->mask(Subspace::cs));
    base_g_.resize(model_->dim_x(), base_.size());
    for (Eigen::Index i = 0; i < base_.size(); ++i)
        base_g_.col(i) = transform_nonlinearity(nl_, core_->z(i), base_.values.col(i));
}

FoliationLeaf::~FoliationLeaf() = default;

Eigen::VectorXd FoliationLeaf::offset_init(const Eigen::VectorXd& iota) const {
    if (iota.size() != model_->dim_x() || !model_->in_x0(iota, 1e-12 * (1.0 + iota.norm())))
        throw DomainError("iota must be a state in X0");
    if (model_->project(Subspace::u, iota).norm() > 1e-10 * (1.0 + iota.norm()))
        throw DomainError("iota must lie in the centre-stable subspace");
    const Eigen::VectorXd offset = iota - model_->project(Subspace::cs, anchor_);
    return model_->mask(Subspace::cs).cwiseProduct(model_->to_modal(offset));
}

WeightedPath FoliationLeaf::linear_term(const Eigen::VectorXd& offset) const {
    if (model_->project(Subspace::u, offset).norm() > 1e-10 * (1.0 + offset.norm()))
        throw DomainError("offset must lie in the centre-stable subspace");
    const Eigen::VectorXd init = model_->mask(Subspace::cs).cwiseProduct(model_->to_modal(offset));
    return core_->wrap(core_->sweep(init, Eigen::MatrixXd::Zero(model_->n_modes(), core_->size())));
}

WeightedPath FoliationLeaf::apply(const Eigen::VectorXd& iota, const WeightedPath& psi) const {
    if (psi.size() != core_->size()) throw ConfigError("Z: path does not match the LP grid");
    const Eigen::VectorXd init = offset_init(iota);
    return core_->wrap(core_->sweep(init, forcing(*model_, nl_, *core_, psi.modal, &base_.values, &base_g_)));
}

LeafSolution FoliationLeaf::solve(const Eigen::VectorXd& iota) const {
    const Eigen::VectorXd init = offset_init(iota);
    Eigen::MatrixXd psi = core_->sweep(init, Eigen::MatrixXd::Zero(model_->n_modes(), core_->size()));
    auto op = [&](const Eigen::MatrixXd& w) {
        return core_->sweep(init, forcing(*model_, nl_, *core_, w, &base_.values, &base_g_));
    };
    LeafSolution sol;
    sol.stats = core_->picard(op, psi, gap_.front().lhs, cfg_);
    const Eigen::VectorXd p0 = psi.col(0);
    sol.l = model_->project(Subspace::u, anchor_) + model_->from_modal(model_->mask(Subspace::u).cwiseProduct(p0));
    sol.psi = core_->wrap(std::move(psi));
    return sol;
}

Eigen::VectorXd FoliationLeaf::evaluate(const Eigen::VectorXd& iota) const {
    const auto key = quantise(iota);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Eigen::VectorXd l = solve(iota).l;
    std::lock_guard<std::mutex> lock(cache_mutex_);
    return cache_.emplace(key, std::move(l)).first->second;
}

double FoliationLeaf::weighted_norm(const WeightedPath& p) const { return core_->norm(p.modal); }

double FoliationLeaf::lipschitz_sample(const std::vector<Eigen::VectorXd>& iotas) const {
    std::vector<Eigen::VectorXd> vals;
    for (const auto& x : iotas) vals.push_back(evaluate(x));
    return pair_lipschitz(iotas, vals);
}

// ---------------------------------------------------------------------------
// Free functions

WeightedPath lp_operator_cu(const ManifoldGraph& g, const Eigen::VectorXd& xi, const WeightedPath& v) {
    return g.apply(xi, v);
}

CuSolution solve_cu(std::shared_ptr<const LinearModel> model, const Nonlinearity& nl, const OUProcess& ou,
                    const Eigen::VectorXd& xi, const LPConfig& cfg) {
    ManifoldGraph g(std::move(model), nl, ou, cfg);
    return g.solve(xi);
}

WeightedPath lp_operator_cs(const FoliationLeaf& leaf, const Eigen::VectorXd& iota, const WeightedPath& psi) {
    return leaf.apply(iota, psi);
}

LeafSolution solve_leaf(std::shared_ptr<const LinearModel> model, const Nonlinearity& nl, const OUProcess& ou,
                        const Eigen::VectorXd& anchor, const Eigen::VectorXd& iota, const LPConfig& cfg) {
    FoliationLeaf leaf(std::move(model), nl, ou, anchor, cfg);
    return leaf.solve(iota);
}

IntersectionResult intersect(const ManifoldGraph& g, const FoliationLeaf& leaf,
                             const std::optional<Eigen::VectorXd>& iota0, double tol, int max_iter) {
    IntersectionResult res;
    res.gate = check_intersection(g.K_u(), leaf.K_s());
    if (!res.gate.pass)
        throw AdmissionError("intersection needs K_u K_s < 1 (got " + std::to_string(res.gate.lhs) + ")");
    const LinearModel& m = g.model();
    Eigen::VectorXd iota = iota0 ? *iota0 : m.project(Subspace::cs, leaf.anchor());
    for (int it = 1;; ++it) {
        const Eigen::VectorXd xi = leaf.evaluate(iota);
        const Eigen::VectorXd next = g.evaluate(xi);
        const double d = (next - iota).norm();
        iota = next;
        res.iterations = it;
        if (d <= tol * (1.0 + iota.norm())) break;
        if (it >= max_iter) throw ConvergenceError("intersection iteration did not converge");
    }
    res.iota = iota;
    res.xi = leaf.evaluate(iota);
    res.point = iota + res.xi;
    res.residual_xi = (res.xi - leaf.evaluate(iota)).norm();
    res.residual_iota = (iota - g.evaluate(res.xi)).norm();
    return res;
}

Eigen::VectorXd pullback_value(const Eigen::VectorXd& value, double z0) {
    if (std::abs(z0) > 700.0) throw RangeError("pullback: |z| > 700");
    return std::exp(z0) * value;
}

Eigen::VectorXd pullback_manifold(const ManifoldGraph& g, const Eigen::VectorXd& xi) {
    const double z0 = g.ou().z_at(0.0);
    if (std::abs(z0) > 700.0) throw RangeError("pullback: |z| > 700");
    return pullback_value(g.evaluate(std::exp(-z0) * xi), z0);
}

Eigen::VectorXd pullback_leaf(const FoliationLeaf& leaf, const Eigen::VectorXd& iota) {
    const double z0 = leaf.ou().z_at(0.0);
    if (std::abs(z0) > 700.0) throw RangeError("pullback: |z| > 700");
    return pullback_value(leaf.evaluate(std::exp(-z0) * iota), z0);
}

std::vector<Eigen::VectorXd> subspace_directions(const LinearModel& model, Subspace sub) {
    std::vector<Eigen::VectorXd> out;
    for (Eigen::Index k : model.modes_of(sub))
        out.push_back(model.from_modal(Eigen::VectorXd::Unit(model.n_modes(), k)));
    return out;
}

}  // namespace lpm
