#include "lpm/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpm/errors.hpp"
#include "lpm/quadrature.hpp"

namespace lpm {

void ConvolutionPlan::validate(const LinearModel& model) const {
    if (!(tol > 0.0)) throw ConfigError("convolution plan: tol must be positive");
    for (std::size_t i = 0; i < lambda_ladder.size(); ++i) {
        if (!(lambda_ladder[i] > model.constants().theta_hy))
            throw ConfigError("convolution plan: ladder entries must exceed theta_hy");
        if (i > 0 && !(lambda_ladder[i] > lambda_ladder[i - 1]))
            throw ConfigError("convolution plan: ladder must be strictly increasing");
    }
}

ConvolutionPlan default_ladder_plan(const LinearModel& model, int count, double factor) {
    if (count < 1 || !(factor > 1.0)) throw ConfigError("ladder: need count >= 1 and factor > 1");
    double base = std::max({model.eigenvalues().cwiseAbs().maxCoeff(), std::abs(model.constants().theta_hy), 1.0});
    base *= 10.0;
    ConvolutionPlan plan;
    for (int i = 0; i < count; ++i) plan.lambda_ladder.push_back(base * std::pow(factor, i));
    return plan;
}

Eigen::VectorXd integrated_semigroup_apply(const LinearModel& model, double t, const Eigen::VectorXd& x,
                                           double lambda) {
    if (t < 0.0) throw DomainError("integrated semigroup needs t >= 0");
    const Eigen::VectorXd w = model.to_modal(model.resolvent_apply(lambda, x));
    const Eigen::VectorXd& a = model.eigenvalues();
    Eigen::VectorXd out(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        const double at = a(k) * t;
        if (at > 700.0) throw RangeError("integrated semigroup exponent overflows");
        const double int_T = t * phi1(at);  // int_0^t e^{a s} ds
        out(k) = lambda * int_T * w(k) - std::expm1(at) * w(k);
    }
    return model.from_modal(out);
}

namespace {

Eigen::Index forcing_steps(const OUProcess& ou, const Forcing& f, double t) {
    if (t < 0.0) throw DomainError("convolution needs t >= 0");
    const long long steps = ou.grid.steps_in(t);
    if (f.cols() != steps + 1)
        throw ConfigError("forcing must have t/dt + 1 columns (got " + std::to_string(f.cols()) + ", need " +
                          std::to_string(steps + 1) + ")");
    ou.grid.index_of(0.0);
    ou.grid.index_of(t);
    return static_cast<Eigen::Index>(steps);
}

StepRule rule_of(Quadrature q) { return q == Quadrature::midpoint ? StepRule::midpoint : StepRule::trapezoid; }

}  // namespace

Eigen::VectorXd convolution_modal(const LinearModel& model, const OUProcess& ou, const Forcing& f, double t,
                                  Quadrature q, double lambda, Subspace lambda_modes) {
    const Eigen::Index steps = forcing_steps(ou, f, t);
    const Eigen::Index n = model.n_modes();
    const Eigen::VectorXd lm = model.mask(lambda_modes);
    const bool use_lambda = lambda > 0.0;

    Eigen::MatrixXd g(n, steps + 1);
    for (Eigen::Index j = 0; j <= steps; ++j) {
        g.col(j) = model.to_modal(f.col(j));
        if (use_lambda) {
            const Eigen::VectorXd gy = model.to_modal(model.yosida_apply(lambda, f.col(j)));
            for (Eigen::Index k = 0; k < n; ++k)
                if (lm(k) != 0.0) g(k, j) = gy(k);
        }
    }

    const double dt = ou.grid.dt();
    const Eigen::Index i0 = ou.grid.index_of(0.0);
    const Eigen::VectorXd& a = model.eigenvalues();
    const StepRule rule = rule_of(q);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < steps; ++j) {
        const double zint = ou.cumulative(i0 + j + 1) - ou.cumulative(i0 + j);
        for (Eigen::Index k = 0; k < n; ++k) {
            const StepWeights w = step_weights(rule, a(k) * dt + zint, dt);
            acc(k) = w.e * acc(k) + w.wl * g(k, j) + w.wr * g(k, j + 1);
        }
    }
    return acc;
}

std::vector<Eigen::VectorXd> convolution_ladder(const LinearModel& model, const OUProcess& ou, const Forcing& f,
                                                double t, const std::vector<double>& ladder, Quadrature q) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(ladder.size());
    for (double lam : ladder) out.push_back(model.from_modal(convolution_modal(model, ou, f, t, q, lam)));
    return out;
}

namespace {

// Neville extrapolation to h = 1/lambda -> 0; returns the diagonal T_{k,k}.
std::vector<Eigen::VectorXd> richardson_diagonal(const std::vector<Eigen::VectorXd>& v,
                                                 const std::vector<double>& ladder) {
    const std::size_t m = v.size();
    std::vector<Eigen::VectorXd> row = v, diag;
    diag.push_back(v[0]);
    for (std::size_t k = 1; k < m; ++k) {
        std::vector<Eigen::VectorXd> next;
        for (std::size_t i = k; i < m; ++i) {
            const double hi = 1.0 / ladder[i], hik = 1.0 / ladder[i - k];
            next.push_back(row[i - k + 1] + (row[i - k + 1] - row[i - k]) * (hi / (hik - hi)));
        }
        row = std::move(next);
        diag.push_back(row[0]);
    }
    return diag;
}

ConvolutionResult ladder_result(std::vector<Eigen::VectorXd> vals, const std::vector<double>& ladder, double tol) {
    ConvolutionResult res;
    res.by_lambda = vals;
    const auto diag = richardson_diagonal(vals, ladder);
    res.value = diag.back();
    for (std::size_t k = 1; k < diag.size(); ++k) res.extrapolation_gaps.push_back((diag[k] - diag[k - 1]).norm());
    if (!res.extrapolation_gaps.empty()) {
        const double gap = res.extrapolation_gaps.back();
        if (!(gap <= 10.0 * tol * (1.0 + res.value.norm())))
            throw ConvergenceError("lambda ladder not converged: last extrapolation gap " + std::to_string(gap));
    }
    return res;
}

}  // namespace

ConvolutionResult stieltjes_convolution(const LinearModel& model, const OUProcess& ou, const Forcing& f, double t,
                                        const ConvolutionPlan& plan) {
    plan.validate(model);
    if (plan.analytic()) {
        ConvolutionResult res;
        res.value = model.from_modal(convolution_modal(model, ou, f, t, plan.quadrature, 0.0));
        return res;
    }
    return ladder_result(convolution_ladder(model, ou, f, t, plan.lambda_ladder, plan.quadrature),
                         plan.lambda_ladder, plan.tol);
}

SplitConvolution split_convolution(const LinearModel& model, const OUProcess& ou, const Forcing& f, double t,
                                   const ConvolutionPlan& plan) {
    plan.validate(model);
    const Eigen::VectorXd plain = convolution_modal(model, ou, f, t, plan.quadrature, 0.0);
    SplitConvolution out;
    out.c = model.from_modal(model.mask(Subspace::c).cwiseProduct(plain));
    out.u = model.from_modal(model.mask(Subspace::u).cwiseProduct(plain));
    const Eigen::VectorXd ms = model.mask(Subspace::s);
    if (plan.analytic()) {
        out.s = model.from_modal(ms.cwiseProduct(plain));
        return out;
    }
    std::vector<Eigen::VectorXd> vals;
    for (double lam : plan.lambda_ladder)
        vals.push_back(model.from_modal(
            ms.cwiseProduct(convolution_modal(model, ou, f, t, plan.quadrature, lam, Subspace::s))));
    out.s = ladder_result(std::move(vals), plan.lambda_ladder, plan.tol).value;
    return out;
}

double c_kappa(double epsilon, double tau_eps, double theta_hy, double kappa) {
    if (!(epsilon > 0.0)) throw DomainError("c_kappa: epsilon must be positive");
    if (!(tau_eps > 0.0)) throw DomainError("c_kappa: tau_eps must be positive");
    if (!(kappa > theta_hy)) throw DomainError("c_kappa: kappa must exceed theta");
    return 2.0 * epsilon * std::max(1.0, std::exp(-kappa * tau_eps)) / (-std::expm1((theta_hy - kappa) * tau_eps));
}

namespace {

// max_k ||(S<>e_k)(tau)|| on `sub` with z = 0, closed form per mode.
double delta_at(const LinearModel& model, double tau, Subspace sub, Eigen::Index nprobe) {
    const Eigen::VectorXd ms = model.mask(sub);
    const Eigen::VectorXd& a = model.eigenvalues();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < nprobe; ++k) {
        Eigen::VectorXd w = model.to_modal(Eigen::VectorXd::Unit(model.dim_x(), k));
        for (Eigen::Index m = 0; m < w.size(); ++m) w(m) *= ms(m) * tau * phi1(a(m) * tau);
        worst = std::max(worst, model.from_modal(w).norm());
    }
    return worst;
}

}  // namespace

double DeltaBound::at(double tau) const {
    double best = 0.0;
    for (std::size_t i = 0; i < t.size() && t[i] <= tau * (1.0 + 1e-12); ++i) best = delta[i];
    return best;
}

DeltaBound delta_bound_estimate(const LinearModel& model, double tau0, int probe_count, double dt, Subspace sub) {
    if (!(tau0 > 0.0) || !(dt > 0.0)) throw ConfigError("delta_bound_estimate: tau0 and dt must be positive");
    const Eigen::Index nprobe =
        probe_count <= 0 ? model.dim_x() : std::min<Eigen::Index>(probe_count, model.dim_x());
    DeltaBound out;
    double running = 0.0;
    const long long n = static_cast<long long>(std::ceil(tau0 / dt - 1e-9));
    for (long long j = 1; j <= n; ++j) {
        const double t = std::min(tau0, static_cast<double>(j) * dt);
        running = std::max(running, delta_at(model, t, sub, nprobe));
        out.t.push_back(t);
        out.delta.push_back(running);
    }
    return out;
}

ConvConstants scanned_c_kappa(const LinearModel& model, double kappa) {
    const double theta = -model.constants().beta;
    if (!(kappa > theta)) throw DomainError("C_kappa: kappa must exceed -beta");
    ConvConstants best;
    best.c_kappa = std::numeric_limits<double>::infinity();
    const int n = 81;
    for (int i = 0; i < n; ++i) {
        const double tau = 1e-4 * std::pow(1e5, static_cast<double>(i) / (n - 1));
        const double eps = model.constants().M_hy * delta_at(model, tau, Subspace::s, model.dim_x());
        if (!(eps > 0.0)) continue;
        const double c = c_kappa(eps, tau, theta, kappa);
        if (c < best.c_kappa) best = {eps, tau, theta, kappa, c};
    }
    if (!std::isfinite(best.c_kappa)) throw DomainError("C_kappa scan found no admissible tau (empty stable part?)");
    return best;
}

}  // namespace lpm
