#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lpm/flow.hpp"
#include "lpm/gap.hpp"
#include "lpm/model.hpp"
#include "lpm/noise.hpp"
#include "lpm/quadrature.hpp"
#include "lpm/semigroup.hpp"

namespace lpm {

enum class HalfLine { past, future };

/// Modal trajectory on a truncated half-line. Column i sits at
/// tau_i = -T + i dt (past, last column at 0) or tau_i = i dt (future).
struct WeightedPath {
    HalfLine side = HalfLine::past;
    double eta = 0.0;
    double dt = 0.0;
    Eigen::MatrixXd modal;

    Eigen::Index size() const { return modal.cols(); }
    Eigen::Index zero_col() const { return side == HalfLine::past ? modal.cols() - 1 : 0; }
    double time(Eigen::Index i) const {
        return side == HalfLine::past ? -static_cast<double>(modal.cols() - 1 - i) * dt
                                      : static_cast<double>(i) * dt;
    }
};

struct LPConfig {
    double T_horizon = 0.0;  // 0 picks the smallest admissible horizon
    RateParams rates;
    ConvolutionPlan plan;  // analytic by default
    StepRule rule = StepRule::euler;
    double tol = 1e-10;
    int max_iter = 500;
    double ratio_slack = 0.05;
    double fixed_c = 0.0;             // > 0 overrides the scanned C_kappa
    bool corrected_shift_term = false;
    double base_guard = 1e200;        // divergence guard of leaf base trajectories
};

/// Weighted sup norm sup_i e^{-eta tau_i - int_0^{tau_i} z} |path(tau_i)|.
double weighted_norm(const WeightedPath& p, const OUProcess& ou);

struct FixedPointStats {
    int iterations = 0;
    double residual = 0.0;          // ||Op(x) - x|| at the returned point
    double max_ratio = 0.0;         // largest checked successive-difference ratio
    double certified = 0.0;         // gap lhs the ratios are held against
    std::vector<double> diffs;      // ||x_{m+1} - x_m|| per iteration
};

struct CuSolution {
    WeightedPath v;
    Eigen::VectorXd h;  // Pi_s v(0), a state in X0
    FixedPointStats stats;
};

struct LeafSolution {
    WeightedPath psi;
    Eigen::VectorXd l;  // Pi_u x + Pi_u psi(0)
    FixedPointStats stats;
};

namespace detail {
class LPCore;
}

/// h^cu(., omega) for one noise fibre. Fixed points are cached by quantised xi.
class ManifoldGraph {
public:
    ManifoldGraph(std::shared_ptr<const LinearModel> model, Nonlinearity nl, OUProcess ou, LPConfig cfg);
    ~ManifoldGraph();
    ManifoldGraph(const ManifoldGraph&) = delete;
    ManifoldGraph& operator=(const ManifoldGraph&) = delete;

    const LinearModel& model() const { return *model_; }
    std::shared_ptr<const LinearModel> model_ptr() const { return model_; }
    const Nonlinearity& nonlinearity() const { return nl_; }
    const OUProcess& ou() const { return ou_; }
    const LPConfig& config() const { return cfg_; }
    double horizon() const { return T_; }
    const GapReport& gap() const { return gap_; }
    double K_u() const { return gap_.constants.at("K_u"); }

    /// phi(t, 0) xi on the past grid.
    WeightedPath linear_term(const Eigen::VectorXd& xi) const;
    /// One application of J.
    WeightedPath apply(const Eigen::VectorXd& xi, const WeightedPath& v) const;
    /// Picard iteration from the linear term; uncached.
    CuSolution solve(const Eigen::VectorXd& xi) const;
    /// h^cu(xi, omega), cached.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& xi) const;
    double weighted_norm(const WeightedPath& p) const;

    /// Largest ||h(a) - h(b)|| / ||a - b|| over consecutive sample pairs.
    double lipschitz_sample(const std::vector<Eigen::VectorXd>& xis) const;

    const detail::LPCore& core() const { return *core_; }

private:
    std::shared_ptr<const LinearModel> model_;
    Nonlinearity nl_;
    OUProcess ou_;
    LPConfig cfg_;
    double T_ = 0.0;
    GapReport gap_;
    std::unique_ptr<detail::LPCore> core_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::vector<long long>, Eigen::VectorXd> cache_;
};

/// Leaf W^cs(x, omega) through the anchor x, as the graph of l^cs(., omega, x).
class FoliationLeaf {
public:
    FoliationLeaf(std::shared_ptr<const LinearModel> model, Nonlinearity nl, OUProcess ou, Eigen::VectorXd anchor,
                  LPConfig cfg);
    ~FoliationLeaf();
    FoliationLeaf(const FoliationLeaf&) = delete;
    FoliationLeaf& operator=(const FoliationLeaf&) = delete;

    const LinearModel& model() const { return *model_; }
    const Nonlinearity& nonlinearity() const { return nl_; }
    const OUProcess& ou() const { return ou_; }
    const LPConfig& config() const { return cfg_; }
    const Eigen::VectorXd& anchor() const { return anchor_; }
    double horizon() const { return T_; }
    const Trajectory& base() const { return base_; }
    /// Main contraction report followed by the two sigma-shifted ones.
    const std::vector<GapReport>& gap() const { return gap_; }
    double K_s() const { return gap_.front().constants.at("K_s"); }

    /// phi(t, 0) offset on the future grid, offset in X_cs.
    WeightedPath linear_term(const Eigen::VectorXd& offset) const;
    /// One application of Z at leaf coordinate iota.
    WeightedPath apply(const Eigen::VectorXd& iota, const WeightedPath& psi) const;
    LeafSolution solve(const Eigen::VectorXd& iota) const;
    /// l^cs(iota, omega, x), cached.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& iota) const;
    /// iota + l^cs(iota), the leaf point over iota.
    Eigen::VectorXd point(const Eigen::VectorXd& iota) const { return iota + evaluate(iota); }
    double weighted_norm(const WeightedPath& p) const;
    double lipschitz_sample(const std::vector<Eigen::VectorXd>& iotas) const;

    const detail::LPCore& core() const { return *core_; }

private:
    Eigen::VectorXd offset_init(const Eigen::VectorXd& iota) const;

    std::shared_ptr<const LinearModel> model_;
    Nonlinearity nl_;
    OUProcess ou_;
    Eigen::VectorXd anchor_;
    LPConfig cfg_;
    double T_ = 0.0;
    std::vector<GapReport> gap_;
    Trajectory base_;
    Eigen::MatrixXd base_g_;  // G(theta_t omega, base(t)) per node
    std::unique_ptr<detail::LPCore> core_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::vector<long long>, Eigen::VectorXd> cache_;
};

/// Smallest grid-aligned horizon with T |eta| >= 30 and tail factor below 1e-8.
double default_horizon_cu(const LinearModel& model, const RateParams& r, double dt);
double default_horizon_cs(const LinearModel& model, const RateParams& r, double dt);

// Free-function forms.
WeightedPath lp_operator_cu(const ManifoldGraph& g, const Eigen::VectorXd& xi, const WeightedPath& v);
CuSolution solve_cu(std::shared_ptr<const LinearModel> model, const Nonlinearity& nl, const OUProcess& ou,
                    const Eigen::VectorXd& xi, const LPConfig& cfg);
WeightedPath lp_operator_cs(const FoliationLeaf& leaf, const Eigen::VectorXd& iota, const WeightedPath& psi);
LeafSolution solve_leaf(std::shared_ptr<const LinearModel> model, const Nonlinearity& nl, const OUProcess& ou,
                        const Eigen::VectorXd& anchor, const Eigen::VectorXd& iota, const LPConfig& cfg);

/// First derivatives. Columns follow the cu (resp. cs) modes of the model, each
/// direction being the unit state of that mode.
struct CuDerivative {
    std::vector<WeightedPath> dv;
    Eigen::MatrixXd Dh;  // dim_x x n_cu
    std::vector<FixedPointStats> stats;
};
struct LeafDerivative {
    std::vector<WeightedPath> dpsi;
    Eigen::MatrixXd Dl;  // dim_x x n_cs
    std::vector<FixedPointStats> stats;
};

/// Unit state of each mode in `sub`, in the order the derivative columns use.
std::vector<Eigen::VectorXd> subspace_directions(const LinearModel& model, Subspace sub);

CuDerivative derivative_cu(const ManifoldGraph& g, const Eigen::VectorXd& xi, const CuSolution& sol);
LeafDerivative derivative_leaf(const FoliationLeaf& leaf, const Eigen::VectorXd& iota, const LeafSolution& sol);

struct IntersectionResult {
    Eigen::VectorXd point;  // iota* + l(iota*)
    Eigen::VectorXd iota;
    Eigen::VectorXd xi;
    int iterations = 0;
    double residual_xi = 0.0;    // ||xi* - l(iota*)||
    double residual_iota = 0.0;  // ||iota* - h(xi*)||
    GapReport gate;
};

/// iota <- h(l(iota)) from iota0 (default Pi_cs x). Throws AdmissionError unless K_u K_s < 1.
IntersectionResult intersect(const ManifoldGraph& g, const FoliationLeaf& leaf,
                             const std::optional<Eigen::VectorXd>& iota0 = std::nullopt, double tol = 1e-9,
                             int max_iter = 200);

/// e^{z0} value, with the range guard.
Eigen::VectorXd pullback_value(const Eigen::VectorXd& value, double z0);
/// h*(xi) = e^{z0} h(e^{-z0} xi) with z0 = z(omega).
Eigen::VectorXd pullback_manifold(const ManifoldGraph& g, const Eigen::VectorXd& xi);
/// l*(iota) = e^{z0} l(e^{-z0} iota) with z0 = z(omega).
Eigen::VectorXd pullback_leaf(const FoliationLeaf& leaf, const Eigen::VectorXd& iota);

}  // namespace lpm
