#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lpm/model.hpp"
#include "lpm/noise.hpp"

namespace lpm {

enum class Quadrature { trapezoid, midpoint };

/// How the lambda -> infinity limit in S<>f is realised.
struct ConvolutionPlan {
    std::vector<double> lambda_ladder;  // empty: analytic limit
    Quadrature quadrature = Quadrature::trapezoid;
    double tol = 1e-6;  // relative

    bool analytic() const { return lambda_ladder.empty(); }
    /// Throws ConfigError unless the ladder is strictly increasing and above theta_hy.
    void validate(const LinearModel& model) const;
};

/// Geometric ladder of `count` values starting at 10 max(|a_k|, theta_hy, 1), ratio `factor`.
ConvolutionPlan default_ladder_plan(const LinearModel& model, int count = 4, double factor = 10.0);

/// S(t) x = lambda int_0^t T(s) R(lambda) x ds + (I - T(t)) R(lambda) x, with the
/// time integral of T evaluated per mode in closed form.
Eigen::VectorXd integrated_semigroup_apply(const LinearModel& model, double t, const Eigen::VectorXd& x,
                                           double lambda);

/// Forcing samples: column j is f(j dt), j = 0..steps.
using Forcing = Eigen::MatrixXd;

struct ConvolutionResult {
    Eigen::VectorXd value;                  // state in X0
    std::vector<Eigen::VectorXd> by_lambda;  // one entry per ladder rung
    std::vector<double> extrapolation_gaps;  // successive Richardson differences
};

/// Modal coordinates of int_0^t phi(t, s) f(s) ds with the ladder factor
/// lambda/(lambda - a_k) applied on `lambda_modes` (lambda = 0 means no factor).
/// The exponent uses the trapezoid integral of z on the noise grid.
Eigen::VectorXd convolution_modal(const LinearModel& model, const OUProcess& ou, const Forcing& f, double t,
                                  Quadrature q, double lambda, Subspace lambda_modes = Subspace::all);

/// (S<>f)(t) in the random frame, f on the noise grid starting at 0. Ladder
/// values are Richardson-extrapolated in 1/lambda; the two finest
/// extrapolations must agree within 10 tol (1 + |value|).
ConvolutionResult stieltjes_convolution(const LinearModel& model, const OUProcess& ou, const Forcing& f,
                                        double t, const ConvolutionPlan& plan);

/// Raw finite-lambda convolutions, no extrapolation or gating.
std::vector<Eigen::VectorXd> convolution_ladder(const LinearModel& model, const OUProcess& ou, const Forcing& f,
                                                double t, const std::vector<double>& ladder,
                                                Quadrature q = Quadrature::trapezoid);

struct SplitConvolution {
    Eigen::VectorXd c, u, s;
    Eigen::VectorXd sum() const { return c + u + s; }
};

/// c and u parts as plain integrals, s part through the plan's ladder.
SplitConvolution split_convolution(const LinearModel& model, const OUProcess& ou, const Forcing& f, double t,
                                   const ConvolutionPlan& plan);

/// 2 eps max(1, e^{-kappa tau}) / (1 - e^{(theta - kappa) tau}).
double c_kappa(double epsilon, double tau_eps, double theta_hy, double kappa);

struct ConvConstants {
    double epsilon = 0.0;
    double tau_eps = 0.0;
    double theta = 0.0;
    double kappa = 0.0;
    double c_kappa = 0.0;
};

/// Empirical delta(t) on t = dt, 2 dt, ..., tau0: largest ||(S<>f)(t)|| / sup ||f||
/// over constant probes f = e_k (first `probe_count` unit vectors of X, all if <= 0),
/// restricted to `sub`, followed by a cumulative maximum.
struct DeltaBound {
    std::vector<double> t;
    std::vector<double> delta;
    double at(double tau) const;  // step interpolation, delta(0) = 0
};

DeltaBound delta_bound_estimate(const LinearModel& model, double tau0, int probe_count, double dt,
                                Subspace sub = Subspace::all);

/// C_kappa for the stable convolution: theta = -beta, eps = M_hy delta_s(tau),
/// tau scanned over a log grid on [1e-4, 10] and the minimum kept.
ConvConstants scanned_c_kappa(const LinearModel& model, double kappa);

}  // namespace lpm
