#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lpm/lyapunov_perron.hpp"

namespace lpm {

struct VerificationReport {
    std::string name;
    int samples = 0;
    double worst = 0.0;
    double tol = 0.0;
    bool pass = true;  // worst <= tol
    std::string note;
};

VerificationReport make_verification(std::string name, int samples, double worst, double tol, std::string note = {});

/// For each xi: start on the manifold, flow to time r with the integrator, and
/// compare Pi_s v(r) against the graph rebuilt on the fibre theta_r omega.
/// tol <= 0 selects 10 dt.
VerificationReport check_invariance_manifold(const ManifoldGraph& g, double r, const std::vector<Eigen::VectorXd>& xis,
                                             double tol = 0.0);

/// Worst ratio sup_t w(t)|v(t, p) - v(t, x)| / (w(0)|p - x|) over [0, T] for the
/// leaf points p = iota + l(iota), w(t) = exp(-eta_cs t - int_0^t z). Passes when
/// the ratio stays below 1 + growth_tol. Pairs with p == x count as 0.
VerificationReport check_leaf_convergence(const FoliationLeaf& leaf, const std::vector<Eigen::VectorXd>& iotas,
                                          double T, double growth_tol = 0.1);

/// Off-leaf diagnostic: each leaf point is pushed by `offset` along the unstable
/// directions and the same ratio is measured. `worst` holds the smallest ratio;
/// the report passes when every pushed pair exceeds 1 + growth_tol.
VerificationReport check_off_leaf_violation(const FoliationLeaf& leaf, const std::vector<Eigen::VectorXd>& iotas,
                                            double T, double offset, double growth_tol = 0.1);

/// Central differences of h against D_xi h, relative error per direction.
VerificationReport check_gradient_cu(const ManifoldGraph& g, const Eigen::VectorXd& xi, double fd_step = 1e-5,
                                     double tol = 1e-4);
VerificationReport check_gradient_leaf(const FoliationLeaf& leaf, const Eigen::VectorXd& iota, double fd_step = 1e-5,
                                       double tol = 1e-4);

/// Sampled Lipschitz quotients of the graph against its certified bound.
VerificationReport check_lipschitz_cu(const ManifoldGraph& g, const std::vector<Eigen::VectorXd>& xis);
VerificationReport check_lipschitz_leaf(const FoliationLeaf& leaf, const std::vector<Eigen::VectorXd>& iotas);

/// Independent boundary-value solve of the manifold equation on [-T, 0]:
/// Crank-Nicolson in state coordinates, projections from a fresh
/// eigendecomposition of the generator, Newton with a sparse LU.
struct BvpOracleOptions {
    double T = 0.0;  // 0: horizon of the graph under test
    double tol = 1e-12;
    int max_newton = 30;
};

/// h(xi) from the oracle. Dense models with at most 4 modes only.
Eigen::VectorXd bvp_oracle_h(const LinearModel& model, const Nonlinearity& nl, const OUProcess& ou,
                             const Eigen::VectorXd& xi, double T, const BvpOracleOptions& opt = {});

VerificationReport oracle_bvp_compare(const ManifoldGraph& g, const std::vector<Eigen::VectorXd>& xis,
                                      double tol = 1e-4, const BvpOracleOptions& opt = {});

/// Random xi in X_cu (resp. iota in X_cs) with modal coordinates uniform in [-radius, radius].
std::vector<Eigen::VectorXd> sample_subspace(const LinearModel& model, Subspace sub, int count, double radius,
                                             std::uint64_t seed);

}  // namespace lpm
