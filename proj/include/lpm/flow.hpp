#pragma once

#include <iosfwd>

#include <Eigen/Dense>

#include "lpm/model.hpp"
#include "lpm/noise.hpp"

namespace lpm {

enum class Frame { v, u };

/// States on t0, t0 + dt, ..., one column per node.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    Eigen::MatrixXd values;
    Frame frame = Frame::v;

    Eigen::Index size() const { return values.cols(); }
    double time(Eigen::Index j) const { return t0 + static_cast<double>(j) * dt; }
    Eigen::VectorXd at(Eigen::Index j) const { return values.col(j); }
};

/// phi(t, s) x = T(t - s) x e^{int_s^t z}, restricted to `sub`.
Eigen::VectorXd phi_flow(const LinearModel& model, const OUProcess& ou, Subspace sub, double t, double s,
                         const Eigen::VectorXd& x);

/// v = u e^{-z}, u = v e^{z}. Both throw RangeError for |z| > 700.
Eigen::VectorXd transform(const Eigen::VectorXd& u, double z);
Eigen::VectorXd inverse_transform(const Eigen::VectorXd& v, double z);

struct IntegratorOptions {
    int stride = 1;                    // step = stride * noise dt
    double divergence_guard = 1e12;    // DivergenceError above this norm
};

/// Exponential Euler for the random equation: per mode
/// v+ = e^{x} v + h phi1(x) g, x = a h + int z over the step, g the modal
/// image of G(theta_t omega, v) frozen at the left node.
Trajectory integrate_mild(const LinearModel& model, const Nonlinearity& nl, const OUProcess& ou,
                          const Eigen::VectorXd& x0, double t_end, const IntegratorOptions& opt = {});

/// Same scheme, returned in the original frame u = v e^{z(theta_t omega)}.
Trajectory integrate_original(const LinearModel& model, const Nonlinearity& nl, const OUProcess& ou,
                              const Eigen::VectorXd& u0, double t_end, const IntegratorOptions& opt = {});

/// CSV rows "t,x0,...,frame".
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace lpm
