#include "lpm/flow.hpp"

#include <cmath>
#include <ostream>

#include "lpm/errors.hpp"
#include "lpm/io.hpp"
#include "lpm/quadrature.hpp"

namespace lpm {

Eigen::VectorXd phi_flow(const LinearModel& model, const OUProcess& ou, Subspace sub, double t, double s,
                         const Eigen::VectorXd& x) {
    const double zint = integral_z(ou, s, t);
    if (zint > 700.0) throw RangeError("phi_flow: noise exponent overflows");
    return model.semigroup_apply(sub, t - s, x) * std::exp(zint);
}

Eigen::VectorXd transform(const Eigen::VectorXd& u, double z) {
    if (std::abs(z) > 700.0) throw RangeError("transform: |z| > 700");
    return u * std::exp(-z);
}

Eigen::VectorXd inverse_transform(const Eigen::VectorXd& v, double z) {
    if (std::abs(z) > 700.0) throw RangeError("inverse_transform: |z| > 700");
    return v * std::exp(z);
}

Trajectory integrate_mild(const LinearModel& model, const Nonlinearity& nl, const OUProcess& ou,
                          const Eigen::VectorXd& x0, double t_end, const IntegratorOptions& opt) {
    if (opt.stride < 1) throw ConfigError("integrator: stride must be >= 1");
    if (t_end < 0.0) throw DomainError("integrator: t_end must be >= 0");
    if (!model.in_x0(x0, 1e-12 * (1.0 + x0.norm()))) throw DomainError("integrator: initial state not in X0");
    const double h = ou.grid.dt() * opt.stride;
    const long long fine = ou.grid.steps_in(t_end);
    if (fine % opt.stride != 0) throw AlignmentError("integrator: t_end not a multiple of the step");
    const Eigen::Index steps = static_cast<Eigen::Index>(fine / opt.stride);
    const Eigen::Index i0 = ou.grid.index_of(0.0);
    ou.grid.index_of(t_end);

    const Eigen::VectorXd& a = model.eigenvalues();
    Trajectory traj;
    traj.t0 = 0.0;
    traj.dt = h;
    traj.frame = Frame::v;
    traj.values.resize(model.dim_x(), steps + 1);
    Eigen::VectorXd c = model.to_modal(x0);
    traj.values.col(0) = model.from_modal(c);
    for (Eigen::Index j = 0; j < steps; ++j) {
        const Eigen::Index il = i0 + j * opt.stride;
        const Eigen::VectorXd x = model.from_modal(c);
        const Eigen::VectorXd g = model.to_modal(transform_nonlinearity(nl, ou.z_values(il), x));
        const double zint = ou.cumulative(il + opt.stride) - ou.cumulative(il);
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            const double xk = a(k) * h + zint;
            c(k) = std::exp(xk) * c(k) + h * phi1(xk) * g(k);
        }
        const double nrm = c.norm();
        if (!std::isfinite(nrm) || nrm > opt.divergence_guard)
            throw DivergenceError("integrator: norm exceeded guard at t = " + fmt_num(static_cast<double>(j + 1) * h));
        traj.values.col(j + 1) = model.from_modal(c);
    }
    return traj;
}

Trajectory integrate_original(const LinearModel& model, const Nonlinearity& nl, const OUProcess& ou,
                              const Eigen::VectorXd& u0, double t_end, const IntegratorOptions& opt) {
    const Eigen::VectorXd v0 = transform(u0, ou.z_at(0.0));
    Trajectory traj = integrate_mild(model, nl, ou, v0, t_end, opt);
    for (Eigen::Index j = 0; j < traj.size(); ++j)
        traj.values.col(j) = inverse_transform(traj.values.col(j), ou.z_at(traj.time(j)));
    traj.frame = Frame::u;
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (Eigen::Index i = 0; i < traj.values.rows(); ++i) os << ",x" << i;
    os << ",frame\n";
    const char* tag = traj.frame == Frame::v ? "v" : "u";
    for (Eigen::Index j = 0; j < traj.size(); ++j) {
        os << fmt_num(traj.time(j));
        for (Eigen::Index i = 0; i < traj.values.rows(); ++i) os << ',' << fmt_num(traj.values(i, j));
        os << ',' << tag << '\n';
    }
}

}  // namespace lpm
