#pragma once

#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

namespace lpm {

/// Uniform grid on [t_min, t_max] with spacing dt that contains t = 0 as a node.
class TimeGrid {
public:
    TimeGrid(double t_min, double t_max, double dt);

    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    double dt() const { return dt_; }
    Eigen::Index size() const { return n_steps_ + 1; }
    Eigen::Index steps() const { return n_steps_; }
    /// Node index of t = 0.
    Eigen::Index zero_index() const { return zero_; }

    double time(Eigen::Index i) const { return static_cast<double>(i - zero_) * dt_; }
    bool contains(double t) const;
    /// Node index of t; throws AlignmentError off-grid, CoverageError outside.
    Eigen::Index index_of(double t) const;
    /// Signed number of dt steps in t; throws AlignmentError if not integral.
    long long steps_in(double t) const;

    /// Same spacing, window [t_min - shift, t_max - shift].
    TimeGrid shifted(double shift) const;

private:
    double t_min_, t_max_, dt_;
    Eigen::Index n_steps_ = 0, zero_ = 0;
};

/// Discretised two-sided Wiener trajectory with omega(0) = 0.
struct BrownianPath {
    TimeGrid grid;
    Eigen::VectorXd values;
    std::uint64_t seed = 0;

    double at(double t) const { return values(grid.index_of(t)); }
};

/// Stationary Ornstein-Uhlenbeck trajectory z(theta_t omega), with the running
/// integral int_0^t z(theta_r omega) dr stored alongside (trapezoid rule).
struct OUProcess {
    double mu = 1.0;
    TimeGrid grid;
    Eigen::VectorXd z_values;
    Eigen::VectorXd cumulative;  // int_0^{t_i} z, zero at the grid's zero node
    double tail_cut = 0.0;

    double z_at(double t) const { return z_values(grid.index_of(t)); }
    double cumulative_at(double t) const { return cumulative(grid.index_of(t)); }
};

/// Standard normal deviate keyed on (seed, counter); pure function.
double keyed_normal(std::uint64_t seed, std::int64_t counter);

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed);

/// (theta_t omega)(s) = omega(s + t) - omega(t) on the shifted window.
BrownianPath wiener_shift(const BrownianPath& path, double t);

/// Smallest tail length with exp(-mu * tail) < 1e-12, rounded up to the grid.
double default_tail_cut(double mu, double dt);

/// z(theta_t omega) = -mu * int_{-inf}^0 e^{mu s} theta_t omega(s) ds, truncated at
/// -tail_cut and evaluated by the trapezoid rule. The result lives on
/// [path.t_min + tail_cut, path.t_max].
OUProcess ou_stationary(const BrownianPath& path, double mu, double tail_cut);

/// OU-shaped container holding prescribed z values (frozen or synthetic noise).
OUProcess ou_from_values(const TimeGrid& grid, double mu, Eigen::VectorXd z_values);
OUProcess constant_ou(const TimeGrid& grid, double value, double mu = 1.0);

/// Node-shifted view: fibre theta_r omega.
OUProcess shift(const OUProcess& ou, double r);

/// Signed trapezoid integral int_s^t z(theta_r omega) dr.
double integral_z(const OUProcess& ou, double s, double t);

/// CSV with header "t,omega,z" over the OU window.
void write_noise_csv(std::ostream& os, const BrownianPath& path, const OUProcess& ou);

}  // namespace lpm
