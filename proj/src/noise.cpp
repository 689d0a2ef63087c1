#include "lpm/noise.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "lpm/errors.hpp"
#include "lpm/io.hpp"

namespace lpm {

namespace {

constexpr double kGridSlack = 1e-8;

bool near_integer(double x, long long& rounded) {
    const double r = std::round(x);
    rounded = static_cast<long long>(r);
    return std::abs(x - r) <= kGridSlack * std::max(1.0, std::abs(x));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// (0, 1], never zero so the logarithm below is finite.
double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

TimeGrid::TimeGrid(double t_min, double t_max, double dt)
    : t_min_(t_min), t_max_(t_max), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("TimeGrid: dt must be positive");
    if (t_min > 0.0 || t_max < 0.0) throw ConfigError("TimeGrid: window must contain t = 0");
    long long n = 0, z = 0;
    if (!near_integer((t_max - t_min) / dt, n))
        throw ConfigError("TimeGrid: (t_max - t_min)/dt is not an integer");
    if (!near_integer(-t_min / dt, z)) throw ConfigError("TimeGrid: t = 0 is not a grid node");
    n_steps_ = static_cast<Eigen::Index>(n);
    zero_ = static_cast<Eigen::Index>(z);
    t_min_ = -static_cast<double>(z) * dt;
    t_max_ = static_cast<double>(n - z) * dt;
}

long long TimeGrid::steps_in(double t) const {
    long long k = 0;
    if (!near_integer(t / dt_, k)) throw AlignmentError("time " + std::to_string(t) + " is not on the grid");
    return k;
}

bool TimeGrid::contains(double t) const {
    long long k = 0;
    if (!near_integer(t / dt_, k)) return false;
    const long long i = k + zero_;
    return i >= 0 && i <= n_steps_;
}

Eigen::Index TimeGrid::index_of(double t) const {
    const long long i = steps_in(t) + zero_;
    if (i < 0 || i > n_steps_)
        throw CoverageError("time " + std::to_string(t) + " outside grid window [" + std::to_string(t_min_) +
                            ", " + std::to_string(t_max_) + "]");
    return static_cast<Eigen::Index>(i);
}

TimeGrid TimeGrid::shifted(double shift) const {
    const long long k = steps_in(shift);
    const double s = static_cast<double>(k) * dt_;
    return TimeGrid(t_min_ - s, t_max_ - s, dt_);
}

double keyed_normal(std::uint64_t seed, std::int64_t counter) {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(counter)));
    const double u1 = to_unit(splitmix64(key));
    const double u2 = to_unit(splitmix64(key ^ 0xd1b54a32d192ed03ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed) {
    BrownianPath path{grid, Eigen::VectorXd::Zero(grid.size()), seed};
    const double sd = std::sqrt(grid.dt());
    const Eigen::Index z = grid.zero_index();
    // Step s covers [t_s, t_{s+1}] (s relative to t = 0); keyed on s so every
    // window sees the same increments.
    for (Eigen::Index i = z + 1; i < grid.size(); ++i)
        path.values(i) = path.values(i - 1) + sd * keyed_normal(seed, static_cast<std::int64_t>(i - 1 - z));
    for (Eigen::Index i = z - 1; i >= 0; --i)
        path.values(i) = path.values(i + 1) - sd * keyed_normal(seed, static_cast<std::int64_t>(i - z));
    return path;
}

BrownianPath wiener_shift(const BrownianPath& path, double t) {
    const Eigen::Index it = path.grid.index_of(t);
    BrownianPath out{path.grid.shifted(t), path.values.array() - path.values(it), path.seed};
    return out;
}

double default_tail_cut(double mu, double dt) {
    if (!(mu > 0.0)) throw ConfigError("OU rate mu must be positive");
    const double raw = std::log(1e12) / mu;
    return std::ceil(raw / dt + 1.0) * dt;
}

namespace {

Eigen::VectorXd running_integral(const TimeGrid& grid, const Eigen::VectorXd& z) {
    Eigen::VectorXd e(grid.size());
    const Eigen::Index z0 = grid.zero_index();
    const double h = 0.5 * grid.dt();
    e(z0) = 0.0;
    for (Eigen::Index i = z0 + 1; i < grid.size(); ++i) e(i) = e(i - 1) + h * (z(i - 1) + z(i));
    for (Eigen::Index i = z0 - 1; i >= 0; --i) e(i) = e(i + 1) - h * (z(i + 1) + z(i));
    return e;
}

}  // namespace

OUProcess ou_stationary(const BrownianPath& path, double mu, double tail_cut) {
    if (!(mu > 0.0)) throw ConfigError("OU rate mu must be positive");
    const TimeGrid& g = path.grid;
    const double dt = g.dt();
    const long long m = g.steps_in(tail_cut);
    if (m <= 0) throw ConfigError("tail_cut must be positive");
    if (std::exp(-mu * static_cast<double>(m) * dt) >= 1e-12)
        throw ConfigError("tail_cut too short: exp(-mu*tail_cut) must be below 1e-12");
    const double t_lo = g.t_min() + static_cast<double>(m) * dt;
    if (t_lo > 0.0) throw CoverageError("noise window too short for the OU tail integral");

    TimeGrid out_grid(t_lo, g.t_max(), dt);
    const Eigen::Index n_out = out_grid.size();
    const double q = std::exp(-mu * dt);
    const double qm = std::exp(-mu * dt * static_cast<double>(m));

    // Discrete weight sum dt * (sum_j q^j - 1/2 - q^m/2) approximates int_{-c}^0 e^{mu s} ds.
    double weight_sum = 0.0;
    for (long long j = 0; j <= m; ++j) weight_sum += std::pow(q, static_cast<double>(j));
    weight_sum = dt * (weight_sum - 0.5 - 0.5 * qm);

    const Eigen::VectorXd& w = path.values;
    auto direct_sum = [&](Eigen::Index p) {
        double s = 0.0, f = 1.0;
        for (long long j = 0; j <= m; ++j, f *= q) s += f * w(p - j);
        return s;
    };

    Eigen::VectorXd z(n_out);
    double acc = 0.0;
    for (Eigen::Index n = 0; n < n_out; ++n) {
        const Eigen::Index p = n + static_cast<Eigen::Index>(m);
        // Exponential moving sum, refreshed periodically to bound drift.
        if (n % 2048 == 0)
            acc = direct_sum(p);
        else
            acc = w(p) + q * (acc - qm * w(p - 1 - m));
        const double integral = dt * (acc - 0.5 * w(p) - 0.5 * qm * w(p - m)) - w(p) * weight_sum;
        z(n) = -mu * integral;
    }
    OUProcess ou{mu, out_grid, std::move(z), Eigen::VectorXd(), static_cast<double>(m) * dt};
    ou.cumulative = running_integral(ou.grid, ou.z_values);
    return ou;
}

OUProcess ou_from_values(const TimeGrid& grid, double mu, Eigen::VectorXd z_values) {
    if (z_values.size() != grid.size()) throw ConfigError("ou_from_values: size mismatch");
    OUProcess ou{mu, grid, std::move(z_values), Eigen::VectorXd(), 0.0};
    ou.cumulative = running_integral(ou.grid, ou.z_values);
    return ou;
}

OUProcess constant_ou(const TimeGrid& grid, double value, double mu) {
    return ou_from_values(grid, mu, Eigen::VectorXd::Constant(grid.size(), value));
}

OUProcess shift(const OUProcess& ou, double r) {
    const Eigen::Index ir = ou.grid.index_of(r);
    OUProcess out{ou.mu, ou.grid.shifted(r), ou.z_values, ou.cumulative.array() - ou.cumulative(ir),
                  ou.tail_cut};
    return out;
}

double integral_z(const OUProcess& ou, double s, double t) {
    return ou.cumulative_at(t) - ou.cumulative_at(s);
}

void write_noise_csv(std::ostream& os, const BrownianPath& path, const OUProcess& ou) {
    os << "t,omega,z\n";
    for (Eigen::Index i = 0; i < ou.grid.size(); ++i) {
        const double t = ou.grid.time(i);
        os << fmt_num(t) << ',' << fmt_num(path.at(t)) << ',' << fmt_num(ou.z_values(i)) << '\n';
    }
}

}  // namespace lpm
