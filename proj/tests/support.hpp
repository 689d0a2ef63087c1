#pragma once

#include <cstdint>
#include <memory>

#include "lpm/lyapunov_perron.hpp"

namespace lpm::test {

// Four modes {1 u, 0 c, -4 s, -9 s}; small enough for fast LP solves.
inline std::shared_ptr<const SpectralModel> demo_model() {
    TrichotomyConstants k;
    k.K = 1.0;
    k.alpha = 1.0;
    k.beta = 4.0;
    k.gamma = 0.2;
    k.theta_hy = 1.0;
    Eigen::VectorXd a(4);
    a << 1.0, 0.0, -4.0, -9.0;
    return std::make_shared<SpectralModel>(a, parse_labels("ucss"), k);
}

// First three modes of the demo model.
inline std::shared_ptr<const SpectralModel> oracle_model() {
    TrichotomyConstants k;
    k.K = 1.0;
    k.alpha = 1.0;
    k.beta = 4.0;
    k.gamma = 0.2;
    k.theta_hy = 1.0;
    Eigen::VectorXd a(3);
    a << 1.0, 0.0, -4.0;
    return std::make_shared<SpectralModel>(a, parse_labels("ucs"), k);
}

inline RateParams demo_rates() {
    RateParams r;
    r.eta_cu = -1.0;
    r.zeta = -2.5;
    r.eta_cs = 0.6;
    r.chi = -1.0;
    return r;
}

inline RateParams parabolic_rates() {
    RateParams r;
    r.eta_cu = -2.0;
    r.zeta = -6.0;
    r.eta_cs = 1.0;
    r.chi = -1.0;
    r.sigma = 0.1;
    return r;
}

inline LPConfig demo_config() {
    LPConfig cfg;
    cfg.rates = demo_rates();
    return cfg;
}

// Stationary OU on [t_min, t_max] with the default tail.
inline OUProcess sampled_ou(std::uint64_t seed, double dt, double t_min, double t_max, double mu = 1.0) {
    const double tail = default_tail_cut(mu, dt);
    return ou_stationary(sample_brownian(TimeGrid(t_min - tail, t_max, dt), seed), mu, tail);
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace lpm::test
