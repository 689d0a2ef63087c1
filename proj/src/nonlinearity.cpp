#include <cmath>

#include "lpm/errors.hpp"
#include "lpm/model.hpp"
#include "lpm/noise.hpp"

namespace lpm {

namespace {

// Rank-one coupling B = w 1^T / sqrt(n0) from X0 coordinates into X, with |w| = 1,
// so ||B|| = 1. Boundary models also feed the trace slot.
Eigen::MatrixXd coupling_matrix(const LinearModel& model) {
    const Eigen::Index nx = model.dim_x();
    const Eigen::Index n0 = model.restrict_x0(Eigen::VectorXd::Zero(nx)).size();
    Eigen::VectorXd w;
    if (n0 == nx) {
        w = Eigen::VectorXd::Constant(nx, 1.0 / std::sqrt(static_cast<double>(nx)));
    } else {
        w = model.embed_x0(Eigen::VectorXd::Constant(n0, 1.0 / std::sqrt(2.0 * static_cast<double>(n0))));
        w(0) = 1.0 / std::sqrt(2.0);
    }
    return w * Eigen::RowVectorXd::Constant(n0, 1.0 / std::sqrt(static_cast<double>(n0)));
}

Eigen::MatrixXd restriction_matrix(const LinearModel& model) {
    const Eigen::Index nx = model.dim_x();
    const Eigen::Index n0 = model.restrict_x0(Eigen::VectorXd::Zero(nx)).size();
    Eigen::MatrixXd r(n0, nx);
    for (Eigen::Index j = 0; j < nx; ++j) r.col(j) = model.restrict_x0(Eigen::VectorXd::Unit(nx, j));
    return r;
}

Eigen::VectorXd cyclic_shift(const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v((i + 1) % v.size());
    return out;
}

}  // namespace

std::vector<std::string> nonlinearity_names() {
    return {"zero", "linear-coupling", "cubic-saturated", "bilinear-saturated"};
}

Nonlinearity make_nonlinearity(const std::string& name, double L, const LinearModel& model) {
    if (!(L >= 0.0) || !std::isfinite(L)) throw ConfigError("nonlinearity: L must be finite and >= 0");
    const Eigen::MatrixXd B = coupling_matrix(model);
    const Eigen::MatrixXd R = restriction_matrix(model);
    const Eigen::Index nx = model.dim_x();
    Nonlinearity nl;
    nl.name = name;
    nl.L = L;

    if (name == "zero") {
        nl.L = 0.0;
        nl.order = 99;
        nl.F = [nx](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(nx).eval(); };
        nl.DF = [nx](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(nx, nx).eval(); };
    } else if (name == "linear-coupling") {
        const Eigen::MatrixXd J = L * B * R;
        nl.order = 99;
        nl.F = [J](const Eigen::VectorXd& v) { return (J * v).eval(); };
        nl.DF = [J](const Eigen::VectorXd&) { return J; };
    } else if (name == "cubic-saturated") {
        // rho(r) = (4/3) tanh^3 r has max |rho'| = 1 and is cubic at the origin.
        nl.order = 3;
        nl.F = [L, B, R](const Eigen::VectorXd& v) {
            const Eigen::ArrayXd t = (R * v).array().tanh();
            return (L * B * (4.0 / 3.0 * t.cube()).matrix()).eval();
        };
        nl.DF = [L, B, R](const Eigen::VectorXd& v) {
            const Eigen::ArrayXd t = (R * v).array().tanh();
            const Eigen::ArrayXd d = 4.0 * t.square() * (1.0 - t.square());
            return (L * B * d.matrix().asDiagonal() * R).eval();
        };
    } else if (name == "bilinear-saturated") {
        // (L/2) B (tanh v .* tanh(P v)), P the cyclic shift; quadratic at the origin.
        nl.order = 3;
        nl.F = [L, B, R](const Eigen::VectorXd& v) {
            const Eigen::VectorXd x = R * v;
            const Eigen::ArrayXd g = x.array().tanh() * cyclic_shift(x).array().tanh();
            return (0.5 * L * B * g.matrix()).eval();
        };
        nl.DF = [L, B, R](const Eigen::VectorXd& v) {
            const Eigen::VectorXd x = R * v;
            const Eigen::Index n = x.size();
            const Eigen::ArrayXd t = x.array().tanh();
            const Eigen::ArrayXd tp = cyclic_shift(x).array().tanh();
            Eigen::MatrixXd jg = Eigen::MatrixXd::Zero(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                jg(i, i) += (1.0 - t(i) * t(i)) * tp(i);
                jg(i, (i + 1) % n) += t(i) * (1.0 - tp(i) * tp(i));
            }
            return (0.5 * L * B * jg * R).eval();
        };
    } else {
        std::string known;
        for (const auto& n : nonlinearity_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown nonlinearity '" + name + "' (known: " + known + ")");
    }
    return nl;
}

Eigen::VectorXd transform_nonlinearity(const Nonlinearity& nl, double z, const Eigen::VectorXd& v) {
    if (std::abs(z) > 700.0) throw RangeError("transform: |z| > 700 overflows e^z");
    return std::exp(-z) * nl.F(std::exp(z) * v);
}

Eigen::MatrixXd transform_jacobian(const Nonlinearity& nl, double z, const Eigen::VectorXd& v) {
    if (!nl.has_jacobian()) throw CapabilityError("nonlinearity '" + nl.name + "' has no Jacobian");
    if (std::abs(z) > 700.0) throw RangeError("transform: |z| > 700 overflows e^z");
    return nl.DF(std::exp(z) * v);
}

namespace {

Eigen::VectorXd random_x0(const LinearModel& model, std::uint64_t seed, std::int64_t& counter, double scale) {
    const Eigen::Index n0 = model.restrict_x0(Eigen::VectorXd::Zero(model.dim_x())).size();
    Eigen::VectorXd x(n0);
    for (Eigen::Index i = 0; i < n0; ++i) x(i) = scale * keyed_normal(seed, counter++);
    return model.embed_x0(x);
}

}  // namespace

double sample_lipschitz(const Nonlinearity& nl, const LinearModel& model, int pairs, std::uint64_t seed,
                        double scale) {
    std::int64_t counter = 0;
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        const Eigen::VectorXd a = random_x0(model, seed, counter, scale);
        // Mix far and near pairs so both the global and local slopes are probed.
        const double spread = (p % 2 == 0) ? scale : 1e-3 * scale;
        const Eigen::VectorXd b = a + random_x0(model, seed, counter, spread);
        const double d = (a - b).norm();
        if (d == 0.0) continue;
        worst = std::max(worst, (nl.F(a) - nl.F(b)).norm() / d);
    }
    return worst;
}

double jacobian_consistency(const Nonlinearity& nl, const LinearModel& model, int points, std::uint64_t seed,
                            double step) {
    if (!nl.has_jacobian()) throw CapabilityError("nonlinearity '" + nl.name + "' has no Jacobian");
    const Eigen::Index n0 = model.restrict_x0(Eigen::VectorXd::Zero(model.dim_x())).size();
    std::int64_t counter = 0;
    double worst = 0.0;
    for (int p = 0; p < points; ++p) {
        const Eigen::VectorXd x = random_x0(model, seed, counter, 1.0);
        const Eigen::MatrixXd J = nl.DF(x);
        for (Eigen::Index j = 0; j < n0; ++j) {
            const Eigen::VectorXd e = model.embed_x0(Eigen::VectorXd::Unit(n0, j));
            const Eigen::VectorXd fd = (nl.F(x + step * e) - nl.F(x - step * e)) / (2.0 * step);
            const Eigen::VectorXd an = J * e;
            worst = std::max(worst, (fd - an).norm() / std::max(1e-8, std::max(an.norm(), fd.norm())));
        }
    }
    return worst;
}

}  // namespace lpm
