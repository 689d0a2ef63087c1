#include "lpm/model.hpp"

#include <cmath>
#include <limits>

#include "lpm/errors.hpp"

namespace lpm {

const char* to_string(Subspace s) {
    switch (s) {
        case Subspace::c: return "c";
        case Subspace::u: return "u";
        case Subspace::s: return "s";
        case Subspace::cu: return "cu";
        case Subspace::cs: return "cs";
        case Subspace::all: return "all";
    }
    return "?";
}

Subspace subspace_from_string(const std::string& name) {
    if (name == "c") return Subspace::c;
    if (name == "u") return Subspace::u;
    if (name == "s") return Subspace::s;
    if (name == "cu") return Subspace::cu;
    if (name == "cs") return Subspace::cs;
    if (name == "all") return Subspace::all;
    throw ConfigError("unknown subspace '" + name + "'");
}

bool in_subspace(Subspace label, Subspace sub) {
    switch (sub) {
        case Subspace::all: return true;
        case Subspace::cu: return label == Subspace::c || label == Subspace::u;
        case Subspace::cs: return label == Subspace::c || label == Subspace::s;
        default: return label == sub;
    }
}

void TrichotomyConstants::validate() const {
    if (!(K >= 1.0)) throw ConfigError("trichotomy: K must be >= 1");
    if (!(gamma >= 0.0)) throw ConfigError("trichotomy: gamma must be >= 0");
    if (!(alpha > gamma)) throw ConfigError("trichotomy: alpha must exceed gamma");
    if (!(beta > gamma)) throw ConfigError("trichotomy: beta must exceed gamma");
    if (!(M_hy >= 1.0)) throw ConfigError("trichotomy: M_hy must be >= 1");
    if (!std::isfinite(theta_hy)) throw ConfigError("trichotomy: theta_hy must be finite");
}

void LinearModel::set_spectrum(Eigen::VectorXd eigenvalues, std::vector<Subspace> labels, TrichotomyConstants k) {
    if (eigenvalues.size() == 0) throw ConfigError("model needs at least one mode");
    if (static_cast<Eigen::Index>(labels.size()) != eigenvalues.size())
        throw ConfigError("model: one label per eigenvalue required");
    k.validate();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double a = eigenvalues(i);
        const Subspace l = labels[i];
        const std::string where = "mode " + std::to_string(i) + " (a = " + std::to_string(a) + ")";
        if (l == Subspace::u && a < k.alpha) throw ConfigError(where + ": unstable label needs a >= alpha");
        if (l == Subspace::c && std::abs(a) > k.gamma) throw ConfigError(where + ": centre label needs |a| <= gamma");
        if (l == Subspace::s && a > -k.beta) throw ConfigError(where + ": stable label needs a <= -beta");
        if (l != Subspace::u && l != Subspace::c && l != Subspace::s)
            throw ConfigError(where + ": label must be one of c, u, s");
    }
    if (k.theta_hy < eigenvalues.maxCoeff()) throw ConfigError("trichotomy: theta_hy below the spectral bound");
    eigenvalues_ = std::move(eigenvalues);
    labels_ = std::move(labels);
    constants_ = k;
}

std::vector<Eigen::Index> LinearModel::modes_of(Subspace sub) const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < n_modes(); ++i)
        if (in_subspace(labels_[i], sub)) out.push_back(i);
    return out;
}

Eigen::VectorXd LinearModel::mask(Subspace sub) const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n_modes());
    for (Eigen::Index i = 0; i < n_modes(); ++i)
        if (in_subspace(labels_[i], sub)) m(i) = 1.0;
    return m;
}

void LinearModel::check_lambda(double lambda) const {
    if (!(lambda > constants_.theta_hy))
        throw SpectrumError("lambda = " + std::to_string(lambda) + " must exceed theta_hy = " +
                            std::to_string(constants_.theta_hy));
    const double gap = (eigenvalues_.array() - lambda).abs().minCoeff();
    if (gap <= 1e-12 * (1.0 + std::abs(lambda))) throw SpectrumError("lambda too close to the spectrum");
}

Eigen::VectorXd LinearModel::semigroup_apply(Subspace sub, double t, const Eigen::VectorXd& x) const {
    if (t < 0.0 && (sub == Subspace::s || sub == Subspace::cs || sub == Subspace::all))
        throw DomainError("semigroup on the stable part is not defined for t < 0");
    Eigen::VectorXd c = to_modal(x);
    for (Eigen::Index i = 0; i < n_modes(); ++i) {
        if (!in_subspace(labels_[i], sub)) {
            c(i) = 0.0;
            continue;
        }
        const double e = eigenvalues_(i) * t;
        if (e > 700.0) throw RangeError("semigroup exponent overflows");
        c(i) *= std::exp(e);
    }
    return from_modal(c);
}

Eigen::VectorXd LinearModel::yosida_apply(double lambda, const Eigen::VectorXd& y) const {
    return lambda * resolvent_apply(lambda, y);
}

Eigen::VectorXd LinearModel::project(Subspace sub, const Eigen::VectorXd& y) const {
    switch (sub) {
        case Subspace::all: return y;
        case Subspace::s: return y - project(Subspace::cu, y);
        case Subspace::cs: return y - project(Subspace::u, y);
        default: return from_modal(mask(sub).cwiseProduct(to_modal(y)));
    }
}

Eigen::MatrixXd LinearModel::semigroup_matrix(Subspace sub, double t) const {
    const Eigen::Index n = restrict_x0(Eigen::VectorXd::Zero(dim_x())).size();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        out.col(j) = restrict_x0(semigroup_apply(sub, t, embed_x0(Eigen::VectorXd::Unit(n, j))));
    return out;
}

namespace {

struct BoundSpec {
    Subspace sub;
    double sign;  // time direction of the bound
    double rate;  // bound K e^{rate t}
};

std::vector<BoundSpec> bound_specs(const TrichotomyConstants& k) {
    return {{Subspace::u, -1.0, k.alpha},
            {Subspace::c, 1.0, k.gamma},
            {Subspace::c, -1.0, -k.gamma},
            {Subspace::s, 1.0, -k.beta}};
}

double op_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

TrichotomyReport verify_trichotomy_bounds(const LinearModel& model, const std::vector<double>& t_samples,
                                          double tol) {
    TrichotomyReport rep;
    const auto& k = model.constants();
    for (const auto& b : bound_specs(k)) {
        if (model.modes_of(b.sub).empty()) continue;
        for (double ts : t_samples) {
            const double t = b.sign * std::abs(ts);
            const double ratio = op_norm(model.semigroup_matrix(b.sub, t)) / (k.K * std::exp(b.rate * t));
            if (ratio > rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.worst_subspace = b.sub;
                rep.worst_t = t;
            }
        }
    }
    rep.pass = rep.worst_ratio <= 1.0 + tol;
    return rep;
}

double estimate_K(const LinearModel& model, const std::vector<double>& t_samples) {
    double worst = 1.0;
    for (const auto& b : bound_specs(model.constants())) {
        if (model.modes_of(b.sub).empty()) continue;
        for (double ts : t_samples) {
            const double t = b.sign * std::abs(ts);
            worst = std::max(worst, op_norm(model.semigroup_matrix(b.sub, t)) / std::exp(b.rate * t));
        }
    }
    return worst;
}

}  // namespace lpm
