#include <cmath>

#include "lpm/errors.hpp"
#include "lpm/model.hpp"

namespace lpm {

SpectralModel::SpectralModel(Eigen::VectorXd eigenvalues, std::vector<Subspace> labels, TrichotomyConstants k) {
    set_spectrum(std::move(eigenvalues), std::move(labels), k);
}

bool SpectralModel::in_x0(const Eigen::VectorXd& y, double) const { return y.size() == dim_x(); }

Eigen::VectorXd SpectralModel::resolvent_apply(double lambda, const Eigen::VectorXd& y) const {
    check_lambda(lambda);
    if (y.size() != dim_x()) throw ConfigError("resolvent: dimension mismatch");
    return y.array() / (lambda - eigenvalues_.array());
}

double SpectralModel::resolvent_residual(double lambda, const Eigen::VectorXd& y) const {
    const Eigen::VectorXd x = resolvent_apply(lambda, y);
    return (lambda * x - generator_matrix() * x - y).norm();
}

Eigen::MatrixXd SpectralModel::generator_matrix() const { return eigenvalues_.asDiagonal(); }

SpectralModel parabolic_preset(int n_modes, double epsilon_star, double gamma_star) {
    const double pi2 = M_PI * M_PI;
    if (n_modes < 3) throw ConfigError("parabolic_preset: n_modes must be >= 3");
    if (!(epsilon_star > 0.0 && epsilon_star < pi2)) throw ConfigError("parabolic_preset: need 0 < eps* < pi^2");
    if (!(gamma_star > 0.0 && gamma_star < pi2 - epsilon_star))
        throw ConfigError("parabolic_preset: need 0 < gamma* < pi^2 - eps*");
    Eigen::VectorXd a(n_modes);
    std::vector<Subspace> labels(n_modes, Subspace::s);
    for (int k = 0; k < n_modes; ++k) a(k) = (1.0 - static_cast<double>(k) * k) * pi2;
    labels[0] = Subspace::u;
    labels[1] = Subspace::c;
    TrichotomyConstants c;
    c.K = 1.0;
    c.alpha = pi2 - epsilon_star;
    c.beta = pi2 + epsilon_star;
    c.gamma = gamma_star;
    c.theta_hy = pi2;
    c.M_hy = 1.0;
    return SpectralModel(a, labels, c);
}

std::vector<Subspace> parse_labels(const std::string& s) {
    std::vector<Subspace> out;
    for (char ch : s) {
        switch (ch) {
            case 'c': out.push_back(Subspace::c); break;
            case 'u': out.push_back(Subspace::u); break;
            case 's': out.push_back(Subspace::s); break;
            default: throw ConfigError(std::string("label '") + ch + "' is not one of c, u, s");
        }
    }
    return out;
}

}  // namespace lpm
