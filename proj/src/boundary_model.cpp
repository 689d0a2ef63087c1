#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "lpm/errors.hpp"
#include "lpm/model.hpp"

namespace lpm {

BoundaryModel::BoundaryModel(const Options& opt) : opt_(opt), n_(opt.n_interior) {
    if (opt.n_interior < 3) throw ConfigError("boundary model: n_interior must be >= 3");
    if (!(opt.x_max > 0.0)) throw ConfigError("boundary model: x_max must be positive");
    if (opt.n_unstable < 1 || opt.n_center < 0 || opt.n_unstable + opt.n_center >= opt.n_interior)
        throw ConfigError("boundary model: need n_unstable >= 1 and at least one stable mode");
    h_ = opt.x_max / static_cast<double>(n_);
    const double ih2 = 1.0 / (h_ * h_);

    m_ = Eigen::MatrixXd::Zero(n_, n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
        m_(i, i) = -2.0 * ih2 + opt.shift;
        if (i > 0) m_(i, i - 1) = ih2;
        if (i + 1 < n_) m_(i, i + 1) = ih2;
    }
    m_(0, 0) += ih2;            // Neumann ghost phi_0 = phi_1 on X0
    m_(n_ - 1, n_ - 1) -= ih2;  // Dirichlet ghost phi_{N+1} = -phi_N

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_);
    if (es.info() != Eigen::Success) throw NumericalError("boundary model: eigendecomposition failed");
    Eigen::VectorXd a(n_);
    q_.resize(n_, n_);
    for (Eigen::Index k = 0; k < n_; ++k) {
        const Eigen::Index src = n_ - 1 - k;  // descending
        a(k) = es.eigenvalues()(src);
        Eigen::VectorXd v = es.eigenvectors().col(src);
        Eigen::Index lead = 0;
        v.cwiseAbs().maxCoeff(&lead);
        if (v(lead) < 0.0) v = -v;
        q_.col(k) = v;
    }

    std::vector<Subspace> labels(n_, Subspace::s);
    for (int k = 0; k < opt.n_unstable; ++k) labels[k] = Subspace::u;
    for (int k = 0; k < opt.n_center; ++k) labels[opt.n_unstable + k] = Subspace::c;

    TrichotomyConstants c;
    c.alpha = a(opt.n_unstable - 1);
    c.beta = -a(opt.n_unstable + opt.n_center);
    c.gamma = opt.gamma;
    c.theta_hy = a(0);
    // Boundary data enter with weight 1/h: ||R(lambda)^n (r, f)|| <= (|f| + |r|/h)/(lambda - a_0)^n.
    c.M_hy = std::sqrt(1.0 + ih2);
    c.K = 1.0;
    set_spectrum(a, labels, c);
    constants_.K = estimate_K(*this, {0.0, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0});
}

bool BoundaryModel::in_x0(const Eigen::VectorXd& y, double tol) const {
    return y.size() == dim_x() && std::abs(y(0)) <= tol;
}

Eigen::VectorXd BoundaryModel::to_modal(const Eigen::VectorXd& y) const {
    if (y.size() != dim_x()) throw ConfigError("boundary model: dimension mismatch");
    Eigen::VectorXd f = y.tail(n_);
    f(0) += y(0) / h_;
    return q_.transpose() * f;
}

Eigen::VectorXd BoundaryModel::from_modal(const Eigen::VectorXd& c) const {
    Eigen::VectorXd y(dim_x());
    y(0) = 0.0;
    y.tail(n_) = q_ * c;
    return y;
}

Eigen::VectorXd BoundaryModel::embed_x0(const Eigen::VectorXd& interior) const {
    Eigen::VectorXd y(dim_x());
    y(0) = 0.0;
    y.tail(n_) = interior;
    return y;
}

Eigen::VectorXd BoundaryModel::resolvent_extended(double lambda, const Eigen::VectorXd& y) const {
    check_lambda(lambda);
    if (y.size() != dim_x()) throw ConfigError("boundary model: dimension mismatch");
    const Eigen::Index n = n_ + 1;
    const double ih2 = 1.0 / (h_ * h_);
    Eigen::VectorXd lo(n), di(n), up(n), rhs(n);
    // Row 0: (phi_1 - phi_0)/h = -r.
    lo(0) = 0.0;
    di(0) = -1.0 / h_;
    up(0) = 1.0 / h_;
    rhs(0) = -y(0);
    for (Eigen::Index i = 1; i < n; ++i) {
        lo(i) = -ih2;
        di(i) = lambda - opt_.shift + 2.0 * ih2;
        up(i) = (i + 1 < n) ? -ih2 : 0.0;
        rhs(i) = y(i);
    }
    di(n - 1) += ih2;

    // Thomas algorithm.
    Eigen::VectorXd cp(n), dp(n);
    cp(0) = up(0) / di(0);
    dp(0) = rhs(0) / di(0);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double den = di(i) - lo(i) * cp(i - 1);
        if (std::abs(den) < 1e-300) throw NumericalError("resolvent: singular tridiagonal pivot");
        cp(i) = up(i) / den;
        dp(i) = (rhs(i) - lo(i) * dp(i - 1)) / den;
    }
    Eigen::VectorXd x(n);
    x(n - 1) = dp(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = dp(i) - cp(i) * x(i + 1);
    if (!x.allFinite()) throw NumericalError("resolvent: non-finite solution");
    return x;
}

Eigen::VectorXd BoundaryModel::resolvent_apply(double lambda, const Eigen::VectorXd& y) const {
    Eigen::VectorXd ext = resolvent_extended(lambda, y);
    ext(0) = 0.0;
    return ext;
}

Eigen::VectorXd BoundaryModel::stencil_residual(double lambda, const Eigen::VectorXd& y,
                                                const Eigen::VectorXd& ext) const {
    const double ih2 = 1.0 / (h_ * h_);
    Eigen::VectorXd phi(n_ + 2);
    phi.head(n_ + 1) = ext;
    phi(n_ + 1) = -ext(n_);
    Eigen::VectorXd res(n_ + 1);
    res(0) = (phi(1) - phi(0)) / h_ + y(0);
    for (Eigen::Index i = 1; i <= n_; ++i) {
        const double d2 = (phi(i - 1) - 2.0 * phi(i) + phi(i + 1)) * ih2;
        res(i) = lambda * phi(i) - d2 - opt_.shift * phi(i) - y(i);
    }
    return res;
}

double BoundaryModel::resolvent_residual(double lambda, const Eigen::VectorXd& y) const {
    return stencil_residual(lambda, y, resolvent_extended(lambda, y)).norm();
}

}  // namespace lpm
