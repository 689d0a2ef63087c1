#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lpm {

/// Spectral subspaces. The composite ones are sums of the elementary ones.
enum class Subspace { c, u, s, cu, cs, all };

const char* to_string(Subspace s);
Subspace subspace_from_string(const std::string& name);
/// True if a mode carrying `label` (one of c, u, s) belongs to `sub`.
bool in_subspace(Subspace label, Subspace sub);

/// Exponential trichotomy data plus the Hille-Yosida pair (theta_hy, M_hy).
struct TrichotomyConstants {
    double K = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double theta_hy = 0.0;
    double M_hy = 1.0;

    /// Throws ConfigError unless alpha > gamma >= 0, beta > gamma, K >= 1, M_hy >= 1.
    void validate() const;
};

/// Linear operator A with exponential trichotomy. Every backend is diagonal in
/// an orthonormal basis of X0, so states in X0 carry modal coordinates and the
/// generic operations below are shared. States in X are dim_x() vectors; X0 is
/// the subset in_x0() accepts.
class LinearModel {
public:
    virtual ~LinearModel() = default;

    virtual std::string kind() const = 0;
    virtual Eigen::Index dim_x() const = 0;
    Eigen::Index n_modes() const { return eigenvalues_.size(); }

    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const std::vector<Subspace>& labels() const { return labels_; }
    const TrichotomyConstants& constants() const { return constants_; }

    /// Mode indices belonging to `sub`, in increasing order.
    std::vector<Eigen::Index> modes_of(Subspace sub) const;
    /// 0/1 mask over modes.
    Eigen::VectorXd mask(Subspace sub) const;

    virtual bool in_x0(const Eigen::VectorXd& y, double tol = 0.0) const = 0;
    /// Modal coordinates of y in X. For y outside X0 this is the image under the
    /// limit of lambda (lambda - A)^{-1}, which is how forcing in X enters X0.
    virtual Eigen::VectorXd to_modal(const Eigen::VectorXd& y) const = 0;
    /// State in X0 with the given modal coordinates.
    virtual Eigen::VectorXd from_modal(const Eigen::VectorXd& c) const = 0;
    /// (lambda I - A)^{-1} y, computed without the modal shortcut.
    virtual Eigen::VectorXd resolvent_apply(double lambda, const Eigen::VectorXd& y) const = 0;
    /// ||(lambda I - A) R(lambda) y - y||, with (lambda I - A) applied by an
    /// independent route (stencil or diagonal), for resolvent identity checks.
    virtual double resolvent_residual(double lambda, const Eigen::VectorXd& y) const = 0;
    /// Matrix of the part A0 of A in X0, acting on the X0 coordinates
    /// (the interior block for boundary models).
    virtual Eigen::MatrixXd generator_matrix() const = 0;
    /// Embedding of X0 coordinates into X and back.
    virtual Eigen::VectorXd embed_x0(const Eigen::VectorXd& interior) const = 0;
    virtual Eigen::VectorXd restrict_x0(const Eigen::VectorXd& y) const = 0;

    Eigen::VectorXd semigroup_apply(Subspace sub, double t, const Eigen::VectorXd& x) const;
    Eigen::VectorXd yosida_apply(double lambda, const Eigen::VectorXd& y) const;
    Eigen::VectorXd project(Subspace sub, const Eigen::VectorXd& y) const;
    /// Dense matrix of T(t) Pi_sub acting on X0 coordinates.
    Eigen::MatrixXd semigroup_matrix(Subspace sub, double t) const;

protected:
    void set_spectrum(Eigen::VectorXd eigenvalues, std::vector<Subspace> labels, TrichotomyConstants k);
    /// Throws SpectrumError if lambda <= theta_hy or too close to an eigenvalue.
    void check_lambda(double lambda) const;

    Eigen::VectorXd eigenvalues_;
    std::vector<Subspace> labels_;
    TrichotomyConstants constants_;
};

/// Diagonal model on X = X0 = R^N with the standard basis as eigenbasis.
class SpectralModel final : public LinearModel {
public:
    /// Labels are checked against the constants: u needs a >= alpha,
    /// c needs |a| <= gamma, s needs a <= -beta.
    SpectralModel(Eigen::VectorXd eigenvalues, std::vector<Subspace> labels, TrichotomyConstants k);

    std::string kind() const override { return "spectral"; }
    Eigen::Index dim_x() const override { return eigenvalues_.size(); }
    bool in_x0(const Eigen::VectorXd& y, double tol = 0.0) const override;
    Eigen::VectorXd to_modal(const Eigen::VectorXd& y) const override { return y; }
    Eigen::VectorXd from_modal(const Eigen::VectorXd& c) const override { return c; }
    Eigen::VectorXd resolvent_apply(double lambda, const Eigen::VectorXd& y) const override;
    double resolvent_residual(double lambda, const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd generator_matrix() const override;
    Eigen::VectorXd embed_x0(const Eigen::VectorXd& interior) const override { return interior; }
    Eigen::VectorXd restrict_x0(const Eigen::VectorXd& y) const override { return y; }
};

/// a_k = (1 - k^2) pi^2, k = 0..n_modes-1, with k = 0 unstable, k = 1 centre and
/// the rest stable; K = 1, alpha = pi^2 - eps*, beta = pi^2 + eps*, gamma = gamma*.
SpectralModel parabolic_preset(int n_modes, double epsilon_star, double gamma_star);

/// Parse "ucss" style label strings.
std::vector<Subspace> parse_labels(const std::string& s);

/// Heat operator on (0, x_max) with a boundary trace, state space R x R^N.
///
/// Slot 0 holds the boundary value r, slots 1..N the cell-centred interior
/// values phi_i at x_i = (i - 1/2) h, h = x_max / N. The generator acts as
/// A(0, phi) = (-phi'(0), phi'' + shift * phi) with homogeneous Dirichlet data at
/// x_max. The trace enters through a ghost node phi_0 = phi_1 + r h, so the
/// resolvent of (r, f) is (0, (lambda - M)^{-1} (f + r e_1 / h)).
class BoundaryModel final : public LinearModel {
public:
    struct Options {
        int n_interior = 8;
        double x_max = 1.5;
        double shift = 9.869604401089358;  // pi^2
        int n_unstable = 1;
        int n_center = 1;
        double gamma = 0.5;
    };

    explicit BoundaryModel(const Options& opt);

    std::string kind() const override { return "boundary"; }
    Eigen::Index dim_x() const override { return n_ + 1; }
    bool in_x0(const Eigen::VectorXd& y, double tol = 0.0) const override;
    Eigen::VectorXd to_modal(const Eigen::VectorXd& y) const override;
    Eigen::VectorXd from_modal(const Eigen::VectorXd& c) const override;
    Eigen::VectorXd resolvent_apply(double lambda, const Eigen::VectorXd& y) const override;
    double resolvent_residual(double lambda, const Eigen::VectorXd& y) const override;
    Eigen::MatrixXd generator_matrix() const override { return m_; }
    Eigen::VectorXd embed_x0(const Eigen::VectorXd& interior) const override;
    Eigen::VectorXd restrict_x0(const Eigen::VectorXd& y) const override { return y.tail(n_); }

    const Options& options() const { return opt_; }
    double h() const { return h_; }
    const Eigen::MatrixXd& basis() const { return q_; }

    /// Tridiagonal solve of the resolvent system; returns (phi_0, phi_1..phi_N)
    /// including the ghost value.
    Eigen::VectorXd resolvent_extended(double lambda, const Eigen::VectorXd& y) const;
    /// Trace residual (phi_1 - phi_0)/h + r followed by the interior residuals
    /// lambda phi_i - (D2 phi)_i - shift phi_i - f_i on the extended stencil.
    Eigen::VectorXd stencil_residual(double lambda, const Eigen::VectorXd& y, const Eigen::VectorXd& ext) const;

private:
    Options opt_;
    Eigen::Index n_;
    double h_;
    Eigen::MatrixXd m_;  // interior matrix, symmetric
    Eigen::MatrixXd q_;  // orthonormal eigenvectors, columns ordered like eigenvalues_
};

/// Worst ratio of ||T(t) Pi_k|| against K e^{rate t} over the sampled times.
struct TrichotomyReport {
    double worst_ratio = 0.0;
    Subspace worst_subspace = Subspace::c;
    double worst_t = 0.0;
    bool pass = false;
};

TrichotomyReport verify_trichotomy_bounds(const LinearModel& model, const std::vector<double>& t_samples,
                                          double tol = 1e-6);

/// Largest sampled ||T(t) Pi_k|| / e^{rate t}; the numerical K for a backend.
double estimate_K(const LinearModel& model, const std::vector<double>& t_samples);

/// Globally Lipschitz F: X0 -> X with F(0) = 0. Inputs and outputs are dim_x
/// vectors of the model the nonlinearity was built for.
struct Nonlinearity {
    std::string name;
    double L = 0.0;
    int order = 0;  // smoothness order k
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> F;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> DF;  // may be empty

    bool has_jacobian() const { return static_cast<bool>(DF); }
};

/// Registry: "zero", "linear-coupling", "cubic-saturated", "bilinear-saturated".
Nonlinearity make_nonlinearity(const std::string& name, double L, const LinearModel& model);
std::vector<std::string> nonlinearity_names();

/// e^{-z} F(e^{z} v). Throws RangeError when |z| > 700.
Eigen::VectorXd transform_nonlinearity(const Nonlinearity& nl, double z, const Eigen::VectorXd& v);
/// D_v of the transformed map, equal to DF(e^{z} v).
Eigen::MatrixXd transform_jacobian(const Nonlinearity& nl, double z, const Eigen::VectorXd& v);

/// Largest difference quotient ||F(a) - F(b)|| / ||a - b|| over random pairs.
double sample_lipschitz(const Nonlinearity& nl, const LinearModel& model, int pairs, std::uint64_t seed,
                        double scale = 2.0);

/// Largest relative mismatch between DF and central differences at random points.
double jacobian_consistency(const Nonlinearity& nl, const LinearModel& model, int points, std::uint64_t seed,
                            double step = 1e-6);

}  // namespace lpm
