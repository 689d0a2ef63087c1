#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "lpm/errors.hpp"
#include "lpm/verify.hpp"

namespace lpm {

// Everything here is rebuilt from the generator matrix alone, so the oracle
// shares no modal machinery with the fixed-point solver.
Eigen::VectorXd bvp_oracle_h(const LinearModel& model, const Nonlinearity& nl, const OUProcess& ou,
                             const Eigen::VectorXd& xi, double T, const BvpOracleOptions& opt) {
    if (model.kind() != "spectral" || model.dim_x() > 4)
        throw CapabilityError("BVP oracle supports spectral models with at most 4 modes");
    if (!nl.has_jacobian()) throw CapabilityError("BVP oracle needs the Jacobian of F");
    const Eigen::MatrixXd A = model.generator_matrix();
    const Eigen::Index n = A.rows();
    const double gamma = model.constants().gamma;

    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw OracleError("BVP oracle: eigendecomposition failed");
    if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-12) throw OracleError("BVP oracle: complex spectrum");
    const Eigen::MatrixXd V = es.eigenvectors().real();
    const Eigen::MatrixXd W = V.inverse();
    const Eigen::VectorXd ev = es.eigenvalues().real();
    std::vector<Eigen::Index> cu_rows, s_rows;
    for (Eigen::Index k = 0; k < n; ++k) (ev(k) < -gamma ? s_rows : cu_rows).push_back(k);
    Eigen::MatrixXd Ps = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k : s_rows) Ps += V.col(k) * W.row(k);

    const double dt = ou.grid.dt();
    const long long steps = ou.grid.steps_in(T);
    if (steps < 1) throw ConfigError("BVP oracle: horizon shorter than one step");
    const Eigen::Index N = static_cast<Eigen::Index>(steps);
    const Eigen::Index i0 = ou.grid.index_of(-static_cast<double>(N) * dt);
    Eigen::VectorXd z(N + 1);
    for (Eigen::Index i = 0; i <= N; ++i) z(i) = ou.z_values(i0 + i);

    const Eigen::Index dim = n * (N + 1);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

    for (int it = 0; it < opt.max_newton; ++it) {
        std::vector<Eigen::VectorXd> G(N + 1);
        std::vector<Eigen::MatrixXd> DG(N + 1);
        for (Eigen::Index i = 0; i <= N; ++i) {
            const Eigen::VectorXd vi = v.segment(i * n, n);
            G[i] = transform_nonlinearity(nl, z(i), vi);
            DG[i] = transform_jacobian(nl, z(i), vi);
        }
        Eigen::VectorXd res(dim);
        std::vector<Eigen::Triplet<double>> trip;
        auto add_block = [&trip](Eigen::Index r0, Eigen::Index c0, const Eigen::MatrixXd& B) {
            for (Eigen::Index c = 0; c < B.cols(); ++c)
                for (Eigen::Index r = 0; r < B.rows(); ++r)
                    if (B(r, c) != 0.0) trip.emplace_back(r0 + r, c0 + c, B(r, c));
        };
        // Crank-Nicolson rows for every cell.
        for (Eigen::Index i = 0; i < N; ++i) {
            const Eigen::VectorXd vl = v.segment(i * n, n), vr = v.segment((i + 1) * n, n);
            const Eigen::MatrixXd Al = A + z(i) * I, Ar = A + z(i + 1) * I;
            res.segment(i * n, n) = vr - vl - 0.5 * dt * (Al * vl + Ar * vr + G[i] + G[i + 1]);
            add_block(i * n, i * n, -I - 0.5 * dt * (Al + DG[i]));
            add_block(i * n, (i + 1) * n, I - 0.5 * dt * (Ar + DG[i + 1]));
        }
        // Boundary rows: centre-unstable part pinned at 0, stable part zero at -T.
        Eigen::Index row = N * n;
        const Eigen::VectorXd vN = v.segment(N * n, n), v0 = v.segment(0, n);
        for (Eigen::Index k : cu_rows) {
            res(row) = W.row(k).dot(vN - xi);
            add_block(row, N * n, W.row(k));
            ++row;
        }
        for (Eigen::Index k : s_rows) {
            res(row) = W.row(k).dot(v0);
            add_block(row, 0, W.row(k));
            ++row;
        }
        Eigen::SparseMatrix<double> J(dim, dim);
        J.setFromTriplets(trip.begin(), trip.end());
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw OracleError("BVP oracle: singular Newton matrix");
        const Eigen::VectorXd dv = lu.solve(-res);
        if (!dv.allFinite()) throw OracleError("BVP oracle: non-finite Newton step");
        v += dv;
        if (dv.lpNorm<Eigen::Infinity>() <= opt.tol * (1.0 + v.lpNorm<Eigen::Infinity>()))
            return Ps * v.segment(N * n, n);
    }
    throw OracleError("BVP oracle: Newton did not converge");
}

}  // namespace lpm
