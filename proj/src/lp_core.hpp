#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "lpm/lyapunov_perron.hpp"

namespace lpm::detail {

/// Discretised half-line shared by the operators J and Z and their linearisations.
///
/// Every mode is swept either forward from column 0 or backward from the last
/// column with the same one-step map y+ = E y + WL g(left) + WR g(right); the
/// backward sweep is the exact inverse of the forward one, so fixed points are
/// orbits of the discrete flow.
class LPCore {
public:
    LPCore(const LinearModel& model, const OUProcess& ou, HalfLine side, double T, double eta, StepRule rule,
           const ConvolutionPlan& plan, const Eigen::VectorXd& forward_mask);

    Eigen::Index size() const { return tau_.size(); }
    Eigen::Index cells() const { return tau_.size() - 1; }
    Eigen::Index zero_col() const { return side_ == HalfLine::past ? cells() : 0; }
    HalfLine side() const { return side_; }
    double dt() const { return dt_; }
    double eta() const { return eta_; }
    double tau(Eigen::Index i) const { return tau_(i); }
    double z(Eigen::Index i) const { return z_(i); }

    /// Forward modes start at column 0 from init, backward modes end at the last
    /// column at init. The lambda plan scales the forcing of stable modes.
    Eigen::MatrixXd sweep(const Eigen::VectorXd& init, const Eigen::MatrixXd& g) const;

    double norm(const Eigen::MatrixXd& modal) const;
    WeightedPath wrap(Eigen::MatrixXd modal) const;

    /// Picard iteration x <- op(x) in the weighted norm; ratios of successive
    /// differences are held against certified + slack.
    FixedPointStats picard(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& op, Eigen::MatrixXd& x,
                           double certified, const LPConfig& cfg) const;

private:
    Eigen::MatrixXd sweep_scaled(const Eigen::VectorXd& init, const Eigen::MatrixXd& g,
                                 const Eigen::VectorXd& scale) const;

    HalfLine side_;
    double dt_, eta_;
    Eigen::VectorXd tau_, z_, weight_;
    Eigen::MatrixXd E_, WL_, WR_;  // modes x cells
    Eigen::VectorXd forward_;
    std::vector<double> ladder_;
    std::vector<Eigen::VectorXd> ladder_scale_;
    double ladder_tol_ = 1e-6;
};

}  // namespace lpm::detail
