#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lpm/model.hpp"

namespace lpm {

/// Exponents of the weighted path spaces.
struct RateParams {
    double eta_cu = -1.0;
    double zeta = -2.0;
    double eta_cs = 1.0;
    double chi = -1.0;
    double sigma = 0.0;
    double nu = 0.0;
    int k = 1;
};

struct GapReport {
    std::string name;
    double lhs = 0.0;
    double threshold = 1.0;
    double margin = 1.0;
    bool pass = true;
    std::map<std::string, double> constants;
};

GapReport make_report(std::string name, double lhs, double threshold);

/// Everything the inequalities need: trichotomy data, L, and C_kappa as a function
/// of kappa (scanned from the model by default, or a user-fixed value).
struct GapInputs {
    double K = 1.0, alpha = 0.0, beta = 0.0, gamma = 0.0;
    double L = 0.0;
    std::function<double(double)> c_of;
    bool corrected_shift_term = false;
};

/// C_kappa from scanned_c_kappa(model, kappa) unless fixed_c > 0.
GapInputs make_gap_inputs(const LinearModel& model, double L, double fixed_c = 0.0, bool corrected_shift_term = false);

/// KL (C_zeta - 1/(gamma + eta_cu) - 1/(eta_cu - alpha)) < 1, with
/// K_u = K L C_zeta / (1 - lhs).
GapReport check_cu(double K, double L, double C_zeta, double gamma, double alpha, double eta_cu);

/// Validates -beta < zeta < eta_cu < -gamma and calls check_cu with C_zeta.
GapReport check_cu(const GapInputs& in, const RateParams& r);

/// i = 1..k: KL (C_{zeta + (i-1) eta_cu} - 1/(gamma + i eta_cu) - 1/(i eta_cu - alpha)) < 1.
std::vector<GapReport> check_cu_smooth(const GapInputs& in, const RateParams& r, int k);

/// Centre-manifold condition KL (C_zeta + 1/(eta - gamma) + 1/(alpha - eta)) < 1 with
/// eta = r.eta_cs, and the Lipschitz bound K (KL + C_zeta L (alpha - eta)) / ((alpha - eta)(1 - lhs)).
GapReport check_c(const GapInputs& in, const RateParams& r);

/// Main foliation inequality KL (C_chi + 1/(eta_cs - gamma) + 1/(alpha - eta_cs)) < 1 with
/// K_s = K^2 L / ((alpha - eta_cs)(1 - lhs)), then the two sigma-shifted
/// conditions (threshold 1/6) for i = 1, 2:
///   KL (C_{chi + i sigma} + 1/(eta_cs - i sigma - gamma) + 1/(alpha - i eta_cs + i sigma))
/// or with alpha - eta_cs + i sigma in the last term when corrected_shift_term is set.
std::vector<GapReport> check_cs_foliation(const GapInputs& in, const RateParams& r);

/// i = 1..k: KL (C_{chi + (i-1) eta_cs} + 1/(i eta_cs - gamma) + 1/(alpha - i eta_cs)) < 1.
std::vector<GapReport> check_cs_smooth(const GapInputs& in, const RateParams& r, int k);

/// K_u K_s < 1 gate for the leaf/manifold intersection.
GapReport check_intersection(double K_u, double K_s);

/// Every report the CLI emits, in a fixed order.
std::vector<GapReport> check_all(const GapInputs& in, const RateParams& r, int k);

}  // namespace lpm
