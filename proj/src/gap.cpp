#include "lpm/gap.hpp"

#include <cmath>
#include <limits>

#include "lpm/errors.hpp"
#include "lpm/semigroup.hpp"

namespace lpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError("rate ordering violated: " + what);
}

// Terms of the shifted conditions may leave their admissible range; such a
// report fails instead of throwing so the remaining ones are still shown.
GapReport invalid_report(std::string name, double threshold, const std::string& why) {
    GapReport rep = make_report(std::move(name), kInf, threshold);
    rep.constants["invalid_ordering"] = 1.0;
    (void)why;
    return rep;
}

}  // namespace

GapReport make_report(std::string name, double lhs, double threshold) {
    GapReport rep;
    rep.name = std::move(name);
    rep.lhs = lhs;
    rep.threshold = threshold;
    rep.margin = threshold - lhs;
    rep.pass = rep.margin > 0.0;
    return rep;
}

GapInputs make_gap_inputs(const LinearModel& model, double L, double fixed_c, bool corrected_shift_term) {
    const auto& k = model.constants();
    GapInputs in;
    in.K = k.K;
    in.alpha = k.alpha;
    in.beta = k.beta;
    in.gamma = k.gamma;
    in.L = L;
    in.corrected_shift_term = corrected_shift_term;
    if (fixed_c > 0.0) {
        const double beta = k.beta;
        in.c_of = [fixed_c, beta](double kappa) {
            if (!(kappa > -beta)) throw DomainError("C_kappa: kappa must exceed -beta");
            return fixed_c;
        };
    } else {
        // The model outlives every GapInputs built from it in this library.
        const LinearModel* m = &model;
        in.c_of = [m](double kappa) { return scanned_c_kappa(*m, kappa).c_kappa; };
    }
    return in;
}

GapReport check_cu(double K, double L, double C_zeta, double gamma, double alpha, double eta_cu) {
    require(gamma + eta_cu < 0.0, "eta_cu < -gamma");
    require(eta_cu < alpha, "eta_cu < alpha");
    const double lhs = K * L * (C_zeta - 1.0 / (gamma + eta_cu) - 1.0 / (eta_cu - alpha));
    GapReport rep = make_report("cu_manifold", lhs, 1.0);
    rep.constants["C_zeta"] = C_zeta;
    rep.constants["contraction"] = lhs;
    rep.constants["K_u"] = rep.pass ? K * L * C_zeta / (1.0 - lhs) : kInf;
    return rep;
}

GapReport check_cu(const GapInputs& in, const RateParams& r) {
    require(-in.beta < r.zeta, "-beta < zeta");
    require(r.zeta < r.eta_cu, "zeta < eta_cu");
    require(r.eta_cu < -in.gamma, "eta_cu < -gamma");
    return check_cu(in.K, in.L, in.c_of(r.zeta), in.gamma, in.alpha, r.eta_cu);
}

std::vector<GapReport> check_cu_smooth(const GapInputs& in, const RateParams& r, int k) {
    if (k < 1) throw DomainError("smoothness order must be >= 1");
    require(-in.beta < r.zeta, "-beta < zeta");
    require(-in.beta < k * r.eta_cu, "-beta < k eta_cu");
    require(r.zeta < k * r.eta_cu, "zeta < k eta_cu");
    require(r.eta_cu < -in.gamma, "k eta_cu < -gamma");
    std::vector<GapReport> out;
    for (int i = 1; i <= k; ++i) {
        const double kappa = r.zeta + (i - 1) * r.eta_cu;
        require(kappa > -in.beta, "zeta + (i-1) eta_cu > -beta");
        const double C = in.c_of(kappa);
        const double lhs = in.K * in.L * (C - 1.0 / (in.gamma + i * r.eta_cu) - 1.0 / (i * r.eta_cu - in.alpha));
        GapReport rep = make_report("cu_smooth_" + std::to_string(i), lhs, 1.0);
        rep.constants["C"] = C;
        rep.constants["kappa"] = kappa;
        out.push_back(rep);
    }
    return out;
}

GapReport check_c(const GapInputs& in, const RateParams& r) {
    const double eta = r.eta_cs;
    require(in.gamma < eta, "gamma < eta");
    require(eta < std::min(in.alpha, in.beta), "eta < min(alpha, beta)");
    require(-in.beta < r.zeta, "-beta < zeta");
    require(r.zeta < -eta, "zeta < -eta");
    const double C = in.c_of(r.zeta);
    const double lhs = in.K * in.L * (C + 1.0 / (eta - in.gamma) + 1.0 / (in.alpha - eta));
    GapReport rep = make_report("center_manifold", lhs, 1.0);
    rep.constants["C_zeta"] = C;
    rep.constants["lipschitz"] = rep.pass ? in.K * (in.K * in.L + C * in.L * (in.alpha - eta)) /
                                                ((in.alpha - eta) * (1.0 - lhs))
                                          : kInf;
    return rep;
}

std::vector<GapReport> check_cs_foliation(const GapInputs& in, const RateParams& r) {
    require(in.gamma < r.eta_cs, "gamma < eta_cs");
    require(r.eta_cs < std::min(in.alpha, in.beta), "eta_cs < min(alpha, beta)");
    require(-in.beta < r.chi, "-beta < chi");
    require(r.chi < r.eta_cs, "chi < eta_cs");
    require(r.sigma >= 0.0, "sigma >= 0");
    std::vector<GapReport> out;

    const double C = in.c_of(r.chi);
    const double lhs = in.K * in.L * (C + 1.0 / (r.eta_cs - in.gamma) + 1.0 / (in.alpha - r.eta_cs));
    GapReport main = make_report("cs_foliation", lhs, 1.0);
    main.constants["C_chi"] = C;
    main.constants["contraction"] = lhs;
    main.constants["K_s"] = main.pass ? in.K * in.K * in.L / ((in.alpha - r.eta_cs) * (1.0 - lhs)) : kInf;
    out.push_back(main);

    for (int i = 1; i <= 2; ++i) {
        const std::string name = "cs_continuity_" + std::to_string(i);
        const double kappa = r.chi + i * r.sigma;
        const double d1 = r.eta_cs - i * r.sigma - in.gamma;
        const double d2 = in.corrected_shift_term ? in.alpha - r.eta_cs + i * r.sigma
                                                  : in.alpha - i * r.eta_cs + i * r.sigma;
        if (!(kappa > -in.beta) || !(d1 > 0.0) || !(d2 > 0.0)) {
            out.push_back(invalid_report(name, 1.0 / 6.0, "shifted exponents out of range"));
            continue;
        }
        const double Ci = in.c_of(kappa);
        GapReport rep = make_report(name, in.K * in.L * (Ci + 1.0 / d1 + 1.0 / d2), 1.0 / 6.0);
        rep.constants["C"] = Ci;
        rep.constants["kappa"] = kappa;
        rep.constants["corrected"] = in.corrected_shift_term ? 1.0 : 0.0;
        out.push_back(rep);
    }
    return out;
}

std::vector<GapReport> check_cs_smooth(const GapInputs& in, const RateParams& r, int k) {
    if (k < 1) throw DomainError("smoothness order must be >= 1");
    require(in.gamma < r.eta_cs, "gamma < eta_cs");
    require(k * r.eta_cs < std::min(in.alpha, in.beta), "k eta_cs < min(alpha, beta)");
    require(-in.beta < r.chi, "-beta < chi");
    require(r.chi < k * r.eta_cs, "chi < k eta_cs");
    std::vector<GapReport> out;
    for (int i = 1; i <= k; ++i) {
        const double kappa = r.chi + (i - 1) * r.eta_cs;
        const double C = in.c_of(kappa);
        const double lhs =
            in.K * in.L * (C + 1.0 / (i * r.eta_cs - in.gamma) + 1.0 / (in.alpha - i * r.eta_cs));
        GapReport rep = make_report("cs_smooth_" + std::to_string(i), lhs, 1.0);
        rep.constants["C"] = C;
        rep.constants["kappa"] = kappa;
        out.push_back(rep);
    }
    return out;
}

GapReport check_intersection(double K_u, double K_s) {
    GapReport rep = make_report("intersection", K_u * K_s, 1.0);
    rep.constants["K_u"] = K_u;
    rep.constants["K_s"] = K_s;
    return rep;
}

std::vector<GapReport> check_all(const GapInputs& in, const RateParams& r, int k) {
    std::vector<GapReport> out;
    const GapReport cu = check_cu(in, r);
    out.push_back(cu);
    for (auto& rep : check_cu_smooth(in, r, k)) out.push_back(rep);
    out.push_back(check_c(in, r));
    const auto cs = check_cs_foliation(in, r);
    for (const auto& rep : cs) out.push_back(rep);
    for (auto& rep : check_cs_smooth(in, r, k)) out.push_back(rep);
    out.push_back(check_intersection(cu.constants.at("K_u"), cs.front().constants.at("K_s")));
    return out;
}

}  // namespace lpm
