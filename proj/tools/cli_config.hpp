#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpm/lyapunov_perron.hpp"

namespace lpm::cli {

struct ModelSpec {
    std::string type = "parabolic";  // parabolic | spectral | boundary
    // parabolic
    int n_modes = 4;
    double epsilon_star = 1.0;
    double gamma_star = 0.5;
    // spectral
    std::vector<double> eigenvalues;
    std::string labels;
    TrichotomyConstants constants;
    // boundary
    BoundaryModel::Options boundary;
};

struct NoiseSpec {
    double mu = 1.0;
    double dt = 1e-3;
    double t_min = -64.0;
    double t_max = 64.0;
    std::vector<std::uint64_t> seeds{1};
    std::optional<double> frozen;  // constant z instead of a sampled OU path
};

/// A set of points given by their modal coordinates on the cu (resp. cs) modes:
/// an explicit list, or a tensor grid of `points` values per axis on [-radius, radius].
struct PointSet {
    std::vector<std::vector<double>> explicit_points;
    double radius = 1.0;
    int points = 5;
};

struct VerifySpec {
    double r = 1.0;
    int samples = 5;
    double radius = 1.0;
    double leaf_T = 10.0;
    double growth_tol = 0.1;
    double off_leaf_offset = 0.1;
    double fd_step = 1e-5;
    double gradient_tol = 1e-4;
    double gradient_solver_tol = 1e-13;
    bool oracle = false;
    double oracle_tol = 1e-4;
};

struct RunConfig {
    int schema_version = 1;
    ModelSpec model;
    std::string nonlinearity = "cubic-saturated";
    double L = 0.05;
    NoiseSpec noise;
    RateParams rates;
    LPConfig lp;  // rates and the shift-term flag are copied in by lp_config()
    std::vector<double> lambda_ladder;
    int gap_k = 1;
    PointSet xi;
    PointSet iota;
    std::vector<double> anchor;  // state coordinates; empty means the zero state
    VerifySpec verify;
};

/// Strict parse: unknown keys and wrong types raise ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Every field, defaults included, in a canonical layout.
nlohmann::json to_json(const RunConfig& cfg);

std::shared_ptr<const LinearModel> build_model(const RunConfig& cfg);
Nonlinearity build_nonlinearity(const RunConfig& cfg, const LinearModel& model);
OUProcess build_ou(const RunConfig& cfg, std::uint64_t seed);
LPConfig lp_config(const RunConfig& cfg, bool corrected_shift_term);
GapInputs gap_inputs(const RunConfig& cfg, const LinearModel& model, bool corrected_shift_term);

/// States of the point set, embedded through the modes of `sub`.
std::vector<Eigen::VectorXd> expand_points(const PointSet& set, const LinearModel& model, Subspace sub);
Eigen::VectorXd anchor_state(const RunConfig& cfg, const LinearModel& model);

}  // namespace lpm::cli
