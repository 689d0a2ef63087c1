#include "cli_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "lpm/errors.hpp"

namespace lpm::cli {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so that typos
// surface as errors instead of silently falling back to defaults.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void num(const std::string& key, double& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) throw ConfigError(field(key) + ": must be finite");
    }
    void integer(const std::string& key, int& out) {
        if (!take(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
        out = v.get<int>();
    }
    void boolean(const std::string& key, bool& out) {
        if (!take(key)) return;
        if (!j_.at(key).is_boolean()) throw ConfigError(field(key) + ": expected true or false");
        out = j_.at(key).get<bool>();
    }
    void str(const std::string& key, std::string& out) {
        if (!take(key)) return;
        if (!j_.at(key).is_string()) throw ConfigError(field(key) + ": expected a string");
        out = j_.at(key).get<std::string>();
    }
    void vec(const std::string& key, std::vector<double>& out) {
        if (!take(key)) return;
        out = numbers(j_.at(key), field(key));
    }
    const json* sub(const std::string& key) {
        if (!take(key)) return nullptr;
        return &j_.at(key);
    }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
    }

    static std::vector<double> numbers(const json& v, const std::string& where) {
        if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

private:
    bool take(const std::string& key) {
        seen_.insert(key);
        return has(key);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field + ": " + what);
}

void parse_points(const json& j, const std::string& path, PointSet& out) {
    Section s(j, path);
    if (const json* pts = s.sub("points_list")) {
        if (!pts->is_array()) throw ConfigError(path + ".points_list: expected an array of arrays");
        for (const auto& p : *pts) out.explicit_points.push_back(Section::numbers(p, path + ".points_list"));
    }
    s.num("radius", out.radius);
    s.integer("points", out.points);
    s.finish();
    require(out.radius >= 0.0, path + ".radius", "must be >= 0");
    require(out.points >= 1, path + ".points", "must be >= 1");
}

json points_json(const PointSet& p) {
    return {{"points_list", p.explicit_points}, {"radius", p.radius}, {"points", p.points}};
}

}  // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    Section root(j, "");
    root.integer("schema_version", cfg.schema_version);
    if (!root.has("schema_version")) throw ConfigError("schema_version: required");
    require(cfg.schema_version == 1, "schema_version", "only version 1 is supported");

    if (const json* m = root.sub("model")) {
        Section s(*m, "model");
        auto& ms = cfg.model;
        s.str("type", ms.type);
        if (ms.type == "parabolic") {
            s.integer("n_modes", ms.n_modes);
            s.num("epsilon_star", ms.epsilon_star);
            s.num("gamma_star", ms.gamma_star);
            require(ms.n_modes >= 3, "model.n_modes", "must be >= 3");
        } else if (ms.type == "spectral") {
            s.vec("eigenvalues", ms.eigenvalues);
            s.str("labels", ms.labels);
            s.num("K", ms.constants.K);
            s.num("alpha", ms.constants.alpha);
            s.num("beta", ms.constants.beta);
            s.num("gamma", ms.constants.gamma);
            s.num("theta_hy", ms.constants.theta_hy);
            s.num("M_hy", ms.constants.M_hy);
            require(!ms.eigenvalues.empty(), "model.eigenvalues", "required for a spectral model");
            require(ms.labels.size() == ms.eigenvalues.size(), "model.labels", "one label per eigenvalue");
        } else if (ms.type == "boundary") {
            auto& b = ms.boundary;
            s.integer("n_interior", b.n_interior);
            s.num("x_max", b.x_max);
            s.num("shift", b.shift);
            s.integer("n_unstable", b.n_unstable);
            s.integer("n_center", b.n_center);
            s.num("gamma", b.gamma);
        } else {
            throw ConfigError("model.type: expected parabolic, spectral or boundary");
        }
        s.finish();
    }

    if (const json* n = root.sub("nonlinearity")) {
        Section s(*n, "nonlinearity");
        s.str("name", cfg.nonlinearity);
        s.num("L", cfg.L);
        s.finish();
        bool known = false;
        for (const auto& name : nonlinearity_names()) known = known || name == cfg.nonlinearity;
        require(known, "nonlinearity.name", "unknown nonlinearity '" + cfg.nonlinearity + "'");
        require(cfg.L >= 0.0, "nonlinearity.L", "must be >= 0");
    }

    if (const json* n = root.sub("noise")) {
        Section s(*n, "noise");
        auto& ns = cfg.noise;
        s.num("mu", ns.mu);
        s.num("dt", ns.dt);
        s.num("t_min", ns.t_min);
        s.num("t_max", ns.t_max);
        if (const json* seeds = s.sub("seeds")) {
            if (!seeds->is_array() || seeds->empty()) throw ConfigError("noise.seeds: expected a non-empty array");
            ns.seeds.clear();
            for (const auto& e : *seeds) {
                if (!e.is_number_unsigned()) throw ConfigError("noise.seeds: expected unsigned integers");
                ns.seeds.push_back(e.get<std::uint64_t>());
            }
        }
        if (s.has("frozen")) {
            double v = 0.0;
            s.num("frozen", v);
            ns.frozen = v;
        } else {
            s.sub("frozen");
        }
        s.finish();
        require(ns.mu > 0.0, "noise.mu", "must be > 0");
        require(ns.dt > 0.0, "noise.dt", "must be > 0");
        require(ns.t_min <= 0.0, "noise.t_min", "must be <= 0");
        require(ns.t_max >= 0.0, "noise.t_max", "must be >= 0");
    }

    if (const json* r = root.sub("rates")) {
        Section s(*r, "rates");
        s.num("eta_cu", cfg.rates.eta_cu);
        s.num("zeta", cfg.rates.zeta);
        s.num("eta_cs", cfg.rates.eta_cs);
        s.num("chi", cfg.rates.chi);
        s.num("sigma", cfg.rates.sigma);
        s.num("nu", cfg.rates.nu);
        s.finish();
    }

    if (const json* l = root.sub("lp")) {
        Section s(*l, "lp");
        s.num("T_horizon", cfg.lp.T_horizon);
        s.num("tol", cfg.lp.tol);
        s.integer("max_iter", cfg.lp.max_iter);
        s.num("ratio_slack", cfg.lp.ratio_slack);
        s.num("fixed_c", cfg.lp.fixed_c);
        s.num("base_guard", cfg.lp.base_guard);
        std::string rule = "euler";
        s.str("rule", rule);
        if (rule == "euler")
            cfg.lp.rule = StepRule::euler;
        else if (rule == "trapezoid")
            cfg.lp.rule = StepRule::trapezoid;
        else
            throw ConfigError("lp.rule: expected euler or trapezoid");
        s.vec("lambda_ladder", cfg.lambda_ladder);
        s.finish();
        require(cfg.lp.T_horizon >= 0.0, "lp.T_horizon", "must be >= 0");
        require(cfg.lp.tol > 0.0, "lp.tol", "must be > 0");
        require(cfg.lp.max_iter >= 1, "lp.max_iter", "must be >= 1");
        require(cfg.lp.ratio_slack >= 0.0, "lp.ratio_slack", "must be >= 0");
        require(cfg.lp.fixed_c >= 0.0, "lp.fixed_c", "must be >= 0");
    }

    if (const json* g = root.sub("gap")) {
        Section s(*g, "gap");
        s.integer("k", cfg.gap_k);
        s.finish();
        require(cfg.gap_k >= 1, "gap.k", "must be >= 1");
    }

    if (const json* x = root.sub("manifold")) parse_points(*x, "manifold", cfg.xi);
    if (const json* f = root.sub("foliation")) {
        Section s(*f, "foliation");
        s.vec("anchor", cfg.anchor);
        json rest = json::object();
        for (const char* key : {"points_list", "radius", "points"})
            if (f->contains(key)) rest[key] = f->at(key);
        s.sub("points_list");
        s.sub("radius");
        s.sub("points");
        s.finish();
        parse_points(rest, "foliation", cfg.iota);
    }

    if (const json* v = root.sub("verify")) {
        Section s(*v, "verify");
        auto& vs = cfg.verify;
        s.num("r", vs.r);
        s.integer("samples", vs.samples);
        s.num("radius", vs.radius);
        s.num("leaf_T", vs.leaf_T);
        s.num("growth_tol", vs.growth_tol);
        s.num("off_leaf_offset", vs.off_leaf_offset);
        s.num("fd_step", vs.fd_step);
        s.num("gradient_tol", vs.gradient_tol);
        s.num("gradient_solver_tol", vs.gradient_solver_tol);
        s.boolean("oracle", vs.oracle);
        s.num("oracle_tol", vs.oracle_tol);
        s.finish();
        require(vs.r >= 0.0, "verify.r", "must be >= 0");
        require(vs.samples >= 1, "verify.samples", "must be >= 1");
        require(vs.leaf_T > 0.0, "verify.leaf_T", "must be > 0");
        require(vs.fd_step > 0.0, "verify.fd_step", "must be > 0");
    }
    root.finish();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg) {
    json model;
    const auto& ms = cfg.model;
    model["type"] = ms.type;
    if (ms.type == "parabolic") {
        model["n_modes"] = ms.n_modes;
        model["epsilon_star"] = ms.epsilon_star;
        model["gamma_star"] = ms.gamma_star;
    } else if (ms.type == "spectral") {
        model["eigenvalues"] = ms.eigenvalues;
        model["labels"] = ms.labels;
        model["K"] = ms.constants.K;
        model["alpha"] = ms.constants.alpha;
        model["beta"] = ms.constants.beta;
        model["gamma"] = ms.constants.gamma;
        model["theta_hy"] = ms.constants.theta_hy;
        model["M_hy"] = ms.constants.M_hy;
    } else {
        const auto& b = ms.boundary;
        model["n_interior"] = b.n_interior;
        model["x_max"] = b.x_max;
        model["shift"] = b.shift;
        model["n_unstable"] = b.n_unstable;
        model["n_center"] = b.n_center;
        model["gamma"] = b.gamma;
    }
    json noise = {{"mu", cfg.noise.mu},         {"dt", cfg.noise.dt}, {"t_min", cfg.noise.t_min},
                  {"t_max", cfg.noise.t_max},   {"seeds", cfg.noise.seeds}};
    noise["frozen"] = cfg.noise.frozen ? json(*cfg.noise.frozen) : json(nullptr);
    const auto& r = cfg.rates;
    json rates = {{"eta_cu", r.eta_cu}, {"zeta", r.zeta},   {"eta_cs", r.eta_cs},
                  {"chi", r.chi},       {"sigma", r.sigma}, {"nu", r.nu}};
    json lp = {{"T_horizon", cfg.lp.T_horizon},   {"tol", cfg.lp.tol},
               {"max_iter", cfg.lp.max_iter},     {"ratio_slack", cfg.lp.ratio_slack},
               {"fixed_c", cfg.lp.fixed_c},       {"base_guard", cfg.lp.base_guard},
               {"rule", cfg.lp.rule == StepRule::euler ? "euler" : "trapezoid"},
               {"lambda_ladder", cfg.lambda_ladder}};
    json fol = points_json(cfg.iota);
    fol["anchor"] = cfg.anchor;
    const auto& v = cfg.verify;
    json ver = {{"r", v.r},
                {"samples", v.samples},
                {"radius", v.radius},
                {"leaf_T", v.leaf_T},
                {"growth_tol", v.growth_tol},
                {"off_leaf_offset", v.off_leaf_offset},
                {"fd_step", v.fd_step},
                {"gradient_tol", v.gradient_tol},
                {"gradient_solver_tol", v.gradient_solver_tol},
                {"oracle", v.oracle},
                {"oracle_tol", v.oracle_tol}};
    return {{"schema_version", cfg.schema_version},
            {"model", model},
            {"nonlinearity", {{"name", cfg.nonlinearity}, {"L", cfg.L}}},
            {"noise", noise},
            {"rates", rates},
            {"lp", lp},
            {"gap", {{"k", cfg.gap_k}}},
            {"manifold", points_json(cfg.xi)},
            {"foliation", fol},
            {"verify", ver}};
}

std::shared_ptr<const LinearModel> build_model(const RunConfig& cfg) {
    const auto& ms = cfg.model;
    if (ms.type == "parabolic")
        return std::make_shared<SpectralModel>(parabolic_preset(ms.n_modes, ms.epsilon_star, ms.gamma_star));
    if (ms.type == "spectral") {
        Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(ms.eigenvalues.data(),
                                                               static_cast<Eigen::Index>(ms.eigenvalues.size()));
        return std::make_shared<SpectralModel>(a, parse_labels(ms.labels), ms.constants);
    }
    return std::make_shared<BoundaryModel>(ms.boundary);
}

Nonlinearity build_nonlinearity(const RunConfig& cfg, const LinearModel& model) {
    return make_nonlinearity(cfg.nonlinearity, cfg.L, model);
}

OUProcess build_ou(const RunConfig& cfg, std::uint64_t seed) {
    const auto& ns = cfg.noise;
    TimeGrid grid(ns.t_min, ns.t_max, ns.dt);
    if (ns.frozen) return constant_ou(grid, *ns.frozen, ns.mu);
    const double tail = default_tail_cut(ns.mu, ns.dt);
    const BrownianPath path = sample_brownian(TimeGrid(grid.t_min() - tail, grid.t_max(), ns.dt), seed);
    return ou_stationary(path, ns.mu, tail);
}

LPConfig lp_config(const RunConfig& cfg, bool corrected_shift_term) {
    LPConfig lp = cfg.lp;
    lp.rates = cfg.rates;
    lp.rates.k = cfg.gap_k;
    lp.plan.lambda_ladder = cfg.lambda_ladder;
    lp.corrected_shift_term = corrected_shift_term;
    return lp;
}

GapInputs gap_inputs(const RunConfig& cfg, const LinearModel& model, bool corrected_shift_term) {
    return make_gap_inputs(model, cfg.L, cfg.lp.fixed_c, corrected_shift_term);
}

std::vector<Eigen::VectorXd> expand_points(const PointSet& set, const LinearModel& model, Subspace sub) {
    const auto modes = model.modes_of(sub);
    const std::size_t d = modes.size();
    std::vector<Eigen::VectorXd> out;
    auto embed = [&](const std::vector<double>& coords) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(model.n_modes());
        for (std::size_t i = 0; i < d; ++i) c(modes[i]) = coords[i];
        out.push_back(model.from_modal(c));
    };
    if (!set.explicit_points.empty()) {
        for (const auto& p : set.explicit_points) {
            if (p.size() != d)
                throw ConfigError("points_list: each point needs " + std::to_string(d) + " modal coordinates");
            embed(p);
        }
        return out;
    }
    // Tensor grid, last axis fastest.
    std::vector<int> idx(d, 0);
    const int n = set.points;
    auto coord = [&](int i) { return n == 1 ? 0.0 : -set.radius + 2.0 * set.radius * i / (n - 1); };
    while (true) {
        std::vector<double> p(d);
        for (std::size_t i = 0; i < d; ++i) p[i] = coord(idx[i]);
        embed(p);
        std::size_t axis = d;
        while (axis > 0 && ++idx[axis - 1] == n) idx[--axis] = 0;
        if (axis == 0) break;
    }
    return out;
}

Eigen::VectorXd anchor_state(const RunConfig& cfg, const LinearModel& model) {
    if (cfg.anchor.empty()) return Eigen::VectorXd::Zero(model.dim_x());
    if (static_cast<Eigen::Index>(cfg.anchor.size()) != model.dim_x())
        throw ConfigError("foliation.anchor: expected " + std::to_string(model.dim_x()) + " state coordinates");
    return Eigen::Map<const Eigen::VectorXd>(cfg.anchor.data(), model.dim_x());
}

}  // namespace lpm::cli
