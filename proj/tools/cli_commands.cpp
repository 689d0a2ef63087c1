#include "cli_commands.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "cli_config.hpp"
#include "cli_plot.hpp"
#include "lpm/errors.hpp"
#include "lpm/io.hpp"
#include "lpm/verify.hpp"

namespace lpm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Runs fn(0..n-1) on up to `threads` workers; the first exception is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    os << text;
}

struct Context {
    const CliOptions& opt;
    RunConfig cfg;
    json canonical;
    fs::path out;
    std::vector<std::uint64_t> seeds;
    std::ostream& log;

    json manifest(const std::string& command) const {
        return {{"command", command},
                {"schema_version", cfg.schema_version},
                {"config_hash", fnv1a_hex(canonical.dump())},
                {"config", canonical},
                {"seeds", seeds},
                {"corrected_shift_term", opt.corrected_shift_term}};
    }
    void finish(json m, const std::string& name, bool pass) const {
        m["pass"] = pass;
        write_file(out / name, m.dump(2) + "\n");
        log << (pass ? "PASS " : "FAIL ") << m.at("command").get<std::string>() << " -> " << (out / name).string()
            << "\n";
    }
};

std::string seed_tag(std::uint64_t s) { return "seed" + std::to_string(s); }

std::string csv_header(const std::string& in, const std::string& outp, Eigen::Index n) {
    std::string h;
    for (Eigen::Index i = 0; i < n; ++i) h += (i ? "," : "") + in + std::to_string(i);
    for (Eigen::Index i = 0; i < n; ++i) h += "," + outp + std::to_string(i);
    return h + "\n";
}

std::string csv_row(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    std::string r;
    for (Eigen::Index i = 0; i < a.size(); ++i) r += (i ? "," : "") + fmt_num(a(i));
    for (Eigen::Index i = 0; i < b.size(); ++i) r += "," + fmt_num(b(i));
    return r + "\n";
}

int cmd_sample_noise(const Context& ctx) {
    json m = ctx.manifest("sample-noise");
    json runs = json::array();
    bool pass = true;
    std::vector<std::string> files(ctx.seeds.size());
    std::vector<json> stats(ctx.seeds.size());
    parallel_for(ctx.seeds.size(), ctx.opt.threads, [&](std::size_t k) {
        const std::uint64_t seed = ctx.seeds[k];
        const OUProcess ou = build_ou(ctx.cfg, seed);
        std::ostringstream os;
        if (ctx.cfg.noise.frozen) {
            os << "t,z\n";
            for (Eigen::Index i = 0; i < ou.grid.size(); ++i)
                os << fmt_num(ou.grid.time(i)) << ',' << fmt_num(ou.z_values(i)) << '\n';
        } else {
            const double tail = ou.tail_cut;
            const BrownianPath path = sample_brownian(
                TimeGrid(ou.grid.t_min() - tail, ou.grid.t_max(), ou.grid.dt()), seed);
            write_noise_csv(os, path, ou);
        }
        files[k] = "noise_" + seed_tag(seed) + ".csv";
        write_file(ctx.out / files[k], os.str());
        const double mean = ou.z_values.mean();
        const double var = (ou.z_values.array() - mean).square().mean();
        stats[k] = {{"seed", seed},
                    {"file", files[k]},
                    {"nodes", ou.grid.size()},
                    {"z_mean", num(mean)},
                    {"z_variance", num(var)},
                    {"finite", ou.z_values.allFinite()}};
    });
    for (const auto& s : stats) {
        pass = pass && s.at("finite").get<bool>();
        runs.push_back(s);
    }
    m["runs"] = runs;
    ctx.finish(m, "manifest_sample-noise.json", pass);
    return pass ? kPass : kGateFailed;
}

int cmd_check_gaps(const Context& ctx) {
    const auto model = build_model(ctx.cfg);
    RateParams r = ctx.cfg.rates;
    const auto reps = check_all(gap_inputs(ctx.cfg, *model, ctx.opt.corrected_shift_term), r, ctx.cfg.gap_k);
    bool pass = true;
    for (const auto& rep : reps) pass = pass && rep.pass;
    const auto& k = model->constants();
    json m = ctx.manifest("check-gaps");
    m["trichotomy"] = {{"K", k.K},         {"alpha", k.alpha},       {"beta", k.beta},
                       {"gamma", k.gamma}, {"theta_hy", k.theta_hy}, {"M_hy", k.M_hy}};
    m["gap_reports"] = lpm::to_json(reps);
    write_file(ctx.out / "gaps.json", lpm::to_json(reps).dump(2) + "\n");
    ctx.finish(m, "manifest_check-gaps.json", pass);
    return pass ? kPass : kGateFailed;
}

int cmd_solve_manifold(const Context& ctx) {
    const auto model = build_model(ctx.cfg);
    const Nonlinearity nl = build_nonlinearity(ctx.cfg, *model);
    const LPConfig lp = lp_config(ctx.cfg, ctx.opt.corrected_shift_term);
    json m = ctx.manifest("solve-manifold");
    const GapReport gate = check_cu(gap_inputs(ctx.cfg, *model, lp.corrected_shift_term), lp.rates);
    m["gap_reports"] = json::array({lpm::to_json(gate)});
    if (!gate.pass) {
        ctx.finish(m, "manifest_solve-manifold.json", false);
        return kGateFailed;
    }
    const auto xis = expand_points(ctx.cfg.xi, *model, Subspace::cu);
    json runs = json::array();
    bool pass = true;
    for (std::uint64_t seed : ctx.seeds) {
        ManifoldGraph g(model, nl, build_ou(ctx.cfg, seed), lp);
        std::vector<CuSolution> sols(xis.size());
        parallel_for(xis.size(), ctx.opt.threads, [&](std::size_t i) { sols[i] = g.solve(xis[i]); });
        std::string csv = csv_header("xi_", "h_", model->dim_x());
        json pts = json::array();
        double worst_ratio = 0.0;
        for (std::size_t i = 0; i < xis.size(); ++i) {
            csv += csv_row(xis[i], sols[i].h);
            pts.push_back(lpm::to_json(sols[i].stats));
            worst_ratio = std::max(worst_ratio, sols[i].stats.max_ratio);
        }
        const std::string file = "manifold_" + seed_tag(seed) + ".csv";
        write_file(ctx.out / file, csv);
        std::vector<Eigen::VectorXd> hs;
        double lip = 0.0;
        for (std::size_t i = 0; i < xis.size(); ++i)
            for (std::size_t j = i + 1; j < xis.size(); ++j) {
                const double d = (xis[i] - xis[j]).norm();
                if (d > 0.0) lip = std::max(lip, (sols[i].h - sols[j].h).norm() / d);
            }
        const bool ok = lip <= g.K_u() && worst_ratio <= gate.lhs + lp.ratio_slack;
        pass = pass && ok;
        runs.push_back({{"seed", seed},
                        {"file", file},
                        {"horizon", g.horizon()},
                        {"lipschitz_sample", num(lip)},
                        {"K_u", num(g.K_u())},
                        {"worst_ratio", num(worst_ratio)},
                        {"points", pts},
                        {"pass", ok}});
    }
    m["runs"] = runs;
    ctx.finish(m, "manifest_solve-manifold.json", pass);
    return pass ? kPass : kGateFailed;
}

int cmd_solve_foliation(const Context& ctx) {
    const auto model = build_model(ctx.cfg);
    const Nonlinearity nl = build_nonlinearity(ctx.cfg, *model);
    const LPConfig lp = lp_config(ctx.cfg, ctx.opt.corrected_shift_term);
    json m = ctx.manifest("solve-foliation");
    const auto reps = check_cs_foliation(gap_inputs(ctx.cfg, *model, lp.corrected_shift_term), lp.rates);
    m["gap_reports"] = lpm::to_json(reps);
    if (!reps.front().pass) {
        ctx.finish(m, "manifest_solve-foliation.json", false);
        return kGateFailed;
    }
    const Eigen::VectorXd anchor = anchor_state(ctx.cfg, *model);
    const auto iotas = expand_points(ctx.cfg.iota, *model, Subspace::cs);
    json runs = json::array();
    bool pass = true;
    for (std::uint64_t seed : ctx.seeds) {
        FoliationLeaf leaf(model, nl, build_ou(ctx.cfg, seed), anchor, lp);
        std::vector<LeafSolution> sols(iotas.size());
        parallel_for(iotas.size(), ctx.opt.threads, [&](std::size_t i) { sols[i] = leaf.solve(iotas[i]); });
        std::string csv = csv_header("iota_", "l_", model->dim_x());
        json pts = json::array();
        double worst_ratio = 0.0, lip = 0.0;
        for (std::size_t i = 0; i < iotas.size(); ++i) {
            csv += csv_row(iotas[i], sols[i].l);
            pts.push_back(lpm::to_json(sols[i].stats));
            worst_ratio = std::max(worst_ratio, sols[i].stats.max_ratio);
            for (std::size_t j = i + 1; j < iotas.size(); ++j) {
                const double d = (iotas[i] - iotas[j]).norm();
                if (d > 0.0) lip = std::max(lip, (sols[i].l - sols[j].l).norm() / d);
            }
        }
        const std::string file = "leaf_" + seed_tag(seed) + ".csv";
        write_file(ctx.out / file, csv);
        const bool ok = lip <= leaf.K_s() && worst_ratio <= reps.front().lhs + lp.ratio_slack;
        pass = pass && ok;
        runs.push_back({{"seed", seed},
                        {"file", file},
                        {"horizon", leaf.horizon()},
                        {"anchor", lpm::to_json(anchor)},
                        {"lipschitz_sample", num(lip)},
                        {"K_s", num(leaf.K_s())},
                        {"worst_ratio", num(worst_ratio)},
                        {"points", pts},
                        {"pass", ok}});
    }
    m["runs"] = runs;
    ctx.finish(m, "manifest_solve-foliation.json", pass);
    return pass ? kPass : kGateFailed;
}

int cmd_intersect(const Context& ctx) {
    const auto model = build_model(ctx.cfg);
    const Nonlinearity nl = build_nonlinearity(ctx.cfg, *model);
    const LPConfig lp = lp_config(ctx.cfg, ctx.opt.corrected_shift_term);
    json m = ctx.manifest("intersect");
    const GapInputs in = gap_inputs(ctx.cfg, *model, lp.corrected_shift_term);
    const GapReport cu = check_cu(in, lp.rates);
    const auto cs = check_cs_foliation(in, lp.rates);
    json gates = json::array({lpm::to_json(cu), lpm::to_json(cs.front())});
    if (cu.pass && cs.front().pass)
        gates.push_back(lpm::to_json(check_intersection(cu.constants.at("K_u"), cs.front().constants.at("K_s"))));
    m["gap_reports"] = gates;
    bool pass = true;
    for (const auto& g : gates) pass = pass && g.at("pass").get<bool>();
    if (!pass) {
        ctx.finish(m, "manifest_intersect.json", false);
        return kGateFailed;
    }
    const Eigen::VectorXd anchor = anchor_state(ctx.cfg, *model);
    std::vector<json> runs(ctx.seeds.size());
    parallel_for(ctx.seeds.size(), ctx.opt.threads, [&](std::size_t k) {
        const OUProcess ou = build_ou(ctx.cfg, ctx.seeds[k]);
        ManifoldGraph g(model, nl, ou, lp);
        FoliationLeaf leaf(model, nl, ou, anchor, lp);
        const double tol = 10.0 * lp.tol;
        const IntersectionResult res = intersect(g, leaf, std::nullopt, lp.tol);
        const bool ok = res.residual_xi <= tol * (1.0 + res.point.norm()) &&
                        res.residual_iota <= tol * (1.0 + res.point.norm());
        runs[k] = {{"seed", ctx.seeds[k]},
                   {"point", lpm::to_json(res.point)},
                   {"iota", lpm::to_json(res.iota)},
                   {"xi", lpm::to_json(res.xi)},
                   {"iterations", res.iterations},
                   {"residual_xi", num(res.residual_xi)},
                   {"residual_iota", num(res.residual_iota)},
                   {"pass", ok}};
    });
    for (const auto& r : runs) pass = pass && r.at("pass").get<bool>();
    m["runs"] = runs;
    ctx.finish(m, "manifest_intersect.json", pass);
    return pass ? kPass : kGateFailed;
}

int cmd_verify(const Context& ctx) {
    const auto model = build_model(ctx.cfg);
    const Nonlinearity nl = build_nonlinearity(ctx.cfg, *model);
    const LPConfig lp = lp_config(ctx.cfg, ctx.opt.corrected_shift_term);
    const VerifySpec& vs = ctx.cfg.verify;
    json m = ctx.manifest("verify");
    const GapInputs in = gap_inputs(ctx.cfg, *model, lp.corrected_shift_term);
    const GapReport cu = check_cu(in, lp.rates);
    const auto cs = check_cs_foliation(in, lp.rates);
    m["gap_reports"] = json::array({lpm::to_json(cu), lpm::to_json(cs.front())});
    if (!cu.pass || !cs.front().pass) {
        ctx.finish(m, "manifest_verify.json", false);
        return kGateFailed;
    }
    const Eigen::VectorXd anchor = anchor_state(ctx.cfg, *model);
    std::vector<json> runs(ctx.seeds.size());
    std::vector<char> oks(ctx.seeds.size(), 0);
    parallel_for(ctx.seeds.size(), ctx.opt.threads, [&](std::size_t k) {
        const std::uint64_t seed = ctx.seeds[k];
        const OUProcess ou = build_ou(ctx.cfg, seed);
        ManifoldGraph g(model, nl, ou, lp);
        FoliationLeaf leaf(model, nl, ou, anchor, lp);
        const auto xis = sample_subspace(*model, Subspace::cu, vs.samples, vs.radius, seed);
        auto iotas = sample_subspace(*model, Subspace::cs, vs.samples, vs.radius, seed ^ 0x9e3779b97f4a7c15ULL);
        for (auto& io : iotas) io += model->project(Subspace::cs, anchor);

        std::vector<VerificationReport> reps;
        reps.push_back(check_invariance_manifold(g, vs.r, xis));
        reps.push_back(check_leaf_convergence(leaf, iotas, vs.leaf_T, vs.growth_tol));
        reps.push_back(check_off_leaf_violation(leaf, iotas, vs.leaf_T, vs.off_leaf_offset, vs.growth_tol));
        reps.push_back(check_lipschitz_cu(g, xis));
        reps.push_back(check_lipschitz_leaf(leaf, iotas));
        double ratio_cu = 0.0, ratio_cs = 0.0;
        for (const auto& x : xis) ratio_cu = std::max(ratio_cu, g.solve(x).stats.max_ratio);
        for (const auto& x : iotas) ratio_cs = std::max(ratio_cs, leaf.solve(x).stats.max_ratio);
        reps.push_back(make_verification("contraction_cu", vs.samples, ratio_cu, cu.lhs + lp.ratio_slack));
        reps.push_back(make_verification("contraction_cs", vs.samples, ratio_cs, cs.front().lhs + lp.ratio_slack));
        if (nl.has_jacobian()) {
            LPConfig tight = lp;
            tight.tol = vs.gradient_solver_tol;
            ManifoldGraph g2(model, nl, ou, tight);
            FoliationLeaf leaf2(model, nl, ou, anchor, tight);
            reps.push_back(check_gradient_cu(g2, xis.front(), vs.fd_step, vs.gradient_tol));
            reps.push_back(check_gradient_leaf(leaf2, iotas.front(), vs.fd_step, vs.gradient_tol));
        }
        if (vs.oracle) reps.push_back(oracle_bvp_compare(g, xis, vs.oracle_tol));
        json arr = json::array();
        bool ok = true;
        for (const auto& r : reps) {
            arr.push_back(lpm::to_json(r));
            ok = ok && r.pass;
        }
        runs[k] = {{"seed", seed}, {"reports", arr}, {"pass", ok}};
        oks[k] = ok;
    });
    bool pass = true;
    for (char ok : oks) pass = pass && ok;
    m["runs"] = runs;
    ctx.finish(m, "manifest_verify.json", pass);
    return pass ? kPass : kGateFailed;
}

int cmd_plot(const CliOptions& opt, std::ostream& log) {
    if (opt.input.empty()) throw ConfigError("plot: --input CSV is required");
    std::ifstream in(opt.input);
    if (!in) throw ConfigError("plot: cannot open '" + opt.input + "'");
    const CsvTable table = read_csv(in);
    const fs::path src(opt.input);
    const fs::path dst = fs::path(opt.out) / (src.stem().string() + ".svg");
    write_file(dst, render_svg(table, src.stem().string()));
    log << "PASS plot -> " << dst.string() << "\n";
    return kPass;
}

}  // namespace

int run(const CliOptions& opt, std::ostream& log) {
    try {
        if (opt.threads < 1) throw ConfigError("--threads: must be >= 1");
        fs::create_directories(opt.out);
        if (opt.command == "plot") return cmd_plot(opt, log);
        if (opt.config.empty()) throw ConfigError("--config: required for '" + opt.command + "'");
        Context ctx{opt, load_config(opt.config), {}, fs::path(opt.out), {}, log};
        if (opt.seed) ctx.cfg.noise.seeds = {*opt.seed};
        ctx.seeds = ctx.cfg.noise.seeds;
        ctx.canonical = to_json(ctx.cfg);
        if (opt.command == "sample-noise") return cmd_sample_noise(ctx);
        if (opt.command == "check-gaps") return cmd_check_gaps(ctx);
        if (opt.command == "solve-manifold") return cmd_solve_manifold(ctx);
        if (opt.command == "solve-foliation") return cmd_solve_foliation(ctx);
        if (opt.command == "intersect") return cmd_intersect(ctx);
        if (opt.command == "verify") return cmd_verify(ctx);
        throw ConfigError("unknown command '" + opt.command + "'");
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const AlignmentError& e) {
        log << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const CoverageError& e) {
        log << "config error (noise window too small): " << e.what() << "\n";
        return kUsage;
    } catch (const AdmissionError& e) {
        log << "gate failed: " << e.what() << "\n";
        return kGateFailed;
    } catch (const CertificationMismatch& e) {
        log << "certification mismatch: " << e.what() << "\n";
        return kGateFailed;
    } catch (const Error& e) {
        log << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace lpm::cli
