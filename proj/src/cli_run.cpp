#include "radbound/cli_run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "radbound/bounds.hpp"
#include "radbound/certify.hpp"
#include "radbound/cover.hpp"
#include "radbound/csv.hpp"
#include "radbound/family.hpp"
#include "radbound/presets.hpp"
#include "radbound/rademacher.hpp"
#include "radbound/selftest.hpp"
#include "radbound/version.hpp"

namespace radbound::cli {

namespace fs = std::filesystem;

namespace {

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Config readers
// ---------------------------------------------------------------------------

cover::EntropyRegime parse_regime(const config::Config& cfg,
                                  const std::string& section) {
    const std::string kind = cfg.get(section, "regime");
    if (kind == "logpoly")
        return cover::LogPoly{cfg.number(section, "d"), cfg.number(section, "p"),
                              cfg.number(section, "gamma")};
    if (kind == "polylog")
        return cover::PolyLog{cfg.number(section, "gamma"),
                              cfg.number(section, "p")};
    if (kind == "poly")
        return cover::Poly{cfg.number(section, "gamma"), cfg.number(section, "p")};
    throw config::ConfigError(
        {"key '" + section + ".regime' must be logpoly, polylog or poly"});
}

family::FunctionFamilySpec parse_family(const config::Config& cfg) {
    const std::string variant = cfg.get("family", "variant");
    if (variant == "preset")
        return presets::make_preset(cfg.get("family", "name"));
    family::FunctionFamilySpec spec;
    if (variant == "finite_random") {
        spec.variant = family::FiniteRandom{
            cfg.integer("family", "m"), cfg.number_or("family", "b", 1.0),
            cfg.integer_or("family", "seed", 0),
            cfg.integer_or("family", "cells", 16)};
    } else if (variant == "linear_ball") {
        spec.variant = family::LinearBall{
            cfg.integer("family", "dim"), cfg.number_or("family", "radius", 1.0),
            cfg.integer("family", "count"), cfg.number_or("family", "b", 1.0)};
    } else if (variant == "lipschitz_ball") {
        spec.variant = family::LipschitzBall{
            cfg.number_or("family", "lipschitz", 1.0),
            cfg.number_or("family", "b", 1.0),
            cfg.integer("family", "resolution")};
    } else {
        throw config::ConfigError({"family.variant must be preset, "
                                   "finite_random, linear_ball or "
                                   "lipschitz_ball"});
    }
    spec.declared_regime = parse_regime(cfg, "family");
    spec.validate();
    return spec;
}

bounds::ConstantMode parse_cmode(const config::Config& cfg,
                                 const std::string& section) {
    const std::string kind = cfg.get_or(section, "constants", "unit");
    if (kind == "unit") return {bounds::ConstantKind::Unit, 1.0};
    if (kind == "traced") return {bounds::ConstantKind::Traced, 1.0};
    if (kind == "user")
        return {bounds::ConstantKind::User, cfg.number(section, "constant")};
    throw config::ConfigError(
        {"key '" + section + ".constants' must be unit, traced or user"});
}

std::string out_path(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_sample(const config::Config& cfg, const std::string& out_dir,
               std::uint64_t seed, std::vector<std::string>& outputs) {
    family::SamplePlan plan{cfg.integer("sample", "n"),
                            cfg.integer_or("sample", "dim", 1),
                            cfg.integer_or("sample", "seed", seed)};
    const auto sample = family::draw_sample(plan);
    std::vector<std::string> header{"index"};
    for (std::size_t d = 0; d < sample.dim; ++d)
        header.push_back("coord" + std::to_string(d));
    csv::Writer out(out_path(out_dir, "sample.csv"), header);
    for (std::size_t i = 0; i < sample.n; ++i) {
        std::vector<std::string> row{csv::cell(i)};
        for (double c : sample.point(i)) row.push_back(csv::cell(c));
        out.row(row);
    }
    out.close();
    outputs.push_back(out.path());
    return 0;
}

int cmd_cover(const config::Config& cfg, const std::string& out_dir,
              std::uint64_t seed, std::vector<std::string>& outputs) {
    const auto spec = parse_family(cfg);
    family::SamplePlan plan{cfg.integer("sample", "n"), spec.domain_dim(),
                            cfg.integer_or("sample", "seed", seed)};
    const auto pf = family::project(spec, family::draw_sample(plan));
    const auto grid = cfg.grid("cover", "eps_grid");
    const double q = cfg.number_or("cover", "q", 2.0);
    const std::string mode_name = cfg.get_or("cover", "mode", "greedy");
    const auto mode = mode_name == "exact" ? cover::CoverMode::Exact
                                           : cover::CoverMode::Greedy;
    csv::Writer out(out_path(out_dir, "cover.csv"),
                    {"family_id", "eps", "q", "mode", "count"});
    for (double eps : grid) {
        const auto count = cover::covering_number(pf, eps, q, mode);
        out.row({spec.id(), csv::cell(eps), csv::cell(q),
                 cover::to_string(count.kind), csv::cell(count.value)});
    }
    out.close();
    outputs.push_back(out.path());
    return 0;
}

int cmd_rc(const config::Config& cfg, const std::string& out_dir,
           std::uint64_t seed, int threads, std::vector<std::string>& outputs) {
    const auto spec = parse_family(cfg);
    const auto grid = cfg.grid("rc", "r_grid");
    const std::size_t n = cfg.integer("rc", "n");
    const std::string kind = cfg.get_or("rc", "kind", "empirical");
    csv::Writer out(out_path(out_dir, "rc.csv"),
                    {"seed", "n", "m", "r", "kind", "mode", "mean", "stderr",
                     "draws"});
    if (kind == "population") {
        rad::PopulationOptions opt;
        opt.outer_draws = cfg.integer_or("rc", "outer_draws", 200);
        opt.sign_draws = cfg.integer_or("rc", "sign_draws", 2000);
        opt.ghost_n = cfg.integer_or("rc", "ghost_n", 0);
        opt.threads = threads;
        const auto estimates =
            rad::local_rc_population_multi(spec, grid, n, opt, seed);
        family::FamilyEvaluator ev(spec);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out.row({csv::cell(seed), csv::cell(n), csv::cell(ev.member_count()),
                     csv::cell(grid[k]), "population", "monte-carlo",
                     csv::cell(estimates[k].mean), csv::cell(estimates[k].stderr_),
                     csv::cell(estimates[k].draws)});
        }
    } else if (kind == "empirical") {
        family::SamplePlan plan{n, spec.domain_dim(),
                                cfg.integer_or("sample", "seed", seed)};
        const auto pf = family::project(spec, family::draw_sample(plan));
        const std::string mode_name = cfg.get_or("rc", "mode", "auto");
        const bool exact = mode_name == "exact" ||
                           (mode_name == "auto" && n <= rad::kExactSignLimit);
        const std::uint64_t draws = cfg.integer_or("rc", "draws", 2000);
        for (double r : grid) {
            const auto est = rad::local_rc_empirical(
                pf, {r, rad::RadiusKind::Empirical},
                exact ? rad::EstimateMode::Exact : rad::EstimateMode::MonteCarlo,
                draws, seed, threads);
            out.row({csv::cell(seed), csv::cell(n), csv::cell(pf.m),
                     csv::cell(r), "empirical",
                     exact ? "exact" : "monte-carlo", csv::cell(est.mean),
                     csv::cell(est.stderr_), csv::cell(est.draws)});
        }
    } else {
        throw config::ConfigError({"rc.kind must be empirical or population"});
    }
    out.close();
    outputs.push_back(out.path());
    return 0;
}

double evaluate_bound(const std::string& name, const config::Config& cfg,
                      const bounds::ConstantMode& cmode, double r,
                      std::size_t n) {
    const double b = cfg.number_or("bound", "b", 1.0);
    if (name == "massart")
        return bounds::massart_bound(cfg.integer("bound", "cardinality"), r, n);
    if (name == "cor33")
        return bounds::cor33_bound(
            cover::LogPoly{cfg.number("bound", "d"), cfg.number("bound", "p"),
                           cfg.number("bound", "gamma")},
            b, r, n, cmode);
    if (name == "cor33_branch2")
        return bounds::cor33_branch2(
            cover::LogPoly{cfg.number("bound", "d"), cfg.number("bound", "p"),
                           cfg.number("bound", "gamma")},
            b, r, n, cmode);
    if (name == "cor34")
        return bounds::cor34_bound(
            cover::PolyLog{cfg.number("bound", "gamma"), cfg.number("bound", "p")},
            b, r, n, cmode);
    if (name == "cor35")
        return bounds::cor35_bound(
            cover::Poly{cfg.number("bound", "gamma"), cfg.number("bound", "p")},
            b, r, n, cmode);
    if (name == "mendelson_logpoly")
        return bounds::mendelson_logpoly(cfg.number("bound", "d"),
                                         cfg.number("bound", "p"),
                                         cfg.number("bound", "gamma"), b, r, n,
                                         cmode);
    if (name == "mendelson_poly")
        return bounds::mendelson_poly(cfg.number("bound", "p"), b, r, n, cmode);
    if (name == "mendelson_polylog")
        return bounds::mendelson_polylog(cfg.number("bound", "p"), b, r, n,
                                         cmode);
    if (name == "theorem32") {
        const auto regime = parse_regime(cfg, "bound");
        auto eps_grid = cfg.has("bound", "eps_grid")
                            ? cfg.grid("bound", "eps_grid")
                            : bounds::log_grid(
                                  1e-4,
                                  std::min(2.0 * regime.validity_cap(), 8.0), 33);
        return bounds::theorem32_analytic(regime, r, b, n, eps_grid).value;
    }
    throw config::ConfigError({"unknown bound name '" + name + "'"});
}

int cmd_bound(const config::Config& cfg, const std::string& out_dir,
              std::vector<std::string>& outputs) {
    const std::string name = cfg.get("bound", "name");
    const auto cmode = parse_cmode(cfg, "bound");
    const auto grid = cfg.grid("bound", "r_grid");
    const std::size_t n = cfg.integer("bound", "n");
    csv::Writer out(out_path(out_dir, "bound.csv"),
                    {"bound_name", "params_hash", "r", "value"});
    const std::string hash = cfg.canonical_hash();
    for (double r : grid)
        out.row({name, hash, csv::cell(r),
                 csv::cell(evaluate_bound(name, cfg, cmode, r, n))});
    out.close();
    outputs.push_back(out.path());
    return 0;
}

int cmd_compare(const config::Config& cfg, const std::string& out_dir,
                std::vector<std::string>& outputs) {
    const std::string ours_name = cfg.get("compare", "ours");
    const std::string baseline_name = cfg.get("compare", "baseline");
    const auto cmode = parse_cmode(cfg, "compare");
    const auto grid = cfg.grid("compare", "r_grid");
    const std::size_t n = cfg.integer("compare", "n");

    // Bound parameters come from the shared [bound] section.
    csv::Writer out(out_path(out_dir, "compare.csv"),
                    {"r", "ours", "baseline", "ratio"});
    std::vector<bounds::BoundPoint> ours_points;
    bool ok = true;
    for (double r : grid) {
        const double ours = evaluate_bound(ours_name, cfg, cmode, r, n);
        const double baseline = evaluate_bound(baseline_name, cfg, cmode, r, n);
        ours_points.push_back({r, ours});
        out.row({csv::cell(r), csv::cell(ours), csv::cell(baseline),
                 csv::cell(baseline > 0 ? ours / baseline : 0.0)});
    }
    out.close();
    outputs.push_back(out.path());

    if (cfg.get_or("compare", "require_ours_subroot", "false") == "true") {
        bounds::BoundCurve curve{ours_name, "", ours_points};
        const auto diag = bounds::curve_diagnostics(curve);
        ok = diag.subroot && diag.monotone_nondecreasing;
    }
    if (cfg.get_or("compare", "require_ours_below", "false") == "true") {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double baseline =
                evaluate_bound(baseline_name, cfg, cmode, grid[i], n);
            if (ours_points[i].value > baseline) ok = false;
        }
    }
    return ok ? 0 : 1;
}

int cmd_fixpoint(const config::Config& cfg, const std::string& out_dir,
                 std::vector<std::string>& outputs) {
    const std::string psi_name = cfg.get("fixpoint", "psi");
    certify::SubRootProbe probe;
    if (psi_name == "affine_sqrt") {
        const double a = cfg.number("fixpoint", "a");
        const double b = cfg.number("fixpoint", "b");
        probe.psi = [a, b](double r) { return a + std::sqrt(b * r); };
    } else if (psi_name == "cor33_branch2") {
        const cover::LogPoly regime{cfg.number("fixpoint", "d"),
                                    cfg.number("fixpoint", "p"),
                                    cfg.number("fixpoint", "gamma")};
        const auto cmode = parse_cmode(cfg, "fixpoint");
        const std::size_t n = cfg.integer("fixpoint", "n");
        const double b = cfg.number_or("fixpoint", "bound_b", 1.0);
        probe.psi = [=](double r) {
            return bounds::cor33_branch2(regime, b, r, n, cmode);
        };
    } else {
        throw config::ConfigError(
            {"fixpoint.psi must be affine_sqrt or cor33_branch2"});
    }
    probe.grid = cfg.has("fixpoint", "grid") ? cfg.grid("fixpoint", "grid")
                                             : bounds::log_grid(1e-10, 4.0, 33);
    const double tolerance = cfg.number_or("fixpoint", "tolerance", 1e-12);
    const auto fp = certify::fixed_point(probe, tolerance);
    csv::Writer out(out_path(out_dir, "fixpoint.csv"),
                    {"psi", "r_star", "residual", "iterations"});
    out.row({psi_name, csv::cell(fp.r_star), csv::cell(fp.residual),
             csv::cell(fp.iterations)});
    out.close();
    outputs.push_back(out.path());
    return 0;
}

int cmd_certify(const config::Config& cfg, const std::string& out_dir,
                std::vector<std::string>& outputs) {
    const std::string kind = cfg.get_or("certify", "kind", "logpoly");
    certify::CertificateParams params;
    params.B = cfg.number("certify", "B");
    params.K = cfg.number("certify", "K");
    params.delta = cfg.number("certify", "delta");
    params.range_width = cfg.number("certify", "range_width");
    params.L = cfg.number_or("certify", "L", 1.0);
    params.b = cfg.number_or("certify", "b", 1.0);
    params.regime = parse_regime(cfg, "certify");
    const auto cmode = parse_cmode(cfg, "certify");
    const auto raw_grid = cfg.grid("certify", "n_grid");

    csv::Writer out(out_path(out_dir, "certify.csv"),
                    {"n", "delta", "K", "B", "r_star", "empirical_term",
                     "fixed_point_term", "confidence_term", "total"});
    for (double n_raw : raw_grid) {
        const std::size_t n = static_cast<std::size_t>(std::llround(n_raw));
        certify::GeneralizationCertificate cert;
        if (kind == "logpoly") {
            cert = certify::certificate_logpoly(params, n, cmode);
        } else if (kind == "polylog") {
            cert = certify::certificate_polylog(params, n, cmode).certificate;
        } else {
            throw config::ConfigError({"certify.kind must be logpoly or polylog"});
        }
        out.row({csv::cell(n), csv::cell(params.delta), csv::cell(params.K),
                 csv::cell(params.B), csv::cell(cert.r_star),
                 csv::cell(cert.empirical_term), csv::cell(cert.fixed_point_term),
                 csv::cell(cert.confidence_term), csv::cell(cert.total)});
    }
    out.close();
    outputs.push_back(out.path());
    return 0;
}

int cmd_experiment(const config::Config& cfg, const std::string& out_dir,
                   std::uint64_t seed, int threads,
                   std::vector<std::string>& outputs) {
    auto preset = presets::make_erm_preset();
    const std::size_t n = cfg.integer("experiment", "n");
    const std::size_t trials = cfg.integer("experiment", "trials");
    const double K = cfg.number_or("experiment", "K", 2.0);
    const double delta = cfg.number_or("experiment", "delta", 0.05);
    preset.ghost_n = cfg.integer_or("experiment", "ghost_n", preset.ghost_n);
    const auto params = preset.certificate_params(K, delta);
    const auto cmode = parse_cmode(cfg, "experiment");
    const auto report =
        certify::erm_experiment(preset, n, trials, params, seed, cmode, threads);

    csv::Writer out(out_path(out_dir, "experiment.csv"),
                    {"trial", "seed", "excess_risk", "certificate", "holds"});
    for (std::size_t t = 0; t < report.trials.size(); ++t) {
        const auto& trial = report.trials[t];
        out.row({csv::cell(t), csv::cell(trial.seed),
                 csv::cell(trial.excess_risk), csv::cell(trial.certificate),
                 csv::cell(trial.holds)});
    }
    out.close();
    outputs.push_back(out.path());
    return report.coverage >= 1.0 - delta ? 0 : 1;
}

int cmd_selftest(const config::Config& cfg, const std::string& out_dir,
                 std::uint64_t seed, int threads,
                 std::vector<std::string>& outputs) {
    const bool quick = cfg.get_or("selftest", "level", "full") == "quick";
    const auto results = selftest::run(seed, threads, quick);
    csv::Writer out(out_path(out_dir, "selftest.csv"),
                    {"check", "status", "detail"});
    bool all_pass = true;
    for (const auto& result : results) {
        out.row({result.name, result.pass ? "pass" : "fail", result.detail});
        all_pass = all_pass && result.pass;
    }
    out.close();
    outputs.push_back(out.path());
    return all_pass ? 0 : 1;
}

}  // namespace

RunResult run_command(const std::string& command, config::Config& cfg,
                      const std::string& out_dir, std::uint64_t seed,
                      bool seed_overridden, int threads, bool strict) {
    RunResult result;
    const std::string started = iso8601_now();
    fs::create_directories(out_dir);

    if (!seed_overridden) {
        if (!cfg.has("run", "seed"))
            throw config::ConfigError(
                {"missing required key 'run.seed' (no wall-clock default; pass "
                 "--seed or set it)"});
        seed = cfg.integer("run", "seed");
    } else if (cfg.has("run", "seed")) {
        cfg.integer("run", "seed");  // mark read; the flag wins
    }

    if (command == "sample")
        result.exit_code = cmd_sample(cfg, out_dir, seed, result.outputs);
    else if (command == "cover")
        result.exit_code = cmd_cover(cfg, out_dir, seed, result.outputs);
    else if (command == "rc")
        result.exit_code = cmd_rc(cfg, out_dir, seed, threads, result.outputs);
    else if (command == "bound")
        result.exit_code = cmd_bound(cfg, out_dir, result.outputs);
    else if (command == "compare")
        result.exit_code = cmd_compare(cfg, out_dir, result.outputs);
    else if (command == "fixpoint")
        result.exit_code = cmd_fixpoint(cfg, out_dir, result.outputs);
    else if (command == "certify")
        result.exit_code = cmd_certify(cfg, out_dir, result.outputs);
    else if (command == "experiment")
        result.exit_code =
            cmd_experiment(cfg, out_dir, seed, threads, result.outputs);
    else if (command == "selftest")
        result.exit_code =
            cmd_selftest(cfg, out_dir, seed, threads, result.outputs);
    else
        throw config::ConfigError({"unknown command '" + command + "'"});

    if (strict) {
        const auto unread = cfg.unread_keys();
        if (!unread.empty()) {
            std::vector<std::string> items;
            items.reserve(unread.size());
            for (const auto& key : unread)
                items.push_back("unknown key '" + key + "'");
            throw config::ConfigError(items);
        }
    }

    // One JSON-lines manifest record per run.
    nlohmann::json manifest{{"tool", "radbound"},
                            {"version", kVersion},
                            {"command", command},
                            {"config_hash", cfg.canonical_hash()},
                            {"seed", seed},
                            {"started", started},
                            {"finished", iso8601_now()},
                            {"outputs", result.outputs}};
    std::ofstream mf(out_path(out_dir, "manifest.jsonl"), std::ios::app);
    mf << manifest.dump() << "\n";
    return result;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"radbound: local complexity bounds laboratory"};
    app.set_version_flag("--version", kVersion);
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    bool strict = true;

    app.add_option("command", command,
                   "sample | cover | rc | bound | compare | fixpoint | certify "
                   "| experiment | selftest")
        ->required();
    app.add_option("--config", config_path, "configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);
    app.add_flag("--strict,!--no-strict", strict,
                 "reject unknown configuration keys (default on)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    seed_given = seed_opt->count() > 0;

    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot read config file: " << config_path << "\n";
                return 2;
            }
            std::stringstream buffer;
            buffer << in.rdbuf();
            text = buffer.str();
        }
        auto cfg = config::Config::parse(text);
        const auto result = run_command(command, cfg, out_dir, seed, seed_given,
                                        threads, strict);
        return result.exit_code;
    } catch (const config::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace radbound::cli
