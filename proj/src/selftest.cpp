#include "radbound/selftest.hpp"

#include <cmath>
#include <sstream>

#include "radbound/bounds.hpp"
#include "radbound/certify.hpp"
#include "radbound/cover.hpp"
#include "radbound/csv.hpp"
#include "radbound/family.hpp"
#include "radbound/presets.hpp"
#include "radbound/rademacher.hpp"
#include "radbound/rng.hpp"

namespace radbound::selftest {

namespace {

family::ProjectedFamily random_family(std::size_t m, std::size_t n, double b,
                                      std::uint64_t seed) {
    auto g = make_engine(seed, 0xfa311ULL);
    std::vector<double> table(m * n);
    for (double& v : table) v = uniform(g, -b, b);
    return family::make_projected(std::move(table), m, n, b, "selftest");
}

struct Battery {
    std::vector<CheckResult>& out;
    std::uint64_t seed;
    int threads;

    void record(const std::string& name, bool pass, const std::string& detail) {
        out.push_back({name, pass, detail});
    }

    void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        try {
            auto [pass, detail] = fn();
            record(name, pass, detail);
        } catch (const std::exception& e) {
            record(name, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

std::vector<CheckResult> run(std::uint64_t seed, int threads, bool quick) {
    std::vector<CheckResult> results;
    Battery battery{results, seed, threads};
    const std::size_t scale = quick ? 1 : 3;

    battery.check("massart_dominance", [&] {
        std::size_t violations = 0;
        double worst = 0.0;
        for (std::size_t c = 0; c < 12 * scale; ++c) {
            auto g = make_engine(seed, 100 + c);
            const std::size_t m = 2 + uniform_index(g, 20);
            const std::size_t n = 2 + uniform_index(g, 9);
            auto pf = random_family(m, n, 1.0, g());
            for (double r : {0.05, 0.3, 1.0}) {
                const auto est = rad::local_rc_empirical(
                    pf, {r, rad::RadiusKind::Empirical}, rad::EstimateMode::Exact,
                    0, 0, battery.threads);
                const double bound = bounds::massart_bound(pf.m, r, n);
                const double gap = est.mean - bound;
                worst = std::max(worst, gap);
                if (gap > 1e-12) ++violations;
            }
        }
        return std::make_pair(violations == 0,
                              "worst gap " + fmt(worst));
    });

    battery.check("minus_lemma", [&] {
        std::size_t violations = 0;
        for (std::size_t c = 0; c < 10 * scale; ++c) {
            auto g = make_engine(seed, 200 + c);
            const std::size_t m = 2 + uniform_index(g, 3);
            auto pf = random_family(m, 2 + uniform_index(g, 4), 1.0, g());
            const double eps = uniform(g, 0.1, 1.5);
            if (!cover::verify_minus_lemma(pf, eps, 2.0).holds) ++violations;
        }
        return std::make_pair(violations == 0,
                              std::to_string(violations) + " violations");
    });

    battery.check("subfamily_lemma", [&] {
        std::size_t violations = 0;
        for (std::size_t c = 0; c < 10 * scale; ++c) {
            auto g = make_engine(seed, 300 + c);
            const std::size_t m = 3 + uniform_index(g, 8);
            auto pf = random_family(m, 2 + uniform_index(g, 4), 1.0, g());
            std::vector<std::size_t> subset;
            for (std::size_t i = 0; i < pf.m; ++i)
                if (uniform01(g) < 0.5) subset.push_back(i);
            if (subset.empty()) subset.push_back(0);
            const double eps = uniform(g, 0.1, 1.5);
            if (!cover::verify_subfamily_lemma(pf, subset, eps, 2.0).holds)
                ++violations;
        }
        return std::make_pair(violations == 0,
                              std::to_string(violations) + " violations");
    });

    battery.check("contraction", [&] {
        std::size_t violations = 0;
        for (std::size_t c = 0; c < 10 * scale; ++c) {
            auto g = make_engine(seed, 400 + c);
            auto pf = random_family(2 + uniform_index(g, 6),
                                    2 + uniform_index(g, 6), 1.0, g());
            rad::PiecewiseLinearMap phi;
            const std::size_t knots = 3 + uniform_index(g, 4);
            double x = -1.5, y = uniform(g, -1.0, 1.0);
            for (std::size_t k = 0; k < knots; ++k) {
                phi.xs.push_back(x);
                phi.ys.push_back(y);
                x += uniform(g, 0.2, 1.0);
                y += uniform(g, -1.0, 1.0);
            }
            if (!rad::contraction_check(pf, phi).holds) ++violations;
        }
        return std::make_pair(violations == 0,
                              std::to_string(violations) + " violations");
    });

    battery.check("cover_ordering", [&] {
        std::size_t violations = 0;
        for (std::size_t c = 0; c < 10 * scale; ++c) {
            auto g = make_engine(seed, 500 + c);
            auto pf = random_family(3 + uniform_index(g, 10),
                                    2 + uniform_index(g, 5), 1.0, g());
            const double eps = uniform(g, 0.05, 1.0);
            const auto packing = cover::packing_number(pf, eps, 2.0);
            const auto exact =
                cover::covering_number(pf, eps, 2.0, cover::CoverMode::Exact);
            const auto greedy =
                cover::covering_number(pf, eps, 2.0, cover::CoverMode::Greedy);
            if (!(packing.value <= exact.value && exact.value <= greedy.value))
                ++violations;
            // Cover validity: every row within eps of a member.
            const auto result =
                cover::proper_cover(pf, eps, 2.0, cover::CoverMode::Greedy);
            for (std::size_t i = 0; i < pf.m; ++i) {
                double best = 1e300;
                for (std::size_t j : result.member_indices)
                    best = std::min(best, cover::empirical_distance(
                                              pf.row(i), pf.row(j), 2.0));
                if (best > eps) ++violations;
            }
        }
        return std::make_pair(violations == 0,
                              std::to_string(violations) + " violations");
    });

    battery.check("entropy_integral_dominance", [&] {
        std::size_t violations = 0;
        double worst = 0.0;
        for (std::size_t c = 0; c < 8 * scale; ++c) {
            auto g = make_engine(seed, 600 + c);
            auto pf = random_family(2 + uniform_index(g, 10),
                                    2 + uniform_index(g, 7), 1.0, g());
            const double exact_rc = rad::rc_exact_full(pf);
            double max_norm = 0.0;
            for (std::size_t i = 0; i < pf.m; ++i) {
                double acc = 0.0;
                for (double v : pf.row(i)) acc += v * v;
                max_norm = std::max(max_norm,
                                    std::sqrt(acc / static_cast<double>(pf.n)));
            }
            for (std::size_t levels : {0u, 2u, 4u}) {
                bounds::ChainPlan plan{std::max(max_norm, 1e-9), levels, {}};
                const double bound = bounds::entropy_integral_bound(
                    bounds::EntropySource::empirical(pf, cover::CoverMode::Exact),
                    plan, pf.n);
                worst = std::max(worst, exact_rc - bound);
                if (exact_rc > bound + 1e-12) ++violations;
            }
        }
        return std::make_pair(violations == 0, "worst gap " + fmt(worst));
    });

    battery.check("lemma31_dominance", [&] {
        std::size_t violations = 0;
        for (std::size_t c = 0; c < 6 * scale; ++c) {
            auto g = make_engine(seed, 700 + c);
            auto pf = random_family(2 + uniform_index(g, 5),
                                    2 + uniform_index(g, 7), 1.0, g());
            auto grid = bounds::log_grid(0.05, 2.0, 8);
            for (double r : {0.1, 0.5}) {
                const auto lhs = rad::local_rc_empirical(
                    pf, {r, rad::RadiusKind::Empirical}, rad::EstimateMode::Exact,
                    0, 0, battery.threads);
                const auto bound = bounds::lemma31_bound(pf, r, grid, seed);
                if (lhs.mean > bound.value + 1e-12) ++violations;
            }
        }
        return std::make_pair(violations == 0,
                              std::to_string(violations) + " violations");
    });

    battery.check("fixed_point_algebra", [&] {
        certify::SubRootProbe probe;
        probe.psi = [](double r) { return 0.01 + std::sqrt(0.04 * r); };
        probe.grid = bounds::log_grid(1e-10, 1.0, 25);
        const auto fp = certify::fixed_point(probe, 1e-12);
        const double closed = std::pow(0.2 + std::sqrt(0.08), 2) / 4.0;
        const double rel = std::abs(fp.r_star - closed) / closed;
        bool pass = rel <= 1e-10;
        // Monotonicity of fixed points under pointwise-ordered psi pairs.
        auto g = make_engine(seed, 800);
        for (int c = 0; c < 10 && pass; ++c) {
            const double a1 = uniform(g, 0.001, 0.05);
            const double b1 = uniform(g, 0.001, 0.5);
            const double a2 = a1 + uniform(g, 0.0, 0.05);
            const double b2 = b1 + uniform(g, 0.0, 0.5);
            certify::SubRootProbe p1, p2;
            p1.psi = [a1, b1](double r) { return a1 + std::sqrt(b1 * r); };
            p2.psi = [a2, b2](double r) { return a2 + std::sqrt(b2 * r); };
            p1.grid = p2.grid = bounds::log_grid(1e-10, 4.0, 25);
            if (certify::fixed_point(p1, 1e-12).r_star >
                certify::fixed_point(p2, 1e-12).r_star + 1e-10)
                pass = false;
        }
        return std::make_pair(pass, "relative error " + fmt(rel));
    });

    battery.check("remark35_inequalities", [&] {
        auto r_grid = bounds::log_grid(1e-8, 1.0, 40);
        for (double p : {0.5, 1.0, 1.5}) {
            for (std::size_t n : {100ul, 10000ul}) {
                auto report = bounds::compare_remark35(p, n, r_grid);
                if (!report.all_hold)
                    return std::make_pair(false, "violated at p=" + fmt(p));
            }
        }
        return std::make_pair(true, std::string("all points hold"));
    });

    battery.check("baseline_divergence", [&] {
        double prev_lp = 0.0, prev_pl = 0.0;
        bool increasing = true;
        for (int k = 1; k <= 6; ++k) {
            const double r = std::pow(10.0, -2.0 * k);
            const double lp =
                bounds::mendelson_logpoly(1.0, 1.0, 1.0, 1.0, r, 100, {});
            const double pl = bounds::mendelson_polylog(1.0, 1.0, r, 100, {});
            if (k > 1 && (lp <= prev_lp || pl <= prev_pl)) increasing = false;
            prev_lp = lp;
            prev_pl = pl;
        }
        return std::make_pair(increasing, std::string("strictly increasing"));
    });

    battery.check("curve_diagnostics", [&] {
        auto r_grid = bounds::log_grid(1e-8, 1.0, 25);
        const cover::LogPoly lp{1.0, 1.0, 1.0};
        auto curve = bounds::make_curve("cor33_branch2", "", r_grid, [&](double r) {
            return bounds::cor33_branch2(lp, 1.0, r, 100, {});
        });
        auto diag = bounds::curve_diagnostics(curve);
        bool pass = diag.monotone_nondecreasing && diag.subroot &&
                    diag.r_to_zero == bounds::LimitKind::Bounded;
        auto baseline_grid = bounds::log_grid(1e-8, 0.5, 25);
        auto mend = bounds::make_curve("mendelson_logpoly", "", baseline_grid,
                                       [&](double r) {
                                           return bounds::mendelson_logpoly(
                                               1.0, 1.0, 1.0, 1.0, r, 100, {});
                                       });
        pass = pass && bounds::curve_diagnostics(mend).r_to_zero ==
                           bounds::LimitKind::DivergesAsRToZero;
        return std::make_pair(pass, std::string("shape checks"));
    });

    battery.check("theorem32_dominance_quick", [&] {
        const auto spec = presets::make_preset("finite");
        rad::PopulationOptions opt;
        opt.outer_draws = quick ? 40 : 120;
        opt.sign_draws = quick ? 200 : 1000;
        opt.threads = battery.threads;
        const double radii[2] = {0.05, 0.5};
        const auto estimates =
            rad::local_rc_population_multi(spec, radii, 8, opt, seed + 11);
        auto eps_grid = bounds::log_grid(1e-3, 2.0 * spec.declared_regime.validity_cap(), 33);
        std::size_t violations = 0;
        double min_margin = 1e300;
        for (std::size_t k = 0; k < 2; ++k) {
            const auto bound = bounds::theorem32_analytic(
                spec.declared_regime, radii[k], spec.sup_bound(), 8, eps_grid);
            const double margin =
                bound.value - estimates[k].mean + 3.0 * estimates[k].stderr_;
            min_margin = std::min(min_margin, margin);
            if (margin < 0) ++violations;
        }
        return std::make_pair(violations == 0, "min margin " + fmt(min_margin));
    });

    battery.check("population_determinism", [&] {
        const auto spec = presets::make_preset("finite");
        rad::PopulationOptions opt;
        opt.outer_draws = 10;
        opt.sign_draws = 50;
        opt.threads = 1;
        const auto a = rad::local_rc_population(spec, 0.3, 8, opt, seed);
        opt.threads = 4;
        const auto b = rad::local_rc_population(spec, 0.3, 8, opt, seed);
        const bool pass = a.mean == b.mean && a.stderr_ == b.stderr_;
        return std::make_pair(pass, "mean " + fmt(a.mean));
    });

    return results;
}

}  // namespace radbound::selftest
