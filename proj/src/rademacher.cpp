#include "radbound/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "radbound/parallel.hpp"
#include "radbound/rng.hpp"

namespace radbound::rad {

namespace {

double row_mean_square(std::span<const double> row) {
    double acc = 0.0;
    for (double v : row) acc += v * v;
    return acc / static_cast<double>(row.size());
}

std::vector<std::size_t> feasible_rows_empirical(
    const family::ProjectedFamily& pf, double r) {
    std::vector<std::size_t> feasible;
    for (std::size_t i = 0; i < pf.m; ++i)
        if (row_mean_square(pf.row(i)) <= r) feasible.push_back(i);
    return feasible;
}

struct MeanStderr {
    double mean = 0.0;
    double se = 0.0;
};

MeanStderr mean_stderr(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

SupResult sup_signed_mean(const family::ProjectedFamily& pf,
                          std::span<const int> signs,
                          std::span<const std::size_t> feasible) {
    if (signs.size() != pf.n)
        throw std::invalid_argument("sup_signed_mean: sign vector length != n");
    SupResult result;
    for (std::size_t i : feasible) {
        auto row = pf.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < pf.n; ++j) acc += signs[j] * row[j];
        acc /= static_cast<double>(pf.n);
        if (!result.argmax || acc > result.value) {
            result.value = acc;
            result.argmax = i;
        }
    }
    if (!result.argmax) result.value = 0.0;  // empty feasible set convention
    return result;
}

namespace {

// sup over `rows` (given as indices into pf) of the signed mean for the sign
// pattern encoded in the bits of `mask`.
double sup_for_mask(const family::ProjectedFamily& pf,
                    std::span<const std::size_t> rows, std::uint64_t mask) {
    double best = 0.0;
    bool any = false;
    for (std::size_t i : rows) {
        auto row = pf.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < pf.n; ++j)
            acc += (mask >> j & 1) ? row[j] : -row[j];
        if (!any || acc > best) {
            best = acc;
            any = true;
        }
    }
    return any ? best / static_cast<double>(pf.n) : 0.0;
}

}  // namespace

ComplexityEstimate local_rc_empirical(const family::ProjectedFamily& pf,
                                      RadiusSpec radius, EstimateMode mode,
                                      std::uint64_t draws, std::uint64_t seed,
                                      int threads) {
    pf.validate();
    if (radius.r < 0)
        throw std::invalid_argument("local_rc_empirical: r must be >= 0");
    if (radius.kind != RadiusKind::Empirical)
        throw std::invalid_argument(
            "local_rc_empirical: radius must be empirical; use "
            "local_rc_population for population radii");
    const auto feasible = feasible_rows_empirical(pf, radius.r);

    ComplexityEstimate est;
    est.mode = mode;
    est.feasible_count = feasible.size();
    est.empty_feasible = feasible.empty();

    if (mode == EstimateMode::Exact) {
        if (pf.n > kExactSignLimit)
            throw std::invalid_argument(
                "local_rc_empirical: exact mode requires n <= " +
                std::to_string(kExactSignLimit));
        const std::uint64_t total = 1ULL << pf.n;
        est.draws = total;
        if (feasible.empty()) return est;
        // Fixed chunk count: the summation grouping must not depend on the
        // worker count or results drift in the last ulp across thread counts.
        std::vector<double> partial(std::min<std::uint64_t>(64, total));
        const std::size_t chunks = partial.size();
        parallel_for(chunks, threads, [&](std::size_t c) {
            double acc = 0.0;
            for (std::uint64_t mask = c; mask < total; mask += chunks)
                acc += sup_for_mask(pf, feasible, mask);
            partial[c] = acc;
        });
        est.mean = std::accumulate(partial.begin(), partial.end(), 0.0) /
                   static_cast<double>(total);
        return est;
    }

    if (draws < 2)
        throw std::invalid_argument("local_rc_empirical: need draws >= 2");
    est.draws = draws;
    if (feasible.empty()) return est;
    std::vector<double> values(draws);
    parallel_for(draws, threads, [&](std::size_t t) {
        auto g = make_engine(seed, t);
        std::uint64_t mask = g();
        if (pf.n > 64) throw std::logic_error("n > 64 unsupported");
        values[t] = sup_for_mask(pf, feasible, mask);
    });
    auto ms = mean_stderr(values);
    est.mean = ms.mean;
    est.stderr_ = ms.se;
    return est;
}

double rc_exact_full(const family::ProjectedFamily& pf) {
    std::vector<std::size_t> all(pf.m);
    std::iota(all.begin(), all.end(), 0);
    if (pf.n > kExactSignLimit)
        throw std::invalid_argument("rc_exact_full: n too large for enumeration");
    const std::uint64_t total = 1ULL << pf.n;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask)
        acc += sup_for_mask(pf, all, mask);
    return acc / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Population estimators
// ---------------------------------------------------------------------------

namespace {

struct GhostInfo {
    std::vector<double> second_moments;   // P f^2 estimates per member
    std::vector<double> first_moments;    // P f estimates per member
    std::vector<std::size_t> by_moment;   // members sorted by second moment
};

GhostInfo ghost_moments(const family::FamilyEvaluator& ev, std::size_t ghost_n,
                        std::uint64_t seed) {
    GhostInfo info;
    const std::size_t m = ev.member_count();
    info.second_moments.assign(m, 0.0);
    info.first_moments.assign(m, 0.0);
    family::SamplePlan plan{ghost_n, ev.domain_dim(), seed};
    const auto ghost = family::draw_sample(plan);
    for (std::size_t j = 0; j < ghost.n; ++j) {
        const auto x = ghost.point(j);
        for (std::size_t i = 0; i < m; ++i) {
            const double v = ev.eval(i, x);
            info.first_moments[i] += v;
            info.second_moments[i] += v * v;
        }
    }
    const double inv = 1.0 / static_cast<double>(ghost.n);
    for (std::size_t i = 0; i < m; ++i) {
        info.first_moments[i] *= inv;
        info.second_moments[i] *= inv;
    }
    info.by_moment.resize(m);
    std::iota(info.by_moment.begin(), info.by_moment.end(), 0);
    std::stable_sort(info.by_moment.begin(), info.by_moment.end(),
                     [&](std::size_t a, std::size_t b) {
                         return info.second_moments[a] < info.second_moments[b];
                     });
    return info;
}

std::uint64_t ghost_seed(std::uint64_t seed) {
    std::uint64_t s = seed ^ 0x67686f7374ULL;  // distinct stream for the ghost
    return splitmix64(s);
}

}  // namespace

std::vector<ComplexityEstimate> local_rc_population_multi(
    const family::FunctionFamilySpec& spec, std::span<const double> radii,
    std::size_t n, const PopulationOptions& opt, std::uint64_t seed) {
    spec.validate();
    if (radii.empty())
        throw std::invalid_argument("local_rc_population: empty radius list");
    if (n < 1) throw std::invalid_argument("local_rc_population: n must be >= 1");
    const std::size_t ghost_n = opt.ghost_n ? opt.ghost_n : 100 * n;
    family::FamilyEvaluator ev(spec);
    const auto ghost = ghost_moments(ev, ghost_n, ghost_seed(seed));
    const std::size_t m = ev.member_count();

    // feasible_counts[k] = how many of the sorted members satisfy P f^2 <= r_k.
    std::vector<std::size_t> feasible_counts(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
        std::size_t c = 0;
        while (c < m && ghost.second_moments[ghost.by_moment[c]] <= radii[k]) ++c;
        feasible_counts[k] = c;
    }
    std::vector<std::size_t> order(radii.size());  // radii in feasible order
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return feasible_counts[a] < feasible_counts[b];
    });
    const std::size_t max_c =
        *std::max_element(feasible_counts.begin(), feasible_counts.end());

    // Per outer sample: mean over sign draws of the prefix-max signed means,
    // one prefix per radius (feasible sets are nested).
    std::vector<std::vector<double>> sample_means(
        radii.size(), std::vector<double>(opt.outer_draws, 0.0));
    parallel_for(opt.outer_draws, opt.threads, [&](std::size_t t) {
        std::uint64_t s = seed + 0x9e3779b97f4a7c15ULL * (2 * t + 1);
        family::SamplePlan plan{n, ev.domain_dim(), splitmix64(s)};
        const auto sample = family::draw_sample(plan);
        // Member values row-major in sorted-by-moment order.
        std::vector<double> rows(max_c * n);
        for (std::size_t i = 0; i < max_c; ++i)
            for (std::size_t j = 0; j < n; ++j)
                rows[i * n + j] = ev.eval(ghost.by_moment[i], sample.point(j));

        auto g = make_engine(seed, 2 * t + 2);
        std::vector<double> acc(radii.size(), 0.0);
        std::vector<double> signed_means(max_c);
        std::vector<int> signs(n);
        for (std::size_t s_draw = 0; s_draw < opt.sign_draws; ++s_draw) {
            for (std::size_t j = 0; j < n; ++j) signs[j] = rademacher_sign(g);
            for (std::size_t i = 0; i < max_c; ++i) {
                double dot = 0.0;
                const double* row = rows.data() + i * n;
                for (std::size_t j = 0; j < n; ++j) dot += signs[j] * row[j];
                signed_means[i] = dot / static_cast<double>(n);
            }
            double running = 0.0;
            std::size_t pos = 0;
            for (std::size_t k : order) {
                const std::size_t c = feasible_counts[k];
                for (; pos < c; ++pos)
                    running = pos == 0 ? signed_means[0]
                                       : std::max(running, signed_means[pos]);
                acc[k] += c == 0 ? 0.0 : running;
            }
        }
        for (std::size_t k = 0; k < radii.size(); ++k)
            sample_means[k][t] = acc[k] / static_cast<double>(opt.sign_draws);
    });

    std::vector<ComplexityEstimate> out(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
        auto ms = mean_stderr(sample_means[k]);
        out[k].mode = EstimateMode::MonteCarlo;
        out[k].mean = ms.mean;
        out[k].stderr_ = ms.se;
        out[k].draws = static_cast<std::uint64_t>(opt.outer_draws) *
                       static_cast<std::uint64_t>(opt.sign_draws);
        out[k].feasible_count = feasible_counts[k];
        out[k].empty_feasible = feasible_counts[k] == 0;
        if (out[k].empty_feasible) {
            out[k].mean = 0.0;
            out[k].stderr_ = 0.0;
        }
    }
    return out;
}

ComplexityEstimate local_rc_population(const family::FunctionFamilySpec& spec,
                                       double r, std::size_t n,
                                       const PopulationOptions& opt,
                                       std::uint64_t seed) {
    const double radii[1] = {r};
    return local_rc_population_multi(spec, radii, n, opt, seed)[0];
}

RadiusResult empirical_radius(const family::FunctionFamilySpec& spec,
                              const family::EmpiricalSample& sample, double r,
                              std::size_t ghost_n, std::uint64_t seed) {
    spec.validate();
    family::FamilyEvaluator ev(spec);
    if (ghost_n == 0) ghost_n = 100 * sample.n;
    const auto ghost = ghost_moments(ev, ghost_n, ghost_seed(seed));
    RadiusResult result;
    bool any = false;
    for (std::size_t i = 0; i < ev.member_count(); ++i) {
        if (ghost.second_moments[i] > r) continue;
        double acc = 0.0;
        for (std::size_t j = 0; j < sample.n; ++j) {
            const double v = ev.eval(i, sample.point(j));
            acc += v * v;
        }
        acc /= static_cast<double>(sample.n);
        if (!any || acc > result.value) result.value = acc;
        any = true;
    }
    result.empty_feasible = !any;
    return result;
}

RadiusExpectationReport radius_expectation_check(
    const family::FunctionFamilySpec& spec, double r, std::size_t n,
    std::size_t trials, std::uint64_t seed, const PopulationOptions& opt) {
    spec.validate();
    if (trials < 2)
        throw std::invalid_argument("radius_expectation_check: trials >= 2");
    family::FamilyEvaluator ev(spec);
    const std::size_t ghost_n = opt.ghost_n ? opt.ghost_n : 100 * n;
    const auto ghost = ghost_moments(ev, ghost_n, ghost_seed(seed));
    std::vector<std::size_t> feasible;
    for (std::size_t i = 0; i < ev.member_count(); ++i)
        if (ghost.second_moments[i] <= r) feasible.push_back(i);

    std::vector<double> sqrt_vals(trials), plain_vals(trials);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
        std::uint64_t s = seed + 0xd1b54a32d192ed03ULL * (t + 1);
        family::SamplePlan plan{n, ev.domain_dim(), splitmix64(s)};
        const auto sample = family::draw_sample(plan);
        double best = 0.0;
        for (std::size_t i : feasible) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double v = ev.eval(i, sample.point(j));
                acc += v * v;
            }
            best = std::max(best, acc / static_cast<double>(n));
        }
        plain_vals[t] = best;
        sqrt_vals[t] = std::sqrt(best);
    });

    const auto rc = local_rc_population(spec, r, n, opt, seed ^ 0x7263ULL);
    RadiusExpectationReport rep;
    auto sq = mean_stderr(sqrt_vals);
    auto pl = mean_stderr(plain_vals);
    rep.lhs_sqrt = sq.mean;
    rep.lhs_sqrt_se = sq.se;
    rep.lhs_mean = pl.mean;
    rep.lhs_mean_se = pl.se;
    const double b = spec.sup_bound();
    rep.rhs = r + 4.0 * b * rc.mean;
    rep.rhs_se = 4.0 * b * rc.stderr_;
    const double margin_sqrt = rep.rhs - rep.lhs_sqrt;
    const double margin_mean = rep.rhs - rep.lhs_mean;
    const double se_sqrt = 3.0 * std::hypot(rep.rhs_se, rep.lhs_sqrt_se);
    const double se_mean = 3.0 * std::hypot(rep.rhs_se, rep.lhs_mean_se);
    rep.holds_verbatim = margin_sqrt >= -se_sqrt;
    rep.holds_variant = margin_mean >= -se_mean;
    return rep;
}

// ---------------------------------------------------------------------------
// Contraction and symmetrization
// ---------------------------------------------------------------------------

void PiecewiseLinearMap::validate() const {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument(
            "piecewise-linear map: need >= 2 breakpoints");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument(
                "piecewise-linear map: breakpoints must increase");
}

double PiecewiseLinearMap::operator()(double x) const {
    std::size_t hi = 1;
    while (hi + 1 < xs.size() && x > xs[hi]) ++hi;
    const double slope = (ys[hi] - ys[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return ys[hi - 1] + slope * (x - xs[hi - 1]);
}

double PiecewiseLinearMap::lipschitz() const {
    double best = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        best = std::max(best,
                        std::abs((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])));
    return best;
}

InequalityReport contraction_check(const family::ProjectedFamily& pf,
                                   const PiecewiseLinearMap& phi) {
    phi.validate();
    if (pf.n > kExactSignLimit)
        throw std::invalid_argument("contraction_check: n too large for exact");
    const double lip = phi.lipschitz();

    // phi o pf, no dedup needed: duplicates do not change suprema. The mapped
    // family may exceed the cap bookkeeping, so build it directly.
    family::ProjectedFamily mapped;
    mapped.m = pf.m;
    mapped.n = pf.n;
    mapped.provenance = "phi(" + pf.provenance + ")";
    mapped.values.resize(pf.values.size());
    double cap = 0.0;
    for (std::size_t i = 0; i < pf.values.size(); ++i) {
        mapped.values[i] = phi(pf.values[i]);
        cap = std::max(cap, std::abs(mapped.values[i]));
    }
    mapped.sup_bound = std::max(cap, 1e-300);

    InequalityReport rep;
    rep.lhs = rc_exact_full(mapped);
    rep.rhs = lip * rc_exact_full(pf);
    rep.holds = rep.lhs <= rep.rhs + 1e-12 * std::max(1.0, std::abs(rep.rhs));
    return rep;
}

SymmetrizationReport symmetrization_check(const family::FunctionFamilySpec& spec,
                                          double r, std::size_t n,
                                          std::size_t trials,
                                          std::uint64_t seed,
                                          const PopulationOptions& opt) {
    spec.validate();
    if (trials < 2)
        throw std::invalid_argument("symmetrization_check: trials >= 2");
    family::FamilyEvaluator ev(spec);
    const std::size_t ghost_n = opt.ghost_n ? opt.ghost_n : 1000 * n;
    const auto ghost = ghost_moments(ev, ghost_n, ghost_seed(seed));
    std::vector<std::size_t> feasible;
    for (std::size_t i = 0; i < ev.member_count(); ++i)
        if (ghost.second_moments[i] <= r) feasible.push_back(i);
    const double b = spec.sup_bound();

    std::vector<double> dev(trials, 0.0), rc2(trials, 0.0), rc1(trials, 0.0);
    parallel_for(trials, opt.threads, [&](std::size_t t) {
        std::uint64_t s = seed + 0xa0761d6478bd642fULL * (t + 1);
        family::SamplePlan plan{n, ev.domain_dim(), splitmix64(s)};
        const auto sample = family::draw_sample(plan);
        const std::size_t k = feasible.size();
        std::vector<double> rows(k * n);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < n; ++j)
                rows[i * n + j] = ev.eval(feasible[i], sample.point(j));

        double worst = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < k; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += rows[i * n + j] * rows[i * n + j];
            const double gap = acc / static_cast<double>(n) -
                               ghost.second_moments[feasible[i]];
            if (!any || gap > worst) worst = gap;
            any = true;
        }
        dev[t] = any ? worst : 0.0;

        auto g = make_engine(seed ^ 0x73796dULL, t);
        double acc2 = 0.0, acc1 = 0.0;
        std::vector<int> signs(n);
        for (std::size_t d = 0; d < opt.sign_draws; ++d) {
            for (std::size_t j = 0; j < n; ++j) signs[j] = rademacher_sign(g);
            double best2 = 0.0, best1 = 0.0;
            bool first = true;
            for (std::size_t i = 0; i < k; ++i) {
                double s2 = 0.0, s1 = 0.0;
                const double* row = rows.data() + i * n;
                for (std::size_t j = 0; j < n; ++j) {
                    s1 += signs[j] * row[j];
                    s2 += signs[j] * row[j] * row[j];
                }
                if (first || s2 > best2) best2 = s2;
                if (first || s1 > best1) best1 = s1;
                first = false;
            }
            acc2 += k == 0 ? 0.0 : best2 / static_cast<double>(n);
            acc1 += k == 0 ? 0.0 : best1 / static_cast<double>(n);
        }
        rc2[t] = 2.0 * acc2 / static_cast<double>(opt.sign_draws);
        rc1[t] = 4.0 * b * acc1 / static_cast<double>(opt.sign_draws);
    });

    SymmetrizationReport rep;
    auto d = mean_stderr(dev);
    auto m2 = mean_stderr(rc2);
    auto m1 = mean_stderr(rc1);
    rep.deviation = d.mean;
    rep.deviation_se = d.se;
    rep.rc_squared = m2.mean;
    rep.rc_squared_se = m2.se;
    rep.rc_scaled = m1.mean;
    rep.rc_scaled_se = m1.se;

    // Paired margins.
    std::vector<double> margin1(trials), margin2(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        margin1[t] = rc2[t] - dev[t];
        margin2[t] = rc1[t] - rc2[t];
    }
    auto g1 = mean_stderr(margin1);
    auto g2 = mean_stderr(margin2);
    rep.holds_first = g1.mean >= -3.0 * g1.se;
    rep.holds_second = g2.mean >= -3.0 * g2.se;
    return rep;
}

}  // namespace radbound::rad
