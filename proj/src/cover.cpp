#include "radbound/cover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "radbound/rng.hpp"

namespace radbound::cover {

double empirical_distance(std::span<const double> f, std::span<const double> g,
                          double q) {
    if (f.size() != g.size() || f.empty())
        throw std::invalid_argument(
            "empirical_distance: rows must have equal positive length");
    if (q < 1.0)
        throw std::invalid_argument("empirical_distance: q must be >= 1");
    const double inv_n = 1.0 / static_cast<double>(f.size());
    if (q == 2.0) {
        double acc = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double d = f[i] - g[i];
            acc += d * d;
        }
        return std::sqrt(acc * inv_n);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += std::pow(std::abs(f[i] - g[i]), q);
    return std::pow(acc * inv_n, 1.0 / q);
}

std::string to_string(CoverMode mode) {
    return mode == CoverMode::Exact ? "exact" : "greedy";
}

std::string to_string(CountKind kind) {
    switch (kind) {
        case CountKind::Exact: return "exact";
        case CountKind::GreedyUpper: return "greedy-upper";
        case CountKind::PackingLower: return "packing-lower";
    }
    return "?";
}

namespace {

// Row-coverage bitsets in 64-bit blocks: block_masks[i] marks the rows within
// eps of row i.
struct CoverageSets {
    std::size_t m = 0;
    std::size_t blocks = 0;
    std::vector<std::uint64_t> bits;  // m * blocks

    std::uint64_t* row(std::size_t i) { return bits.data() + i * blocks; }
    const std::uint64_t* row(std::size_t i) const {
        return bits.data() + i * blocks;
    }
    void set(std::size_t i, std::size_t j) {
        row(i)[j / 64] |= 1ULL << (j % 64);
    }
};

CoverageSets coverage_sets(const family::ProjectedFamily& pf, double eps,
                           double q) {
    CoverageSets sets;
    sets.m = pf.m;
    sets.blocks = (pf.m + 63) / 64;
    sets.bits.assign(sets.m * sets.blocks, 0);
    for (std::size_t i = 0; i < pf.m; ++i) {
        sets.set(i, i);
        for (std::size_t j = i + 1; j < pf.m; ++j) {
            if (empirical_distance(pf.row(i), pf.row(j), q) <= eps) {
                sets.set(i, j);
                sets.set(j, i);
            }
        }
    }
    return sets;
}

std::vector<std::size_t> greedy_cover(const CoverageSets& sets) {
    std::vector<std::uint64_t> uncovered(sets.blocks, ~0ULL);
    if (sets.m % 64) uncovered.back() = (1ULL << (sets.m % 64)) - 1;
    auto count_uncovered = [&]() {
        std::uint64_t total = 0;
        for (auto word : uncovered) total += std::popcount(word);
        return total;
    };
    std::vector<std::size_t> chosen;
    while (count_uncovered() > 0) {
        std::size_t best = sets.m;
        int best_gain = -1;
        for (std::size_t i = 0; i < sets.m; ++i) {
            int gain = 0;
            const std::uint64_t* mask = sets.row(i);
            for (std::size_t blk = 0; blk < sets.blocks; ++blk)
                gain += std::popcount(mask[blk] & uncovered[blk]);
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        chosen.push_back(best);
        const std::uint64_t* mask = sets.row(best);
        for (std::size_t blk = 0; blk < sets.blocks; ++blk)
            uncovered[blk] &= ~mask[blk];
    }
    return chosen;
}

// Single-word masks for the exact solver (m <= 64).
std::vector<std::uint64_t> single_word_masks(const CoverageSets& sets) {
    std::vector<std::uint64_t> masks(sets.m);
    for (std::size_t i = 0; i < sets.m; ++i) masks[i] = sets.row(i)[0];
    return masks;
}

struct ExactSolver {
    const std::vector<std::uint64_t>& masks;
    std::size_t max_cover_size;
    std::vector<std::size_t> best;
    std::vector<std::size_t> current;

    void run(std::uint64_t uncovered) {
        if (!uncovered) {
            best = current;
            return;
        }
        // Lower bound: each pick covers at most max_cover_size rows.
        const std::size_t remaining = static_cast<std::size_t>(
            (std::popcount(uncovered) + max_cover_size - 1) / max_cover_size);
        if (current.size() + remaining >= best.size()) return;
        // Branch on the uncovered row with the fewest candidate coverers.
        std::size_t pivot = masks.size();
        int fewest = -1;
        for (std::size_t r = 0; r < masks.size(); ++r) {
            if (!(uncovered >> r & 1)) continue;
            int coverers = 0;
            for (std::size_t i = 0; i < masks.size(); ++i)
                if (masks[i] >> r & 1) ++coverers;
            if (fewest < 0 || coverers < fewest) {
                fewest = coverers;
                pivot = r;
            }
        }
        for (std::size_t i = 0; i < masks.size(); ++i) {
            if (!(masks[i] >> pivot & 1)) continue;
            current.push_back(i);
            run(uncovered & ~masks[i]);
            current.pop_back();
        }
    }
};

// Minimum set cover via branch and bound, seeded with the greedy solution.
std::vector<std::size_t> exact_cover(const CoverageSets& sets) {
    const auto masks = single_word_masks(sets);
    const std::uint64_t full =
        masks.size() == 64 ? ~0ULL : (1ULL << masks.size()) - 1;
    ExactSolver solver{masks, 1, {}, {}};
    for (const auto mask : masks)
        solver.max_cover_size = std::max<std::size_t>(
            solver.max_cover_size, static_cast<std::size_t>(std::popcount(mask)));
    solver.best = greedy_cover(sets);
    if (solver.best.size() > 1) solver.run(full);
    std::sort(solver.best.begin(), solver.best.end());
    return solver.best;
}

CoverResult cover_impl(const family::ProjectedFamily& pf, double eps, double q,
                       CoverMode mode, std::size_t exact_limit) {
    pf.validate();
    if (!(eps > 0)) throw std::invalid_argument("proper_cover: eps must be > 0");
    if (mode == CoverMode::Exact && pf.m > exact_limit)
        throw std::invalid_argument(
            "proper_cover: exact mode limited to m <= " +
            std::to_string(exact_limit) + " rows; use greedy");
    if (mode == CoverMode::Greedy && pf.m > kGreedyCoverLimit)
        throw std::invalid_argument(
            "proper_cover: greedy mode limited to m <= " +
            std::to_string(kGreedyCoverLimit) + " rows");
    auto sets = coverage_sets(pf, eps, q);
    CoverResult result;
    result.eps = eps;
    result.q = q;
    result.mode = mode;
    result.member_indices =
        mode == CoverMode::Exact ? exact_cover(sets) : greedy_cover(sets);
    return result;
}

}  // namespace

CoverResult proper_cover(const family::ProjectedFamily& pf, double eps,
                         double q, CoverMode mode) {
    return cover_impl(pf, eps, q, mode, kExactCoverLimit);
}

CountBound covering_number(const family::ProjectedFamily& pf, double eps,
                           double q, CoverMode mode) {
    auto cover = proper_cover(pf, eps, q, mode);
    return {cover.member_indices.size(), mode == CoverMode::Exact
                                             ? CountKind::Exact
                                             : CountKind::GreedyUpper};
}

CountBound packing_number(const family::ProjectedFamily& pf, double eps,
                          double q) {
    pf.validate();
    if (!(eps > 0)) throw std::invalid_argument("packing_number: eps must be > 0");
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < pf.m; ++i) {
        bool separated = true;
        for (std::size_t j : kept) {
            if (empirical_distance(pf.row(i), pf.row(j), q) <= 2.0 * eps) {
                separated = false;
                break;
            }
        }
        if (separated) kept.push_back(i);
    }
    return {kept.size(), CountKind::PackingLower};
}

LemmaReport verify_minus_lemma(const family::ProjectedFamily& pf, double eps,
                               double q) {
    const auto minus = family::minus_family(pf);
    // The minus family outgrows the public exact gate quickly; the exact
    // solver itself handles up to 64 rows, which is what feasibility means
    // here.
    if (minus.m > 64 || pf.m > kExactCoverLimit)
        throw std::invalid_argument(
            "verify_minus_lemma: exact covers infeasible for this family");
    auto lhs_sets = coverage_sets(minus, eps, q);
    const double lhs = static_cast<double>(exact_cover(lhs_sets).size());
    const double half =
        static_cast<double>(covering_number(pf, eps / 2.0, q, CoverMode::Exact).value);
    LemmaReport rep{lhs, half * half, false};
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

LemmaReport verify_subfamily_lemma(const family::ProjectedFamily& pf,
                                   std::span<const std::size_t> subset,
                                   double eps, double q) {
    pf.validate();
    if (subset.empty())
        throw std::invalid_argument("verify_subfamily_lemma: empty subset");
    for (std::size_t i : subset)
        if (i >= pf.m)
            throw std::invalid_argument(
                "verify_subfamily_lemma: subset index out of range");
    std::vector<double> table;
    table.reserve(subset.size() * pf.n);
    for (std::size_t i : subset) {
        auto row = pf.row(i);
        table.insert(table.end(), row.begin(), row.end());
    }
    auto sub = family::make_projected(std::move(table), subset.size(), pf.n,
                                      pf.sup_bound, "subfamily");
    const double lhs = static_cast<double>(
        covering_number(sub, eps, q, CoverMode::Exact).value);
    const double rhs = static_cast<double>(
        covering_number(pf, eps / 2.0, q, CoverMode::Exact).value);
    LemmaReport rep{lhs, rhs, lhs <= rhs};
    return rep;
}

CapacityProbe metric_capacity_probe(const family::FunctionFamilySpec& spec,
                                    double eps, double q, std::size_t trials,
                                    std::uint64_t seed, std::size_t n_lo,
                                    std::size_t n_hi) {
    spec.validate();
    if (trials < 1)
        throw std::invalid_argument("metric_capacity_probe: trials must be >= 1");
    if (n_lo < 1 || n_hi < n_lo)
        throw std::invalid_argument("metric_capacity_probe: bad n range");
    CapacityProbe probe;
    probe.bound = {0, CountKind::PackingLower};
    auto g = make_engine(seed, 0xca9ac17fULL);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n =
            n_lo + static_cast<std::size_t>(uniform_index(g, n_hi - n_lo + 1));
        family::SamplePlan plan{n, spec.domain_dim(), g()};
        auto pf = family::project(spec, family::draw_sample(plan));
        const auto mode = pf.m <= kExactCoverLimit ? CoverMode::Exact
                                                   : CoverMode::Greedy;
        const auto count = covering_number(pf, eps, q, mode);
        if (count.value > probe.bound.value) {
            probe.bound.value = count.value;
            probe.argmax_trial = t;
            probe.argmax_plan = plan;
        }
    }
    return probe;
}

}  // namespace radbound::cover
