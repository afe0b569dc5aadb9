#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radbound/family.hpp"
#include "radbound/regime.hpp"

namespace radbound::cover {

/// L_q(P_n) distance between two value rows: ((1/n) sum |f_i - g_i|^q)^(1/q).
/// Rejects q < 1.
double empirical_distance(std::span<const double> f, std::span<const double> g,
                          double q = 2.0);

enum class CoverMode { Exact, Greedy };
enum class CountKind { Exact, GreedyUpper, PackingLower };

std::string to_string(CoverMode mode);
std::string to_string(CountKind kind);

/// Exhaustive minimum set cover is limited to families this size; larger
/// families must use greedy mode.
inline constexpr std::size_t kExactCoverLimit = 16;

/// Greedy covers keep an m x m coverage bitset; this cap keeps that desk
/// scale.
inline constexpr std::size_t kGreedyCoverLimit = 4096;

struct CoverResult {
    std::vector<std::size_t> member_indices;  // rows of the family (proper)
    double eps = 0.0;
    double q = 2.0;
    CoverMode mode = CoverMode::Greedy;
};

struct CountBound {
    std::size_t value = 1;
    CountKind kind = CountKind::Exact;
};

/// A valid proper eps-cover of the family rows. Exact mode returns a
/// minimum-cardinality cover (m <= kExactCoverLimit, error beyond); greedy
/// repeatedly picks the row covering the most uncovered rows, ties broken by
/// lowest row index.
CoverResult proper_cover(const family::ProjectedFamily& pf, double eps,
                         double q, CoverMode mode);

CountBound covering_number(const family::ProjectedFamily& pf, double eps,
                           double q, CoverMode mode);

/// Size of the greedy maximal 2eps-separated row subset; a lower bound on the
/// eps-covering number.
CountBound packing_number(const family::ProjectedFamily& pf, double eps,
                          double q);

struct LemmaReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Checks N(eps, minus_family(pf)) <= N(eps/2, pf)^2 with exact counts.
LemmaReport verify_minus_lemma(const family::ProjectedFamily& pf, double eps,
                               double q);

/// Checks N(eps, subfamily) <= N(eps/2, pf) with exact counts.
LemmaReport verify_subfamily_lemma(const family::ProjectedFamily& pf,
                                   std::span<const std::size_t> subset,
                                   double eps, double q);

struct CapacityProbe {
    CountBound bound;  // kind PackingLower: a lower estimate of the capacity
    std::size_t argmax_trial = 0;
    family::SamplePlan argmax_plan;
};

/// Max observed covering count over `trials` random (n, sample) draws with
/// n uniform in [n_lo, n_hi]. Exact counts when the projection is small
/// enough, greedy otherwise.
CapacityProbe metric_capacity_probe(const family::FunctionFamilySpec& spec,
                                    double eps, double q, std::size_t trials,
                                    std::uint64_t seed, std::size_t n_lo = 2,
                                    std::size_t n_hi = 32);

}  // namespace radbound::cover
