#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radbound/cover.hpp"
#include "radbound/family.hpp"
#include "radbound/regime.hpp"

namespace radbound::bounds {

// ---------------------------------------------------------------------------
// Plans, curves, constants
// ---------------------------------------------------------------------------

/// Resolution levels for chaining: eps_k = 2^-k * eps0 (dyadic) or an explicit
/// strictly decreasing sequence starting at eps0.
struct ChainPlan {
    double eps0 = 1.0;
    std::size_t levels = 0;  // N
    std::vector<double> explicit_eps;  // empty => dyadic; else eps_k, k=0..N

    double eps_at(std::size_t k) const;
    void validate() const;
};

enum class ConstantKind { Unit, Traced, User };

/// The multiplicative constant in front of closed-form bounds: unit for shape
/// work, traced for dominance checks (explicit constants folded from the
/// chaining derivations), or a user value.
struct ConstantMode {
    ConstantKind kind = ConstantKind::Unit;
    double user_value = 1.0;
};

double apply_constant(const ConstantMode& mode, double traced_value);

struct BoundPoint {
    double r = 0.0;
    double value = 0.0;
};

struct BoundCurve {
    std::string name;
    std::string params;
    std::vector<BoundPoint> points;  // r strictly increasing, finite values

    void validate() const;
};

// ---------------------------------------------------------------------------
// Elementary bounds
// ---------------------------------------------------------------------------

/// sqrt(2 r log(cardinality) / n): finite-class (Massart) bound on the
/// empirical local Rademacher complexity.
double massart_bound(std::size_t cardinality, double r, std::size_t n);

/// Entropy source for chaining: either covers of a concrete family or an
/// analytic evaluator.
struct EntropySource {
    const family::ProjectedFamily* pf = nullptr;  // empirical when non-null
    cover::CoverMode mode = cover::CoverMode::Greedy;
    cover::EntropyEvaluator evaluator;  // analytic when pf == nullptr

    static EntropySource empirical(const family::ProjectedFamily& family,
                                   cover::CoverMode mode);
    static EntropySource analytic(cover::EntropyEvaluator evaluator);
    double entropy_at(double eps, std::size_t n_rows_hint) const;
};

/// Refined entropy integral: 4 sum_{k=1..N} eps_{k-1} sqrt(log N(eps_k)/n)
/// + eps_N. For empirical sources plan.eps0 must dominate the largest row
/// norm.
double entropy_integral_bound(const EntropySource& source, const ChainPlan& plan,
                              std::size_t n);

// ---------------------------------------------------------------------------
// Minimized bounds over an eps grid
// ---------------------------------------------------------------------------

struct MinimizedBound {
    double value = 0.0;
    double argmin_eps = 0.0;
};

/// min over the grid of [empirical local complexity of the minus family at
/// radius eps^2 + sqrt(2 r log N(eps/2, pf) / n)] with exact covers. The inner
/// term is exact for n <= 16, Monte Carlo otherwise.
MinimizedBound lemma31_bound(const family::ProjectedFamily& pf, double r,
                             std::span<const double> eps_grid,
                             std::uint64_t seed, std::uint64_t mc_draws = 2000);

/// min over the grid of
///   2 * (chained ball term) + 8 b H(eps/2)/n + sqrt(2 r H(eps/2)/n)
/// where H is the declared capacity regime. The ball term chains the
/// eps-ball of the minus family with level entropy 2 H(eps_k/4) and the
/// number of levels optimized per grid point. Grid points outside the
/// regime validity are skipped; all skipped is an error.
MinimizedBound theorem32_analytic(const cover::EntropyRegime& regime, double r,
                                  double b, std::size_t n,
                                  std::span<const double> eps_grid,
                                  std::size_t max_levels = 40);

/// Same shape with cover counts computed on the given projected family: the
/// ball term chains the norm <= eps row subset of the minus family.
MinimizedBound theorem32_empirical(const family::ProjectedFamily& pf, double r,
                                   double b, std::span<const double> eps_grid,
                                   cover::CoverMode mode,
                                   std::size_t max_levels = 12);

// ---------------------------------------------------------------------------
// Closed-form regime bounds
// ---------------------------------------------------------------------------

/// Log-polynomial regime bound: scaled minimum of the two branches below.
/// Requires 0 <= r <= gamma^2 and n >= gamma^-2; r = 0 falls back to branch 2
/// by continuous extension.
double cor33_bound(const cover::LogPoly& regime, double b, double r,
                   std::size_t n, const ConstantMode& cmode);
/// sqrt(d r log^p(2 gamma r^-1/2)/n) + d log^p(2 gamma r^-1/2)/n, scaled.
double cor33_branch1(const cover::LogPoly& regime, double b, double r,
                     std::size_t n, const ConstantMode& cmode);
/// d log^p(2 gamma n^1/2)/n + sqrt(r d log^p(2 gamma n^1/2)/n), scaled.
double cor33_branch2(const cover::LogPoly& regime, double b, double r,
                     std::size_t n, const ConstantMode& cmode);

/// Polynomial-with-log regime bound; the p < 2 case minimizes over the grid
/// (restricted to (0,1)), p = 2 and p > 2 are closed forms.
double cor34_bound(const cover::PolyLog& regime, double b, double r,
                   std::size_t n, const ConstantMode& cmode,
                   std::span<const double> eps_grid = {});

/// Polynomial regime bound; same case split as cor34 without the log factors.
double cor35_bound(const cover::Poly& regime, double b, double r, std::size_t n,
                   const ConstantMode& cmode,
                   std::span<const double> eps_grid = {});

// Baseline comparison bounds. Their constants are not derived here, so traced
// mode scales them by 1 like unit mode.
double mendelson_logpoly(double d, double p, double gamma, double b, double r,
                         std::size_t n, const ConstantMode& cmode);
double mendelson_poly(double p, double b, double r, std::size_t n,
                      const ConstantMode& cmode);
double mendelson_polylog(double p, double b, double r, std::size_t n,
                         const ConstantMode& cmode);

// Traced constants, exposed for tests. Each is the explicit fold of the
// corresponding chaining derivation; see bounds.cpp.
double cor33_traced_constant(double b, double p, double d);
double cor34_traced_constant(double b, double p, double gamma);
double cor35_traced_constant(double b, double p, double gamma);

// ---------------------------------------------------------------------------
// Comparisons and diagnostics
// ---------------------------------------------------------------------------

struct Remark35Point {
    double r = 0.0;
    bool small_branch = false;  // r <= n^{-2/(p+2)}
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct Remark35Report {
    double boundary = 0.0;  // n^{-2/(p+2)}
    std::vector<Remark35Point> points;
    bool all_hold = true;
};

/// Checks sqrt(r) n^{-1/(p+2)} <= n^{-1/2} r^{(2-p)/4} on the small-r branch
/// and r^{-p/2} n^{-1} <= n^{-2/(p+2)} on the large-r branch, with equality
/// at the boundary radius.
Remark35Report compare_remark35(double p, std::size_t n,
                                std::span<const double> r_grid);

enum class LimitKind { Bounded, DivergesAsRToZero };

struct CurveDiagnostics {
    bool monotone_nondecreasing = false;
    bool subroot = false;  // value / sqrt(r) nonincreasing on the grid
    LimitKind r_to_zero = LimitKind::Bounded;
};

/// Grid diagnostics; requires at least 3 points.
CurveDiagnostics curve_diagnostics(const BoundCurve& curve);

/// Evaluates fn over the grid into a validated curve.
BoundCurve make_curve(const std::string& name, const std::string& params,
                      std::span<const double> r_grid,
                      const std::function<double(double)>& fn);

/// Grid helpers ("log:lo:hi:k" / "lin:lo:hi:k" CLI syntax maps onto these).
std::vector<double> log_grid(double lo, double hi, std::size_t k);
std::vector<double> lin_grid(double lo, double hi, std::size_t k);

}  // namespace radbound::bounds
