#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "radbound/family.hpp"

namespace radbound::rad {

enum class RadiusKind { Empirical, Population };

struct RadiusSpec {
    double r = 0.0;
    RadiusKind kind = RadiusKind::Empirical;
};

enum class EstimateMode { Exact, MonteCarlo };

/// Exact enumeration is limited to 2^n sign vectors with n at most this.
inline constexpr std::size_t kExactSignLimit = 16;

struct ComplexityEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;  // 0 in exact mode
    std::uint64_t draws = 0;
    EstimateMode mode = EstimateMode::Exact;
    bool empty_feasible = false;
    std::size_t feasible_count = 0;
};

struct SupResult {
    double value = 0.0;
    std::optional<std::size_t> argmax;  // none when the feasible set is empty
};

/// max over feasible rows of (1/n) sum_i signs[i] * f(X_i); empty feasible
/// set gives 0 with no argmax.
SupResult sup_signed_mean(const family::ProjectedFamily& pf,
                          std::span<const int> signs,
                          std::span<const std::size_t> feasible);

/// Empirical local Rademacher complexity E_sigma sup {R_n f : P_n f^2 <= r}.
/// Exact mode enumerates all 2^n sign vectors (n <= kExactSignLimit, error
/// beyond); Monte Carlo averages `draws` i.i.d. sign vectors.
ComplexityEstimate local_rc_empirical(const family::ProjectedFamily& pf,
                                      RadiusSpec radius, EstimateMode mode,
                                      std::uint64_t draws, std::uint64_t seed,
                                      int threads = 1);

/// Unconstrained exact empirical Rademacher complexity (all rows feasible).
double rc_exact_full(const family::ProjectedFamily& pf);

struct PopulationOptions {
    std::size_t ghost_n = 0;  // 0 => 100 * n
    std::size_t outer_draws = 200;
    std::size_t sign_draws = 2000;
    int threads = 1;
};

/// Local Rademacher complexity E R_n {f : P f^2 <= r}: feasibility is fixed
/// by a ghost-sample estimate of P f^2, then sup_signed_mean is averaged over
/// outer sample draws x sign draws. stderr comes from the spread of the
/// per-sample means.
ComplexityEstimate local_rc_population(const family::FunctionFamilySpec& spec,
                                       double r, std::size_t n,
                                       const PopulationOptions& opt,
                                       std::uint64_t seed);

/// Same estimator across several radii sharing samples and sign draws; the
/// feasible sets are nested, so each sup is a prefix maximum over members
/// sorted by their ghost second moment.
std::vector<ComplexityEstimate> local_rc_population_multi(
    const family::FunctionFamilySpec& spec, std::span<const double> radii,
    std::size_t n, const PopulationOptions& opt, std::uint64_t seed);

struct RadiusResult {
    double value = 0.0;
    bool empty_feasible = false;
};

/// Empirical radius r_hat = sup {P_n f^2 : P f^2 <= r} with ghost-estimated
/// feasibility.
RadiusResult empirical_radius(const family::FunctionFamilySpec& spec,
                              const family::EmpiricalSample& sample, double r,
                              std::size_t ghost_n, std::uint64_t seed);

struct RadiusExpectationReport {
    double lhs_sqrt = 0.0;  // E sqrt(r_hat)  (the inequality as printed)
    double lhs_sqrt_se = 0.0;
    double lhs_mean = 0.0;  // E r_hat        (the dimensionally consistent read)
    double lhs_mean_se = 0.0;
    double rhs = 0.0;  // r + 4b * local population complexity
    double rhs_se = 0.0;
    bool holds_verbatim = false;
    bool holds_variant = false;
};

/// Monte Carlo check of E sqrt(r_hat) <= r + 4b E R_n{P f^2 <= r} exactly as
/// printed, alongside the variant with E r_hat on the left. Margins are
/// 3 combined standard errors.
RadiusExpectationReport radius_expectation_check(
    const family::FunctionFamilySpec& spec, double r, std::size_t n,
    std::size_t trials, std::uint64_t seed, const PopulationOptions& opt);

/// Piecewise-linear map given by breakpoints; evaluation extrapolates with
/// the end slopes. The Lipschitz constant is the largest absolute slope.
struct PiecewiseLinearMap {
    std::vector<double> xs;
    std::vector<double> ys;

    double operator()(double x) const;
    double lipschitz() const;
    void validate() const;
};

struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Exact E_sigma R_n (phi o pf) <= L * exact E_sigma R_n pf (n <= 16).
InequalityReport contraction_check(const family::ProjectedFamily& pf,
                                   const PiecewiseLinearMap& phi);

struct SymmetrizationReport {
    // E sup (P_n f^2 - P f^2)  <=  2 E R_n {f^2}  <=  4b E R_n {f}
    double deviation = 0.0, deviation_se = 0.0;
    double rc_squared = 0.0, rc_squared_se = 0.0;
    double rc_scaled = 0.0, rc_scaled_se = 0.0;
    bool holds_first = false;
    bool holds_second = false;
};

/// Monte Carlo check of the symmetrization chain on the r-feasible subfamily,
/// with paired per-trial margins and 3-stderr slack.
SymmetrizationReport symmetrization_check(const family::FunctionFamilySpec& spec,
                                          double r, std::size_t n,
                                          std::size_t trials,
                                          std::uint64_t seed,
                                          const PopulationOptions& opt);

}  // namespace radbound::rad
