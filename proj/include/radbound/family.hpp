#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "radbound/regime.hpp"

namespace radbound::family {

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

struct SamplePlan {
    std::size_t n = 1;    // number of points
    std::size_t dim = 1;  // domain is [0,1]^dim
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

/// n points in [0,1]^dim, each carrying weight exactly 1/n.
struct EmpiricalSample {
    std::size_t n = 0;
    std::size_t dim = 1;
    std::vector<double> coords;  // n*dim, point-major

    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * dim, dim};
    }
    double weight() const { return 1.0 / static_cast<double>(n); }
};

/// n i.i.d. uniform points on [0,1]^dim, reproducible from the plan seed.
EmpiricalSample draw_sample(const SamplePlan& plan);

// ---------------------------------------------------------------------------
// Function families
// ---------------------------------------------------------------------------

/// m random piecewise-constant functions on [0,1]: member i takes value
/// c[i][j] in [-b, b] on cell j of a `cells`-cell grid (first coordinate).
/// Entropy is at most log m at every scale.
struct FiniteRandom {
    std::size_t m = 1;
    double b = 1.0;
    std::uint64_t seed = 0;
    std::size_t cells = 16;
};

/// x -> <w, phi(x)> with ||w||_2 <= radius and phi(x) = (2x - 1)/sqrt(dim),
/// so ||phi(x)||_2 <= 1 and |f| <= radius. Discretized to `count` weight
/// vectors on the ball; the first weight is always zero. Entropy grows like
/// dim * log(1/eps).
struct LinearBall {
    std::size_t dim = 1;
    double radius = 1.0;
    std::size_t count = 1;
    double b = 1.0;  // output cap; radius for the default transform
};

/// Piecewise-linear grid paths on [0,1]: values at j/resolution quantized to
/// multiples of lipschitz/resolution, successive increments in {-s, 0, +s},
/// clipped to [-b, b]. Every member is genuinely lipschitz-Lipschitz.
/// Entropy grows like 1/eps.
struct LipschitzBall {
    double lipschitz = 1.0;
    double b = 1.0;
    std::size_t resolution = 4;  // number of segments
};

struct FunctionFamilySpec {
    std::variant<FiniteRandom, LinearBall, LipschitzBall> variant;
    cover::EntropyRegime declared_regime;

    std::size_t domain_dim() const;
    double sup_bound() const;
    std::string id() const;
    void validate() const;  // parameter + regime-consistency checks
};

/// Enumerated members of a spec, evaluable at any domain point.
class FamilyEvaluator {
  public:
    explicit FamilyEvaluator(const FunctionFamilySpec& spec);

    std::size_t member_count() const { return count_; }
    std::size_t domain_dim() const { return dim_; }
    double sup_bound() const { return cap_; }

    double eval(std::size_t member, std::span<const double> x) const;

    /// Row-major member x sample-point table (no dedup).
    std::vector<double> eval_table(const EmpiricalSample& sample) const;

  private:
    enum class Kind { Finite, Linear, Lipschitz };
    Kind kind_;
    std::size_t count_ = 0;
    std::size_t dim_ = 1;
    double cap_ = 1.0;
    // Finite: m x cells values. Linear: count x dim weights.
    // Lipschitz: count x (resolution+1) path values.
    std::vector<double> data_;
    std::size_t stride_ = 0;
    double lipschitz_ = 0.0;  // Lipschitz variant only
};

// ---------------------------------------------------------------------------
// Projected families
// ---------------------------------------------------------------------------

inline constexpr double kDedupTolerance = 1e-12;
inline constexpr std::size_t kMinusRowCap = 50000;

/// A function family projected onto a sample: an m x n table of values with
/// |value| <= sup_bound, duplicate rows removed up to kDedupTolerance in
/// max-norm.
struct ProjectedFamily {
    std::vector<double> values;  // m*n row-major
    std::size_t m = 0;
    std::size_t n = 0;
    double sup_bound = 1.0;
    std::string provenance;
    bool subsampled = false;  // minus_family row cap was hit

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n, n};
    }
    void validate() const;  // shape + cap invariants
};

/// Builds a ProjectedFamily from a raw table, deduplicating rows (first
/// occurrence wins). Throws if the table is empty after dedup or an entry
/// exceeds the cap.
ProjectedFamily make_projected(std::vector<double> table, std::size_t m,
                               std::size_t n, double sup_bound,
                               std::string provenance);

/// Row i = evaluations of family member i at the sample points, deduplicated.
ProjectedFamily project(const FunctionFamilySpec& spec,
                        const EmpiricalSample& sample);

/// All differences f - g of rows, deduplicated; always contains the zero row;
/// sup_bound doubles. Families whose m^2 exceeds kMinusRowCap are uniformly
/// subsampled (flagged), which only shrinks suprema.
ProjectedFamily minus_family(const ProjectedFamily& pf);

}  // namespace radbound::family
