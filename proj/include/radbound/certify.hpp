#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "radbound/bounds.hpp"
#include "radbound/family.hpp"
#include "radbound/regime.hpp"

namespace radbound::certify {

// ---------------------------------------------------------------------------
// Sub-root functions and fixed points
// ---------------------------------------------------------------------------

struct SubRootProbe {
    std::function<double(double)> psi;
    std::vector<double> grid;  // log-spaced probe radii, ascending
};

struct SubRootReport {
    bool nonnegative = false;
    bool nondecreasing = false;
    bool ratio_nonincreasing = false;  // psi(r)/sqrt(r)

    bool all() const { return nonnegative && nondecreasing && ratio_nonincreasing; }
};

/// Grid verification of the three defining sub-root properties; needs at
/// least 3 grid points.
SubRootReport subroot_check(const SubRootProbe& probe);

struct FixedPointResult {
    double r_star = 0.0;
    double residual = 0.0;  // |psi(r*) - r*|
    int iterations = 0;
};

/// Bisection on psi(r) - r over [tolerance, psi(r_max) + r_max]. The probe
/// must pass subroot_check (uniqueness), otherwise an error is raised.
FixedPointResult fixed_point(const SubRootProbe& probe, double tolerance);

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

struct CertificateParams {
    double B = 1.0;            // variance-expectation constant
    double K = 2.0;            // trade-off, > 1
    double delta = 0.05;       // confidence; t = log(1/delta)
    double range_width = 1.0;  // b - a of the loss class
    double L = 1.0;            // loss Lipschitz constant
    double b = 1.0;            // function cap of the loss class
    cover::EntropyRegime regime;  // hypothesis-class entropy

    void validate() const;
};

struct GeneralizationCertificate {
    double empirical_term = 0.0;
    double fixed_point_term = 0.0;
    double confidence_term = 0.0;
    double total = 0.0;
    double r_star = 0.0;
    std::size_t n = 0;
};

/// total = K/(K-1) * empirical_mean + 704 K / B * r_star
///       + t (11 range_width + 26 B K) / n,   t = log(1/delta).
GeneralizationCertificate bartlett_bound(double empirical_mean, double r_star,
                                         const CertificateParams& params,
                                         std::size_t n);

/// Entropy of the L-Lipschitz loss composition: evaluates the hypothesis
/// regime at eps/L. Exact within the three families: logpoly rescales
/// gamma -> gamma L, poly rescales gamma -> gamma L^p, polylog rescales
/// gamma -> gamma L^p (1 + max(0, log L)/log 2)^2.
cover::EntropyRegime loss_regime_transform(const cover::EntropyRegime& regime,
                                           double L);

/// Excess-risk certificate for log-polynomial hypothesis entropy: the
/// sub-root bound psi(r) = B c [d log^p(2 gamma' sqrt(n))/n
/// + sqrt(r d log^p(2 gamma' sqrt(n))/n)] with gamma' the loss-transformed
/// gamma, solved in closed form (quadratic in sqrt(r*)) and cross-checked by
/// bisection; the ERM shift makes the empirical term 0.
GeneralizationCertificate certificate_logpoly(const CertificateParams& params,
                                              std::size_t n,
                                              const bounds::ConstantMode& cmode);

struct PolylogCertificate {
    GeneralizationCertificate certificate;
    double eps0 = 0.0;        // (log n)^{2/(p+2)} n^{-1/(p+2)}
    double proof_rate = 0.0;  // n^{-2/(p+2)} (log n)^{(2-p)/(p+2)} log(n / (log n)^{2/(p+2)})
    double printed_rate = 0.0;  // same with the n^{-p/(p+2)} prefix
};

/// Excess-risk certificate for polynomial-with-log hypothesis entropy
/// (p < 2, n >= 3): the sub-root bound is the p < 2 branch frozen at eps0,
/// its fixed point solved in closed form. Both candidate rate expressions are
/// reported since their prefixes disagree.
PolylogCertificate certificate_polylog(const CertificateParams& params,
                                       std::size_t n,
                                       const bounds::ConstantMode& cmode);

// ---------------------------------------------------------------------------
// ERM validation harness
// ---------------------------------------------------------------------------

/// Bounded regression with squared loss: Y = target(X) + uniform noise on
/// [-noise, +noise], hypotheses drawn from a finite family containing the
/// target.
struct ErmPreset {
    family::FunctionFamilySpec spec;
    std::size_t target_index = 0;
    double noise = 0.25;
    std::size_t ghost_n = 100000;

    double y_cap() const;         // |Y| <= b + noise
    double loss_lipschitz() const;  // 2 b + 2 y_cap
    double loss_cap() const;        // sup |l_h - l_target| <= 2 b L
    double range_width() const;     // 2 loss_cap
    double variance_constant() const;  // B = L^2
    CertificateParams certificate_params(double K, double delta) const;
};

struct ErmTrialResult {
    double excess_risk = 0.0;
    double certificate = 0.0;
    bool holds = false;
    std::uint64_t seed = 0;
};

struct ErmReport {
    std::vector<ErmTrialResult> trials;
    double coverage = 0.0;  // fraction of trials where holds
    GeneralizationCertificate certificate;
};

/// Per trial: draw a sample, run exact ERM over the family under squared
/// loss, estimate the excess risk on a fresh ghost sample, and compare with
/// the certificate. The variance-expectation constant is validated on a ghost
/// sample before any trial runs (error on failure, reporting the offending
/// member).
ErmReport erm_experiment(const ErmPreset& preset, std::size_t n,
                         std::size_t trials, const CertificateParams& params,
                         std::uint64_t seed,
                         const bounds::ConstantMode& cmode = {},
                         int threads = 1);

}  // namespace radbound::certify
