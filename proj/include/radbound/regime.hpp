#pragma once

#include <functional>
#include <limits>
#include <string>
#include <variant>

namespace radbound::cover {

// Analytic entropy models. Each gives an upper bound on the entropy number
// log N(eps, F, ||.||_2) valid on (0, validity cap]:
//
//   LogPoly:  d * log^p(gamma / eps),          cap = gamma
//   PolyLog:  gamma * eps^-p * log^2(2 / eps), cap = 2
//   Poly:     gamma * eps^-p,                  cap = +inf
struct LogPoly {
    double d = 1.0;
    double p = 1.0;
    double gamma = 1.0;
};

struct PolyLog {
    double gamma = 1.0;
    double p = 1.0;
};

struct Poly {
    double gamma = 1.0;
    double p = 1.0;
};

struct EntropyRegime {
    std::variant<LogPoly, PolyLog, Poly> variant;

    EntropyRegime() = default;
    EntropyRegime(LogPoly v) : variant(v) {}
    EntropyRegime(PolyLog v) : variant(v) {}
    EntropyRegime(Poly v) : variant(v) {}

    double validity_cap() const;
    std::string describe() const;
    void validate() const;  // throws std::invalid_argument on nonpositive params
};

/// Evaluates the regime at eps. Throws std::domain_error outside
/// (0, validity cap].
double regime_entropy(const EntropyRegime& regime, double eps);

/// Entropy evaluator with an explicit domain; the transforms below return
/// these when the result leaves the three-parameter families.
struct EntropyEvaluator {
    std::function<double(double)> fn;
    double cap = std::numeric_limits<double>::infinity();

    double operator()(double eps) const;  // throws outside (0, cap]
};

EntropyEvaluator regime_evaluator(const EntropyRegime& regime);

/// Star-hull entropy: eps -> log(4/eps) + regime(eps/2), i.e. the transform
/// log N(2e', star(F)) <= log(2/e') + log N(e', F) reparameterized at
/// eps = 2e'.
EntropyEvaluator star_hull_regime(const EntropyRegime& regime);

}  // namespace radbound::cover
