#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace radbound::selftest {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs the condensed invariant battery: dominance of the finite-class,
/// chaining and minimized bounds over exact enumerations, the structural
/// covering lemmas, contraction, fixed-point algebra, the comparison
/// inequalities, and curve diagnostics. Deterministic given (seed, quick).
std::vector<CheckResult> run(std::uint64_t seed, int threads, bool quick);

}  // namespace radbound::selftest
