#include "radbound/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace radbound::presets {

namespace {

family::FunctionFamilySpec finite_spec(std::size_t m, double b,
                                       std::uint64_t seed) {
    family::FunctionFamilySpec spec;
    spec.variant = family::FiniteRandom{m, b, seed, 16};
    spec.declared_regime = cover::LogPoly{
        std::log(static_cast<double>(m)), 1.0, 2.0 * b * std::exp(1.0)};
    return spec;
}

}  // namespace

family::FunctionFamilySpec make_preset(const std::string& name) {
    if (name == "finite") return finite_spec(24, 1.0, 2024);
    if (name == "linear") {
        family::FunctionFamilySpec spec;
        spec.variant = family::LinearBall{2, 1.0, 40, 1.0};
        spec.declared_regime = cover::LogPoly{2.0, 1.0, 6.0};
        return spec;
    }
    if (name == "lipschitz") {
        family::FunctionFamilySpec spec;
        spec.variant = family::LipschitzBall{1.0, 1.0, 4};
        spec.declared_regime = cover::Poly{20.0, 1.0};
        return spec;
    }
    throw std::invalid_argument("unknown preset family: " + name);
}

std::vector<std::string> preset_names() { return {"finite", "linear", "lipschitz"}; }

certify::ErmPreset make_erm_preset() {
    certify::ErmPreset preset;
    preset.spec = finite_spec(32, 1.0, 7);
    preset.target_index = 0;
    preset.noise = 0.25;
    preset.ghost_n = 100000;
    return preset;
}

}  // namespace radbound::presets
