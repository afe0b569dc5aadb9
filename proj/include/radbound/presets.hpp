#pragma once

#include <string>
#include <vector>

#include "radbound/certify.hpp"
#include "radbound/family.hpp"

namespace radbound::presets {

/// Shipped families with declared capacity regimes:
///   "finite"    — 24 random piecewise-constant functions, logpoly regime
///                 (d = log m, p = 1, gamma = 2be): a finite family never
///                 exceeds log m, and entropy is 0 past the diameter 2b.
///   "linear"    — 2-d linear ball discretized to 40 weights, logpoly
///                 (d = 2, p = 1, gamma = 6): ball covers at scale eps/2
///                 cover the discretized subset.
///   "lipschitz" — 1-Lipschitz grid paths at resolution 4, poly
///                 (gamma = 20, p = 1): sup-norm path counting, halved twice
///                 for properness and the subset step.
family::FunctionFamilySpec make_preset(const std::string& name);

std::vector<std::string> preset_names();

/// ERM validation preset: 32 random functions with the target at index 0,
/// bounded uniform noise, squared loss.
certify::ErmPreset make_erm_preset();

}  // namespace radbound::presets
