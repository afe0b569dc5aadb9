#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radbound/config.hpp"

namespace radbound::cli {

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 inequality/invariant failed, 2 invalid config
    std::vector<std::string> outputs;  // emitted files (manifest excluded)
};

/// Executes one command against a parsed configuration, writing CSV outputs
/// and one JSON-lines manifest record under out_dir. `seed` overrides the
/// configured master seed when nonzero_override is set.
RunResult run_command(const std::string& command, config::Config& cfg,
                      const std::string& out_dir, std::uint64_t seed,
                      bool seed_overridden, int threads, bool strict);

/// Full CLI: flags --config PATH --seed U64 --out DIR --threads N --strict.
int main_entry(int argc, char** argv);

}  // namespace radbound::cli
