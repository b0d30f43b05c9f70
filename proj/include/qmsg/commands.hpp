#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "qmsg/rng.hpp"

namespace qmsg {

// Exit codes shared by run_command and the CLI.
inline constexpr int kExitPass = 0;
inline constexpr int kExitInvariantFailure = 1;
inline constexpr int kExitInputError = 2;

struct ExperimentConfig {
    std::string command;        // learn | majix | lsd | entropy-check | oracle | replay
    std::string instance_path;  // unused by entropy-check
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::optional<double> epsilon_override;
    std::string output_path;    // report target; stdout when empty
    std::size_t trials = 0;     // 0 = per-command default
    std::size_t reps = 11;      // repetitions of the sampling protocol
    std::size_t dim_cap = 256;
    std::size_t exact_limit = 20;
};

// Runs one experiment; the report goes to output_path (or `console`), any
// invariant failure additionally writes a self-contained replay file next to
// the report. Returns an exit code.
int run_command(const ExperimentConfig& cfg, std::ostream& console);

// One trial of the inequality sweeps, fully determined by (seed, trial).
struct EntropyTrialOutcome {
    bool pinsker = false;
    bool uhlmann = false;
    bool ordering = false;
    bool klein = false;

    bool all() const { return pinsker && uhlmann && ordering && klein; }
};

EntropyTrialOutcome run_entropy_trial(std::uint64_t seed, std::size_t trial);

struct EntropySweepResult {
    std::size_t trials = 0;
    std::size_t pinsker_failures = 0;
    std::size_t uhlmann_failures = 0;
    std::size_t ordering_failures = 0;
    std::size_t klein_failures = 0;
    std::optional<std::size_t> first_failed_trial;

    bool passed() const {
        return pinsker_failures + uhlmann_failures + ordering_failures + klein_failures == 0;
    }
};

EntropySweepResult run_entropy_sweeps(std::uint64_t seed, std::size_t trials);

}  // namespace qmsg
