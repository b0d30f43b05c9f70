#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmsg/protocol.hpp"

namespace qmsg {

// Raised when an update is requested from a guess with no mass left on the
// oriented subspace (a >= 1 - 1e-9). This signals S(rho||sigma) = infinity,
// which valid priors rule out, so reaching it means a broken input.
struct DegenerateGuessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LearnerConfig {
public:
    explicit LearnerConfig(double epsilon = 1e-6) : epsilon_(epsilon) {
        // The progress estimate needs small error bounds.
        if (!(epsilon > 0.0) || epsilon > 1e-4)
            throw std::invalid_argument("LearnerConfig: epsilon must lie in (0, 1e-4]");
    }

    double epsilon() const { return epsilon_; }

    // Update threshold: an update fires when the oriented deficit a reaches this.
    double trigger() const { return 10.0 * std::sqrt(epsilon_); }

    // Quantization step for the notified acceptance error.
    double quantization_step() const { return epsilon_ * epsilon_; }

    // Bits of an eps-tilde grid index: ceil(log2(1 / step)).
    std::size_t quantization_bits() const;

    // Audit slack for the entropy comparisons.
    double audit_tolerance() const { return 1e-8; }

private:
    double epsilon_;
};

// One notified column: Alice tells Bob the value bit and the quantized error
// eps_tilde = 1 - (acceptance of the oriented measurement on the target),
// rounded to the quantization grid.
struct TranscriptRecord {
    std::size_t y = 0;
    int value = 0;
    double eps_tilde = 0.0;
};

// Everything the progress audit needs about one guess update.
struct UpdateEvent {
    std::size_t y = 0;
    int value = 0;
    Projector oriented;     // P_y or its complement, matching the value bit
    double deficit = 0.0;   // a = 1 - Tr(Q sigma_i)
    double eps_exact = 0.0; // 1 - Tr(Q rho), before quantization
    double eps_tilde = 0.0;
    double s_before = 0.0;  // S(rho || sigma_i)
    double s_after = 0.0;   // S(rho || sigma_{i+1})
};

struct LearningRun {
    std::size_t x = 0;
    DensityMatrix target;                       // rho_x (offline audit channel only)
    std::vector<DensityMatrix> guesses;         // sigma_1 ... sigma_T
    std::vector<TranscriptRecord> transcript;
    std::vector<std::optional<int>> decisions;  // per y; set exactly on defined cells
    std::vector<UpdateEvent> updates;
};

// P_y for a 1-valued cell, I - P_y for a 0-valued cell.
Projector oriented_projector(const Projector& p, int value);

// Round an exact error down to the quantization grid and clamp into
// [0, epsilon]. A strictly positive error never rounds to 0 (it lands on the
// first grid point instead): weight 0 on the complement block would push the
// target's residual mass outside the guess's support and make the relative
// entropy infinite, breaking the progress guarantee the transcript relies on.
double quantize_error(double eps_exact, const LearnerConfig& cfg);

// Bob's update rule: rescale the two pinched blocks so the oriented
// acceptance becomes exactly 1 - eps_tilde.
//   sigma' = (1-eps_tilde)/(1-a) Q sigma Q + eps_tilde/a (I-Q) sigma (I-Q)
// Requires a >= min_deficit (callers pass the config trigger; tests may relax
// to probe the boundary) and a <= 1 - 1e-9.
DensityMatrix update_guess(const DensityMatrix& sigma, const Projector& oriented,
                           double eps_tilde, double min_deficit);

// Alice+Bob's learning loop for one row x: walk defined columns in ascending
// order, record a transcript entry and update the guess whenever the oriented
// deficit reaches the trigger, otherwise decide by the 1/2 threshold.
LearningRun run_learning(const QuantumOneWayProtocol& p, const PartialFunction& f, std::size_t x,
                         const LearnerConfig& cfg);

// The compiled deterministic protocol: per row, Alice's message is the
// serialized transcript; Bob replays it against his own measurement list.
struct DeterministicProtocol {
    LearnerConfig cfg;
    std::size_t m_bits = 0;
    DensityMatrix prior;
    std::vector<Projector> measurements;
    std::vector<std::vector<TranscriptRecord>> transcripts;  // per x
    std::vector<std::size_t> message_bits;                   // per x
    std::size_t cost_bits = 0;                               // max over x
    double cost_bound_bits = 0.0;  // (budget/(5 sqrt(eps)) + 1)(m + grid bits + 1)
};

DeterministicProtocol compile_deterministic_protocol(const QuantumOneWayProtocol& p,
                                                     const PartialFunction& f,
                                                     const LearnerConfig& cfg);

// Bob's replay: consume records with record.y < y in order, updating the
// guess; output a matching record's value bit, or decide unmatched columns by
// Tr(P_y sigma) >= 1/2.
int replay_decision(const DeterministicProtocol& det, std::size_t x, std::size_t y);

// Transcript wire format: per record, y as an m-bit big-endian field, one
// value bit, then the eps-tilde grid index in quantization_bits() bits.
std::vector<std::uint8_t> transcript_to_bits(const std::vector<TranscriptRecord>& transcript,
                                             std::size_t m_bits, const LearnerConfig& cfg);
std::vector<TranscriptRecord> transcript_from_bits(const std::vector<std::uint8_t>& bits,
                                                   std::size_t m_bits, const LearnerConfig& cfg);
std::size_t transcript_bit_length(std::size_t record_count, std::size_t m_bits,
                                  const LearnerConfig& cfg);

struct AuditLine {
    std::string step;          // "progress-claim", "uhlmann", "araki-lieb", "pinsker-final"
    std::size_t update_index;  // meaningless for "pinsker-final"
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
};

struct AuditReport {
    bool passed = true;
    std::vector<AuditLine> lines;
    std::string first_failure;  // empty when passed

    // Convenience over lines: number of failed entries.
    std::size_t failure_count() const;
};

// Checks every update of a run against the progress claim
// S(rho||sigma_i) - S(rho||sigma_{i+1}) >= a/2, plus the two proof steps
// (Uhlmann monotonicity under the pinching, the entropy growth bound
// S(pinched rho) - S(rho) <= H(eps_exact)), and the final Pinsker distance
// whenever the run ends with S(rho||sigma_T) <= 5 sqrt(eps).
AuditReport audit_progress(const LearningRun& run, const LearnerConfig& cfg);

}  // namespace qmsg
