#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qmsg/complex_matrix.hpp"
#include "qmsg/protocol.hpp"
#include "qmsg/rng.hpp"

namespace qmsg {

// Instance of the MajIx promise problem: is x all-ones on the index set I
// (value 1), or at most a 0.9 fraction of ones there (value 0)?
struct MajIxInstance {
    std::size_t n = 0;                 // perfect square
    std::vector<std::uint8_t> x;       // bit vector of length n
    std::vector<std::size_t> indices;  // sqrt(n) distinct indices in [0, n)

    std::size_t sqrt_n() const;
    // |{i in I : x_i = 1}|
    std::size_t ones_inside() const;
};

void check_majix_instance(const MajIxInstance& inst);

// Merlin's quantum proof: a unit vector over the n index basis states.
struct ProofVector {
    std::vector<complex_t> amplitudes;

    explicit ProofVector(std::vector<complex_t> amps);
    std::size_t dim() const { return amplitudes.size(); }
};

// 1 if every indexed position is one, 0 if at most 0.9 sqrt(n) are,
// undefined between.
CellValue majix_value(const MajIxInstance& inst);

// The honest proof: uniform superposition over I.
ProofVector majix_honest_proof(const MajIxInstance& inst);

// Acceptance probability of the verification protocol (Alice projects the
// proof onto span{|i> : x_i = 1}; Bob measures against the uniform vector
// over I). Simulated explicitly and cross-checked against the closed form
// |sum_{i in I, x_i=1} alpha_i|^2 / sqrt(n); the two must agree to 1e-10.
double majix_acceptance(const MajIxInstance& inst, const ProofVector& proof);

double majix_acceptance_closed_form(const MajIxInstance& inst, const ProofVector& proof);

struct MajIxCheat {
    double value = 0.0;        // max acceptance, from the eigen route
    double closed_form = 0.0;  // ones_inside / sqrt(n)
    ProofVector proof;         // optimizing proof vector
};

// Best cheating proof via eigen-analysis of the rank-1 acceptance operator.
MajIxCheat majix_optimal_cheat(const MajIxInstance& inst);

// The cheap direction: Bob samples `reps` indices from I with replacement
// (reps * ceil(log2 n) bits), Alice answers 1 iff x is one at all of them.
int majix_bob_to_alice(const MajIxInstance& inst, std::size_t reps, Xoshiro256StarStar& rng);
int majix_bob_to_alice(const MajIxInstance& inst, std::size_t reps, std::uint64_t seed);

// Instance generator: target fixes the promise class; for a 0-input,
// ones_inside picks |{i in I : x_i = 1}| (default: the 0.9 sqrt(n) boundary).
MajIxInstance majix_instance_generator(std::size_t n, CellValue target, std::uint64_t seed,
                                       std::size_t ones_inside = SIZE_MAX);

// Pair of d/4-dimensional real subspaces, each given by an orthonormal basis.
struct LsdInstance {
    std::size_t dim = 0;  // multiple of 4
    std::vector<std::vector<double>> v_basis;
    std::vector<std::vector<double>> w_basis;
};

void check_lsd_instance(const LsdInstance& inst);

// Minimum distance between unit vectors of the two subspaces:
// sqrt(2 - 2 cos(theta_1)) with cos(theta_1) the top singular value of the
// basis inner-product matrix.
double lsd_distance(const LsdInstance& inst);

// cos(theta_1) itself (top singular value, clamped into [0,1]).
double lsd_top_singular_value(const LsdInstance& inst);

// Acceptance of the proof-verification protocol on a unit proof vector:
// ||P_W P_V proof||^2. Rejects non-unit proofs.
double lsd_protocol(const LsdInstance& inst, const std::vector<double>& proof);

struct LsdOptimum {
    double value = 0.0;         // cos^2(theta_1)
    std::vector<double> proof;  // first principal vector of V
};

// Best proof via eigen-analysis of P_V P_W P_V.
LsdOptimum lsd_optimal_proof(const LsdInstance& inst);

// Planted-angle generator: all principal angles equal `angle`, so the minimum
// unit-vector distance is exactly sqrt(2 - 2 cos(angle)).
LsdInstance lsd_instance_generator(std::size_t dim, double angle, std::uint64_t seed);

}  // namespace qmsg
