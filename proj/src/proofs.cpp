#include "qmsg/proofs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qmsg/sampling.hpp"

namespace qmsg {

std::size_t MajIxInstance::sqrt_n() const {
    const auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return root;
}

std::size_t MajIxInstance::ones_inside() const {
    std::size_t count = 0;
    for (std::size_t i : indices) count += x[i];
    return count;
}

void check_majix_instance(const MajIxInstance& inst) {
    const std::size_t root = inst.sqrt_n();
    if (root * root != inst.n || inst.n == 0)
        throw std::invalid_argument("majix: n must be a positive perfect square");
    if (inst.x.size() != inst.n)
        throw std::invalid_argument("majix: x must have length n");
    for (std::uint8_t bit : inst.x)
        if (bit > 1) throw std::invalid_argument("majix: x entries must be bits");
    if (inst.indices.size() != root)
        throw std::invalid_argument("majix: index set must have sqrt(n) elements");
    std::set<std::size_t> seen;
    for (std::size_t i : inst.indices) {
        if (i >= inst.n) throw std::invalid_argument("majix: index out of range");
        if (!seen.insert(i).second) throw std::invalid_argument("majix: indices must be distinct");
    }
}

ProofVector::ProofVector(std::vector<complex_t> amps) : amplitudes(std::move(amps)) {
    double norm_sq = 0.0;
    for (const auto& a : amplitudes) norm_sq += std::norm(a);
    if (std::abs(norm_sq - 1.0) > 1e-10)
        throw std::invalid_argument("ProofVector: amplitudes are not unit norm");
}

CellValue majix_value(const MajIxInstance& inst) {
    check_majix_instance(inst);
    const std::size_t root = inst.sqrt_n();
    const std::size_t ones = inst.ones_inside();
    if (ones == root) return CellValue::One;
    if (static_cast<double>(ones) <= 0.9 * static_cast<double>(root)) return CellValue::Zero;
    return CellValue::Undefined;
}

ProofVector majix_honest_proof(const MajIxInstance& inst) {
    check_majix_instance(inst);
    std::vector<complex_t> amps(inst.n, 0.0);
    const double amp = 1.0 / std::sqrt(static_cast<double>(inst.sqrt_n()));
    for (std::size_t i : inst.indices) amps[i] = amp;
    return ProofVector(std::move(amps));
}

double majix_acceptance_closed_form(const MajIxInstance& inst, const ProofVector& proof) {
    if (proof.dim() != inst.n)
        throw std::invalid_argument("majix_acceptance: proof dimension differs from n");
    complex_t sum = 0.0;
    for (std::size_t i : inst.indices)
        if (inst.x[i]) sum += proof.amplitudes[i];
    return std::norm(sum) / std::sqrt(static_cast<double>(inst.n));
}

double majix_acceptance(const MajIxInstance& inst, const ProofVector& proof) {
    check_majix_instance(inst);
    if (proof.dim() != inst.n)
        throw std::invalid_argument("majix_acceptance: proof dimension differs from n");

    // Alice: project onto span{|i> : x_i = 1} and accept with the squared norm.
    std::vector<complex_t> projected(inst.n, 0.0);
    double alice_accept = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i)
        if (inst.x[i]) {
            projected[i] = proof.amplitudes[i];
            alice_accept += std::norm(proof.amplitudes[i]);
        }

    double simulated = 0.0;
    if (alice_accept > 0.0) {
        // Bob: overlap of the renormalized state with the uniform vector on I.
        const double renorm = 1.0 / std::sqrt(alice_accept);
        const double phi_amp = 1.0 / std::pow(static_cast<double>(inst.n), 0.25);
        complex_t overlap = 0.0;
        for (std::size_t i : inst.indices) overlap += phi_amp * renorm * projected[i];
        simulated = alice_accept * std::norm(overlap);
    }

    const double closed = majix_acceptance_closed_form(inst, proof);
    if (std::abs(simulated - closed) > 1e-10)
        throw std::logic_error("majix_acceptance: simulation and closed form disagree by " +
                               std::to_string(std::abs(simulated - closed)));
    return simulated;
}

MajIxCheat majix_optimal_cheat(const MajIxInstance& inst) {
    check_majix_instance(inst);
    const double root = std::sqrt(static_cast<double>(inst.n));

    // Acceptance operator |w><w| / sqrt(n), w the indicator of I and x = 1.
    ComplexMatrix accept_op(inst.n);
    for (std::size_t i : inst.indices) {
        if (!inst.x[i]) continue;
        for (std::size_t j : inst.indices)
            if (inst.x[j]) accept_op(i, j) = 1.0 / root;
    }

    const Spectrum spec = hermitian_eig(accept_op);
    const double top = std::max(0.0, spec.eigenvalues.front());

    std::vector<complex_t> amps(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) amps[i] = spec.eigenvectors(i, 0);

    MajIxCheat cheat{top, static_cast<double>(inst.ones_inside()) / root,
                     ProofVector(std::move(amps))};
    if (std::abs(cheat.value - cheat.closed_form) > 1e-9)
        throw std::logic_error("majix_optimal_cheat: eigen route disagrees with k/sqrt(n)");
    return cheat;
}

int majix_bob_to_alice(const MajIxInstance& inst, std::size_t reps, Xoshiro256StarStar& rng) {
    check_majix_instance(inst);
    if (reps < 1) throw std::invalid_argument("majix_bob_to_alice: need at least one repetition");
    for (std::size_t t = 0; t < reps; ++t) {
        const std::size_t pick = inst.indices[rng.uniform_below(inst.indices.size())];
        if (!inst.x[pick]) return 0;
    }
    return 1;
}

int majix_bob_to_alice(const MajIxInstance& inst, std::size_t reps, std::uint64_t seed) {
    Xoshiro256StarStar rng(seed);
    return majix_bob_to_alice(inst, reps, rng);
}

MajIxInstance majix_instance_generator(std::size_t n, CellValue target, std::uint64_t seed,
                                       std::size_t ones_inside) {
    const auto root = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (root * root != n || n == 0)
        throw std::invalid_argument("majix_instance_generator: n must be a perfect square");
    const auto boundary = static_cast<std::size_t>(
        std::floor(0.9 * static_cast<double>(root)));  // largest k of a 0-input

    std::size_t ones;
    switch (target) {
        case CellValue::One:
            ones = root;
            break;
        case CellValue::Zero:
            ones = ones_inside == SIZE_MAX ? boundary : ones_inside;
            if (ones > boundary)
                throw std::invalid_argument(
                    "majix_instance_generator: requested ones exceed the 0-input threshold");
            break;
        case CellValue::Undefined:
            ones = boundary + 1;
            if (ones >= root)
                throw std::invalid_argument(
                    "majix_instance_generator: no undefined region at this n");
            break;
        default:
            throw std::invalid_argument("majix_instance_generator: bad target");
    }
    if (target != CellValue::Zero && ones_inside != SIZE_MAX && ones_inside != ones)
        throw std::invalid_argument(
            "majix_instance_generator: ones_inside is only free for 0-inputs");

    Xoshiro256StarStar rng(seed);
    MajIxInstance inst;
    inst.n = n;
    inst.x.assign(n, 0);

    // Partial Fisher-Yates draw of sqrt(n) distinct indices.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t k = 0; k < root; ++k) {
        const std::size_t j = k + rng.uniform_below(n - k);
        std::swap(pool[k], pool[j]);
        inst.indices.push_back(pool[k]);
    }

    // Exactly `ones` ones inside I (the first `ones` after a shuffle)...
    std::vector<std::size_t> inside = inst.indices;
    for (std::size_t k = 0; k + 1 < inside.size(); ++k) {
        const std::size_t j = k + rng.uniform_below(inside.size() - k);
        std::swap(inside[k], inside[j]);
    }
    for (std::size_t k = 0; k < ones; ++k) inst.x[inside[k]] = 1;

    // ...and unconstrained bits elsewhere.
    std::set<std::size_t> in_i(inst.indices.begin(), inst.indices.end());
    for (std::size_t i = 0; i < n; ++i)
        if (!in_i.count(i)) inst.x[i] = rng.bernoulli(0.5) ? 1 : 0;

    check_majix_instance(inst);
    return inst;
}

void check_lsd_instance(const LsdInstance& inst) {
    if (inst.dim == 0 || inst.dim % 4 != 0)
        throw std::invalid_argument("lsd: dimension must be a positive multiple of 4");
    const std::size_t rank = inst.dim / 4;
    for (const auto* basis : {&inst.v_basis, &inst.w_basis}) {
        if (basis->size() != rank)
            throw std::invalid_argument("lsd: each basis must have dim/4 vectors");
        for (const auto& vec : *basis)
            if (vec.size() != inst.dim)
                throw std::invalid_argument("lsd: basis vector of wrong length");
        for (std::size_t a = 0; a < rank; ++a)
            for (std::size_t b = a; b < rank; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < inst.dim; ++i)
                    dot += (*basis)[a][i] * (*basis)[b][i];
                const double expected = a == b ? 1.0 : 0.0;
                if (std::abs(dot - expected) > 1e-10)
                    throw std::invalid_argument("lsd: basis is not orthonormal");
            }
    }
}

double lsd_top_singular_value(const LsdInstance& inst) {
    check_lsd_instance(inst);
    const std::size_t rank = inst.dim / 4;
    // Gram matrix of inner products; its top singular value is cos(theta_1).
    ComplexMatrix overlaps(rank);
    for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t b = 0; b < rank; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < inst.dim; ++i)
                dot += inst.v_basis[a][i] * inst.w_basis[b][i];
            overlaps(a, b) = dot;
        }
    const ComplexMatrix gram = overlaps.dagger() * overlaps;
    const Spectrum spec = hermitian_eig(gram, 1e-10);
    const double top = std::max(0.0, spec.eigenvalues.front());
    return std::min(1.0, std::sqrt(top));
}

double lsd_distance(const LsdInstance& inst) {
    const double cos_theta = lsd_top_singular_value(inst);
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * cos_theta));
}

namespace {

Projector real_span_projector(const std::vector<std::vector<double>>& basis) {
    std::vector<std::vector<complex_t>> lifted;
    lifted.reserve(basis.size());
    for (const auto& vec : basis) lifted.emplace_back(vec.begin(), vec.end());
    return projector_onto(lifted);
}

}  // namespace

double lsd_protocol(const LsdInstance& inst, const std::vector<double>& proof) {
    check_lsd_instance(inst);
    if (proof.size() != inst.dim)
        throw std::invalid_argument("lsd_protocol: proof has wrong dimension");
    double norm_sq = 0.0;
    for (double v : proof) norm_sq += v * v;
    if (std::abs(norm_sq - 1.0) > 1e-10)
        throw std::invalid_argument("lsd_protocol: proof is not a unit vector");

    const Projector pv = real_span_projector(inst.v_basis);
    const Projector pw = real_span_projector(inst.w_basis);
    std::vector<complex_t> state(proof.begin(), proof.end());
    for (const Projector* proj : {&pv, &pw}) {
        std::vector<complex_t> next(inst.dim, 0.0);
        for (std::size_t r = 0; r < inst.dim; ++r)
            for (std::size_t c = 0; c < inst.dim; ++c) next[r] += (*proj)(r, c) * state[c];
        state = std::move(next);
    }
    double accept = 0.0;
    for (const auto& v : state) accept += std::norm(v);
    return accept;
}

LsdOptimum lsd_optimal_proof(const LsdInstance& inst) {
    check_lsd_instance(inst);
    const Projector pv = real_span_projector(inst.v_basis);
    const Projector pw = real_span_projector(inst.w_basis);
    const ComplexMatrix op = pv * pw * pv;
    const Spectrum spec = hermitian_eig(op, 1e-10);

    LsdOptimum best;
    best.value = std::max(0.0, spec.eigenvalues.front());
    best.proof.resize(inst.dim);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < inst.dim; ++i) {
        best.proof[i] = spec.eigenvectors(i, 0).real();
        norm_sq += best.proof[i] * best.proof[i];
    }
    // The operator is real symmetric; the top eigenvector is real up to a
    // global phase, which the real part extraction fixes.
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-8)
        throw std::logic_error("lsd_optimal_proof: degenerate principal vector");
    for (auto& v : best.proof) v /= norm;
    return best;
}

LsdInstance lsd_instance_generator(std::size_t dim, double angle, std::uint64_t seed) {
    if (dim == 0 || dim % 4 != 0)
        throw std::invalid_argument("lsd_instance_generator: dimension must be a multiple of 4");
    if (angle < 0.0 || angle > M_PI / 2.0)
        throw std::invalid_argument("lsd_instance_generator: angle outside [0, pi/2]");
    const std::size_t rank = dim / 4;
    Xoshiro256StarStar rng(seed);
    // 2 * rank orthonormal directions; W tilts each V direction by `angle`
    // into its private partner, so every principal angle equals `angle`.
    const auto frame = random_real_orthonormal_basis(dim, 2 * rank, rng);

    LsdInstance inst;
    inst.dim = dim;
    for (std::size_t k = 0; k < rank; ++k) {
        inst.v_basis.push_back(frame[k]);
        std::vector<double> tilted(dim);
        for (std::size_t i = 0; i < dim; ++i)
            tilted[i] = std::cos(angle) * frame[k][i] + std::sin(angle) * frame[rank + k][i];
        inst.w_basis.push_back(std::move(tilted));
    }
    check_lsd_instance(inst);
    return inst;
}

}  // namespace qmsg
