#pragma once

#include <stdexcept>

#include "qmsg/complex_matrix.hpp"

namespace qmsg {

// Entropies are in bits (all logarithms base 2). Support violations make the
// relative entropies infinite; infinity is a distinguished state of this
// type, never a large float.
class EntropyValue {
public:
    static EntropyValue infinity() {
        EntropyValue v;
        v.infinite_ = true;
        return v;
    }

    // Clamps values within clamp_tol of zero (numerical noise) up to 0;
    // rejects anything more negative.
    static EntropyValue from_bits(double bits, double clamp_tol = 1e-9) {
        if (bits < -clamp_tol)
            throw std::invalid_argument("EntropyValue: negative entropy " + std::to_string(bits));
        EntropyValue v;
        v.bits_ = bits < 0.0 ? 0.0 : bits;
        return v;
    }

    bool is_infinite() const { return infinite_; }

    double bits() const {
        if (infinite_) throw std::logic_error("EntropyValue: infinite value has no finite bits");
        return bits_;
    }

private:
    double bits_ = 0.0;
    bool infinite_ = false;
};

// Mass of rho on the kernel of sigma (eigenvalues at or below the zero
// threshold). The relative entropies are finite iff this leak is negligible.
double support_leak(const DensityMatrix& rho, const DensityMatrix& sigma);

// Leak above this bound means supp(rho) escapes supp(sigma).
inline constexpr double kSupportLeakTolerance = 1e-9;

// S(rho) = -Tr rho log2 rho, with 0 log 0 = 0.
EntropyValue von_neumann_entropy(const DensityMatrix& rho);

// S(rho||sigma) = Tr rho log2 rho - Tr rho log2 sigma; infinite when the
// support of rho escapes the support of sigma.
EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// Finite evaluation of the same divergence with sigma's spectrum clamped
// below at eigenvalue_floor. The guess-update dynamics produce genuinely
// positive eigenvalues far below the support threshold (each update rescales
// a block by eps_tilde/a, and blocks stack); thresholding would misread them
// as support violations. Clamping under-estimates the divergence by at most
// the rho-mass on sub-floor directions times their log gap.
double relative_entropy_clamped(const DensityMatrix& rho, const DensityMatrix& sigma,
                                double eigenvalue_floor = 1e-16);

// S_inf(rho||sigma) = smallest c with sigma - rho/2^c PSD, computed as log2 of
// the top eigenvalue of sigma^{-1/2} rho sigma^{-1/2} on the support of sigma.
EntropyValue relative_min_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

// Trace norm of rho - sigma (sum of absolute eigenvalues).
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

// H(u,v) = -u log2 v - (1-u) log2(1-v); infinite at v in {0,1} unless u
// matches the endpoint.
EntropyValue cross_binary_entropy(double u, double v);

// H(u) = H(u,u), the binary entropy.
double binary_entropy(double u);

// P rho P + (I-P) rho (I-P): the state after measuring {P, I-P} without
// reading the outcome.
DensityMatrix pinch(const DensityMatrix& rho, const Projector& p);

}  // namespace qmsg
