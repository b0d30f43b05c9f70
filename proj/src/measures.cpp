#include "qmsg/measures.hpp"

#include <cmath>

namespace qmsg {

namespace {

double log2_or_nan(double x) { return x > 0.0 ? std::log2(x) : std::nan(""); }

// Tr(a b) for Hermitian a, b; the imaginary part cancels.
double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t d = a.dim();
    complex_t sum = 0.0;
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) sum += a(r, c) * b(c, r);
    return sum.real();
}

}  // namespace

double support_leak(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("support_leak: dimension mismatch");
    const Spectrum spec = hermitian_eig(sigma, 1e-9);
    double leak = 0.0;
    for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
        if (spec.eigenvalues[k] > kZeroEigenvalueThreshold) continue;
        // <v_k| rho |v_k>
        complex_t quad = 0.0;
        const std::size_t d = rho.dim();
        for (std::size_t r = 0; r < d; ++r) {
            complex_t row = 0.0;
            for (std::size_t c = 0; c < d; ++c) row += rho(r, c) * spec.eigenvectors(c, k);
            quad += std::conj(spec.eigenvectors(r, k)) * row;
        }
        leak += std::max(0.0, quad.real());
    }
    return leak;
}

EntropyValue von_neumann_entropy(const DensityMatrix& rho) {
    check_density(rho);
    const Spectrum spec = hermitian_eig(rho, 1e-9);
    double bits = 0.0;
    for (double lambda : spec.eigenvalues)
        if (lambda > kZeroEigenvalueThreshold) bits -= lambda * std::log2(lambda);
    return EntropyValue::from_bits(bits);
}

EntropyValue relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    check_density(rho, 1e-9, "relative_entropy: rho");
    check_density(sigma, 1e-9, "relative_entropy: sigma");
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    if (support_leak(rho, sigma) > kSupportLeakTolerance) return EntropyValue::infinity();
    const ComplexMatrix log_rho = spectral_apply(rho, log2_or_nan, ZeroPolicy::TreatAsZero, 1e-9);
    const ComplexMatrix log_sigma = spectral_apply(sigma, log2_or_nan, ZeroPolicy::TreatAsZero, 1e-9);
    const double bits = real_trace_product(rho, log_rho) - real_trace_product(rho, log_sigma);
    return EntropyValue::from_bits(bits);
}

double relative_entropy_clamped(const DensityMatrix& rho, const DensityMatrix& sigma,
                                double eigenvalue_floor) {
    check_density(rho, 1e-9, "relative_entropy_clamped: rho");
    check_density(sigma, 1e-9, "relative_entropy_clamped: sigma");
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("relative_entropy_clamped: dimension mismatch");

    const Spectrum rho_spec = hermitian_eig(rho, 1e-9);
    double bits = 0.0;
    for (double lambda : rho_spec.eigenvalues)
        if (lambda > kZeroEigenvalueThreshold) bits += lambda * std::log2(lambda);

    // No zero shortcut here: eigenvalues between the floor and the support
    // threshold are real and carry their own logs.
    const Spectrum sigma_spec = hermitian_eig(sigma, 1e-9);
    const std::size_t d = sigma.dim();
    for (std::size_t k = 0; k < d; ++k) {
        const double mu = std::max(sigma_spec.eigenvalues[k], eigenvalue_floor);
        complex_t mass = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            complex_t row = 0.0;
            for (std::size_t c = 0; c < d; ++c) row += rho(r, c) * sigma_spec.eigenvectors(c, k);
            mass += std::conj(sigma_spec.eigenvectors(r, k)) * row;
        }
        bits -= std::max(0.0, mass.real()) * std::log2(mu);
    }
    return bits;
}

EntropyValue relative_min_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    check_density(rho, 1e-9, "relative_min_entropy: rho");
    check_density(sigma, 1e-9, "relative_min_entropy: sigma");
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("relative_min_entropy: dimension mismatch");
    if (support_leak(rho, sigma) > kSupportLeakTolerance) return EntropyValue::infinity();
    // Pseudo-inverse square root: kernel eigenvalues stay 0.
    const ComplexMatrix inv_sqrt = spectral_apply(
        sigma, [](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : std::nan(""); },
        ZeroPolicy::TreatAsZero, 1e-9);
    const ComplexMatrix conjugated = inv_sqrt * rho * inv_sqrt;
    // Conjugating by a large inverse root scales the roundoff asymmetry too.
    const double herm_tol = 1e-10 * std::max(1.0, conjugated.max_abs());
    const Spectrum spec = hermitian_eig(conjugated, herm_tol);
    const double top = spec.eigenvalues.front();
    if (top <= 0.0) return EntropyValue::from_bits(0.0);
    return EntropyValue::from_bits(std::log2(top), 1e-7);
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    const Spectrum spec = hermitian_eig(rho - sigma, 1e-9);
    double sum = 0.0;
    for (double lambda : spec.eigenvalues) sum += std::abs(lambda);
    return sum;
}

EntropyValue cross_binary_entropy(double u, double v) {
    if (u < -1e-12 || u > 1.0 + 1e-12)
        throw std::invalid_argument("cross_binary_entropy: u outside [0,1]");
    if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("cross_binary_entropy: v outside [0,1]");
    u = std::min(1.0, std::max(0.0, u));
    double bits = 0.0;
    if (u > 0.0) {
        if (v == 0.0) return EntropyValue::infinity();
        bits -= u * std::log2(v);
    }
    if (u < 1.0) {
        if (v == 1.0) return EntropyValue::infinity();
        bits -= (1.0 - u) * std::log2(1.0 - v);
    }
    return EntropyValue::from_bits(bits);
}

double binary_entropy(double u) { return cross_binary_entropy(u, u).bits(); }

DensityMatrix pinch(const DensityMatrix& rho, const Projector& p) {
    if (rho.dim() != p.dim()) throw std::invalid_argument("pinch: dimension mismatch");
    check_projector(p, 1e-9, "pinch: projector");
    const Projector comp = ComplexMatrix::identity(p.dim()) - p;
    return p * rho * p + comp * rho * comp;
}

}  // namespace qmsg
