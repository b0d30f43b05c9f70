#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmsg {

using complex_t = std::complex<double>;

// Eigenvalues with |lambda| at or below this threshold are treated as exact
// zeros for support decisions (kernel membership, 0*log 0 handling).
inline constexpr double kZeroEigenvalueThreshold = 1e-12;

// Default tolerance for accepting a matrix as Hermitian: max|M - M^dagger|.
inline constexpr double kHermitianTolerance = 1e-12;

// Thrown when a spectral function is requested outside its domain, e.g.
// log2 of a state evaluated where the state has no support.
struct SupportViolation : std::domain_error {
    using std::domain_error::domain_error;
};

// Dense square complex matrix, row-major. Dimensions stay small (<= 256),
// so no sparse or blocked paths.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim)
        : dim_(dim), data_(dim * dim, complex_t(0.0, 0.0)) {}

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(const std::vector<double>& entries);

    std::size_t dim() const { return dim_; }

    complex_t& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const complex_t& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    ComplexMatrix dagger() const;
    complex_t trace() const;

    // Largest entry magnitude; 0 for the empty matrix.
    double max_abs() const;

    // max_ij |M(i,j) - conj(M(j,i))|
    double hermiticity_defect() const;
    bool is_hermitian(double tol = kHermitianTolerance) const {
        return hermiticity_defect() <= tol;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(complex_t scale);

    friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
    friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
    friend ComplexMatrix operator*(complex_t scale, ComplexMatrix m) { return m *= scale; }
    friend ComplexMatrix operator*(ComplexMatrix m, complex_t scale) { return m *= scale; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

private:
    std::size_t dim_ = 0;
    std::vector<complex_t> data_;
};

// Role aliases. Validity (PSD/unit trace, idempotence) is checked at module
// boundaries by check_density / check_projector rather than by the type.
using DensityMatrix = ComplexMatrix;
using Projector = ComplexMatrix;

// max_ij |A(i,j) - B(i,j)|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

struct Spectrum {
    std::vector<double> eigenvalues;  // descending
    ComplexMatrix eigenvectors;       // unitary, columns matching eigenvalues

    // U diag(eigenvalues) U^dagger
    ComplexMatrix reconstruct() const;
};

// Cyclic complex Jacobi eigensolver. Rejects inputs whose hermiticity defect
// exceeds hermitian_tol.
Spectrum hermitian_eig(const ComplexMatrix& m, double hermitian_tol = kHermitianTolerance);

enum class ZeroPolicy {
    TreatAsZero,  // eigenvalues within kZeroEigenvalueThreshold map to 0 (0*log 0 = 0)
    Reject,       // such eigenvalues raise SupportViolation
};

// Applies the scalar function g to the eigenvalues of Hermitian m, keeping the
// eigenvectors. g signals "undefined here" by returning NaN, which raises
// SupportViolation.
ComplexMatrix spectral_apply(const ComplexMatrix& m,
                             const std::function<double(double)>& g,
                             ZeroPolicy zero_policy,
                             double hermitian_tol = kHermitianTolerance);

// Kronecker product; dim = dim(a) * dim(b). Row index a_row * dim(b) + b_row.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

enum class Subsystem { A, B };

// Partial trace of a matrix on a dim_a * dim_b space (A is the high factor).
ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep);

// Orthonormalizes the given vectors (dropping dependent ones) and returns the
// projector onto their span. An empty list yields the zero matrix of dim d
// when d is supplied via the vectors' common length.
Projector projector_onto(const std::vector<std::vector<complex_t>>& vectors);

// Orthonormal basis of the span, by modified Gram-Schmidt with
// re-orthogonalization. Vectors of residual norm below drop_tol are dependent
// and dropped.
std::vector<std::vector<complex_t>> orthonormalize(
    const std::vector<std::vector<complex_t>>& vectors, double drop_tol = 1e-10);

// True iff the minimum eigenvalue of Hermitian m is >= -tol.
bool is_psd(const ComplexMatrix& m, double tol = 1e-9);

// Boundary validators; throw std::invalid_argument naming the violated
// invariant. `what` names the offending object in diagnostics.
void check_density(const ComplexMatrix& rho, double tol = 1e-9,
                   const std::string& what = "state");
void check_projector(const ComplexMatrix& p, double tol = 1e-10,
                     const std::string& what = "projector");

}  // namespace qmsg
