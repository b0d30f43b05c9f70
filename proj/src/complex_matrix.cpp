#include "qmsg/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmsg {

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& entries) {
    ComplexMatrix m(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

ComplexMatrix ComplexMatrix::dagger() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

complex_t ComplexMatrix::trace() const {
    complex_t t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

double ComplexMatrix::hermiticity_defect() const {
    double defect = 0.0;
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = r; c < dim_; ++c)
            defect = std::max(defect, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return defect;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (dim_ != rhs.dim_) throw std::invalid_argument("matrix addition: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    if (dim_ != rhs.dim_) throw std::invalid_argument("matrix subtraction: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(complex_t scale) {
    for (auto& v : data_) v *= scale;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("matrix product: dimension mismatch");
    const std::size_t d = a.dim();
    ComplexMatrix out(d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t k = 0; k < d; ++k) {
            const complex_t ark = a(r, k);
            if (ark == complex_t(0.0, 0.0)) continue;
            for (std::size_t c = 0; c < d; ++c) out(r, c) += ark * b(k, c);
        }
    }
    return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c)
            m = std::max(m, std::abs(a(r, c) - b(r, c)));
    return m;
}

ComplexMatrix Spectrum::reconstruct() const {
    const std::size_t d = eigenvalues.size();
    ComplexMatrix out(d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            complex_t sum = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                sum += eigenvectors(r, k) * eigenvalues[k] * std::conj(eigenvectors(c, k));
            out(r, c) = sum;
        }
    return out;
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c)
            if (r != c) sum += std::norm(a(r, c));
    return std::sqrt(sum);
}

// One complex Jacobi rotation zeroing a(p,q). The plane unitary is
// G = [[c, s], [-conj(s), c]] with real c >= 0, applied as A <- G^dagger A G.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& vecs, std::size_t p, std::size_t q) {
    const complex_t apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;

    const double alpha = a(p, p).real();
    const double gamma = a(q, q).real();
    const complex_t phase = apq / r;  // e^{i theta}

    const double tau = (gamma - alpha) / (2.0 * r);
    double t;  // real rotation tangent, smaller root of t^2 + 2 tau t - 1 = 0
    if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const complex_t s = t * c * phase;

    const std::size_t d = a.dim();
    // Column update: A <- A G
    for (std::size_t k = 0; k < d; ++k) {
        const complex_t akp = a(k, p);
        const complex_t akq = a(k, q);
        a(k, p) = c * akp - std::conj(s) * akq;
        a(k, q) = s * akp + c * akq;
    }
    // Row update: A <- G^dagger A
    for (std::size_t k = 0; k < d; ++k) {
        const complex_t apk = a(p, k);
        const complex_t aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = std::conj(s) * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    // Accumulate eigenvectors: V <- V G
    for (std::size_t k = 0; k < d; ++k) {
        const complex_t vkp = vecs(k, p);
        const complex_t vkq = vecs(k, q);
        vecs(k, p) = c * vkp - std::conj(s) * vkq;
        vecs(k, q) = s * vkp + c * vkq;
    }
}

}  // namespace

Spectrum hermitian_eig(const ComplexMatrix& m, double hermitian_tol) {
    const std::size_t d = m.dim();
    if (d == 0) throw std::invalid_argument("hermitian_eig: empty matrix");
    const double defect = m.hermiticity_defect();
    if (defect > hermitian_tol)
        throw std::invalid_argument("hermitian_eig: input is not Hermitian (defect " +
                                    std::to_string(defect) + " exceeds tolerance " +
                                    std::to_string(hermitian_tol) + ")");

    // Work on the Hermitian average so sub-tolerance asymmetry cannot drift.
    ComplexMatrix a(d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            a(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));

    ComplexMatrix vecs = ComplexMatrix::identity(d);
    const double stop = 1e-14 * std::max(1.0, a.max_abs()) * static_cast<double>(d);
    const int max_sweeps = 100;
    int sweep = 0;
    while (off_diagonal_norm(a) > stop) {
        if (++sweep > max_sweeps)
            throw std::runtime_error("hermitian_eig: Jacobi sweeps failed to converge");
        for (std::size_t p = 0; p + 1 < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q)
                if (std::abs(a(p, q)) > 0.0) jacobi_rotate(a, vecs, p, q);
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    Spectrum spec;
    spec.eigenvalues.resize(d);
    spec.eigenvectors = ComplexMatrix(d);
    for (std::size_t k = 0; k < d; ++k) {
        spec.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < d; ++r) spec.eigenvectors(r, k) = vecs(r, order[k]);
    }
    return spec;
}

ComplexMatrix spectral_apply(const ComplexMatrix& m, const std::function<double(double)>& g,
                             ZeroPolicy zero_policy, double hermitian_tol) {
    Spectrum spec = hermitian_eig(m, hermitian_tol);
    const std::size_t d = m.dim();
    std::vector<double> mapped(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double lambda = spec.eigenvalues[k];
        if (std::abs(lambda) <= kZeroEigenvalueThreshold) {
            if (zero_policy == ZeroPolicy::Reject)
                throw SupportViolation("spectral_apply: zero eigenvalue outside the support");
            mapped[k] = 0.0;
            continue;
        }
        const double value = g(lambda);
        if (std::isnan(value))
            throw SupportViolation("spectral_apply: function undefined at eigenvalue " +
                                   std::to_string(lambda));
        mapped[k] = value;
    }
    Spectrum out{std::move(mapped), spec.eigenvectors};
    return out.reconstruct();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t da = a.dim(), db = b.dim();
    ComplexMatrix out(da * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) {
            const complex_t aij = a(i, j);
            if (aij == complex_t(0.0, 0.0)) continue;
            for (std::size_t p = 0; p < db; ++p)
                for (std::size_t q = 0; q < db; ++q)
                    out(i * db + p, j * db + q) = aij * b(p, q);
        }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t dim_a, std::size_t dim_b,
                            Subsystem keep) {
    if (dim_a * dim_b != m.dim())
        throw std::invalid_argument("partial_trace: dimension does not factor as dim_a * dim_b");
    if (keep == Subsystem::B) {
        ComplexMatrix out(dim_b);
        for (std::size_t p = 0; p < dim_b; ++p)
            for (std::size_t q = 0; q < dim_b; ++q) {
                complex_t sum = 0.0;
                for (std::size_t k = 0; k < dim_a; ++k) sum += m(k * dim_b + p, k * dim_b + q);
                out(p, q) = sum;
            }
        return out;
    }
    ComplexMatrix out(dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_a; ++j) {
            complex_t sum = 0.0;
            for (std::size_t k = 0; k < dim_b; ++k) sum += m(i * dim_b + k, j * dim_b + k);
            out(i, j) = sum;
        }
    return out;
}

std::vector<std::vector<complex_t>> orthonormalize(
    const std::vector<std::vector<complex_t>>& vectors, double drop_tol) {
    std::vector<std::vector<complex_t>> basis;
    for (const auto& v : vectors) {
        if (!basis.empty() && v.size() != basis.front().size())
            throw std::invalid_argument("orthonormalize: vectors of differing length");
        std::vector<complex_t> w = v;
        // Two orthogonalization passes keep the basis orthonormal to roundoff.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : basis) {
                complex_t overlap = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i) overlap += std::conj(u[i]) * w[i];
                for (std::size_t i = 0; i < w.size(); ++i) w[i] -= overlap * u[i];
            }
        }
        double norm_sq = 0.0;
        for (const auto& x : w) norm_sq += std::norm(x);
        const double norm = std::sqrt(norm_sq);
        if (norm < drop_tol) continue;  // dependent on the current span
        for (auto& x : w) x /= norm;
        basis.push_back(std::move(w));
    }
    return basis;
}

Projector projector_onto(const std::vector<std::vector<complex_t>>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("projector_onto: no vectors given");
    const std::size_t d = vectors.front().size();
    for (const auto& v : vectors)
        if (v.size() != d) throw std::invalid_argument("projector_onto: vectors of differing length");
    Projector p(d);
    for (const auto& u : orthonormalize(vectors))
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) p(r, c) += u[r] * std::conj(u[c]);
    return p;
}

bool is_psd(const ComplexMatrix& m, double tol) {
    Spectrum spec = hermitian_eig(m, std::max(kHermitianTolerance, tol));
    return spec.eigenvalues.empty() || spec.eigenvalues.back() >= -tol;
}

void check_density(const ComplexMatrix& rho, double tol, const std::string& what) {
    if (rho.dim() == 0) throw std::invalid_argument(what + ": empty matrix");
    if (rho.hermiticity_defect() > 1e-9)
        throw std::invalid_argument(what + ": not Hermitian");
    const double trace_err = std::abs(rho.trace() - complex_t(1.0, 0.0));
    if (trace_err > tol)
        throw std::invalid_argument(what + ": trace deviates from 1 by " +
                                    std::to_string(trace_err));
    if (!is_psd(rho, tol))
        throw std::invalid_argument(what + ": not positive semidefinite");
}

void check_projector(const ComplexMatrix& p, double tol, const std::string& what) {
    if (p.dim() == 0) throw std::invalid_argument(what + ": empty matrix");
    if (p.hermiticity_defect() > tol)
        throw std::invalid_argument(what + ": not Hermitian");
    if (max_abs_diff(p * p, p) > tol)
        throw std::invalid_argument(what + ": not idempotent");
}

}  // namespace qmsg
