#include "qmsg/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace qmsg {

double Xoshiro256StarStar::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1;
    do {
        u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<complex_t> random_unit_vector(std::size_t dim, Xoshiro256StarStar& rng) {
    std::vector<complex_t> v(dim);
    double norm_sq = 0.0;
    for (auto& x : v) {
        x = complex_t(rng.normal(), rng.normal());
        norm_sq += std::norm(x);
    }
    const double norm = std::sqrt(norm_sq);
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<double> random_real_unit_vector(std::size_t dim, Xoshiro256StarStar& rng) {
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        norm_sq += x * x;
    }
    const double norm = std::sqrt(norm_sq);
    for (auto& x : v) x /= norm;
    return v;
}

DensityMatrix random_pure_density(std::size_t dim, Xoshiro256StarStar& rng) {
    const auto v = random_unit_vector(dim, rng);
    DensityMatrix rho(dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) rho(r, c) = v[r] * std::conj(v[c]);
    return rho;
}

DensityMatrix random_density(std::size_t dim, Xoshiro256StarStar& rng, std::size_t rank) {
    if (rank == 0) rank = dim;
    if (rank > dim) throw std::invalid_argument("random_density: rank exceeds dimension");
    // G is dim x rank with complex Gaussian entries.
    std::vector<std::vector<complex_t>> g(dim, std::vector<complex_t>(rank));
    for (auto& row : g)
        for (auto& x : row) x = complex_t(rng.normal(), rng.normal());
    DensityMatrix rho(dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
            complex_t sum = 0.0;
            for (std::size_t k = 0; k < rank; ++k) sum += g[r][k] * std::conj(g[c][k]);
            rho(r, c) = sum;
        }
    const double tr = rho.trace().real();
    rho *= complex_t(1.0 / tr, 0.0);
    return rho;
}

ComplexMatrix random_hermitian(std::size_t dim, Xoshiro256StarStar& rng) {
    ComplexMatrix m(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        m(r, r) = rng.normal();
        for (std::size_t c = r + 1; c < dim; ++c) {
            const complex_t x(rng.normal(), rng.normal());
            m(r, c) = x;
            m(c, r) = std::conj(x);
        }
    }
    return m;
}

Projector random_projector(std::size_t dim, std::size_t rank, Xoshiro256StarStar& rng) {
    if (rank > dim) throw std::invalid_argument("random_projector: rank exceeds dimension");
    if (rank == 0) return Projector(dim);
    std::vector<std::vector<complex_t>> vecs;
    vecs.reserve(rank);
    for (std::size_t k = 0; k < rank; ++k) {
        std::vector<complex_t> v(dim);
        for (auto& x : v) x = complex_t(rng.normal(), rng.normal());
        vecs.push_back(std::move(v));
    }
    return projector_onto(vecs);
}

ComplexMatrix random_unitary(std::size_t dim, Xoshiro256StarStar& rng) {
    std::vector<std::vector<complex_t>> vecs;
    vecs.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        std::vector<complex_t> v(dim);
        for (auto& x : v) x = complex_t(rng.normal(), rng.normal());
        vecs.push_back(std::move(v));
    }
    const auto basis = orthonormalize(vecs);
    if (basis.size() != dim) throw std::runtime_error("random_unitary: degenerate Gaussian draw");
    ComplexMatrix u(dim);
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r) u(r, c) = basis[c][r];
    return u;
}

std::vector<std::vector<double>> random_real_orthonormal_basis(std::size_t dim, std::size_t count,
                                                               Xoshiro256StarStar& rng) {
    if (count > dim)
        throw std::invalid_argument("random_real_orthonormal_basis: count exceeds dimension");
    std::vector<std::vector<complex_t>> vecs;
    vecs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<complex_t> v(dim);
        for (auto& x : v) x = rng.normal();
        vecs.push_back(std::move(v));
    }
    const auto basis = orthonormalize(vecs);
    if (basis.size() != count)
        throw std::runtime_error("random_real_orthonormal_basis: degenerate Gaussian draw");
    std::vector<std::vector<double>> out(count, std::vector<double>(dim));
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t i = 0; i < dim; ++i) out[k][i] = basis[k][i].real();
    return out;
}

}  // namespace qmsg
