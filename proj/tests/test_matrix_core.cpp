#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmsg/complex_matrix.hpp"
#include "qmsg/rng.hpp"
#include "qmsg/sampling.hpp"
#include "test_util.hpp"

using namespace qmsg;
using qmsg::test::basis_projector;
using qmsg::test::basis_vector;
using qmsg::test::make_matrix;

TEST_CASE("hermitian_eig on the identity") {
    const Spectrum spec = hermitian_eig(ComplexMatrix::identity(2));
    CHECK(spec.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(spec.eigenvalues[1] == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig on a Pauli-X-type matrix") {
    const auto m = make_matrix({{0.0, 1.0}, {1.0, 0.0}});
    const Spectrum spec = hermitian_eig(m);
    CHECK(spec.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_eig reconstructs a random d=8 Hermitian matrix") {
    Xoshiro256StarStar rng(42);
    const ComplexMatrix m = random_hermitian(8, rng);
    const Spectrum spec = hermitian_eig(m);
    CHECK(max_abs_diff(spec.reconstruct(), m) <= 1e-10 * m.max_abs());
}

TEST_CASE("hermitian_eig rejects a non-Hermitian input") {
    auto m = make_matrix({{0.0, 1.0}, {0.5, 0.0}});
    CHECK_THROWS_AS(hermitian_eig(m), std::invalid_argument);
}

TEST_CASE("eigendecomposition invariants over random matrices, d in 2..16") {
    Xoshiro256StarStar rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + rng.uniform_below(15);
        const ComplexMatrix m = random_hermitian(d, rng);
        const Spectrum spec = hermitian_eig(m);

        REQUIRE(max_abs_diff(spec.reconstruct(), m) <= 1e-10 * std::max(1.0, m.max_abs()));
        // Descending order.
        for (std::size_t k = 0; k + 1 < d; ++k)
            REQUIRE(spec.eigenvalues[k] >= spec.eigenvalues[k + 1]);
        // U^dagger U = I.
        const ComplexMatrix gram = spec.eigenvectors.dagger() * spec.eigenvectors;
        REQUIRE(max_abs_diff(gram, ComplexMatrix::identity(d)) <= 1e-10);
    }
}

TEST_CASE("spectral_apply with the identity function returns the matrix") {
    Xoshiro256StarStar rng(3);
    const ComplexMatrix m = random_hermitian(5, rng);
    const ComplexMatrix out = spectral_apply(m, [](double x) { return x; }, ZeroPolicy::TreatAsZero);
    CHECK(max_abs_diff(out, m) <= 1e-10 * m.max_abs());
}

TEST_CASE("spectral_apply squares a diagonal matrix") {
    const auto m = ComplexMatrix::diagonal({2.0, 3.0});
    const ComplexMatrix out = spectral_apply(m, [](double x) { return x * x; }, ZeroPolicy::TreatAsZero);
    CHECK(max_abs_diff(out, ComplexMatrix::diagonal({4.0, 9.0})) <= 1e-12);
}

TEST_CASE("spectral_apply log2 on the maximally mixed qubit") {
    const auto m = ComplexMatrix::diagonal({0.5, 0.5});
    const ComplexMatrix out =
        spectral_apply(m, [](double x) { return std::log2(x); }, ZeroPolicy::TreatAsZero);
    CHECK(max_abs_diff(out, ComplexMatrix::diagonal({-1.0, -1.0})) <= 1e-12);
}

TEST_CASE("spectral_apply signals support violations") {
    const auto singular = ComplexMatrix::diagonal({1.0, 0.0});
    const auto log2_fn = [](double x) { return x > 0.0 ? std::log2(x) : std::nan(""); };

    SUBCASE("zero eigenvalue under Reject") {
        CHECK_THROWS_AS(spectral_apply(singular, log2_fn, ZeroPolicy::Reject), SupportViolation);
    }
    SUBCASE("zero eigenvalue under TreatAsZero maps to 0") {
        const ComplexMatrix out = spectral_apply(singular, log2_fn, ZeroPolicy::TreatAsZero);
        CHECK(std::abs(out(0, 0)) <= 1e-12);  // log2(1) = 0
        CHECK(std::abs(out(1, 1)) <= 1e-12);
    }
    SUBCASE("negative retained eigenvalue is rejected") {
        const auto indefinite = ComplexMatrix::diagonal({1.0, -0.5});
        CHECK_THROWS_AS(spectral_apply(indefinite, log2_fn, ZeroPolicy::TreatAsZero),
                        SupportViolation);
    }
}

TEST_CASE("tensor_product with a 1-dimensional identity is a no-op") {
    Xoshiro256StarStar rng(11);
    const ComplexMatrix a = random_hermitian(3, rng);
    CHECK(max_abs_diff(tensor_product(a, ComplexMatrix::identity(1)), a) == 0.0);
}

TEST_CASE("tensor_product of basis projectors") {
    const ComplexMatrix p = tensor_product(basis_projector(2, 0), basis_projector(2, 0));
    CHECK(max_abs_diff(p, basis_projector(4, 0)) <= 1e-15);
}

TEST_CASE("tensor_product trace is multiplicative") {
    Xoshiro256StarStar rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const ComplexMatrix a = random_hermitian(3, rng);
        const ComplexMatrix b = random_hermitian(4, rng);
        const complex_t lhs = tensor_product(a, b).trace();
        const complex_t rhs = a.trace() * b.trace();
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("partial_trace of a product state recovers the factor") {
    Xoshiro256StarStar rng(17);
    const DensityMatrix rho_a = random_density(2, rng);
    const DensityMatrix rho_b = random_density(3, rng);
    const ComplexMatrix joint = tensor_product(rho_a, rho_b);
    CHECK(max_abs_diff(partial_trace(joint, 2, 3, Subsystem::B), rho_b) <= 1e-12);
    CHECK(max_abs_diff(partial_trace(joint, 2, 3, Subsystem::A), rho_a) <= 1e-12);
}

TEST_CASE("partial_trace of an EPR pair is maximally mixed") {
    // (|00> + |11>)/sqrt(2)
    std::vector<complex_t> psi = {1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)};
    ComplexMatrix rho(4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) rho(r, c) = psi[r] * std::conj(psi[c]);
    const ComplexMatrix reduced = partial_trace(rho, 2, 2, Subsystem::B);
    CHECK(max_abs_diff(reduced, complex_t(0.5) * ComplexMatrix::identity(2)) <= 1e-12);
}

TEST_CASE("partial_trace preserves trace and positivity on random bipartite states") {
    Xoshiro256StarStar rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const bool split_high = trial % 2 == 0;
        const std::size_t da = split_high ? 4 : 2;
        const std::size_t db = 8 / da;
        const DensityMatrix rho =
            trial % 3 == 0 ? random_pure_density(8, rng) : random_density(8, rng);
        const auto keep = trial % 2 == 0 ? Subsystem::B : Subsystem::A;
        const DensityMatrix reduced = partial_trace(rho, da, db, keep);
        REQUIRE(std::abs(reduced.trace() - complex_t(1.0)) <= 1e-10);
        REQUIRE(is_psd(reduced, 1e-10));
    }
}

TEST_CASE("partial_trace rejects a dimension that does not factor") {
    CHECK_THROWS_AS(partial_trace(ComplexMatrix::identity(6), 4, 2, Subsystem::A),
                    std::invalid_argument);
}

TEST_CASE("projector_onto a single unit vector has rank 1") {
    const Projector p = projector_onto({basis_vector(3, 1)});
    CHECK(std::abs(p.trace() - complex_t(1.0)) <= 1e-12);
    CHECK(max_abs_diff(p, basis_projector(3, 1)) <= 1e-12);
}

TEST_CASE("projector_onto a full basis is the identity") {
    const Projector p = projector_onto({basis_vector(3, 0), basis_vector(3, 1), basis_vector(3, 2)});
    CHECK(max_abs_diff(p, ComplexMatrix::identity(3)) <= 1e-12);
}

TEST_CASE("projector_onto drops linearly dependent vectors") {
    std::vector<complex_t> v = {complex_t(0.6, 0.0), complex_t(0.0, 0.8)};
    std::vector<complex_t> scaled = {complex_t(1.2, 0.0), complex_t(0.0, 1.6)};
    const Projector p = projector_onto({v, scaled});
    CHECK(std::abs(p.trace() - complex_t(1.0)) <= 1e-10);
    // Same projector as from the single vector.
    CHECK(max_abs_diff(p, projector_onto({v})) <= 1e-10);
}

TEST_CASE("projector_onto output is idempotent and Hermitian on random spans") {
    Xoshiro256StarStar rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + rng.uniform_below(7);
        const std::size_t count = 1 + rng.uniform_below(d);
        std::vector<std::vector<complex_t>> vecs;
        for (std::size_t k = 0; k < count; ++k) vecs.push_back(random_unit_vector(d, rng));
        const Projector p = projector_onto(vecs);
        REQUIRE(p.hermiticity_defect() <= 1e-10);
        REQUIRE(max_abs_diff(p * p, p) <= 1e-10);
    }
}

TEST_CASE("is_psd basics") {
    CHECK(is_psd(ComplexMatrix::identity(3)));
    CHECK_FALSE(is_psd(ComplexMatrix::diagonal({1.0, -1.0})));
}

TEST_CASE("is_psd on sigma - rho/4 for qubit states") {
    Xoshiro256StarStar rng(29);
    const ComplexMatrix sigma = complex_t(0.5) * ComplexMatrix::identity(2);
    for (int trial = 0; trial < 100; ++trial) {
        const DensityMatrix rho = random_density(2, rng);
        REQUIRE(is_psd(sigma - complex_t(0.25) * rho, 1e-9));
    }
}
