#pragma once

#include <cstddef>
#include <vector>

#include "qmsg/complex_matrix.hpp"
#include "qmsg/rng.hpp"

namespace qmsg {

// Seeded generators for the random states, projectors, and bases used by the
// property sweeps and experiment runners. All randomness flows through the
// caller's generator.

std::vector<complex_t> random_unit_vector(std::size_t dim, Xoshiro256StarStar& rng);
std::vector<double> random_real_unit_vector(std::size_t dim, Xoshiro256StarStar& rng);

DensityMatrix random_pure_density(std::size_t dim, Xoshiro256StarStar& rng);

// Ginibre construction G G^dagger / Tr, full rank unless rank is given.
DensityMatrix random_density(std::size_t dim, Xoshiro256StarStar& rng, std::size_t rank = 0);

ComplexMatrix random_hermitian(std::size_t dim, Xoshiro256StarStar& rng);

// Projector onto the span of `rank` Gaussian vectors (almost surely rank `rank`).
Projector random_projector(std::size_t dim, std::size_t rank, Xoshiro256StarStar& rng);

// Haar-ish random unitary: Gram-Schmidt applied to a Gaussian matrix.
ComplexMatrix random_unitary(std::size_t dim, Xoshiro256StarStar& rng);

// `count` orthonormal real vectors in R^dim.
std::vector<std::vector<double>> random_real_orthonormal_basis(std::size_t dim, std::size_t count,
                                                               Xoshiro256StarStar& rng);

}  // namespace qmsg
