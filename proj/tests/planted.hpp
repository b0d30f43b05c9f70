#pragma once

#include <vector>

#include "qmsg/instance_io.hpp"
#include "qmsg/protocol.hpp"
#include "qmsg/rng.hpp"
#include "qmsg/sampling.hpp"

namespace qmsg::test {

// Builds a random protocol/function pair with a planted error profile:
// diagonal projectors and near-basis-state messages fix every acceptance
// probability within epsilon of its target, then a common random unitary
// hides the basis. Undefined cells are sprinkled in afterwards, which leaves
// the protocol correct on the promise.
struct PlantedOptions {
    std::size_t qubits = 1;
    std::size_t x_count = 4;
    std::size_t y_count = 8;
    double epsilon = 1e-4;
    double undefined_fraction = 0.2;
    bool exact_epsilon = false;  // plant the worst cell at exactly epsilon
};

// A single guess-update event: target state nearly inside the oriented
// subspace (mass 1 - eps_exact), guess with a planted oriented deficit.
// Both states are full rank: block-wise mixtures of Ginibre draws.
struct UpdateScenario {
    DensityMatrix rho;
    DensityMatrix sigma;
    Projector oriented;
    double deficit;    // a = 1 - Tr(Q sigma)
    double eps_exact;  // 1 - Tr(Q rho)
};

inline UpdateScenario make_update_scenario(Xoshiro256StarStar& rng, std::size_t d, double epsilon,
                                           double min_deficit) {
    UpdateScenario s;
    const std::size_t rank = 1 + rng.uniform_below(d - 1);
    s.oriented = random_projector(d, rank, rng);
    const Projector comp = ComplexMatrix::identity(d) - s.oriented;

    const auto blend = [&](const DensityMatrix& base, double outside_mass) {
        DensityMatrix inside = s.oriented * base * s.oriented;
        DensityMatrix outside = comp * base * comp;
        const double in_tr = inside.trace().real();
        const double out_tr = outside.trace().real();
        return complex_t((1.0 - outside_mass) / in_tr) * inside +
               complex_t(outside_mass / out_tr) * outside;
    };

    s.eps_exact = rng.uniform01() * epsilon;
    s.rho = blend(random_density(d, rng), s.eps_exact);
    s.deficit = min_deficit + (0.95 - min_deficit) * rng.uniform01();
    s.sigma = blend(random_density(d, rng), s.deficit);
    return s;
}

inline ProtocolInstance make_planted_protocol(const PlantedOptions& opt, Xoshiro256StarStar& rng) {
    const std::size_t d = std::size_t{1} << opt.qubits;
    const ComplexMatrix basis_change = random_unitary(d, rng);

    // Per-y acceptance subsets; any rank including 0 and d is legal.
    std::vector<std::vector<bool>> subsets(opt.y_count, std::vector<bool>(d, false));
    for (auto& subset : subsets)
        for (std::size_t i = 0; i < d; ++i) subset[i] = rng.bernoulli(0.5);

    std::vector<std::size_t> home(opt.x_count);
    std::vector<double> noise(opt.x_count);
    for (std::size_t x = 0; x < opt.x_count; ++x) {
        home[x] = rng.uniform_below(d);
        noise[x] = d == 1 ? 0.0 : rng.uniform01() * opt.epsilon;
    }
    if (opt.exact_epsilon && d > 1) {
        // Worst case: a singleton subset around home[0] with full noise gives
        // acceptance exactly 1 - epsilon.
        noise[0] = opt.epsilon;
        subsets[0].assign(d, false);
        subsets[0][home[0]] = true;
    }

    std::vector<DensityMatrix> messages;
    for (std::size_t x = 0; x < opt.x_count; ++x) {
        DensityMatrix rho(d);
        rho(home[x], home[x]) = 1.0 - noise[x];
        for (std::size_t i = 0; i < d; ++i)
            if (i != home[x]) rho(i, i) = noise[x] / static_cast<double>(d - 1);
        messages.push_back(basis_change * rho * basis_change.dagger());
    }

    std::vector<Projector> measurements;
    for (std::size_t y = 0; y < opt.y_count; ++y) {
        Projector proj(d);
        for (std::size_t i = 0; i < d; ++i)
            if (subsets[y][i]) proj(i, i) = 1.0;
        measurements.push_back(basis_change * proj * basis_change.dagger());
    }

    std::vector<CellValue> cells(opt.x_count * opt.y_count);
    for (std::size_t x = 0; x < opt.x_count; ++x)
        for (std::size_t y = 0; y < opt.y_count; ++y)
            cells[x * opt.y_count + y] =
                subsets[y][home[x]] ? CellValue::One : CellValue::Zero;

    // Shrink the promise, keeping at least one defined cell.
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (rng.uniform01() < opt.undefined_fraction && i + 1 < cells.size())
            cells[i] = CellValue::Undefined;

    ProtocolInstance inst{
        PartialFunction(opt.x_count, opt.y_count, std::move(cells)),
        make_protocol(opt.qubits, std::move(messages), std::move(measurements), opt.epsilon)};
    return inst;
}

}  // namespace qmsg::test
