#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <future>

#include "planted.hpp"
#include "qmsg/learner.hpp"
#include "qmsg/measures.hpp"
#include "qmsg/oracle.hpp"
#include "test_util.hpp"

using namespace qmsg;
using qmsg::test::basis_projector;
using qmsg::test::make_planted_protocol;
using qmsg::test::make_update_scenario;
using qmsg::test::PlantedOptions;
using qmsg::test::UpdateScenario;

namespace {

double trace_with(const ComplexMatrix& a, const ComplexMatrix& b) {
    complex_t sum = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) sum += a(r, c) * b(c, r);
    return sum.real();
}

}  // namespace

TEST_CASE("LearnerConfig derives trigger and quantization from epsilon") {
    const LearnerConfig cfg(1e-4);
    CHECK(cfg.trigger() == doctest::Approx(0.1));
    CHECK(cfg.quantization_step() == doctest::Approx(1e-8));
    CHECK(cfg.quantization_bits() == 27);
    CHECK(LearnerConfig(1e-6).quantization_bits() == 40);
    CHECK_THROWS_AS(LearnerConfig(1e-3), std::invalid_argument);
    CHECK_THROWS_AS(LearnerConfig(0.0), std::invalid_argument);
}

TEST_CASE("oriented_projector orientation and involution") {
    const Projector p = basis_projector(2, 0);
    CHECK(max_abs_diff(oriented_projector(p, 1), p) == 0.0);
    const Projector flipped = oriented_projector(p, 0);
    CHECK(max_abs_diff(flipped, basis_projector(2, 1)) <= 1e-15);
    CHECK(max_abs_diff(oriented_projector(flipped, 0), p) <= 1e-15);
    CHECK_THROWS_AS(oriented_projector(p, 2), std::invalid_argument);
}

TEST_CASE("quantize_error rounds down onto the grid") {
    const LearnerConfig cfg(1e-4);
    const double step = cfg.quantization_step();
    CHECK(quantize_error(0.0, cfg) == 0.0);
    CHECK(quantize_error(3.7 * step, cfg) == doctest::Approx(3.0 * step));
    CHECK(quantize_error(cfg.epsilon(), cfg) <= cfg.epsilon());
    CHECK(quantize_error(2.0 * cfg.epsilon(), cfg) == doctest::Approx(cfg.epsilon()));
    // A strictly positive error never rounds to zero.
    CHECK(quantize_error(0.4 * step, cfg) == doctest::Approx(step));
    CHECK(quantize_error(1e-13, cfg) == 0.0);  // below the zero threshold
}

TEST_CASE("update_guess concentrates the mixed guess onto a rank-1 subspace") {
    const DensityMatrix sigma = complex_t(0.5) * ComplexMatrix::identity(2);
    const Projector q = basis_projector(2, 0);
    const DensityMatrix next = update_guess(sigma, q, 0.0, 0.0);
    CHECK(max_abs_diff(next, q) <= 1e-12);
}

TEST_CASE("update_guess at eps_tilde = a is the pinching") {
    Xoshiro256StarStar rng(201);
    const DensityMatrix sigma = random_density(4, rng);
    const Projector q = random_projector(4, 2, rng);
    const double deficit = 1.0 - trace_with(q, sigma);
    const DensityMatrix next = update_guess(sigma, q, deficit, 0.0);
    CHECK(max_abs_diff(next, pinch(sigma, q)) <= 1e-10);
}

TEST_CASE("update_guess restores the oriented acceptance exactly") {
    Xoshiro256StarStar rng(202);
    const LearnerConfig cfg(1e-4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 << rng.uniform_below(3);
        const UpdateScenario s = make_update_scenario(rng, d, cfg.epsilon(), cfg.trigger());
        const double eps_tilde = quantize_error(s.eps_exact, cfg);
        const DensityMatrix next = update_guess(s.sigma, s.oriented, eps_tilde, cfg.trigger());
        REQUIRE(std::abs(trace_with(s.oriented, next) - (1.0 - eps_tilde)) <= 1e-10);
        REQUIRE(std::abs(next.trace().real() - 1.0) <= 1e-10);
        REQUIRE(is_psd(next, 1e-10));
    }
}

TEST_CASE("update_guess progress claim on random events") {
    Xoshiro256StarStar rng(203);
    const LearnerConfig cfg(1e-4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 << rng.uniform_below(3);
        const UpdateScenario s = make_update_scenario(rng, d, cfg.epsilon(), cfg.trigger());
        const double eps_tilde = quantize_error(s.eps_exact, cfg);
        const DensityMatrix next = update_guess(s.sigma, s.oriented, eps_tilde, cfg.trigger());
        const double before = relative_entropy_clamped(s.rho, s.sigma);
        const double after = relative_entropy_clamped(s.rho, next);
        REQUIRE(before - after >= s.deficit / 2.0 - 1e-8);
    }
}

TEST_CASE("divergence decomposition across an update") {
    // Two exact identities tie update_guess, pinch and the entropy ops
    // together: with rho~ and sigma~ the pinched states and eps_y the
    // target's complement mass,
    //   S(rho~||sigma~) = S(rho~||sigma') + H(eps_y, a) - H(eps_y, eps~)
    //   S(rho ||sigma') = S(rho~||sigma') + S(rho~) - S(rho)
    Xoshiro256StarStar rng(215);
    const LearnerConfig cfg(1e-4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = std::size_t{2} << rng.uniform_below(3);
        const UpdateScenario s = make_update_scenario(rng, d, cfg.epsilon(), cfg.trigger());
        const double eps_tilde = quantize_error(s.eps_exact, cfg);
        if (eps_tilde <= 0.0) continue;
        const DensityMatrix next = update_guess(s.sigma, s.oriented, eps_tilde, cfg.trigger());
        const DensityMatrix rho_tilde = pinch(s.rho, s.oriented);
        const DensityMatrix sigma_tilde = pinch(s.sigma, s.oriented);

        const double lhs = relative_entropy(rho_tilde, sigma_tilde).bits();
        const double rhs = relative_entropy(rho_tilde, next).bits() +
                           cross_binary_entropy(s.eps_exact, s.deficit).bits() -
                           cross_binary_entropy(s.eps_exact, eps_tilde).bits();
        REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-9));

        const double whole = relative_entropy(s.rho, next).bits();
        const double split = relative_entropy(rho_tilde, next).bits() +
                             von_neumann_entropy(rho_tilde).bits() -
                             von_neumann_entropy(s.rho).bits();
        REQUIRE(whole == doctest::Approx(split).epsilon(1e-9));
    }
}

TEST_CASE("quantization robustness: a grid neighbor barely moves the gain") {
    Xoshiro256StarStar rng(204);
    const LearnerConfig cfg(1e-4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 << rng.uniform_below(2);
        const UpdateScenario s = make_update_scenario(rng, d, cfg.epsilon(), cfg.trigger());
        const double eps_tilde = quantize_error(s.eps_exact, cfg);
        const double neighbor = eps_tilde + cfg.quantization_step();
        const double before = relative_entropy_clamped(s.rho, s.sigma);
        const double gain =
            before - relative_entropy_clamped(s.rho, update_guess(s.sigma, s.oriented, eps_tilde,
                                                                  cfg.trigger()));
        const double gain_neighbor =
            before - relative_entropy_clamped(s.rho, update_guess(s.sigma, s.oriented, neighbor,
                                                                  cfg.trigger()));
        REQUIRE(std::abs(gain - gain_neighbor) < s.deficit / 4.0);
    }
}

TEST_CASE("update_guess error paths") {
    const LearnerConfig cfg(1e-4);
    const Projector q = basis_projector(2, 0);

    SUBCASE("degenerate guess") {
        const DensityMatrix stuck = basis_projector(2, 1);  // entirely in the complement
        CHECK_THROWS_AS(update_guess(stuck, q, 0.0, cfg.trigger()), DegenerateGuessError);
    }
    SUBCASE("deficit below the trigger") {
        const DensityMatrix close = basis_projector(2, 0);
        CHECK_THROWS_AS(update_guess(close, q, 0.0, cfg.trigger()), std::invalid_argument);
    }
    SUBCASE("eps_tilde outside [0,1)") {
        const DensityMatrix sigma = complex_t(0.5) * ComplexMatrix::identity(2);
        CHECK_THROWS_AS(update_guess(sigma, q, -0.1, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(update_guess(sigma, q, 1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("run_learning with the target as prior does no updates") {
    Xoshiro256StarStar rng(205);
    PlantedOptions opt;
    opt.x_count = 1;
    opt.y_count = 4;
    opt.undefined_fraction = 0.0;
    ProtocolInstance inst = make_planted_protocol(opt, rng);
    inst.protocol.prior = inst.protocol.messages[0];

    const LearnerConfig cfg(opt.epsilon);
    const LearningRun run = run_learning(inst.protocol, inst.function, 0, cfg);
    CHECK(run.updates.empty());
    CHECK(run.transcript.empty());
    for (std::size_t y = 0; y < 4; ++y) {
        REQUIRE(run.decisions[y].has_value());
        REQUIRE(*run.decisions[y] == (inst.function.value(0, y) == CellValue::One ? 1 : 0));
    }
}

TEST_CASE("run_learning with near-perfect measurements does no updates") {
    // All columns accept the mixed prior with probability 1.
    std::vector<DensityMatrix> messages = {complex_t(0.5) * ComplexMatrix::identity(2)};
    std::vector<Projector> measurements = {ComplexMatrix::identity(2),
                                           ComplexMatrix::identity(2)};
    const QuantumOneWayProtocol p = make_protocol(1, messages, measurements, 1e-4);
    const PartialFunction f = PartialFunction::from_rows({"11"});
    const LearningRun run = run_learning(p, f, 0, LearnerConfig(1e-4));
    CHECK(run.updates.empty());
    CHECK(run.decisions[0] == 1);
    CHECK(run.decisions[1] == 1);
}

TEST_CASE("run_learning on a random q=2 protocol stays within the update budget") {
    Xoshiro256StarStar rng(206);
    PlantedOptions opt;
    opt.qubits = 2;
    opt.x_count = 4;
    opt.y_count = 16;
    const ProtocolInstance inst = make_planted_protocol(opt, rng);
    const LearnerConfig cfg(opt.epsilon);
    for (std::size_t x = 0; x < opt.x_count; ++x) {
        const LearningRun run = run_learning(inst.protocol, inst.function, x, cfg);
        REQUIRE(static_cast<double>(run.updates.size()) <=
                inst.protocol.prior_budget / (5.0 * std::sqrt(cfg.epsilon())) + 1.0);
        for (std::size_t y = 0; y < opt.y_count; ++y)
            if (inst.function.defined(x, y))
                REQUIRE(*run.decisions[y] ==
                        (inst.function.value(x, y) == CellValue::One ? 1 : 0));
        // Monotone progress: the divergence to the target stays finite and
        // never increases across guesses (no guess ever loses the target).
        double previous = relative_entropy_clamped(run.target, run.guesses.front());
        for (std::size_t g = 1; g < run.guesses.size(); ++g) {
            const double current = relative_entropy_clamped(run.target, run.guesses[g]);
            REQUIRE(std::isfinite(current));
            REQUIRE(current <= previous + 1e-8);
            previous = current;
        }
    }
}

TEST_CASE("run_learning rejects a protocol whose error exceeds the config") {
    Xoshiro256StarStar rng(207);
    PlantedOptions opt;
    opt.exact_epsilon = true;
    const ProtocolInstance inst = make_planted_protocol(opt, rng);
    CHECK_THROWS_AS(run_learning(inst.protocol, inst.function, 0, LearnerConfig(1e-5)),
                    std::invalid_argument);
}

TEST_CASE("compile on a constant function sends nothing") {
    std::vector<DensityMatrix> messages = {complex_t(0.5) * ComplexMatrix::identity(2),
                                           complex_t(0.5) * ComplexMatrix::identity(2)};
    std::vector<Projector> measurements = {ComplexMatrix::identity(2), ComplexMatrix(2)};
    const QuantumOneWayProtocol p = make_protocol(1, messages, measurements, 1e-4);
    const PartialFunction f = PartialFunction::from_rows({"10", "10"});
    const DeterministicProtocol det =
        compile_deterministic_protocol(p, f, LearnerConfig(1e-4));
    CHECK(det.cost_bits == 0);
    CHECK(det.transcripts[0].empty());
    CHECK(det.transcripts[1].empty());
    CHECK(replay_decision(det, 0, 0) == 1);
    CHECK(replay_decision(det, 1, 1) == 0);
}

TEST_CASE("compile on a random suite matches the function everywhere") {
    Xoshiro256StarStar rng(208);
    for (int trial = 0; trial < 10; ++trial) {
        PlantedOptions opt;
        opt.x_count = 4;
        opt.y_count = 8;
        const ProtocolInstance inst = make_planted_protocol(opt, rng);
        const LearnerConfig cfg(opt.epsilon);
        const DeterministicProtocol det =
            compile_deterministic_protocol(inst.protocol, inst.function, cfg);
        const ValidationResult validation = validate_compiled(det, inst.function);
        REQUIRE(validation.ok);
        REQUIRE(static_cast<double>(det.cost_bits) <= det.cost_bound_bits);
        // Cost is the longest per-x message.
        std::size_t longest = 0;
        for (std::size_t bits : det.message_bits) longest = std::max(longest, bits);
        REQUIRE(det.cost_bits == longest);
    }
}

TEST_CASE("transcript bit round-trip") {
    Xoshiro256StarStar rng(209);
    const LearnerConfig cfg(1e-4);
    const std::size_t m = 5;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<TranscriptRecord> transcript;
        std::size_t y = 0;
        const std::size_t count = rng.uniform_below(6);
        for (std::size_t i = 0; i < count; ++i) {
            y += 1 + rng.uniform_below(5);
            if (y >= 32) break;
            const double eps =
                quantize_error(rng.uniform01() * cfg.epsilon(), cfg);
            transcript.push_back({y, static_cast<int>(rng.uniform_below(2)), eps});
        }
        const auto bits = transcript_to_bits(transcript, m, cfg);
        REQUIRE(bits.size() == transcript_bit_length(transcript.size(), m, cfg));
        const auto parsed = transcript_from_bits(bits, m, cfg);
        REQUIRE(parsed.size() == transcript.size());
        for (std::size_t i = 0; i < parsed.size(); ++i) {
            REQUIRE(parsed[i].y == transcript[i].y);
            REQUIRE(parsed[i].value == transcript[i].value);
            REQUIRE(parsed[i].eps_tilde == doctest::Approx(transcript[i].eps_tilde).epsilon(1e-15));
        }
    }
}

TEST_CASE("transcript parsing rejects malformed streams") {
    const LearnerConfig cfg(1e-4);
    CHECK_THROWS_AS(transcript_from_bits(std::vector<std::uint8_t>(5, 0), 5, cfg),
                    std::invalid_argument);
    // Two records with non-increasing y.
    std::vector<TranscriptRecord> bad = {{3, 1, 0.0}, {3, 0, 0.0}};
    const auto bits = transcript_to_bits(bad, 5, cfg);
    CHECK_THROWS_AS(transcript_from_bits(bits, 5, cfg), std::invalid_argument);
}

TEST_CASE("audit of a zero-update run passes trivially") {
    Xoshiro256StarStar rng(210);
    PlantedOptions opt;
    opt.x_count = 1;
    opt.y_count = 2;
    ProtocolInstance inst = make_planted_protocol(opt, rng);
    inst.protocol.prior = inst.protocol.messages[0];
    const LearnerConfig cfg(opt.epsilon);
    const LearningRun run = run_learning(inst.protocol, inst.function, 0, cfg);
    REQUIRE(run.updates.empty());
    const AuditReport report = audit_progress(run, cfg);
    CHECK(report.passed);
    // Final state equals the target, so the Pinsker line is present and holds.
    CHECK(report.lines.size() == 1);
    CHECK(report.lines.front().step == "pinsker-final");
}

TEST_CASE("audit of a forced single update from the mixed guess") {
    // d=2 equality-style protocol: the first defined column forces an update.
    std::vector<DensityMatrix> messages = {basis_projector(2, 0)};
    std::vector<Projector> measurements = {basis_projector(2, 0)};
    const QuantumOneWayProtocol p = make_protocol(1, messages, measurements, 1e-4);
    const PartialFunction f = PartialFunction::from_rows({"1"});
    const LearnerConfig cfg(1e-4);
    const LearningRun run = run_learning(p, f, 0, cfg);
    REQUIRE(run.updates.size() == 1);
    CHECK(run.updates[0].deficit == doctest::Approx(0.5));
    const AuditReport report = audit_progress(run, cfg);
    CHECK(report.passed);
    CHECK(report.failure_count() == 0);
    // The gain here is S(rho||I/2) - S(rho||rho) = 1 bit >= a/2 = 0.25.
    CHECK(run.updates[0].s_before - run.updates[0].s_after ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("long update chains from containing subspaces audit cleanly") {
    // Every measurement's range contains the (near-)pure target inside a
    // rank-d/2 subspace of its own orientation, so the guess keeps getting
    // caught deficient; the chain collapses or grades the guess spectrum far
    // below the support threshold and the audit must still hold.
    Xoshiro256StarStar rng(213);
    std::size_t deepest = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 4;
        const double eps = 1e-4;
        const auto psi = random_unit_vector(d, rng);
        DensityMatrix rho(d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) rho(r, c) = psi[r] * std::conj(psi[c]);
        if (trial % 2 == 1) {  // mixed target: every eps_y lands in (0, eps)
            rho *= complex_t(1.0 - 0.9e-4);
            rho += complex_t(0.9e-4 / d) * ComplexMatrix::identity(d);
        }
        std::vector<Projector> measurements;
        for (int y = 0; y < 16; ++y)
            measurements.push_back(projector_onto({psi, random_unit_vector(d, rng)}));
        const PartialFunction f = PartialFunction::from_rows({std::string(16, '1')});
        const QuantumOneWayProtocol p = make_protocol(2, {rho}, measurements, eps);

        const LearnerConfig cfg(eps);
        const LearningRun run = run_learning(p, f, 0, cfg);
        deepest = std::max(deepest, run.updates.size());
        const AuditReport report = audit_progress(run, cfg);
        if (!report.passed) CAPTURE(report.first_failure);
        REQUIRE(report.passed);
    }
    CHECK(deepest >= 3);  // the regime with stacked block rescalings is reached
}

TEST_CASE("learning runs for distinct rows are independent and thread-safe") {
    Xoshiro256StarStar rng(214);
    PlantedOptions opt;
    opt.x_count = 4;
    opt.y_count = 8;
    const ProtocolInstance inst = make_planted_protocol(opt, rng);
    const LearnerConfig cfg(opt.epsilon);

    std::vector<LearningRun> sequential;
    for (std::size_t x = 0; x < opt.x_count; ++x)
        sequential.push_back(run_learning(inst.protocol, inst.function, x, cfg));

    std::vector<std::future<LearningRun>> tasks;
    for (std::size_t x = 0; x < opt.x_count; ++x)
        tasks.push_back(std::async(std::launch::async, [&, x] {
            return run_learning(inst.protocol, inst.function, x, cfg);
        }));
    for (std::size_t x = 0; x < opt.x_count; ++x) {
        const LearningRun run = tasks[x].get();
        REQUIRE(run.transcript.size() == sequential[x].transcript.size());
        for (std::size_t i = 0; i < run.transcript.size(); ++i) {
            REQUIRE(run.transcript[i].y == sequential[x].transcript[i].y);
            REQUIRE(run.transcript[i].value == sequential[x].transcript[i].value);
            REQUIRE(run.transcript[i].eps_tilde == sequential[x].transcript[i].eps_tilde);
        }
    }
}

TEST_CASE("learning works in the literal half-rank setting") {
    // The padded embedding realizes the d/2-rank measurement normalization;
    // compilation and the audit must behave as in the unpadded protocol.
    Xoshiro256StarStar rng(212);
    PlantedOptions opt;
    opt.x_count = 3;
    opt.y_count = 6;
    const ProtocolInstance inst = make_planted_protocol(opt, rng);
    const QuantumOneWayProtocol padded = pad_to_half_rank(inst.protocol);
    const LearnerConfig cfg(opt.epsilon);

    const DeterministicProtocol det =
        compile_deterministic_protocol(padded, inst.function, cfg);
    REQUIRE(validate_compiled(det, inst.function).ok);
    for (std::size_t x = 0; x < opt.x_count; ++x) {
        const LearningRun run = run_learning(padded, inst.function, x, cfg);
        const AuditReport report = audit_progress(run, cfg);
        REQUIRE(report.passed);
    }
}

TEST_CASE("audit passes across random runs at q <= 2") {
    Xoshiro256StarStar rng(211);
    for (int trial = 0; trial < 100; ++trial) {
        PlantedOptions opt;
        opt.qubits = 1 + rng.uniform_below(2);
        opt.x_count = 2;
        opt.y_count = 8;
        const ProtocolInstance inst = make_planted_protocol(opt, rng);
        const LearnerConfig cfg(opt.epsilon);
        const std::size_t x = rng.uniform_below(opt.x_count);
        const LearningRun run = run_learning(inst.protocol, inst.function, x, cfg);
        const AuditReport report = audit_progress(run, cfg);
        if (!report.passed) {
            CAPTURE(trial);
            CAPTURE(report.first_failure);
        }
        REQUIRE(report.passed);
    }
}
