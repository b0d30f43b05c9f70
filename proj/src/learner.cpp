#include "qmsg/learner.hpp"

#include <algorithm>
#include <cmath>

#include "qmsg/measures.hpp"

namespace qmsg {

namespace {

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    complex_t sum = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) sum += a(r, c) * b(c, r);
    return sum.real();
}

}  // namespace

std::size_t LearnerConfig::quantization_bits() const {
    const double levels = 1.0 / quantization_step();
    std::size_t bits = 0;
    while (std::ldexp(1.0, static_cast<int>(bits)) < levels) ++bits;
    return bits;
}

Projector oriented_projector(const Projector& p, int value) {
    if (value != 0 && value != 1)
        throw std::invalid_argument("oriented_projector: value must be a bit");
    if (value == 1) return p;
    return ComplexMatrix::identity(p.dim()) - p;
}

double quantize_error(double eps_exact, const LearnerConfig& cfg) {
    const double step = cfg.quantization_step();
    const double clamped = std::clamp(eps_exact, 0.0, cfg.epsilon());
    double tilde = std::floor(clamped / step) * step;
    if (tilde > cfg.epsilon()) tilde = cfg.epsilon();
    if (tilde == 0.0 && clamped > kZeroEigenvalueThreshold) tilde = step;
    return tilde;
}

DensityMatrix update_guess(const DensityMatrix& sigma, const Projector& oriented,
                           double eps_tilde, double min_deficit) {
    if (sigma.dim() != oriented.dim())
        throw std::invalid_argument("update_guess: dimension mismatch");
    if (eps_tilde < 0.0 || eps_tilde >= 1.0)
        throw std::invalid_argument("update_guess: eps_tilde outside [0, 1)");

    const double deficit = 1.0 - real_trace_product(oriented, sigma);
    if (deficit >= 1.0 - 1e-9)
        throw DegenerateGuessError(
            "update_guess: guess has no mass on the oriented subspace (a = " +
            std::to_string(deficit) + "), relative entropy to any target there is infinite");
    if (deficit < min_deficit)
        throw std::invalid_argument("update_guess: deficit " + std::to_string(deficit) +
                                    " is below the update trigger " + std::to_string(min_deficit));
    if (eps_tilde > 0.0 && deficit <= 0.0)
        throw std::invalid_argument(
            "update_guess: cannot place weight on a complement block of zero mass");

    const ComplexMatrix comp = ComplexMatrix::identity(sigma.dim()) - oriented;
    ComplexMatrix next = complex_t((1.0 - eps_tilde) / (1.0 - deficit)) *
                         (oriented * sigma * oriented);
    if (eps_tilde > 0.0) next += complex_t(eps_tilde / deficit) * (comp * sigma * comp);

    const double restored = real_trace_product(oriented, next);
    if (std::abs(restored - (1.0 - eps_tilde)) > 1e-10)
        throw std::logic_error("update_guess: oriented acceptance was not restored exactly");
    return next;
}

LearningRun run_learning(const QuantumOneWayProtocol& p, const PartialFunction& f, std::size_t x,
                         const LearnerConfig& cfg) {
    if (p.messages.size() != f.x_count() || p.measurements.size() != f.y_count())
        throw std::invalid_argument("run_learning: protocol and function dimensions differ");
    if (x >= f.x_count()) throw std::invalid_argument("run_learning: x out of range");
    if (!std::isfinite(p.prior_budget))
        throw std::invalid_argument("run_learning: prior budget must be finite");
    const double observed = verify_protocol(p, f);
    if (observed > cfg.epsilon() + 1e-12)
        throw std::invalid_argument("run_learning: protocol error " + std::to_string(observed) +
                                    " exceeds the configured bound " +
                                    std::to_string(cfg.epsilon()));

    LearningRun run;
    run.x = x;
    run.target = p.messages[x];
    run.decisions.assign(f.y_count(), std::nullopt);

    DensityMatrix sigma = p.prior;
    run.guesses.push_back(sigma);
    if (relative_entropy(run.target, sigma).is_infinite())
        throw std::invalid_argument("run_learning: target support escapes the prior");
    // Offline audit channel: later guesses carry genuinely tiny eigenvalues
    // (stacked block rescalings), so their divergence is tracked with the
    // clamped evaluation rather than the support-thresholded one.
    double current = relative_entropy_clamped(run.target, sigma);

    for (std::size_t y = 0; y < f.y_count(); ++y) {
        if (!f.defined(x, y)) continue;  // acceptance on such columns is irrelevant
        const int value = f.value(x, y) == CellValue::One ? 1 : 0;
        const Projector oriented = oriented_projector(p.measurements[y], value);
        const double deficit = 1.0 - real_trace_product(oriented, sigma);

        if (deficit < cfg.trigger()) {
            const double accept = real_trace_product(p.measurements[y], sigma);
            run.decisions[y] = accept >= 0.5 ? 1 : 0;
            continue;
        }

        const double eps_exact =
            std::max(0.0, 1.0 - real_trace_product(oriented, run.target));
        const double eps_tilde = quantize_error(eps_exact, cfg);
        const DensityMatrix next = update_guess(sigma, oriented, eps_tilde, cfg.trigger());
        const double after = relative_entropy_clamped(run.target, next);

        UpdateEvent event;
        event.y = y;
        event.value = value;
        event.oriented = oriented;
        event.deficit = deficit;
        event.eps_exact = eps_exact;
        event.eps_tilde = eps_tilde;
        event.s_before = current;
        event.s_after = after;
        run.updates.push_back(std::move(event));
        run.transcript.push_back({y, value, eps_tilde});

        sigma = next;
        current = after;
        run.guesses.push_back(sigma);
        // The update pins the oriented acceptance at 1 - eps_tilde, so the
        // measurement for y now yields the known value.
        run.decisions[y] = value;
    }

    const double update_bound =
        p.prior_budget / (5.0 * std::sqrt(cfg.epsilon())) + 1.0;
    if (static_cast<double>(run.updates.size()) > update_bound)
        throw std::logic_error("run_learning: update count " +
                               std::to_string(run.updates.size()) +
                               " exceeded the budget bound " + std::to_string(update_bound));
    for (std::size_t y = 0; y < f.y_count(); ++y) {
        if (!f.defined(x, y)) continue;
        const int expected = f.value(x, y) == CellValue::One ? 1 : 0;
        if (!run.decisions[y] || *run.decisions[y] != expected)
            throw std::logic_error("run_learning: decision at y=" + std::to_string(y) +
                                   " disagrees with the function value");
    }
    return run;
}

DeterministicProtocol compile_deterministic_protocol(const QuantumOneWayProtocol& p,
                                                     const PartialFunction& f,
                                                     const LearnerConfig& cfg) {
    check_protocol(p);

    DeterministicProtocol det;
    det.cfg = cfg;
    det.m_bits = f.m_bits();
    det.prior = p.prior;
    det.measurements = p.measurements;

    for (std::size_t x = 0; x < f.x_count(); ++x) {
        LearningRun run = run_learning(p, f, x, cfg);
        const std::size_t bits = transcript_bit_length(run.transcript.size(), det.m_bits, cfg);
        det.transcripts.push_back(std::move(run.transcript));
        det.message_bits.push_back(bits);
        det.cost_bits = std::max(det.cost_bits, bits);
    }

    const double per_record =
        static_cast<double>(det.m_bits + cfg.quantization_bits() + 1);
    det.cost_bound_bits =
        (p.prior_budget / (5.0 * std::sqrt(cfg.epsilon())) + 1.0) * per_record;

    for (std::size_t x = 0; x < f.x_count(); ++x)
        for (std::size_t y = 0; y < f.y_count(); ++y) {
            if (!f.defined(x, y)) continue;
            const int expected = f.value(x, y) == CellValue::One ? 1 : 0;
            if (replay_decision(det, x, y) != expected)
                throw std::logic_error(
                    "compile_deterministic_protocol: internal consistency failure at x=" +
                    std::to_string(x) + ", y=" + std::to_string(y));
        }
    return det;
}

int replay_decision(const DeterministicProtocol& det, std::size_t x, std::size_t y) {
    if (x >= det.transcripts.size())
        throw std::invalid_argument("replay_decision: x out of range");
    if (y >= det.measurements.size())
        throw std::invalid_argument("replay_decision: y out of range");
    DensityMatrix sigma = det.prior;
    for (const auto& record : det.transcripts[x]) {
        if (record.y > y) break;  // records are in ascending y order
        if (record.y == y) return record.value;
        const Projector oriented = oriented_projector(det.measurements[record.y], record.value);
        sigma = update_guess(sigma, oriented, record.eps_tilde, det.cfg.trigger());
    }
    const double accept = real_trace_product(det.measurements[y], sigma);
    return accept >= 0.5 ? 1 : 0;
}

std::size_t transcript_bit_length(std::size_t record_count, std::size_t m_bits,
                                  const LearnerConfig& cfg) {
    return record_count * (m_bits + 1 + cfg.quantization_bits());
}

std::vector<std::uint8_t> transcript_to_bits(const std::vector<TranscriptRecord>& transcript,
                                             std::size_t m_bits, const LearnerConfig& cfg) {
    const std::size_t grid_bits = cfg.quantization_bits();
    std::vector<std::uint8_t> bits;
    bits.reserve(transcript_bit_length(transcript.size(), m_bits, cfg));
    auto push_field = [&bits](std::uint64_t value, std::size_t width) {
        for (std::size_t i = width; i-- > 0;)
            bits.push_back(static_cast<std::uint8_t>((value >> i) & 1));
    };
    for (const auto& record : transcript) {
        if (m_bits < 64 && record.y >= (std::uint64_t{1} << m_bits))
            throw std::invalid_argument("transcript_to_bits: y does not fit in m bits");
        const auto grid_index = static_cast<std::uint64_t>(
            std::llround(record.eps_tilde / cfg.quantization_step()));
        push_field(record.y, m_bits);
        push_field(static_cast<std::uint64_t>(record.value), 1);
        push_field(grid_index, grid_bits);
    }
    return bits;
}

std::vector<TranscriptRecord> transcript_from_bits(const std::vector<std::uint8_t>& bits,
                                                   std::size_t m_bits, const LearnerConfig& cfg) {
    const std::size_t grid_bits = cfg.quantization_bits();
    const std::size_t record_width = m_bits + 1 + grid_bits;
    if (record_width == 0 || bits.size() % record_width != 0)
        throw std::invalid_argument("transcript_from_bits: length is not a whole record count");
    std::size_t pos = 0;
    auto read_field = [&bits, &pos](std::size_t width) {
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < width; ++i) value = (value << 1) | (bits[pos++] & 1);
        return value;
    };
    std::vector<TranscriptRecord> transcript;
    while (pos < bits.size()) {
        TranscriptRecord record;
        record.y = read_field(m_bits);
        record.value = static_cast<int>(read_field(1));
        record.eps_tilde =
            static_cast<double>(read_field(grid_bits)) * cfg.quantization_step();
        if (record.eps_tilde > cfg.epsilon() + 1e-15)
            throw std::invalid_argument("transcript_from_bits: eps_tilde above epsilon");
        if (!transcript.empty() && record.y <= transcript.back().y)
            throw std::invalid_argument("transcript_from_bits: y fields must strictly increase");
        transcript.push_back(record);
    }
    return transcript;
}

std::size_t AuditReport::failure_count() const {
    return static_cast<std::size_t>(
        std::count_if(lines.begin(), lines.end(), [](const AuditLine& l) { return !l.passed; }));
}

AuditReport audit_progress(const LearningRun& run, const LearnerConfig& cfg) {
    AuditReport report;
    const double tol = cfg.audit_tolerance();
    auto add_line = [&report](std::string step, std::size_t index, double lhs, double rhs,
                              bool passed) {
        if (!passed && report.passed) {
            report.passed = false;
            report.first_failure = step + " at update " + std::to_string(index);
        }
        report.lines.push_back({std::move(step), index, lhs, rhs, passed});
    };

    const double s_rho = von_neumann_entropy(run.target).bits();
    for (std::size_t i = 0; i < run.updates.size(); ++i) {
        const UpdateEvent& event = run.updates[i];

        const double gain = event.s_before - event.s_after;
        add_line("progress-claim", i, gain, event.deficit / 2.0,
                 gain >= event.deficit / 2.0 - tol);

        const DensityMatrix rho_tilde = pinch(run.target, event.oriented);
        const DensityMatrix sigma_tilde = pinch(run.guesses[i], event.oriented);
        const double pinched = relative_entropy_clamped(rho_tilde, sigma_tilde);
        add_line("uhlmann", i, pinched, event.s_before, pinched <= event.s_before + tol);

        const double growth = von_neumann_entropy(rho_tilde).bits() - s_rho;
        const double allowance = binary_entropy(std::clamp(event.eps_exact, 0.0, 1.0));
        add_line("araki-lieb", i, growth, allowance, growth <= allowance + tol);
    }

    const double final_s = relative_entropy_clamped(run.target, run.guesses.back());
    const double stop_level = 5.0 * std::sqrt(cfg.epsilon());
    if (final_s <= stop_level) {
        const double distance = trace_distance(run.target, run.guesses.back());
        add_line("pinsker-final", run.updates.size(), distance, 0.1, distance < 0.1);
    }
    return report;
}

}  // namespace qmsg
