#include "qmsg/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "qmsg/measures.hpp"

namespace qmsg {

PartialFunction::PartialFunction(std::size_t x_count, std::size_t y_count,
                                 std::vector<CellValue> values)
    : x_count_(x_count), y_count_(y_count), values_(std::move(values)) {
    if (x_count_ == 0 || y_count_ == 0)
        throw std::invalid_argument("PartialFunction: empty domain");
    if (values_.size() != x_count_ * y_count_)
        throw std::invalid_argument("PartialFunction: table size does not match dimensions");
    if (defined_count() == 0)
        throw std::invalid_argument("PartialFunction: no defined entries");
}

PartialFunction PartialFunction::from_rows(const std::vector<std::string>& rows) {
    if (rows.empty()) throw std::invalid_argument("PartialFunction: no rows");
    const std::size_t y_count = rows.front().size();
    std::vector<CellValue> values;
    values.reserve(rows.size() * y_count);
    for (const auto& row : rows) {
        if (row.size() != y_count)
            throw std::invalid_argument("PartialFunction: rows of differing length");
        for (char c : row) {
            switch (c) {
                case '0': values.push_back(CellValue::Zero); break;
                case '1': values.push_back(CellValue::One); break;
                case '*': values.push_back(CellValue::Undefined); break;
                default:
                    throw std::invalid_argument(std::string("PartialFunction: bad cell '") + c +
                                                "' (expected 0, 1 or *)");
            }
        }
    }
    return PartialFunction(rows.size(), y_count, std::move(values));
}

std::size_t PartialFunction::m_bits() const {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < y_count_) ++bits;
    return bits;
}

std::size_t PartialFunction::defined_count() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(),
                      [](CellValue v) { return v != CellValue::Undefined; }));
}

QuantumOneWayProtocol make_protocol(std::size_t qubits, std::vector<DensityMatrix> messages,
                                    std::vector<Projector> measurements, double epsilon) {
    QuantumOneWayProtocol p;
    p.qubits = qubits;
    p.epsilon = epsilon;
    p.messages = std::move(messages);
    p.measurements = std::move(measurements);
    const double d = static_cast<double>(p.dim());
    p.prior = complex_t(1.0 / d) * ComplexMatrix::identity(p.dim());
    p.prior_budget = 2.0 * static_cast<double>(qubits);
    return p;
}

void check_protocol(const QuantumOneWayProtocol& p) {
    const std::size_t d = p.dim();
    if (p.messages.empty()) throw std::invalid_argument("protocol: no messages");
    if (p.measurements.empty()) throw std::invalid_argument("protocol: no measurements");
    if (p.epsilon < 0.0 || p.epsilon >= 0.5)
        throw std::invalid_argument("protocol: error bound must lie in [0, 1/2)");
    for (std::size_t x = 0; x < p.messages.size(); ++x) {
        if (p.messages[x].dim() != d)
            throw std::invalid_argument("protocol: message " + std::to_string(x) +
                                        " has wrong dimension");
        check_density(p.messages[x], 1e-9, "protocol: message " + std::to_string(x));
    }
    for (std::size_t y = 0; y < p.measurements.size(); ++y) {
        if (p.measurements[y].dim() != d)
            throw std::invalid_argument("protocol: measurement " + std::to_string(y) +
                                        " has wrong dimension");
        check_projector(p.measurements[y], 1e-9, "protocol: measurement " + std::to_string(y));
    }
    check_density(p.prior, 1e-9, "protocol: prior");
    for (std::size_t x = 0; x < p.messages.size(); ++x) {
        const EntropyValue s = relative_entropy(p.messages[x], p.prior);
        if (s.is_infinite())
            throw std::invalid_argument("protocol: S(message " + std::to_string(x) +
                                        " || prior) is infinite");
        if (s.bits() > p.prior_budget + 1e-9)
            throw std::invalid_argument("protocol: S(message " + std::to_string(x) +
                                        " || prior) exceeds the prior budget");
    }
}

double acceptance_probability(const QuantumOneWayProtocol& p, std::size_t x, std::size_t y) {
    if (x >= p.messages.size()) throw std::invalid_argument("acceptance_probability: x out of range");
    if (y >= p.measurements.size())
        throw std::invalid_argument("acceptance_probability: y out of range");
    const DensityMatrix& rho = p.messages[x];
    const Projector& proj = p.measurements[y];
    if (rho.dim() != proj.dim())
        throw std::invalid_argument("acceptance_probability: dimension mismatch");
    complex_t tr = 0.0;
    for (std::size_t r = 0; r < rho.dim(); ++r)
        for (std::size_t c = 0; c < rho.dim(); ++c) tr += proj(r, c) * rho(c, r);
    return std::clamp(tr.real(), 0.0, 1.0);
}

double verify_protocol(const QuantumOneWayProtocol& p, const PartialFunction& f) {
    if (p.messages.size() != f.x_count() || p.measurements.size() != f.y_count())
        throw std::invalid_argument("verify_protocol: protocol and function dimensions differ");
    double worst = 0.0;
    for (std::size_t x = 0; x < f.x_count(); ++x)
        for (std::size_t y = 0; y < f.y_count(); ++y) {
            if (!f.defined(x, y)) continue;
            const double accept = acceptance_probability(p, x, y);
            const double target = f.value(x, y) == CellValue::One ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(target - accept));
        }
    return worst;
}

double boosted_error_bound(double error, std::size_t k) {
    const std::size_t majority = k / 2 + 1;
    double tail = 0.0;
    for (std::size_t j = majority; j <= k; ++j) {
        double term = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            // Multiply C(k, j) * error^j * (1-error)^(k-j) in an
            // overflow-safe interleaving.
            term *= (i < j) ? error * static_cast<double>(k - i) / static_cast<double>(j - i)
                            : (1.0 - error);
        }
        tail += term;
    }
    return tail;
}

QuantumOneWayProtocol boost(const QuantumOneWayProtocol& p, const PartialFunction& f,
                            std::size_t k, std::size_t dim_cap) {
    if (k % 2 == 0 || k == 0) throw std::invalid_argument("boost: repetition count must be odd");
    if (p.messages.size() != f.x_count() || p.measurements.size() != f.y_count())
        throw std::invalid_argument("boost: protocol and function dimensions differ");
    const std::size_t d = p.dim();
    std::size_t boosted_dim = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (boosted_dim > dim_cap / d)
            throw std::invalid_argument("boost: dimension cap exceeded (need " +
                                        std::to_string(std::pow(static_cast<double>(d),
                                                                static_cast<double>(k))) +
                                        ", cap " + std::to_string(dim_cap) + ")");
        boosted_dim *= d;
    }
    if (k == 1) return p;

    QuantumOneWayProtocol out;
    out.qubits = p.qubits * k;
    out.epsilon = boosted_error_bound(p.epsilon, k);
    out.prior_budget = p.prior_budget * static_cast<double>(k);

    for (const auto& rho : p.messages) {
        ComplexMatrix power = rho;
        for (std::size_t i = 1; i < k; ++i) power = tensor_product(power, rho);
        out.messages.push_back(std::move(power));
    }
    {
        ComplexMatrix prior_power = p.prior;
        for (std::size_t i = 1; i < k; ++i) prior_power = tensor_product(prior_power, p.prior);
        out.prior = std::move(prior_power);
    }

    const std::size_t majority = k / 2 + 1;
    for (const auto& proj : p.measurements) {
        const ComplexMatrix comp = ComplexMatrix::identity(d) - proj;
        ComplexMatrix vote(boosted_dim);
        for (std::size_t pattern = 0; pattern < (std::size_t{1} << k); ++pattern) {
            const std::size_t accepts =
                static_cast<std::size_t>(std::popcount(pattern));
            if (accepts < majority) continue;
            ComplexMatrix term = (pattern & 1) ? proj : comp;
            for (std::size_t i = 1; i < k; ++i)
                term = tensor_product(term, (pattern >> i) & 1 ? proj : comp);
            vote += term;
        }
        out.measurements.push_back(std::move(vote));
    }
    return out;
}

QuantumOneWayProtocol pad_to_half_rank(const QuantumOneWayProtocol& p) {
    const std::size_t d = p.dim();
    const std::size_t padded = 2 * d;
    const auto embed = [d, padded](const ComplexMatrix& m) {
        ComplexMatrix out(padded);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) out(r, c) = m(r, c);
        return out;
    };

    QuantumOneWayProtocol out;
    out.qubits = p.qubits + 1;
    out.epsilon = p.epsilon;
    out.prior_budget = p.prior_budget;
    out.prior = embed(p.prior);
    for (const auto& rho : p.messages) out.messages.push_back(embed(rho));
    for (const auto& proj : p.measurements) {
        ComplexMatrix extended = embed(proj);
        const auto rank = static_cast<std::size_t>(std::llround(proj.trace().real()));
        // Fill the padding block until the rank reaches d = padded/2.
        for (std::size_t i = 0; i < d - rank; ++i) extended(d + i, d + i) = 1.0;
        out.measurements.push_back(std::move(extended));
    }
    return out;
}

namespace {

const std::vector<ComplexMatrix>& single_qubit_paulis() {
    static const std::vector<ComplexMatrix> paulis = [] {
        ComplexMatrix id = ComplexMatrix::identity(2);
        ComplexMatrix x(2), y(2), z(2);
        x(0, 1) = 1.0;
        x(1, 0) = 1.0;
        y(0, 1) = complex_t(0.0, -1.0);
        y(1, 0) = complex_t(0.0, 1.0);
        z(0, 0) = 1.0;
        z(1, 1) = -1.0;
        return std::vector<ComplexMatrix>{id, x, y, z};
    }();
    return paulis;
}

}  // namespace

TeleportPriorReport teleport_prior(const DensityMatrix& message) {
    check_density(message, 1e-9, "teleport_prior: message");
    const std::size_t d = message.dim();
    std::size_t q = 0;
    while ((std::size_t{1} << q) < d) ++q;
    if ((std::size_t{1} << q) != d || q == 0 || q > 2)
        throw std::invalid_argument("teleport_prior: supported at 1 or 2 qubits only");

    std::vector<ComplexMatrix> paulis;
    if (q == 1) {
        paulis = single_qubit_paulis();
    } else {
        for (const auto& a : single_qubit_paulis())
            for (const auto& b : single_qubit_paulis()) paulis.push_back(tensor_product(a, b));
    }

    ComplexMatrix twirl(d);
    for (const auto& pauli : paulis) twirl += pauli * message * pauli.dagger();
    twirl *= complex_t(1.0 / static_cast<double>(paulis.size()));

    TeleportPriorReport report;
    report.sigma1 = twirl;
    const ComplexMatrix mixed =
        complex_t(1.0 / static_cast<double>(d)) * ComplexMatrix::identity(d);
    report.twirl_is_mixed = max_abs_diff(twirl, mixed) <= 1e-10;
    const double branch = 1.0 / static_cast<double>(d * d);  // 2^(-2q)
    report.residual_psd = is_psd(twirl - complex_t(branch) * message, 1e-10);
    const EntropyValue s_inf = relative_min_entropy(message, twirl);
    report.s_inf_bits = s_inf.is_infinite() ? std::numeric_limits<double>::infinity()
                                            : s_inf.bits();
    report.budget_bits = 2.0 * static_cast<double>(q);
    report.within_budget = !s_inf.is_infinite() && report.s_inf_bits <= report.budget_bits + 1e-9;
    return report;
}

}  // namespace qmsg
