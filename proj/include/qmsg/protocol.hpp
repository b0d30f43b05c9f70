#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qmsg/complex_matrix.hpp"

namespace qmsg {

enum class CellValue : std::int8_t { Zero = 0, One = 1, Undefined = 2 };

// Partial Boolean function as an |X| x |Y| lookup table over {0, 1, undefined}.
class PartialFunction {
public:
    PartialFunction(std::size_t x_count, std::size_t y_count, std::vector<CellValue> values);

    // Rows as strings over '0', '1', '*' (undefined).
    static PartialFunction from_rows(const std::vector<std::string>& rows);

    std::size_t x_count() const { return x_count_; }
    std::size_t y_count() const { return y_count_; }

    CellValue value(std::size_t x, std::size_t y) const { return values_[x * y_count_ + y]; }
    bool defined(std::size_t x, std::size_t y) const {
        return value(x, y) != CellValue::Undefined;
    }

    // Bob's input length in bits: ceil(log2 |Y|).
    std::size_t m_bits() const;

    std::size_t defined_count() const;

private:
    std::size_t x_count_;
    std::size_t y_count_;
    std::vector<CellValue> values_;
};

// One-way protocol: Alice sends the d = 2^q dimensional state messages[x],
// Bob measures {measurements[y], I - measurements[y]} and accepts on the
// first outcome. The prior is Bob's input-independent initial guess, with
// prior_budget an upper bound on S(message[x] || prior) for every x.
struct QuantumOneWayProtocol {
    std::size_t qubits = 0;
    double epsilon = 0.0;
    std::vector<DensityMatrix> messages;
    std::vector<Projector> measurements;
    DensityMatrix prior;
    double prior_budget = 0.0;

    std::size_t dim() const { return std::size_t{1} << qubits; }
};

// Protocol with the maximally mixed prior and the teleportation budget 2q.
QuantumOneWayProtocol make_protocol(std::size_t qubits, std::vector<DensityMatrix> messages,
                                    std::vector<Projector> measurements, double epsilon);

// Structural and state invariants: dimensions, message validity, measurement
// idempotence, prior validity, and S(message||prior) <= prior_budget (finite).
// Throws std::invalid_argument naming the first violation.
void check_protocol(const QuantumOneWayProtocol& p);

// Tr(P_y rho_x), clamped into [0,1].
double acceptance_probability(const QuantumOneWayProtocol& p, std::size_t x, std::size_t y);

// Max over defined cells of the deviation from the correct side:
// |[f(x,y)=1] - Tr(P_y rho_x)|. The protocol meets its contract iff the
// result is <= p.epsilon.
double verify_protocol(const QuantumOneWayProtocol& p, const PartialFunction& f);

// Majority-vote parallel repetition: k-fold tensor power messages, majority
// projectors, error mapped through the binomial tail. k must be odd and
// dim^k must stay within dim_cap.
QuantumOneWayProtocol boost(const QuantumOneWayProtocol& p, const PartialFunction& f,
                            std::size_t k, std::size_t dim_cap = 256);

// P(Binomial(k, error) >= ceil(k/2)): the boosted protocol's error bound.
double boosted_error_bound(double error, std::size_t k);

// Embeds the protocol into twice the dimension and extends every measurement
// on the padding block so each has rank exactly dim'/2, the normalization the
// analysis bookkeeping assumes. Acceptance probabilities are unchanged: all
// states stay supported on the original block.
QuantumOneWayProtocol pad_to_half_rank(const QuantumOneWayProtocol& p);

struct TeleportPriorReport {
    DensityMatrix sigma1;     // the Pauli twirl of the message
    bool twirl_is_mixed;      // sigma1 == I/d within 1e-10
    bool residual_psd;        // sigma1 - rho/2^(2q) is PSD
    double s_inf_bits;        // S_inf(rho || sigma1)
    double budget_bits;       // 2q
    bool within_budget;       // s_inf_bits <= budget_bits
};

// The teleportation decomposition sigma1 = rho/2^(2q) + theta realized as the
// uniform Pauli twirl, with its branch checks. Supported at q in {1, 2}.
TeleportPriorReport teleport_prior(const DensityMatrix& message);

}  // namespace qmsg
