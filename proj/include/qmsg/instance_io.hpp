#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "qmsg/proofs.hpp"
#include "qmsg/protocol.hpp"

namespace qmsg {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A protocol file carries the function it computes alongside the states.
struct ProtocolInstance {
    PartialFunction function;
    QuantumOneWayProtocol protocol;
};

using Instance = std::variant<PartialFunction, ProtocolInstance, MajIxInstance, LsdInstance>;

// Line-oriented sectioned grammar ([function], [messages], [measurements],
// [majix], [lsd]); complex amplitudes as "re,im" decimal pairs; comments with
// '#'. All type invariants are checked at load; violations raise ParseError
// naming the failed invariant and the offending line where known.
Instance parse_instance_file(const std::string& path);
Instance parse_instance_text(const std::string& text, const std::string& origin = "<string>");

std::string serialize(const PartialFunction& f);
std::string serialize(const ProtocolInstance& inst);
std::string serialize(const MajIxInstance& inst);
std::string serialize(const LsdInstance& inst);
std::string serialize(const Instance& inst);

}  // namespace qmsg
