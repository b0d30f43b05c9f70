#include "qmsg/instance_io.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace qmsg {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_complex(complex_t v) {
    return format_double(v.real()) + "," + format_double(v.imag());
}

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream stream(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(stream, raw)) {
        ++number;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream linestream(raw);
        Line line{number, {}};
        std::string token;
        while (linestream >> token) line.tokens.push_back(token);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

class Parser {
public:
    Parser(const std::string& text, std::string origin)
        : lines_(tokenize(text)), origin_(std::move(origin)) {}

    Instance parse();

private:
    Instance parse_sections();

    [[noreturn]] void fail(const std::string& message, std::size_t line_number = 0) const {
        std::string where = origin_;
        if (line_number != 0) where += ":" + std::to_string(line_number);
        throw ParseError(where + ": " + message);
    }

    bool done() const { return pos_ >= lines_.size(); }
    const Line& peek() const { return lines_[pos_]; }
    const Line& next() { return lines_[pos_++]; }

    bool at_section() const {
        return !done() && peek().tokens.front().front() == '[';
    }

    // A "key value..." line inside a section; fails on section end.
    const Line& expect_line(const std::string& key) {
        if (done() || at_section()) fail("expected '" + key + "' line before end of section");
        const Line& line = next();
        if (line.tokens.front() != key)
            fail("expected '" + key + "', found '" + line.tokens.front() + "'", line.number);
        return line;
    }

    std::size_t parse_size(const std::string& token, std::size_t line_number) {
        try {
            return std::stoull(token);
        } catch (const std::exception&) {
            fail("expected a nonnegative integer, found '" + token + "'", line_number);
        }
    }

    double parse_real(const std::string& token, std::size_t line_number) {
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail("expected a decimal number, found '" + token + "'", line_number);
        }
    }

    complex_t parse_complex(const std::string& token, std::size_t line_number) {
        const auto comma = token.find(',');
        if (comma == std::string::npos)
            fail("expected a 're,im' pair, found '" + token + "'", line_number);
        return {parse_real(token.substr(0, comma), line_number),
                parse_real(token.substr(comma + 1), line_number)};
    }

    ComplexMatrix parse_matrix(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            if (done() || at_section()) fail("matrix ended early (expected " +
                                             std::to_string(dim) + " rows)");
            const Line& line = next();
            if (line.tokens.size() != dim)
                fail("matrix row has " + std::to_string(line.tokens.size()) + " entries, expected " +
                     std::to_string(dim), line.number);
            for (std::size_t c = 0; c < dim; ++c)
                m(r, c) = parse_complex(line.tokens[c], line.number);
        }
        return m;
    }

    PartialFunction parse_function_section();
    void parse_messages_section(QuantumOneWayProtocol& p);
    void parse_measurements_section(QuantumOneWayProtocol& p);
    MajIxInstance parse_majix_section();
    LsdInstance parse_lsd_section();

    std::vector<Line> lines_;
    std::string origin_;
    std::size_t pos_ = 0;
};

PartialFunction Parser::parse_function_section() {
    const Line& rows_line = expect_line("rows");
    const std::size_t rows = parse_size(rows_line.tokens.at(1), rows_line.number);
    const Line& cols_line = expect_line("cols");
    const std::size_t cols = parse_size(cols_line.tokens.at(1), cols_line.number);
    std::vector<std::string> table(rows);
    std::vector<bool> seen(rows, false);
    for (std::size_t i = 0; i < rows; ++i) {
        const Line& line = expect_line("row");
        if (line.tokens.size() != 3) fail("expected 'row <index> <cells>'", line.number);
        const std::size_t index = parse_size(line.tokens[1], line.number);
        if (index >= rows || seen[index]) fail("bad or repeated row index", line.number);
        if (line.tokens[2].size() != cols)
            fail("row has " + std::to_string(line.tokens[2].size()) + " cells, expected " +
                 std::to_string(cols), line.number);
        seen[index] = true;
        table[index] = line.tokens[2];
    }
    try {
        return PartialFunction::from_rows(table);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

void Parser::parse_messages_section(QuantumOneWayProtocol& p) {
    const Line& qubits_line = expect_line("qubits");
    p.qubits = parse_size(qubits_line.tokens.at(1), qubits_line.number);
    if (p.qubits == 0 || p.qubits > 8) fail("qubits must lie in 1..8", qubits_line.number);
    const Line& count_line = expect_line("count");
    const std::size_t count = parse_size(count_line.tokens.at(1), count_line.number);
    const Line& eps_line = expect_line("epsilon");
    p.epsilon = parse_real(eps_line.tokens.at(1), eps_line.number);

    p.messages.assign(count, ComplexMatrix(p.dim()));
    std::vector<bool> seen(count, false);
    for (std::size_t i = 0; i < count; ++i) {
        const Line& line = expect_line("message");
        const std::size_t index = parse_size(line.tokens.at(1), line.number);
        if (index >= count || seen[index]) fail("bad or repeated message index", line.number);
        seen[index] = true;
        p.messages[index] = parse_matrix(p.dim());
    }

    const double d = static_cast<double>(p.dim());
    p.prior = complex_t(1.0 / d) * ComplexMatrix::identity(p.dim());
    p.prior_budget = 2.0 * static_cast<double>(p.qubits);
    while (!done() && !at_section()) {
        const Line& line = peek();
        if (line.tokens.front() == "prior") {
            next();
            p.prior = parse_matrix(p.dim());
        } else if (line.tokens.front() == "prior_budget") {
            next();
            p.prior_budget = parse_real(line.tokens.at(1), line.number);
        } else {
            fail("unexpected '" + line.tokens.front() + "' in [messages]", line.number);
        }
    }
}

void Parser::parse_measurements_section(QuantumOneWayProtocol& p) {
    if (p.qubits == 0) fail("[measurements] must follow [messages]");
    const Line& count_line = expect_line("count");
    const std::size_t count = parse_size(count_line.tokens.at(1), count_line.number);
    p.measurements.assign(count, ComplexMatrix(p.dim()));
    std::vector<bool> seen(count, false);
    for (std::size_t i = 0; i < count; ++i) {
        const Line& line = expect_line("measurement");
        const std::size_t index = parse_size(line.tokens.at(1), line.number);
        if (index >= count || seen[index]) fail("bad or repeated measurement index", line.number);
        seen[index] = true;
        p.measurements[index] = parse_matrix(p.dim());
    }
}

MajIxInstance Parser::parse_majix_section() {
    MajIxInstance inst;
    const Line& n_line = expect_line("n");
    inst.n = parse_size(n_line.tokens.at(1), n_line.number);
    const Line& x_line = expect_line("x");
    if (x_line.tokens.size() != 2 || x_line.tokens[1].size() != inst.n)
        fail("x must be a bit string of length n", x_line.number);
    for (char c : x_line.tokens[1]) {
        if (c != '0' && c != '1') fail("x must contain only bits", x_line.number);
        inst.x.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    const Line& idx_line = expect_line("indices");
    for (std::size_t i = 1; i < idx_line.tokens.size(); ++i)
        inst.indices.push_back(parse_size(idx_line.tokens[i], idx_line.number));
    try {
        check_majix_instance(inst);
    } catch (const std::invalid_argument& e) {
        fail(e.what(), idx_line.number);
    }
    return inst;
}

LsdInstance Parser::parse_lsd_section() {
    LsdInstance inst;
    const Line& dim_line = expect_line("dim");
    inst.dim = parse_size(dim_line.tokens.at(1), dim_line.number);
    std::size_t last_line = dim_line.number;
    while (!done() && !at_section()) {
        const Line& line = next();
        last_line = line.number;
        if (line.tokens.front() != "vector" || line.tokens.size() != inst.dim + 2)
            fail("expected 'vector v|w <dim reals>'", line.number);
        std::vector<double> vec(inst.dim);
        for (std::size_t i = 0; i < inst.dim; ++i)
            vec[i] = parse_real(line.tokens[i + 2], line.number);
        if (line.tokens[1] == "v")
            inst.v_basis.push_back(std::move(vec));
        else if (line.tokens[1] == "w")
            inst.w_basis.push_back(std::move(vec));
        else
            fail("vector must be labeled v or w", line.number);
    }
    try {
        check_lsd_instance(inst);
    } catch (const std::invalid_argument& e) {
        fail(e.what(), last_line);
    }
    return inst;
}

Instance Parser::parse() {
    try {
        return parse_sections();
    } catch (const std::out_of_range&) {
        fail("malformed line: missing field");
    }
}

Instance Parser::parse_sections() {
    std::optional<PartialFunction> function;
    std::optional<QuantumOneWayProtocol> protocol;
    std::optional<MajIxInstance> majix;
    std::optional<LsdInstance> lsd;
    bool have_measurements = false;

    while (!done()) {
        if (!at_section()) fail("expected a section header", peek().number);
        const Line& header = next();
        const std::string& name = header.tokens.front();
        if (name == "[function]") {
            function = parse_function_section();
        } else if (name == "[messages]") {
            protocol.emplace();
            parse_messages_section(*protocol);
        } else if (name == "[measurements]") {
            if (!protocol) fail("[measurements] must follow [messages]", header.number);
            parse_measurements_section(*protocol);
            have_measurements = true;
        } else if (name == "[majix]") {
            majix = parse_majix_section();
        } else if (name == "[lsd]") {
            lsd = parse_lsd_section();
        } else {
            fail("unknown section '" + name + "'", header.number);
        }
    }

    if (majix) {
        if (function || protocol || lsd) fail("[majix] cannot mix with other sections");
        return *majix;
    }
    if (lsd) {
        if (function || protocol) fail("[lsd] cannot mix with other sections");
        return *lsd;
    }
    if (protocol) {
        if (!have_measurements) fail("protocol file lacks a [measurements] section");
        if (!function) fail("protocol file lacks a [function] section");
        try {
            check_protocol(*protocol);
            if (protocol->messages.size() != function->x_count() ||
                protocol->measurements.size() != function->y_count())
                throw std::invalid_argument("protocol and function dimensions differ");
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        return ProtocolInstance{std::move(*function), std::move(*protocol)};
    }
    if (function) return *function;
    fail("no sections found");
}

void append_matrix(std::string& out, const ComplexMatrix& m) {
    for (std::size_t r = 0; r < m.dim(); ++r) {
        for (std::size_t c = 0; c < m.dim(); ++c) {
            if (c) out += ' ';
            out += format_complex(m(r, c));
        }
        out += '\n';
    }
}

}  // namespace

Instance parse_instance_text(const std::string& text, const std::string& origin) {
    return Parser(text, origin).parse();
}

Instance parse_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_instance_text(buffer.str(), path);
}

std::string serialize(const PartialFunction& f) {
    std::string out = "[function]\n";
    out += "rows " + std::to_string(f.x_count()) + "\n";
    out += "cols " + std::to_string(f.y_count()) + "\n";
    for (std::size_t x = 0; x < f.x_count(); ++x) {
        out += "row " + std::to_string(x) + " ";
        for (std::size_t y = 0; y < f.y_count(); ++y) {
            switch (f.value(x, y)) {
                case CellValue::Zero: out += '0'; break;
                case CellValue::One: out += '1'; break;
                case CellValue::Undefined: out += '*'; break;
            }
        }
        out += '\n';
    }
    return out;
}

std::string serialize(const ProtocolInstance& inst) {
    std::string out = serialize(inst.function);
    const QuantumOneWayProtocol& p = inst.protocol;
    out += "[messages]\n";
    out += "qubits " + std::to_string(p.qubits) + "\n";
    out += "count " + std::to_string(p.messages.size()) + "\n";
    out += "epsilon " + format_double(p.epsilon) + "\n";
    for (std::size_t i = 0; i < p.messages.size(); ++i) {
        out += "message " + std::to_string(i) + "\n";
        append_matrix(out, p.messages[i]);
    }
    out += "prior\n";
    append_matrix(out, p.prior);
    out += "prior_budget " + format_double(p.prior_budget) + "\n";
    out += "[measurements]\n";
    out += "count " + std::to_string(p.measurements.size()) + "\n";
    for (std::size_t i = 0; i < p.measurements.size(); ++i) {
        out += "measurement " + std::to_string(i) + "\n";
        append_matrix(out, p.measurements[i]);
    }
    return out;
}

std::string serialize(const MajIxInstance& inst) {
    std::string out = "[majix]\n";
    out += "n " + std::to_string(inst.n) + "\n";
    out += "x ";
    for (std::uint8_t bit : inst.x) out += static_cast<char>('0' + bit);
    out += "\nindices";
    for (std::size_t i : inst.indices) out += " " + std::to_string(i);
    out += '\n';
    return out;
}

std::string serialize(const LsdInstance& inst) {
    std::string out = "[lsd]\n";
    out += "dim " + std::to_string(inst.dim) + "\n";
    for (const char* label : {"v", "w"}) {
        const auto& basis = label[0] == 'v' ? inst.v_basis : inst.w_basis;
        for (const auto& vec : basis) {
            out += std::string("vector ") + label;
            for (double entry : vec) out += " " + format_double(entry);
            out += '\n';
        }
    }
    return out;
}

std::string serialize(const Instance& inst) {
    return std::visit([](const auto& value) { return serialize(value); }, inst);
}

}  // namespace qmsg
