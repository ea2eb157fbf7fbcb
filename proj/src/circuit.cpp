#include "lowspace/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

#include "lowspace/error.hpp"
#include "lowspace/random.hpp"

namespace lowspace {

// ---------------------------------------------------------------------------
// BitVector

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
            throw ParseError(0, "bit string may only contain 0 and 1");
        v.set(i, bits[i] == '1');
    }
    return v;
}

std::size_t BitVector::count() const {
    std::size_t n = 0;
    for (auto w : words_)
        n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
}

std::string BitVector::to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i))
            out[i] = '1';
    return out;
}

// ---------------------------------------------------------------------------
// GateFunction / InputRef

GateFunction GateFunction::from_string(std::string_view text) {
    if (text.size() != 4)
        throw ParseError(0, "gate table must have exactly 4 bits");
    std::uint8_t table = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (text[i] != '0' && text[i] != '1')
            throw ParseError(0, "gate table may only contain 0 and 1");
        if (text[i] == '1')
            table |= static_cast<std::uint8_t>(1u << i);
    }
    return GateFunction(table);
}

std::string GateFunction::to_string() const {
    std::string out(4, '0');
    for (std::size_t i = 0; i < 4; ++i)
        if ((table_ >> i) & 1u)
            out[i] = '1';
    return out;
}

std::string InputRef::to_string() const {
    switch (kind_) {
    case Kind::Const:
        return index_ ? "1" : "0";
    case Kind::Var:
        return "x" + std::to_string(index_);
    case Kind::Gate:
        return "g" + std::to_string(index_);
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Circuit

namespace {

void validate_ref(const InputRef &ref, std::size_t gate, CircuitKind kind, std::size_t s, std::size_t n,
                  std::size_t line) {
    if (ref.is_var()) {
        if (kind == CircuitKind::Simple)
            throw ParseError(line, "simple circuits cannot reference variables");
        if (ref.index() < 1 || ref.index() > n)
            throw ParseError(line, "variable index out of range: " + ref.to_string());
    } else if (ref.is_gate()) {
        if (ref.index() >= s)
            throw ParseError(line, "gate index out of range: " + ref.to_string());
        if (kind == CircuitKind::Simple && ref.index() >= gate)
            throw ParseError(line, "forward or self reference in simple circuit: " + ref.to_string());
        if (kind == CircuitKind::Full && ref.index() == gate)
            throw ParseError(line, "self reference: " + ref.to_string());
    }
}

} // namespace

Circuit::Circuit(CircuitKind kind, std::size_t num_inputs, std::vector<Gate> gates)
    : kind_(kind), num_inputs_(num_inputs), gates_(std::move(gates)) {
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        validate_ref(gates_[i].left, i, kind_, gates_.size(), num_inputs_, 0);
        validate_ref(gates_[i].right, i, kind_, gates_.size(), num_inputs_, 0);
    }
    if (kind_ == CircuitKind::Full && gates_.size() < num_inputs_)
        throw ParamError("full circuits need at least as many gates as inputs");
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::uint64_t parse_uint(std::string_view text, std::size_t line, const char *what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ParseError(line, std::string("expected an unsigned integer for ") + what + ", got '" +
                                   std::string(text) + "'");
    return value;
}

InputRef parse_ref(std::string_view tok, std::size_t line) {
    if (tok == "0")
        return InputRef::constant(false);
    if (tok == "1")
        return InputRef::constant(true);
    if (tok.size() >= 2 && tok[0] == 'x')
        return InputRef::var(static_cast<std::uint32_t>(parse_uint(tok.substr(1), line, "variable index")));
    if (tok.size() >= 2 && tok[0] == 'g')
        return InputRef::gate(static_cast<std::uint32_t>(parse_uint(tok.substr(1), line, "gate index")));
    throw ParseError(line, "bad input reference '" + std::string(tok) + "'");
}

} // namespace

Circuit parse_circuit(std::string_view text) {
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t s = 0, n = 0;
    CircuitKind kind = CircuitKind::Simple;
    std::vector<Gate> gates;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        auto toks = split_ws(line);
        if (toks.empty() || toks[0].front() == '#')
            continue;

        if (!have_header) {
            if (toks[0] != "circuit")
                throw ParseError(line_no, "expected 'circuit' header");
            bool have_s = false, have_n = false;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto eq = toks[i].find('=');
                if (eq == std::string_view::npos)
                    throw ParseError(line_no, "expected key=value in header");
                auto key = toks[i].substr(0, eq);
                auto val = toks[i].substr(eq + 1);
                if (key == "s") {
                    s = parse_uint(val, line_no, "s");
                    have_s = true;
                } else if (key == "n") {
                    n = parse_uint(val, line_no, "n");
                    have_n = true;
                } else if (key == "kind") {
                    if (val == "simple")
                        kind = CircuitKind::Simple;
                    else if (val == "full")
                        kind = CircuitKind::Full;
                    else
                        throw ParseError(line_no, "kind must be simple or full");
                } else {
                    throw ParseError(line_no, "unknown header key '" + std::string(key) + "'");
                }
            }
            if (!have_s || !have_n)
                throw ParseError(line_no, "header needs s= and n=");
            have_header = true;
            gates.reserve(s);
            continue;
        }

        if (toks.size() != 4)
            throw ParseError(line_no, "gate line needs 4 fields: g<i> <table> <ref> <ref>");
        if (toks[0].size() < 2 || toks[0][0] != 'g')
            throw ParseError(line_no, "gate line must start with g<i>");
        auto idx = parse_uint(toks[0].substr(1), line_no, "gate label");
        if (idx != gates.size())
            throw ParseError(line_no, "gates must be listed in index order; expected g" + std::to_string(gates.size()));
        if (idx >= s)
            throw ParseError(line_no, "more gate lines than s=" + std::to_string(s));

        Gate g;
        try {
            g.fn = GateFunction::from_string(toks[1]);
        } catch (const ParseError &e) {
            throw ParseError(line_no, e.what());
        }
        g.left = parse_ref(toks[2], line_no);
        g.right = parse_ref(toks[3], line_no);
        validate_ref(g.left, idx, kind, s, n, line_no);
        validate_ref(g.right, idx, kind, s, n, line_no);
        gates.push_back(g);
    }

    if (!have_header)
        throw ParseError(0, "missing 'circuit' header");
    if (gates.size() != s)
        throw ParseError(line_no, "expected " + std::to_string(s) + " gates, found " + std::to_string(gates.size()));
    if (kind == CircuitKind::Full && s < n)
        throw ParseError(1, "full circuits need s >= n");
    return Circuit(kind, n, std::move(gates));
}

Circuit read_circuit_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open circuit file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_circuit(buf.str());
}

std::string serialize_circuit(const Circuit &c) {
    std::string out;
    out.reserve(32 + c.size() * 20);
    out += "circuit s=" + std::to_string(c.size()) + " n=" + std::to_string(c.num_inputs()) +
           " kind=" + (c.is_simple() ? "simple" : "full") + "\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Gate &g = c.gate(i);
        out += 'g';
        out += std::to_string(i);
        out += ' ';
        out += g.fn.to_string();
        out += ' ';
        out += g.left.to_string();
        out += ' ';
        out += g.right.to_string();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation and preprocessing

GateValues eval_naive(const Circuit &c) {
    if (!c.is_simple())
        throw ParamError("eval_naive needs a simple circuit");
    GateValues v(c.size());
    auto value = [&](InputRef r) { return r.is_const() ? r.bit() : v.get(r.index()); };
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Gate &g = c.gate(i);
        v.set(i, g.fn.apply(value(g.left), value(g.right)));
    }
    return v;
}

Circuit bake_inputs(const Circuit &c, const BitVector &x) {
    if (x.size() != c.num_inputs())
        throw ParamError("input has " + std::to_string(x.size()) + " bits, circuit expects " +
                         std::to_string(c.num_inputs()));
    auto bake = [&](InputRef r) { return r.is_var() ? InputRef::constant(x.get(r.index() - 1)) : r; };
    std::vector<Gate> gates = c.gates();
    for (auto &g : gates) {
        g.left = bake(g.left);
        g.right = bake(g.right);
    }
    return Circuit(c.kind(), c.num_inputs(), std::move(gates));
}

GateValues SimpleConversion::pull_back(const GateValues &converted) const {
    GateValues out(renumbering.size());
    for (std::size_t i = 0; i < renumbering.size(); ++i)
        out.set(i, converted.get(renumbering[i]));
    return out;
}

SimpleConversion full_to_simple(const Circuit &c, const BitVector &x) {
    Circuit baked = bake_inputs(c, x);
    const std::size_t s = baked.size();

    std::vector<std::uint32_t> indegree(s, 0);
    std::vector<std::vector<std::uint32_t>> users(s);
    for (std::size_t i = 0; i < s; ++i) {
        for (InputRef r : {baked.gate(i).left, baked.gate(i).right}) {
            if (r.is_gate()) {
                ++indegree[i];
                users[r.index()].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }

    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> ready;
    for (std::uint32_t i = 0; i < s; ++i)
        if (indegree[i] == 0)
            ready.push(i);

    std::vector<std::uint32_t> order;
    order.reserve(s);
    while (!ready.empty()) {
        auto g = ready.top();
        ready.pop();
        order.push_back(g);
        for (auto u : users[g])
            if (--indegree[u] == 0)
                ready.push(u);
    }
    if (order.size() != s)
        throw CycleError("circuit has a cycle through " + std::to_string(s - order.size()) + " gates");

    SimpleConversion out;
    out.renumbering.assign(s, 0);
    for (std::uint32_t pos = 0; pos < s; ++pos)
        out.renumbering[order[pos]] = pos;

    auto remap = [&](InputRef r) { return r.is_gate() ? InputRef::gate(out.renumbering[r.index()]) : r; };
    std::vector<Gate> gates(s);
    for (std::uint32_t pos = 0; pos < s; ++pos) {
        const Gate &g = baked.gate(order[pos]);
        gates[pos] = Gate{remap(g.left), remap(g.right), g.fn};
    }
    out.circuit = Circuit(CircuitKind::Simple, 0, std::move(gates));
    return out;
}

Circuit gen_random_circuit(std::size_t s, std::size_t n, std::uint64_t seed) {
    if (s == 0)
        throw ParamError("random circuits need at least one gate");
    Rng rng(seed);
    std::vector<Gate> gates(s);
    for (std::size_t i = 0; i < s; ++i) {
        auto pick = [&] {
            auto r = rng.below(i + 2);
            return r < 2 ? InputRef::constant(r == 1) : InputRef::gate(static_cast<std::uint32_t>(r - 2));
        };
        gates[i].fn = GateFunction::from_table(static_cast<std::uint8_t>(rng.below(16)));
        gates[i].left = pick();
        gates[i].right = pick();
    }
    return Circuit(CircuitKind::Simple, n, std::move(gates));
}

Circuit gen_random_full_circuit(std::size_t s, std::size_t n, std::uint64_t seed) {
    if (s < n || s == 0)
        throw ParamError("random full circuits need s >= max(n, 1)");
    Rng rng(seed);
    // Build in a hidden topological order, then list gates under a random permutation.
    std::vector<std::uint32_t> slot(s);
    for (std::uint32_t i = 0; i < s; ++i)
        slot[i] = i;
    for (std::size_t i = s; i > 1; --i)
        std::swap(slot[i - 1], slot[rng.below(i)]);

    std::vector<Gate> gates(s);
    for (std::size_t i = 0; i < s; ++i) {
        auto pick = [&] {
            auto r = rng.below(2 + n + i);
            if (r < 2)
                return InputRef::constant(r == 1);
            if (r < 2 + n)
                return InputRef::var(static_cast<std::uint32_t>(r - 2 + 1));
            return InputRef::gate(slot[r - 2 - n]);
        };
        Gate g;
        g.fn = GateFunction::from_table(static_cast<std::uint8_t>(rng.below(16)));
        g.left = pick();
        g.right = pick();
        gates[slot[i]] = g;
    }
    return Circuit(CircuitKind::Full, n, std::move(gates));
}

} // namespace lowspace
