#pragma once

// Circuit data model over the full binary basis.
//
// Gates are 0-based (g0 .. g{s-1}); variables are 1-based (x1 .. xn). Every
// gate carries its own 4-bit truth table, so all sixteen two-input functions
// are handled uniformly.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lowspace/bit_vector.hpp"

namespace lowspace {

/// Truth table of a two-input Boolean function. Textual order is
/// phi(0,0) phi(0,1) phi(1,0) phi(1,1).
class GateFunction {
  public:
    constexpr GateFunction() = default;
    static constexpr GateFunction from_table(std::uint8_t table) { return GateFunction(table & 0xF); }
    static GateFunction from_string(std::string_view text);

    constexpr bool apply(bool left, bool right) const { return (table_ >> ((left ? 2 : 0) + (right ? 1 : 0))) & 1u; }
    constexpr std::uint8_t table() const { return table_; }
    std::string to_string() const;

    /// phi(a, b) = a. Used for gates spliced into wires.
    static constexpr GateFunction ident() { return GateFunction(0b1100); }
    static constexpr GateFunction and_() { return GateFunction(0b1000); }
    static constexpr GateFunction or_() { return GateFunction(0b1110); }
    static constexpr GateFunction xor_() { return GateFunction(0b0110); }
    /// phi(a, b) = not a.
    static constexpr GateFunction not_left() { return GateFunction(0b0011); }
    /// phi(a, b) = a and not b.
    static constexpr GateFunction and_not() { return GateFunction(0b0100); }

    friend constexpr bool operator==(GateFunction, GateFunction) = default;

  private:
    // bit (2a + b) holds phi(a, b)
    constexpr explicit GateFunction(std::uint8_t table) : table_(table) {}
    std::uint8_t table_ = 0;
};

/// A gate input: a constant bit, an earlier gate, or an input variable.
/// The total order is 0 < 1 < x1 < ... < xn < g0 < ... < g{s-1}.
class InputRef {
  public:
    enum class Kind : std::uint8_t { Const = 0, Var = 1, Gate = 2 };

    constexpr InputRef() = default;
    static constexpr InputRef constant(bool bit) { return InputRef(Kind::Const, bit ? 1 : 0); }
    static constexpr InputRef var(std::uint32_t k) { return InputRef(Kind::Var, k); }
    static constexpr InputRef gate(std::uint32_t j) { return InputRef(Kind::Gate, j); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_const() const { return kind_ == Kind::Const; }
    constexpr bool is_var() const { return kind_ == Kind::Var; }
    constexpr bool is_gate() const { return kind_ == Kind::Gate; }
    constexpr std::uint32_t index() const { return index_; }
    constexpr bool bit() const { return index_ != 0; }

    std::string to_string() const;

    friend constexpr bool operator==(InputRef, InputRef) = default;
    friend constexpr std::strong_ordering operator<=>(InputRef a, InputRef b) {
        if (auto c = a.kind_ <=> b.kind_; c != 0)
            return c;
        return a.index_ <=> b.index_;
    }

  private:
    constexpr InputRef(Kind kind, std::uint32_t index) : kind_(kind), index_(index) {}
    Kind kind_ = Kind::Const;
    std::uint32_t index_ = 0;
};

struct Gate {
    InputRef left;
    InputRef right;
    GateFunction fn;

    friend bool operator==(const Gate &, const Gate &) = default;
};

enum class CircuitKind { Simple, Full };

/// A list of gates. Simple circuits reference only constants and earlier
/// gates; Full circuits may reference any other gate and variables x1..xn.
class Circuit {
  public:
    Circuit() = default;
    Circuit(CircuitKind kind, std::size_t num_inputs, std::vector<Gate> gates);

    CircuitKind kind() const { return kind_; }
    bool is_simple() const { return kind_ == CircuitKind::Simple; }
    std::size_t num_inputs() const { return num_inputs_; }
    std::size_t size() const { return gates_.size(); }
    const Gate &gate(std::size_t i) const { return gates_[i]; }
    const std::vector<Gate> &gates() const { return gates_; }

    friend bool operator==(const Circuit &, const Circuit &) = default;

  private:
    CircuitKind kind_ = CircuitKind::Simple;
    std::size_t num_inputs_ = 0;
    std::vector<Gate> gates_;
};

/// Bit i is the value of gate i.
using GateValues = BitVector;

Circuit parse_circuit(std::string_view text);
Circuit read_circuit_file(const std::string &path);
std::string serialize_circuit(const Circuit &c);

/// Ground-truth evaluator: every gate in index order.
GateValues eval_naive(const Circuit &c);

/// Replaces each variable reference x_k by the constant x[k-1]; the textual
/// bit string is leftmost = x1.
Circuit bake_inputs(const Circuit &c, const BitVector &x);

struct SimpleConversion {
    Circuit circuit;
    /// old gate index -> new gate index
    std::vector<std::uint32_t> renumbering;

    /// Values of the original gates, given values of the converted circuit.
    GateValues pull_back(const GateValues &converted) const;
};

/// Bakes the inputs and topologically sorts the gates. Among all valid orders
/// the lexicographically smallest is chosen, so sorted input keeps its order.
SimpleConversion full_to_simple(const Circuit &c, const BitVector &x);

/// Random Simple circuit. Each gate draws its table uniformly and each input
/// uniformly from {0, 1, g0, ..., g(i-1)}. Deterministic in the seed.
Circuit gen_random_circuit(std::size_t s, std::size_t n, std::uint64_t seed);

/// Random acyclic Full circuit on n variables, listed in a shuffled order.
Circuit gen_random_full_circuit(std::size_t s, std::size_t n, std::uint64_t seed);

} // namespace lowspace
