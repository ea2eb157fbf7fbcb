#pragma once

// Turing machine to circuit compilation in O(t log t) gates.
//
// C_t maps a configuration of k tapes of t cells (heads in the middle third)
// to the configuration t/3 steps later. For t = 9 it is a tableau of three
// next-step circuits. Above that, three rounds each locate the head block
// i in {2..8} on every tape, pull blocks i-1, i, i+1 into a window, run
// C_{t/3} on the windows and write them back.
//
// Encoding: every cell is ceil(log2 |alphabet|) symbol bits (at least one)
// followed by a head flag; the machine state is one shared register of
// ceil(log2 |states|) bits.

#include <cstddef>
#include <vector>

#include "lowspace/circuit.hpp"
#include "lowspace/turing.hpp"

namespace lowspace {

/// Appends gates in topological order; inputs are variables x1..xn.
class CircuitBuilder {
  public:
    explicit CircuitBuilder(std::size_t num_inputs) : num_inputs_(num_inputs) {}

    InputRef gate(GateFunction fn, InputRef a, InputRef b);
    InputRef and_(InputRef a, InputRef b) { return gate(GateFunction::and_(), a, b); }
    InputRef or_(InputRef a, InputRef b) { return gate(GateFunction::or_(), a, b); }
    InputRef and_not(InputRef a, InputRef b) { return gate(GateFunction::and_not(), a, b); }
    InputRef not_(InputRef a) { return gate(GateFunction::not_left(), a, InputRef::constant(false)); }
    InputRef ident(InputRef a) { return gate(GateFunction::ident(), a, InputRef::constant(false)); }
    /// sel ? hi : lo, three gates.
    InputRef mux(InputRef sel, InputRef lo, InputRef hi);

    std::size_t size() const { return gates_.size(); }
    std::size_t num_inputs() const { return num_inputs_; }
    Circuit finish() const;

  private:
    std::size_t num_inputs_;
    std::vector<Gate> gates_;
};

struct CellEncoding {
    std::size_t symbol_bits;
    std::size_t state_bits;

    explicit CellEncoding(const TuringMachine &m);
    std::size_t cell_bits() const { return symbol_bits + 1; }
};

/// Wires carrying one encoded configuration.
struct ConfigWires {
    std::vector<InputRef> state;
    std::vector<std::vector<InputRef>> tapes; ///< per tape, cell c bit q at c * cell_bits + q
    std::size_t t = 0;
};

/// Emits C_t for the given input wires; t = in.t must be 9 * 3^j.
ConfigWires build_Ct(CircuitBuilder &builder, const TuringMachine &m, const ConfigWires &in);

/// Gate count of C_t on free inputs.
std::size_t ct_size(const TuringMachine &m, std::size_t t);

/// Variable wires for a standalone C_t: state bits first, then tape by tape,
/// cell by cell.
ConfigWires free_config(const TuringMachine &m, std::size_t t);
std::vector<bool> encode_config(const TuringMachine &m, const Configuration &cfg);

struct SimulatorCircuit {
    Circuit circuit; ///< full circuit on the n input bits; the last gate is the accept bit
    std::size_t window = 0; ///< T, a power of 3 with T >= max(3t, 9)
    std::size_t steps = 0;  ///< T / 3 simulated steps
    std::size_t offset = 0; ///< input and heads start at cell T / 3
    ConfigWires output;
    InputRef accept;
};

/// C_T with the input bits on tape 0 from cell T/3 on, all heads at T/3 and
/// every other cell blank.
SimulatorCircuit build_simulator_circuit(const TuringMachine &m, std::size_t n, std::size_t t);

/// Final configuration from the values of every gate. Throws Error unless
/// each tape has exactly one head flag.
Configuration decode_output(const TuringMachine &m, const SimulatorCircuit &sim, const GateValues &values,
                            const BitVector &x);
Configuration decode_config(const TuringMachine &m, const ConfigWires &wires, const GateValues &values,
                            const BitVector &x);

/// Gate values of the simulator on input x (bake, then one naive pass).
GateValues eval_simulator(const SimulatorCircuit &sim, const BitVector &x);

struct SizeRow {
    std::size_t t;
    std::size_t gates;
    double per_t_log_t; ///< gates / (t log2 t)
};
std::vector<SizeRow> circuit_size_report(const TuringMachine &m, const std::vector<std::size_t> &ts);

/// Pinned constants, per tape and per encoded cell bit (k * cell_bits):
/// size(t) <= 3 size(t/3) + C t and size(t) <= R t log2 t for t >= 27.
inline constexpr double kScaffoldConstant = 31.0;
inline constexpr double kSizeRatioConstant = 20.0;

/// Configuration width factor the constants above are scaled by.
std::size_t scaffold_width(const TuringMachine &m);

} // namespace lowspace
