#include "lowspace/tm_compile.hpp"

#include <bit>
#include <cmath>

#include "lowspace/error.hpp"

namespace lowspace {

InputRef CircuitBuilder::gate(GateFunction fn, InputRef a, InputRef b) {
    gates_.push_back({a, b, fn});
    return InputRef::gate(static_cast<std::uint32_t>(gates_.size() - 1));
}

InputRef CircuitBuilder::mux(InputRef sel, InputRef lo, InputRef hi) {
    return or_(and_(sel, hi), and_not(lo, sel));
}

Circuit CircuitBuilder::finish() const { return Circuit(CircuitKind::Full, num_inputs_, gates_); }

namespace {

std::size_t bits_for(std::size_t count) { return std::max<std::size_t>(1, std::bit_width(count - 1)); }

} // namespace

CellEncoding::CellEncoding(const TuringMachine &m)
    : symbol_bits(bits_for(m.num_symbols())), state_bits(bits_for(m.num_states())) {}

namespace {

const InputRef kZero = InputRef::constant(false);
const InputRef kOne = InputRef::constant(true);

// sel ? hi : lo with constant folding; only the lookup tables use this.
InputRef fold_mux(CircuitBuilder &b, InputRef sel, InputRef lo, InputRef hi) {
    if (lo == hi)
        return lo;
    if (lo == kZero && hi == kOne)
        return sel;
    if (lo == kOne && hi == kZero)
        return b.not_(sel);
    if (lo == kZero)
        return b.and_(sel, hi);
    if (hi == kZero)
        return b.and_not(lo, sel);
    if (hi == kOne)
        return b.or_(sel, lo);
    if (lo == kOne)
        return b.gate(GateFunction::from_table(0b1011), sel, hi); // not sel or hi
    return b.mux(sel, lo, hi);
}

// Transition table of one step over raw bit codes. Bit i of a code is
// selector i: the state bits, then the symbol bits of each tape.
struct StepTable {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<std::vector<bool>> rows; // rows[code][output]
};

// Outputs: next state bits, write bits per tape, then (left, right) per tape.
StepTable step_table(const TuringMachine &m, const CellEncoding &enc) {
    const std::size_t k = m.tapes(), ws = enc.symbol_bits, wq = enc.state_bits;
    StepTable tab;
    tab.inputs = wq + k * ws;
    tab.outputs = wq + k * ws + 2 * k;
    if (tab.inputs > 20)
        throw ParamError("machine too large for the step lookup (" + std::to_string(tab.inputs) + " selector bits)");
    tab.rows.assign(std::size_t{1} << tab.inputs, std::vector<bool>(tab.outputs, false));
    std::vector<std::uint8_t> read(k);
    for (std::size_t code = 0; code < tab.rows.size(); ++code) {
        auto &row = tab.rows[code];
        const auto q = static_cast<std::uint32_t>(code & ((std::size_t{1} << wq) - 1));
        bool valid = q < m.num_states() && !m.is_halting(q);
        for (std::size_t j = 0; j < k; ++j) {
            const auto sym = (code >> (wq + j * ws)) & ((std::size_t{1} << ws) - 1);
            valid = valid && sym < m.num_symbols();
            read[j] = static_cast<std::uint8_t>(sym);
        }
        if (!valid) {
            // no-op: keep the state and the read symbols, stay
            for (std::size_t i = 0; i < wq + k * ws; ++i)
                row[i] = (code >> i) & 1;
            continue;
        }
        const Transition *tr = m.delta(q, read);
        for (std::size_t i = 0; i < wq; ++i)
            row[i] = (tr->next >> i) & 1;
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < ws; ++i)
                row[wq + j * ws + i] = (tr->write[j] >> i) & 1;
            row[wq + k * ws + 2 * j] = tr->moves[j] == Move::L;
            row[wq + k * ws + 2 * j + 1] = tr->moves[j] == Move::R;
        }
    }
    return tab;
}

InputRef lookup(CircuitBuilder &b, const StepTable &tab, const std::vector<InputRef> &sel, std::size_t out,
                std::size_t level, std::size_t prefix) {
    if (level == tab.inputs)
        return InputRef::constant(tab.rows[prefix][out]);
    // split on the highest remaining selector so prefix fills from the top
    const std::size_t bit = tab.inputs - 1 - level;
    const InputRef lo = lookup(b, tab, sel, out, level + 1, prefix);
    const InputRef hi = lookup(b, tab, sel, out, level + 1, prefix | (std::size_t{1} << bit));
    return fold_mux(b, sel[bit], lo, hi);
}

class Compiler {
  public:
    Compiler(CircuitBuilder &b, const TuringMachine &m) : b_(b), m_(m), enc_(m), tab_(step_table(m, enc_)) {}

    ConfigWires run(const ConfigWires &in) {
        if (in.t == 9) {
            ConfigWires cur = in;
            for (int i = 0; i < 3; ++i)
                cur = step(cur);
            return cur;
        }
        ConfigWires cur = in;
        for (int round = 0; round < 3; ++round)
            cur = round_of(cur);
        return cur;
    }

  private:
    ConfigWires step(const ConfigWires &in) {
        const std::size_t k = m_.tapes(), ws = enc_.symbol_bits, cb = enc_.cell_bits(), t = in.t;
        std::vector<InputRef> sel = in.state;
        for (std::size_t j = 0; j < k; ++j) {
            const auto &tape = in.tapes[j];
            for (std::size_t i = 0; i < ws; ++i) {
                InputRef acc = b_.and_(tape[cb - 1], tape[i]);
                for (std::size_t c = 1; c < t; ++c)
                    acc = b_.or_(acc, b_.and_(tape[c * cb + cb - 1], tape[c * cb + i]));
                sel.push_back(acc);
            }
        }
        std::vector<InputRef> outs(tab_.outputs);
        for (std::size_t o = 0; o < tab_.outputs; ++o)
            outs[o] = lookup(b_, tab_, sel, o, 0, 0);

        const std::size_t wq = enc_.state_bits;
        ConfigWires next;
        next.t = t;
        next.state.assign(outs.begin(), outs.begin() + static_cast<std::ptrdiff_t>(wq));
        next.tapes.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            const auto &tape = in.tapes[j];
            auto &dst = next.tapes[j];
            dst.resize(t * cb);
            const InputRef left = outs[wq + k * ws + 2 * j], right = outs[wq + k * ws + 2 * j + 1];
            const InputRef stay = b_.not_(b_.or_(left, right));
            auto head = [&](std::size_t c) { return tape[c * cb + cb - 1]; };
            for (std::size_t c = 0; c < t; ++c) {
                for (std::size_t i = 0; i < ws; ++i)
                    dst[c * cb + i] = b_.mux(head(c), tape[c * cb + i], outs[wq + j * ws + i]);
                InputRef h = b_.and_(head(c), stay);
                if (c > 0)
                    h = b_.or_(h, b_.and_(head(c - 1), right));
                if (c + 1 < t)
                    h = b_.or_(h, b_.and_(head(c + 1), left));
                dst[c * cb + cb - 1] = h;
            }
        }
        return next;
    }

    // Heads sit in blocks 2..8 (1-based) of nine; each tape runs C_{t/3} on
    // the three blocks around its head.
    ConfigWires round_of(const ConfigWires &in) {
        const std::size_t k = m_.tapes(), cb = enc_.cell_bits(), t = in.t, beta = t / 9;
        std::vector<std::vector<InputRef>> sel(k, std::vector<InputRef>(10, kZero));
        ConfigWires window;
        window.t = 3 * beta;
        window.state = in.state;
        window.tapes.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            const auto &tape = in.tapes[j];
            for (std::size_t i = 2; i <= 8; ++i) {
                const std::size_t first = (i - 1) * beta;
                InputRef acc = tape[first * cb + cb - 1];
                for (std::size_t c = first + 1; c < first + beta; ++c)
                    acc = b_.or_(acc, tape[c * cb + cb - 1]);
                sel[j][i] = acc;
            }
            auto &w = window.tapes[j];
            w.resize(3 * beta * cb);
            for (std::size_t q = 0; q < 3 * beta; ++q) {
                for (std::size_t bit = 0; bit < cb; ++bit) {
                    InputRef acc = b_.and_(sel[j][2], tape[q * cb + bit]);
                    for (std::size_t i = 3; i <= 8; ++i)
                        acc = b_.or_(acc, b_.and_(sel[j][i], tape[((i - 2) * beta + q) * cb + bit]));
                    w[q * cb + bit] = acc;
                }
            }
        }

        const ConfigWires done = run(window);

        ConfigWires out;
        out.t = t;
        out.state = done.state;
        out.tapes.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            const auto &tape = in.tapes[j];
            // covered[blk]: some window holding block blk (0-based) is selected
            std::vector<InputRef> covered(9);
            for (std::size_t blk = 0; blk < 9; ++blk) {
                InputRef acc = kZero;
                for (std::size_t i = std::max<std::size_t>(blk, 2); i <= std::min<std::size_t>(blk + 2, 8); ++i)
                    acc = acc == kZero ? sel[j][i] : b_.or_(acc, sel[j][i]);
                covered[blk] = acc;
            }
            auto &dst = out.tapes[j];
            dst.resize(t * cb);
            for (std::size_t p = 0; p < t; ++p) {
                const std::size_t blk = p / beta;
                for (std::size_t bit = 0; bit < cb; ++bit) {
                    InputRef acc = b_.and_not(tape[p * cb + bit], covered[blk]);
                    for (std::size_t i = std::max<std::size_t>(blk, 2); i <= std::min<std::size_t>(blk + 2, 8); ++i)
                        acc = b_.or_(acc, b_.and_(sel[j][i], done.tapes[j][(p - (i - 2) * beta) * cb + bit]));
                    dst[p * cb + bit] = acc;
                }
            }
        }
        return out;
    }

    CircuitBuilder &b_;
    const TuringMachine &m_;
    CellEncoding enc_;
    StepTable tab_;
};

bool valid_window(std::size_t t) {
    if (t < 9)
        return false;
    while (t % 3 == 0)
        t /= 3;
    return t == 1;
}

void check_shape(const TuringMachine &m, const ConfigWires &w) {
    const CellEncoding enc(m);
    if (!valid_window(w.t))
        throw ParamError("C_t needs t = 9 * 3^j, got " + std::to_string(w.t));
    if (w.state.size() != enc.state_bits || w.tapes.size() != m.tapes())
        throw ParamError("configuration wires do not match the machine");
    for (const auto &tape : w.tapes)
        if (tape.size() != w.t * enc.cell_bits())
            throw ParamError("tape wires do not match the window");
}

} // namespace

ConfigWires build_Ct(CircuitBuilder &builder, const TuringMachine &m, const ConfigWires &in) {
    check_shape(m, in);
    return Compiler(builder, m).run(in);
}

ConfigWires free_config(const TuringMachine &m, std::size_t t) {
    const CellEncoding enc(m);
    ConfigWires w;
    w.t = t;
    std::uint32_t next = 1;
    for (std::size_t i = 0; i < enc.state_bits; ++i)
        w.state.push_back(InputRef::var(next++));
    w.tapes.resize(m.tapes());
    for (auto &tape : w.tapes)
        for (std::size_t i = 0; i < t * enc.cell_bits(); ++i)
            tape.push_back(InputRef::var(next++));
    return w;
}

std::vector<bool> encode_config(const TuringMachine &m, const Configuration &cfg) {
    const CellEncoding enc(m);
    std::vector<bool> out;
    for (std::size_t i = 0; i < enc.state_bits; ++i)
        out.push_back((cfg.state >> i) & 1);
    for (std::size_t j = 0; j < cfg.tapes.size(); ++j) {
        for (std::size_t c = 0; c < cfg.tapes[j].size(); ++c) {
            for (std::size_t i = 0; i < enc.symbol_bits; ++i)
                out.push_back((cfg.tapes[j][c] >> i) & 1);
            out.push_back(cfg.heads[j] == c);
        }
    }
    return out;
}

std::size_t ct_size(const TuringMachine &m, std::size_t t) {
    const CellEncoding enc(m);
    CircuitBuilder b(enc.state_bits + m.tapes() * t * enc.cell_bits());
    build_Ct(b, m, free_config(m, t));
    return b.size();
}

SimulatorCircuit build_simulator_circuit(const TuringMachine &m, std::size_t n, std::size_t t) {
    if (n > 0 && m.num_symbols() < 3)
        throw ParamError("binary input needs at least three tape symbols");
    const CellEncoding enc(m);
    const std::size_t cb = enc.cell_bits();
    std::size_t T = 9;
    while (T < 3 * t)
        T *= 3;
    const std::size_t offset = T / 3;
    if (n > T - offset)
        throw ParamError("input longer than the tape window");

    ConfigWires in;
    in.t = T;
    for (std::size_t i = 0; i < enc.state_bits; ++i)
        in.state.push_back(InputRef::constant((m.start() >> i) & 1));
    CircuitBuilder b(n);
    in.tapes.assign(m.tapes(), std::vector<InputRef>(T * cb, kZero));
    for (auto &tape : in.tapes)
        tape[offset * cb + cb - 1] = kOne;
    const auto s0 = m.input_symbol(false), s1 = m.input_symbol(true);
    for (std::size_t v = 0; v < n; ++v) {
        const InputRef x = InputRef::var(static_cast<std::uint32_t>(v + 1));
        for (std::size_t i = 0; i < enc.symbol_bits; ++i) {
            const bool b0 = (s0 >> i) & 1, b1 = (s1 >> i) & 1;
            InputRef &cell = in.tapes[0][(offset + v) * cb + i];
            if (b0 == b1)
                cell = InputRef::constant(b0);
            else
                cell = b1 ? x : b.not_(x);
        }
    }

    SimulatorCircuit sim;
    sim.window = T;
    sim.steps = T / 3;
    sim.offset = offset;
    sim.output = build_Ct(b, m, in);
    InputRef eq = kOne;
    for (std::size_t i = 0; i < enc.state_bits; ++i) {
        const InputRef s = sim.output.state[i];
        const InputRef bit = ((m.accept() >> i) & 1) ? s : b.not_(s);
        eq = eq == kOne ? bit : b.and_(eq, bit);
    }
    sim.accept = b.ident(eq);
    // a tiny machine on a long input could leave fewer gates than inputs
    while (b.size() < n)
        sim.accept = b.ident(sim.accept);
    sim.circuit = b.finish();
    return sim;
}

namespace {

bool wire_value(InputRef r, const GateValues &values, const BitVector &x) {
    if (r.is_const())
        return r.bit();
    if (r.is_var())
        return x.get(r.index() - 1);
    return values.get(r.index());
}

} // namespace

Configuration decode_config(const TuringMachine &m, const ConfigWires &wires, const GateValues &values,
                            const BitVector &x) {
    const CellEncoding enc(m);
    const std::size_t cb = enc.cell_bits();
    Configuration cfg;
    for (std::size_t i = 0; i < enc.state_bits; ++i)
        cfg.state |= static_cast<std::uint32_t>(wire_value(wires.state[i], values, x)) << i;
    if (cfg.state >= m.num_states())
        throw Error("decoded state " + std::to_string(cfg.state) + " is not a state");
    cfg.tapes.assign(m.tapes(), std::vector<std::uint8_t>(wires.t, 0));
    cfg.heads.assign(m.tapes(), 0);
    for (std::size_t j = 0; j < m.tapes(); ++j) {
        std::size_t heads = 0;
        for (std::size_t c = 0; c < wires.t; ++c) {
            std::uint8_t sym = 0;
            for (std::size_t i = 0; i < enc.symbol_bits; ++i)
                sym |= static_cast<std::uint8_t>(wire_value(wires.tapes[j][c * cb + i], values, x) << i);
            if (sym >= m.num_symbols())
                throw Error("decoded symbol outside the alphabet on tape " + std::to_string(j));
            cfg.tapes[j][c] = sym;
            if (wire_value(wires.tapes[j][c * cb + cb - 1], values, x)) {
                cfg.heads[j] = c;
                ++heads;
            }
        }
        if (heads != 1)
            throw Error("tape " + std::to_string(j) + " decoded with " + std::to_string(heads) + " head flags");
    }
    return cfg;
}

Configuration decode_output(const TuringMachine &m, const SimulatorCircuit &sim, const GateValues &values,
                            const BitVector &x) {
    return decode_config(m, sim.output, values, x);
}

GateValues eval_simulator(const SimulatorCircuit &sim, const BitVector &x) {
    // gates are emitted in dependency order, so baking alone gives a simple circuit
    const Circuit baked = bake_inputs(sim.circuit, x);
    return eval_naive(Circuit(CircuitKind::Simple, 0, baked.gates()));
}

std::size_t scaffold_width(const TuringMachine &m) { return m.tapes() * CellEncoding(m).cell_bits(); }

std::vector<SizeRow> circuit_size_report(const TuringMachine &m, const std::vector<std::size_t> &ts) {
    std::vector<SizeRow> rows;
    for (std::size_t t : ts) {
        const std::size_t g = ct_size(m, t);
        rows.push_back({t, g, static_cast<double>(g) / (static_cast<double>(t) * std::log2(static_cast<double>(t)))});
    }
    return rows;
}

} // namespace lowspace
