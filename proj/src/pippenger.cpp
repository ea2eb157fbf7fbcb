#include "lowspace/pippenger.hpp"

#include <bit>

#include "lowspace/error.hpp"

namespace lowspace::pippenger {

namespace {

// Replaces variable references on one side by scanning the records, sorted
// by that side, alongside x.
template <typename Side>
CountedList<IndexedGateRecord> substitute(Context &ctx, const CountedList<IndexedGateRecord> &sorted, const BitVector &x,
                                          Side side) {
    CountedList<IndexedGateRecord> out(ctx);
    std::size_t head = 1; // x head sits on x_head
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        IndexedGateRecord r = sorted.read(i);
        InputRef &ref = side(r);
        if (ref.is_var()) {
            while (head < ref.index()) {
                ++head;
                ctx.charge(1);
            }
            ref = InputRef::constant(x.get(head - 1));
        }
        out.push(r);
    }
    return out;
}

} // namespace

CountedList<IndexedGateRecord> bake_inputs_by_sorting(Context &ctx, const Circuit &c, const BitVector &x) {
    if (x.size() != c.num_inputs())
        throw ParamError("input has " + std::to_string(x.size()) + " bits, circuit expects " +
                         std::to_string(c.num_inputs()));
    CountedList<IndexedGateRecord> records(ctx);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Gate &g = c.gate(i);
        records.push({g.left, g.right, g.fn, static_cast<std::uint32_t>(i)});
    }
    auto by_left = [](const IndexedGateRecord &a, const IndexedGateRecord &b) { return a.left < b.left; };
    auto by_right = [](const IndexedGateRecord &a, const IndexedGateRecord &b) { return a.right < b.right; };
    auto by_index = [](const IndexedGateRecord &a, const IndexedGateRecord &b) { return a.index < b.index; };

    auto left_done = substitute(ctx, sort(records, by_left), x, [](IndexedGateRecord &r) -> InputRef & { return r.left; });
    auto right_done =
        substitute(ctx, sort(left_done, by_right), x, [](IndexedGateRecord &r) -> InputRef & { return r.right; });
    return sort(right_done, by_index);
}

RecordSet to_wire_records(Context &ctx, const CountedList<IndexedGateRecord> &gates) {
    RecordSet out{CountedList<GateRecord>(ctx), CountedList<WireRecord>(ctx)};
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const IndexedGateRecord &g = gates.read(i);
        auto in = [&](const InputRef &ref, Dir d) {
            if (ref.is_var())
                throw ParamError("wire records need a circuit without variables");
            if (ref.is_const())
                return WireRecord::value(ref.bit(), g.index, d);
            if (ref.index() >= g.index)
                throw ParamError("wire records need a topologically sorted circuit");
            return WireRecord::wire(ref.index(), g.index, d);
        };
        out.records.push(in(g.left, Dir::L));
        out.records.push(in(g.right, Dir::R));
        out.records.push(WireRecord::placeholder(g.index));
        out.gates.push({g.index, g.fn});
    }
    return out;
}

namespace {

// Source gate of a record leaving an interval; placeholders leave from v.
std::uint32_t origin(const WireRecord &r) { return r.kind == WireRecord::Kind::Placeholder ? r.v : r.u; }

} // namespace

CountedList<WireRecord> eval_interval(Context &ctx, std::uint32_t lo, std::uint32_t hi, CountedList<GateRecord> gates,
                                      CountedList<WireRecord> values_in, CountedList<WireRecord> wires_out) {
    gates.adopt();
    values_in.adopt();
    wires_out.adopt();
    if (hi - lo == 1) {
        if (gates.size() != 1 || values_in.size() != 2)
            throw Error("gate " + std::to_string(lo) + " is missing an input value record");
        const GateRecord &g = gates.read(0);
        const WireRecord &a = values_in.read(0), &b = values_in.read(1);
        if (a.dir != Dir::L || b.dir != Dir::R || a.v != lo || b.v != lo)
            throw Error("gate " + std::to_string(lo) + " has malformed input value records");
        const bool value = g.fn.apply(a.bit(), b.bit());
        CountedList<WireRecord> out(ctx);
        for (std::size_t i = 0; i < wires_out.size(); ++i) {
            const WireRecord &w = wires_out.read(i);
            out.push(WireRecord::value(value, w.v, w.dir));
        }
        return out;
    }

    const std::uint32_t mid = lo + (hi - lo + 1) / 2; // I = [lo, mid), J = [mid, hi)
    auto [g_i, g_j] = classify(gates, [&](const GateRecord &g) { return g.index < mid; });
    auto [w_i, w_j] = classify(wires_out, [&](const WireRecord &r) { return origin(r) < mid; });
    auto [v_to_i, v_to_j_outer] = classify(values_in, [&](const WireRecord &r) { return r.v < mid; });

    ctx.enter();
    auto v_from_i = eval_interval(ctx, lo, mid, std::move(g_i), std::move(v_to_i), std::move(w_i));
    ctx.leave();
    v_from_i.adopt();

    auto [v_i_to_j, v_i_rest] =
        classify(v_from_i, [&](const WireRecord &r) { return r.dir != Dir::O && r.v >= mid && r.v < hi; });
    auto v_to_j = merge(v_i_to_j, v_to_j_outer, ByTarget{});

    ctx.enter();
    auto v_from_j = eval_interval(ctx, mid, hi, std::move(g_j), std::move(v_to_j), std::move(w_j));
    ctx.leave();
    v_from_j.adopt();

    return merge(v_i_rest, v_from_j, ByTarget{});
}

Result eval_pippenger(const Circuit &c, const BitVector &x, bool check_stack) {
    Context ctx(check_stack);
    Result res;
    const std::size_t s = c.size();
    res.record_width = static_cast<unsigned>(std::bit_width(s + c.num_inputs() + 1));
    auto baked = bake_inputs_by_sorting(ctx, c, x);

    // a full circuit may list gates out of dependency order
    std::vector<std::uint32_t> renumbering;
    bool sorted = true;
    for (std::size_t i = 0; i < baked.size() && sorted; ++i) {
        const auto &g = baked.items()[i];
        sorted = !(g.left.is_gate() && g.left.index() >= g.index) && !(g.right.is_gate() && g.right.index() >= g.index);
    }
    if (!sorted) {
        std::vector<Gate> gates;
        for (const auto &g : baked.items())
            gates.push_back({g.left, g.right, g.fn});
        const auto conv = full_to_simple(Circuit(CircuitKind::Full, 0, std::move(gates)), BitVector());
        renumbering = conv.renumbering;
        std::vector<IndexedGateRecord> items;
        for (std::size_t i = 0; i < conv.circuit.size(); ++i) {
            const Gate &g = conv.circuit.gate(i);
            items.push_back({g.left, g.right, g.fn, static_cast<std::uint32_t>(i)});
        }
        baked = CountedList<IndexedGateRecord>(ctx, std::move(items));
    }

    auto rs = to_wire_records(ctx, baked);
    auto [values_in, rest] = classify(rs.records, [](const WireRecord &r) { return r.kind == WireRecord::Kind::Value; });
    CountedList<WireRecord> out(ctx);
    if (s > 0)
        out = eval_interval(ctx, 0, static_cast<std::uint32_t>(s), std::move(rs.gates), std::move(values_in),
                            std::move(rest));
    out.adopt();

    // everything left is an output record; it is already in gate order
    GateValues values(s);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const WireRecord &r = out.read(i);
        if (r.dir != Dir::O)
            throw Error("wire record left the whole circuit");
        values.set(r.v, r.bit());
    }
    if (!renumbering.empty()) {
        GateValues pulled(s);
        for (std::size_t i = 0; i < s; ++i)
            pulled.set(i, values.get(renumbering[i]));
        values = pulled;
    }
    res.values = std::move(values);
    res.op_count = ctx.ops();
    return res;
}

} // namespace lowspace::pippenger
