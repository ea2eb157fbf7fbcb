#pragma once

// Record-based circuit evaluation in O(s log^2 s) tape-machine time.
//
// All work is done on lists of fixed-width records with three primitives
// (classify, merge, sort), each of which touches every record a constant
// number of times. A shared counter records those touches and stands in for
// machine time. The recursion splits the gate interval in halves and passes
// value records for the wires crossing the split.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lowspace/circuit.hpp"

namespace lowspace::pippenger {

enum class Dir : std::uint8_t { L = 0, R = 1, O = 2 };

/// (l, r, phi, i): a gate record with its original index.
struct IndexedGateRecord {
    InputRef left;
    InputRef right;
    GateFunction fn;
    std::uint32_t index = 0;

    friend bool operator==(const IndexedGateRecord &, const IndexedGateRecord &) = default;
};

/// (phi, i)
struct GateRecord {
    std::uint32_t index = 0;
    GateFunction fn;

    friend bool operator==(const GateRecord &, const GateRecord &) = default;
};

/// (u, v, d). A wire has a gate u; a value has a constant bit in place of u;
/// an output placeholder (*, v, O) becomes the value (bit, v, O) once v is
/// evaluated.
struct WireRecord {
    enum class Kind : std::uint8_t { Wire, Value, Placeholder };

    Kind kind = Kind::Wire;
    std::uint32_t u = 0; ///< source gate (Wire) or bit (Value)
    std::uint32_t v = 0;
    Dir dir = Dir::L;

    static WireRecord wire(std::uint32_t u, std::uint32_t v, Dir d) { return {Kind::Wire, u, v, d}; }
    static WireRecord value(bool bit, std::uint32_t v, Dir d) { return {Kind::Value, bit ? 1u : 0u, v, d}; }
    static WireRecord placeholder(std::uint32_t v) { return {Kind::Placeholder, 0, v, Dir::O}; }

    bool bit() const { return u != 0; }

    friend bool operator==(const WireRecord &, const WireRecord &) = default;
};

/// Orders records by (target gate, direction), the order every list in the
/// recursion is kept in.
struct ByTarget {
    bool operator()(const WireRecord &a, const WireRecord &b) const {
        return a.v != b.v ? a.v < b.v : a.dir < b.dir;
    }
};

/// Shared operation counter plus the recursion depth used by the stack
/// discipline check.
class Context {
  public:
    explicit Context(bool check_stack = false) : check_stack_(check_stack) {}

    std::uint64_t ops() const { return ops_; }
    void charge(std::uint64_t n) { ops_ += n; }

    std::size_t depth() const { return depth_; }
    bool check_stack() const { return check_stack_; }
    void enter() { ++depth_; }
    void leave() { --depth_; }

  private:
    std::uint64_t ops_ = 0;
    std::size_t depth_ = 0;
    bool check_stack_;
};

/// A list of records living in one stack frame. Every access is counted;
/// with stack checking on, touching a list from another frame throws.
template <typename T> class CountedList {
  public:
    explicit CountedList(Context &ctx) : ctx_(&ctx), frame_(ctx.depth()) {}
    CountedList(Context &ctx, std::vector<T> items) : ctx_(&ctx), frame_(ctx.depth()), items_(std::move(items)) {
        ctx_->charge(items_.size());
    }

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    std::size_t frame() const { return frame_; }

    /// Moves the list onto the current frame's stack (callee takes ownership).
    void adopt() { frame_ = ctx_->depth(); }

    const T &read(std::size_t i) const {
        touch();
        return items_[i];
    }
    void push(const T &item) {
        touch();
        items_.push_back(item);
    }

    /// Uncounted view for callers outside the machine model (tests, output).
    const std::vector<T> &items() const { return items_; }
    Context &context() const { return *ctx_; }

  private:
    void touch() const {
        if (ctx_->check_stack() && frame_ != ctx_->depth())
            throw std::logic_error("record list accessed outside its stack frame");
        ctx_->charge(1);
    }

    Context *ctx_;
    std::size_t frame_;
    std::vector<T> items_;
};

/// Stable split into (records satisfying pred, the rest).
template <typename T, typename Pred> std::pair<CountedList<T>, CountedList<T>> classify(const CountedList<T> &src, Pred pred) {
    Context &ctx = src.context();
    std::pair<CountedList<T>, CountedList<T>> out{CountedList<T>(ctx), CountedList<T>(ctx)};
    for (std::size_t i = 0; i < src.size(); ++i) {
        const T &r = src.read(i);
        if (pred(r))
            out.first.push(r);
        else
            out.second.push(r);
    }
    return out;
}

/// Merge of two lists sorted under cmp; ties take from `a` first.
template <typename T, typename Cmp> CountedList<T> merge(const CountedList<T> &a, const CountedList<T> &b, Cmp cmp) {
    Context &ctx = a.context();
#ifndef NDEBUG
    auto sorted = [&](const std::vector<T> &v) { return std::is_sorted(v.begin(), v.end(), cmp); };
    if (!sorted(a.items()) || !sorted(b.items()))
        throw std::logic_error("merge of unsorted lists");
#endif
    CountedList<T> out(ctx);
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        ctx.charge(1); // comparison
        if (cmp(b.read(j), a.read(i)))
            out.push(b.read(j++));
        else
            out.push(a.read(i++));
    }
    for (; i < a.size(); ++i)
        out.push(a.read(i));
    for (; j < b.size(); ++j)
        out.push(b.read(j));
    return out;
}

/// Stable merge sort built from classify-free halving and merge.
template <typename T, typename Cmp> CountedList<T> sort(const CountedList<T> &src, Cmp cmp) {
    Context &ctx = src.context();
    if (src.size() <= 1) {
        CountedList<T> out(ctx);
        for (std::size_t i = 0; i < src.size(); ++i)
            out.push(src.read(i));
        return out;
    }
    CountedList<T> lo(ctx), hi(ctx);
    const std::size_t mid = (src.size() + 1) / 2;
    for (std::size_t i = 0; i < src.size(); ++i)
        (i < mid ? lo : hi).push(src.read(i));
    return merge(sort(lo, cmp), sort(hi, cmp), cmp);
}

/// Copies the circuit into indexed records and substitutes x for variable
/// references: sort by left input, scan alongside x; sort by right input,
/// scan again; sort by index.
CountedList<IndexedGateRecord> bake_inputs_by_sorting(Context &ctx, const Circuit &c, const BitVector &x);

struct RecordSet {
    CountedList<GateRecord> gates;
    CountedList<WireRecord> records; ///< 3 per gate, in (v, dir) order
};

/// Gate records plus (l, i, L), (r, i, R), (*, i, O) for every gate.
/// Constant inputs give value records directly. Needs a variable-free,
/// topologically sorted gate list.
RecordSet to_wire_records(Context &ctx, const CountedList<IndexedGateRecord> &gates);

/// Given the interval [lo, hi), its gate records, value records for every
/// input of its gates coming from outside the interval, and every wire and
/// placeholder leaving it, returns the value records of those wires and
/// placeholders. All lists are in (v, dir) order.
CountedList<WireRecord> eval_interval(Context &ctx, std::uint32_t lo, std::uint32_t hi, CountedList<GateRecord> gates,
                                      CountedList<WireRecord> values_in, CountedList<WireRecord> wires_out);

struct Result {
    GateValues values;
    std::uint64_t op_count = 0;
    /// Field width of a record, ceil(log2(s + n + 2)) bits.
    unsigned record_width = 0;
};

/// All gate values of (c, x). Full circuits listed out of order are sorted
/// topologically first (outside the counted model).
Result eval_pippenger(const Circuit &c, const BitVector &x, bool check_stack = false);

/// Pinned constant of the op_count <= C * s * ceil(log2 s)^2 fit, for
/// s >= kOpCountMinSize. Smaller circuits are dominated by per-call
/// overhead (the ratio is about 62 at s = 2).
inline constexpr double kOpCountConstant = 8.0;
inline constexpr std::size_t kOpCountMinSize = 256;

} // namespace lowspace::pippenger
