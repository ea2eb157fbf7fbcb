#pragma once

// Low-degree partition of a topologically sorted DAG.
//
// Vertices are cut into initial blocks of b0 consecutive vertices. Every edge
// that skips blocks is subdivided once per skipped block, and the new
// vertices are grouped into "cable" blocks that carry the edges into their
// target block one layer at a time. The resulting quotient graph is strictly
// layered with in-degree at most d'.
//
// Everything here is arithmetic on indices: no part of the subdivided graph
// or the partition is stored. verify_partition() is the exception; it
// materializes both to check the construction on small inputs.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace lowspace {

class Circuit;

/// In-edge view of a DAG whose vertices are numbered in topological order.
/// The in-edges of a vertex are ordered as they appear in the input.
class InEdgeGraph {
  public:
    virtual ~InEdgeGraph() = default;
    virtual std::size_t size() const = 0;
    virtual std::size_t in_degree(std::size_t v) const = 0;
    /// Source of the p-th incoming edge of v.
    virtual std::size_t source(std::size_t v, std::size_t p) const = 0;

    /// Max in-degree, found by scanning every vertex.
    std::size_t max_in_degree() const;
};

/// Explicit DAG built from an edge list; edges must point forward (m < n).
class Dag final : public InEdgeGraph {
  public:
    Dag(std::size_t size, const std::vector<std::pair<std::size_t, std::size_t>> &edges);

    std::size_t size() const override { return size_; }
    std::size_t in_degree(std::size_t v) const override { return offsets_[v + 1] - offsets_[v]; }
    std::size_t source(std::size_t v, std::size_t p) const override { return sources_[offsets_[v] + p]; }
    std::size_t num_edges() const { return sources_.size(); }

  private:
    std::size_t size_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> sources_;
};

/// The gate graph of a simple circuit: one vertex per gate, an edge for every
/// gate-valued input (left before right). Reads the circuit in place.
class CircuitGraph final : public InEdgeGraph {
  public:
    explicit CircuitGraph(const Circuit &c);

    std::size_t size() const override;
    std::size_t in_degree(std::size_t v) const override;
    std::size_t source(std::size_t v, std::size_t p) const override;

  private:
    const Circuit *circuit_;
};

struct PartitionParams {
    std::size_t s = 0;
    std::size_t d = 0;      ///< declared max in-degree
    std::size_t dprime = 0; ///< target quotient in-degree
    std::size_t b = 0;      ///< max block size
    std::size_t b0 = 0;     ///< initial block size, floor((d'-1) b / d)
    std::size_t t = 0;      ///< index of the last initial block, ceil(s / b0) - 1

    std::size_t layer_count() const { return t + 1; }
};

/// Throws ParamError unless d > 1, d' in [2, d+1], b in [ceil(d/d'), s] and
/// the resulting initial block size is at least 1.
PartitionParams compute_params(std::size_t s, std::size_t d, std::size_t dprime, std::size_t b);

struct BlockLabel {
    enum class Kind : std::uint8_t { Initial = 0, Cable = 1, Dummy = 2 };

    Kind kind = Kind::Dummy;
    std::uint32_t j = 0; ///< initial block index, or target block of a cable
    std::uint32_t k = 0; ///< cable layer offset, 1 <= k < j
    std::uint32_t l = 0; ///< cable index, 0 <= l <= d'-2

    static constexpr BlockLabel initial(std::uint32_t j) { return {Kind::Initial, j, 0, 0}; }
    static constexpr BlockLabel cable(std::uint32_t j, std::uint32_t k, std::uint32_t l) {
        return {Kind::Cable, j, k, l};
    }
    static constexpr BlockLabel dummy() { return {Kind::Dummy, 0, 0, 0}; }

    bool is_initial() const { return kind == Kind::Initial; }
    bool is_cable() const { return kind == Kind::Cable; }
    bool is_dummy() const { return kind == Kind::Dummy; }

    std::string to_string() const;

    // (kind, j, k, l) lexicographic: Initial < Cable < Dummy
    friend constexpr auto operator<=>(const BlockLabel &, const BlockLabel &) = default;
};

/// Identity of an edge: its target vertex and its position among the
/// target's incoming edges.
struct EdgeId {
    std::uint32_t target = 0;
    std::uint32_t position = 0;

    friend constexpr auto operator<=>(const EdgeId &, const EdgeId &) = default;
};

/// A vertex of the subdivided graph: an original vertex, or the k-th
/// subdivision vertex of an edge (k = 1 is adjacent to the edge's target).
struct SubVertex {
    bool original = true;
    std::uint32_t vertex = 0;
    EdgeId edge{};
    std::uint32_t k = 0;

    static SubVertex orig(std::uint32_t v) { return {true, v, {}, 0}; }
    static SubVertex sub(EdgeId e, std::uint32_t k) { return {false, 0, e, k}; }

    friend bool operator==(const SubVertex &, const SubVertex &) = default;
};

using BlockList = boost::container::small_vector<BlockLabel, 4>;

/// Closed-form view of the subdivision and partition of one graph.
class Partition {
  public:
    /// Throws ParamError if the graph's max in-degree exceeds params.d or the
    /// sizes disagree.
    Partition(const InEdgeGraph &g, const PartitionParams &params);

    const PartitionParams &params() const { return params_; }
    const InEdgeGraph &graph() const { return *graph_; }

    std::size_t block_index(std::size_t v) const { return v / params_.b0; }
    BlockLabel block_of_vertex(std::size_t v) const;

    /// j - i - 1 for an edge from block i to block j, clamped at 0.
    std::size_t subdivision_count(EdgeId e) const;
    /// r = d * (n mod b0) + p
    std::size_t incoming_edge_index(EdgeId e) const;
    /// Block of the k-th subdivision vertex of e; throws ParamError unless
    /// 1 <= k <= subdivision_count(e).
    BlockLabel block_of_subvertex(EdgeId e, std::size_t k) const;

    static std::size_t layer_of(const BlockLabel &b);

    /// True for every initial block and for cable blocks with at least one
    /// member. Empty cables are treated as absent.
    bool exists(const BlockLabel &b) const;

    /// Calls f(SubVertex) for each member: ascending vertex index for initial
    /// blocks, ascending r for cables.
    template <typename F> void for_each_member(const BlockLabel &b, F &&f) const;
    std::vector<SubVertex> members(const BlockLabel &b) const;
    std::size_t member_count(const BlockLabel &b) const;

    /// Blocks with at least one edge into b in the quotient, sorted by label.
    BlockList quotient_predecessors(const BlockLabel &b) const;

    /// Every nonempty block, sorted by label.
    std::vector<BlockLabel> existing_blocks() const;
    std::size_t total_subvertices() const;

  private:
    const InEdgeGraph *graph_;
    PartitionParams params_;
};

template <typename F> void Partition::for_each_member(const BlockLabel &b, F &&f) const {
    const auto &P = params_;
    if (b.kind == BlockLabel::Kind::Initial) {
        if (b.j > P.t)
            return;
        const std::size_t lo = std::size_t{b.j} * P.b0;
        const std::size_t hi = std::min(P.s, lo + P.b0);
        for (std::size_t v = lo; v < hi; ++v)
            f(SubVertex::orig(static_cast<std::uint32_t>(v)));
        return;
    }
    if (b.kind != BlockLabel::Kind::Cable || b.j > P.t || b.k < 1 || b.k >= b.j || b.l + 1 >= P.dprime)
        return;
    const std::size_t base = std::size_t{b.j} * P.b0;
    const std::size_t r_lo = std::size_t{b.l} * P.b;
    const std::size_t r_hi = std::min((std::size_t{b.l} + 1) * P.b, P.d * P.b0);
    for (std::size_t r = r_lo; r < r_hi; ++r) {
        const std::size_t n = base + r / P.d;
        const std::size_t p = r % P.d;
        if (n >= P.s)
            break;
        if (p >= graph_->in_degree(n))
            continue;
        const std::size_t i = graph_->source(n, p) / P.b0;
        if (i + 1 + b.k <= b.j) // subdivision_count >= k
            f(SubVertex::sub(EdgeId{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(p)}, b.k));
    }
}

/// Edge-list form of any in-edge graph, in (target, position) order.
std::vector<std::pair<std::size_t, std::size_t>> edge_list(const InEdgeGraph &g);

struct VerifyOptions {
    /// false checks the plain interval partition with no subdivision.
    bool cables = true;
    /// Cross-check members() and quotient_predecessors() against the
    /// materialized partition.
    bool check_closed_forms = true;
};

struct PartitionReport {
    bool ok = true;
    std::string failure; ///< first failed check, empty when ok

    std::size_t max_block_size = 0;
    std::size_t max_in_degree = 0;
    std::size_t layer_count = 0;
    std::size_t num_blocks = 0;
    std::size_t total_subvertices = 0;

    /// ceil(d s / ((d'-1) b)), the real-valued layer bound rounded up.
    std::size_t stated_layer_bound = 0;
    bool stated_layer_bound_ok = true;
};

/// Materializes the subdivided graph and its partition and checks block
/// sizes, quotient in-degree, strict layering (t+1 layers), that contracting
/// subdivision vertices gives back the input edges, and that the closed-form
/// maps agree with the materialization.
PartitionReport verify_partition(const InEdgeGraph &g, const PartitionParams &params, const VerifyOptions &opts = {});

/// Random DAG on s vertices with max in-degree exactly d (needs s > d).
Dag gen_random_dag(std::size_t s, std::size_t d, std::uint64_t seed);

/// Path through all s = b*b vertices plus an edge from the first vertex of
/// each block B_1 .. B_{t-1} to vertex t*b + i of the last block, where
/// t = b - 1. The interval partition with b0 = b gives the last block
/// in-degree t - 1.
Dag spine_graph(std::size_t b);

} // namespace lowspace
