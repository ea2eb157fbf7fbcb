#include "lowspace/dag_partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "lowspace/circuit.hpp"
#include "lowspace/error.hpp"
#include "lowspace/random.hpp"

namespace lowspace {

std::size_t InEdgeGraph::max_in_degree() const {
    std::size_t d = 0;
    for (std::size_t v = 0; v < size(); ++v)
        d = std::max(d, in_degree(v));
    return d;
}

Dag::Dag(std::size_t size, const std::vector<std::pair<std::size_t, std::size_t>> &edges)
    : size_(size), offsets_(size + 1, 0), sources_(edges.size()) {
    for (const auto &[m, n] : edges) {
        if (n >= size || m >= n)
            throw ParamError("edge (" + std::to_string(m) + ", " + std::to_string(n) + ") is not a forward edge");
        ++offsets_[n + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto &[m, n] : edges)
        sources_[fill[n]++] = m;
}

CircuitGraph::CircuitGraph(const Circuit &c) : circuit_(&c) {
    if (!c.is_simple())
        throw ParamError("gate graph needs a simple circuit");
}

std::size_t CircuitGraph::size() const { return circuit_->size(); }

std::size_t CircuitGraph::in_degree(std::size_t v) const {
    const Gate &g = circuit_->gate(v);
    return (g.left.is_gate() ? 1 : 0) + (g.right.is_gate() ? 1 : 0);
}

std::size_t CircuitGraph::source(std::size_t v, std::size_t p) const {
    const Gate &g = circuit_->gate(v);
    if (g.left.is_gate())
        return p == 0 ? g.left.index() : g.right.index();
    return g.right.index();
}

PartitionParams compute_params(std::size_t s, std::size_t d, std::size_t dprime, std::size_t b) {
    if (d < 2)
        throw ParamError("max in-degree d must be > 1 (got " + std::to_string(d) + ")");
    if (dprime < 2 || dprime > d + 1)
        throw ParamError("d' must lie in [2, d+1] (got " + std::to_string(dprime) + ")");
    const std::size_t b_min = (d + dprime - 1) / dprime;
    if (b < b_min || b > s)
        throw ParamError("b must lie in [" + std::to_string(b_min) + ", " + std::to_string(s) + "] (got " +
                         std::to_string(b) + ")");
    PartitionParams p;
    p.s = s;
    p.d = d;
    p.dprime = dprime;
    p.b = b;
    p.b0 = (dprime - 1) * b / d;
    if (p.b0 < 1)
        throw ParamError("initial block size floor((d'-1) b / d) is 0 for d=" + std::to_string(d) +
                         ", d'=" + std::to_string(dprime) + ", b=" + std::to_string(b));
    p.t = (s + p.b0 - 1) / p.b0 - 1;
    return p;
}

std::string BlockLabel::to_string() const {
    switch (kind) {
    case Kind::Initial:
        return "B" + std::to_string(j);
    case Kind::Cable:
        return "B" + std::to_string(j) + "," + std::to_string(k) + "^" + std::to_string(l);
    case Kind::Dummy:
        break;
    }
    return "dummy";
}

Partition::Partition(const InEdgeGraph &g, const PartitionParams &params) : graph_(&g), params_(params) {
    if (g.size() != params.s)
        throw ParamError("graph has " + std::to_string(g.size()) + " vertices, params say " +
                         std::to_string(params.s));
    if (g.max_in_degree() > params.d)
        throw ParamError("graph in-degree exceeds declared d=" + std::to_string(params.d));
}

BlockLabel Partition::block_of_vertex(std::size_t v) const {
    if (v >= params_.s)
        throw ParamError("vertex " + std::to_string(v) + " out of range");
    return BlockLabel::initial(static_cast<std::uint32_t>(v / params_.b0));
}

std::size_t Partition::subdivision_count(EdgeId e) const {
    const std::size_t j = e.target / params_.b0;
    const std::size_t i = graph_->source(e.target, e.position) / params_.b0;
    return j > i + 1 ? j - i - 1 : 0;
}

std::size_t Partition::incoming_edge_index(EdgeId e) const {
    return params_.d * (e.target % params_.b0) + e.position;
}

BlockLabel Partition::block_of_subvertex(EdgeId e, std::size_t k) const {
    const std::size_t K = subdivision_count(e);
    if (k < 1 || k > K)
        throw ParamError("subdivision index " + std::to_string(k) + " outside [1, " + std::to_string(K) + "]");
    const std::size_t j = e.target / params_.b0;
    const std::size_t l = incoming_edge_index(e) / params_.b;
    return BlockLabel::cable(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k),
                             static_cast<std::uint32_t>(l));
}

std::size_t Partition::layer_of(const BlockLabel &b) {
    switch (b.kind) {
    case BlockLabel::Kind::Initial:
        return b.j;
    case BlockLabel::Kind::Cable:
        return b.j - b.k;
    case BlockLabel::Kind::Dummy:
        break;
    }
    return 0;
}

bool Partition::exists(const BlockLabel &b) const {
    if (b.is_initial())
        return b.j <= params_.t;
    return b.is_cable() && member_count(b) > 0;
}

std::vector<SubVertex> Partition::members(const BlockLabel &b) const {
    std::vector<SubVertex> out;
    for_each_member(b, [&](const SubVertex &v) { out.push_back(v); });
    return out;
}

std::size_t Partition::member_count(const BlockLabel &b) const {
    std::size_t n = 0;
    for_each_member(b, [&](const SubVertex &) { ++n; });
    return n;
}

namespace {

void insert_sorted(BlockList &list, const BlockLabel &b) {
    auto it = std::lower_bound(list.begin(), list.end(), b);
    if (it == list.end() || *it != b)
        list.insert(it, b);
}

} // namespace

BlockList Partition::quotient_predecessors(const BlockLabel &b) const {
    BlockList out;
    const auto &P = params_;
    if (b.is_initial()) {
        if (b.j == 0 || b.j > P.t)
            return out;
        for_each_member(b, [&](const SubVertex &v) {
            const std::size_t n = v.vertex;
            for (std::size_t p = 0; p < graph_->in_degree(n); ++p) {
                const std::size_t i = graph_->source(n, p) / P.b0;
                if (i == b.j)
                    continue;
                if (i + 1 == b.j) {
                    insert_sorted(out, BlockLabel::initial(b.j - 1));
                } else {
                    const auto l = static_cast<std::uint32_t>((P.d * (n % P.b0) + p) / P.b);
                    insert_sorted(out, BlockLabel::cable(b.j, 1, l));
                }
            }
        });
    } else if (b.is_cable()) {
        for_each_member(b, [&](const SubVertex &v) {
            if (subdivision_count(v.edge) == b.k)
                insert_sorted(out, BlockLabel::initial(b.j - b.k - 1));
            else
                insert_sorted(out, BlockLabel::cable(b.j, b.k + 1, b.l));
        });
    }
    return out;
}

std::vector<BlockLabel> Partition::existing_blocks() const {
    std::vector<BlockLabel> out;
    for (std::size_t j = 0; j <= params_.t; ++j)
        out.push_back(BlockLabel::initial(static_cast<std::uint32_t>(j)));
    std::vector<BlockLabel> cables;
    for (std::size_t n = 0; n < params_.s; ++n) {
        for (std::size_t p = 0; p < graph_->in_degree(n); ++p) {
            const EdgeId e{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(p)};
            const std::size_t K = subdivision_count(e);
            for (std::size_t k = 1; k <= K; ++k)
                cables.push_back(block_of_subvertex(e, k));
        }
    }
    std::sort(cables.begin(), cables.end());
    cables.erase(std::unique(cables.begin(), cables.end()), cables.end());
    out.insert(out.end(), cables.begin(), cables.end());
    return out;
}

std::size_t Partition::total_subvertices() const {
    std::size_t total = 0;
    for (std::size_t n = 0; n < params_.s; ++n)
        for (std::size_t p = 0; p < graph_->in_degree(n); ++p)
            total += subdivision_count(EdgeId{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(p)});
    return total;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_list(const InEdgeGraph &g) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t n = 0; n < g.size(); ++n)
        for (std::size_t p = 0; p < g.in_degree(n); ++p)
            edges.emplace_back(g.source(n, p), n);
    return edges;
}

namespace {

struct LabelHash {
    std::size_t operator()(const BlockLabel &b) const {
        std::uint64_t h = static_cast<std::uint64_t>(b.kind);
        h = h * 0x9E3779B97F4A7C15ull + b.j;
        h = h * 0x9E3779B97F4A7C15ull + b.k;
        h = h * 0x9E3779B97F4A7C15ull + b.l;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

// Subdivided graph, built edge by edge without using the closed forms.
struct Materialized {
    std::size_t num_vertices = 0;
    std::vector<BlockLabel> label;                            // per vertex
    std::vector<std::pair<std::size_t, std::size_t>> edges;   // of G'
    std::vector<std::size_t> edge_base;                       // first subvertex id per input edge
    std::vector<std::size_t> edge_first;                      // index of first in-edge of vertex n
};

Materialized materialize(const InEdgeGraph &g, const PartitionParams &P, bool cables) {
    Materialized m;
    const std::size_t s = g.size();
    m.label.resize(s);
    for (std::size_t v = 0; v < s; ++v)
        m.label[v] = BlockLabel::initial(static_cast<std::uint32_t>(v / P.b0));
    m.num_vertices = s;
    m.edge_first.resize(s + 1, 0);
    for (std::size_t n = 0; n < s; ++n) {
        m.edge_first[n] = m.edge_base.size();
        const std::size_t j = n / P.b0;
        // the slot of the first in-edge of n among all in-edge slots of B_j
        const std::size_t slot0 = P.d * (n - j * P.b0);
        for (std::size_t p = 0; p < g.in_degree(n); ++p) {
            const std::size_t u = g.source(n, p);
            const std::size_t i = u / P.b0;
            const std::size_t K = (cables && j > i + 1) ? j - i - 1 : 0;
            m.edge_base.push_back(m.num_vertices);
            if (K == 0) {
                m.edges.emplace_back(u, n);
                continue;
            }
            const std::size_t base = m.num_vertices;
            const auto cable = static_cast<std::uint32_t>((slot0 + p) / P.b);
            for (std::size_t k = 1; k <= K; ++k)
                m.label.push_back(BlockLabel::cable(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k), cable));
            m.num_vertices += K;
            // u -> v_K -> ... -> v_1 -> n, subvertex k has id base + k - 1
            m.edges.emplace_back(u, base + K - 1);
            for (std::size_t k = K; k > 1; --k)
                m.edges.emplace_back(base + k - 1, base + k - 2);
            m.edges.emplace_back(base, n);
        }
    }
    m.edge_first[s] = m.edge_base.size();
    return m;
}

} // namespace

PartitionReport verify_partition(const InEdgeGraph &g, const PartitionParams &params, const VerifyOptions &opts) {
    PartitionReport rep;
    const auto &P = params;
    const std::size_t s = g.size();
    auto fail = [&](std::string what) {
        if (rep.ok) {
            rep.ok = false;
            rep.failure = std::move(what);
        }
    };

    rep.stated_layer_bound = (P.d * P.s + (P.dprime - 1) * P.b - 1) / ((P.dprime - 1) * P.b);

    const Materialized m = materialize(g, P, opts.cables);
    rep.total_subvertices = m.num_vertices - s;

    // block sizes
    std::unordered_map<BlockLabel, std::size_t, LabelHash> sizes;
    for (const auto &l : m.label)
        ++sizes[l];
    rep.num_blocks = sizes.size();
    for (const auto &[label, n] : sizes) {
        rep.max_block_size = std::max(rep.max_block_size, n);
        if (n > P.b)
            fail("block " + label.to_string() + " has " + std::to_string(n) + " > b members");
        if (label.is_initial() && label.j < P.t && n != P.b0)
            fail("initial block " + label.to_string() + " has " + std::to_string(n) + " != b0 members");
    }

    // quotient edges, in-degree and layering
    std::unordered_map<BlockLabel, std::unordered_set<BlockLabel, LabelHash>, LabelHash> preds;
    for (const auto &[a, c] : m.edges) {
        const BlockLabel &la = m.label[a], &lc = m.label[c];
        if (la == lc)
            continue;
        preds[lc].insert(la);
    }
    std::size_t max_layer = 0;
    for (const auto &[label, n] : sizes)
        max_layer = std::max(max_layer, opts.cables ? Partition::layer_of(label) : std::size_t{label.j});
    rep.layer_count = max_layer + 1;
    for (const auto &[target, ps] : preds) {
        rep.max_in_degree = std::max(rep.max_in_degree, ps.size());
        if (ps.size() > P.dprime)
            fail("block " + target.to_string() + " has quotient in-degree " + std::to_string(ps.size()));
        for (const auto &src : ps) {
            if (src.is_initial() && target.is_initial() && src.j > target.j)
                fail("quotient edge " + src.to_string() + " -> " + target.to_string() + " goes backward");
            if (opts.cables && Partition::layer_of(target) != Partition::layer_of(src) + 1)
                fail("quotient edge " + src.to_string() + " -> " + target.to_string() + " is not between adjacent layers");
        }
    }
    if (rep.layer_count != P.t + 1)
        fail("layer count " + std::to_string(rep.layer_count) + " != t+1 = " + std::to_string(P.t + 1));
    rep.stated_layer_bound_ok = rep.layer_count <= rep.stated_layer_bound;

    // contraction: every subvertex has in/out degree 1, chains lead back to G
    std::vector<std::size_t> indeg(m.num_vertices, 0), outdeg(m.num_vertices, 0), next(m.num_vertices, 0);
    std::vector<std::vector<std::size_t>> out_orig(s);
    for (const auto &[a, c] : m.edges) {
        ++indeg[c];
        ++outdeg[a];
        if (a >= s)
            next[a] = c;
        else
            out_orig[a].push_back(c);
    }
    for (std::size_t v = s; v < m.num_vertices; ++v)
        if (indeg[v] != 1 || outdeg[v] != 1)
            fail("subdivision vertex " + std::to_string(v) + " has in/out degree " + std::to_string(indeg[v]) + "/" +
                 std::to_string(outdeg[v]));
    if (rep.ok) {
        std::vector<std::pair<std::size_t, std::size_t>> contracted;
        for (std::size_t u = 0; u < s; ++u) {
            for (std::size_t w : out_orig[u]) {
                std::size_t guard = 0;
                while (w >= s && guard++ <= m.num_vertices)
                    w = next[w];
                contracted.emplace_back(u, w);
            }
        }
        auto original = edge_list(g);
        std::sort(contracted.begin(), contracted.end());
        std::sort(original.begin(), original.end());
        if (contracted != original)
            fail("contracting subdivision vertices does not give back the input edges");
    }

    if (!opts.cables || !opts.check_closed_forms || !rep.ok)
        return rep;

    // closed forms against the materialization
    const Partition part(g, P);
    auto id_of = [&](const SubVertex &v) -> std::size_t {
        if (v.original)
            return v.vertex;
        return m.edge_base[m.edge_first[v.edge.target] + v.edge.position] + v.k - 1;
    };
    std::unordered_map<BlockLabel, std::vector<std::size_t>, LabelHash> listed;
    for (std::size_t v = 0; v < m.num_vertices; ++v)
        listed[m.label[v]].push_back(v);
    const auto blocks = part.existing_blocks();
    if (blocks.size() != sizes.size())
        fail("existing_blocks() lists " + std::to_string(blocks.size()) + " blocks, materialization has " +
             std::to_string(sizes.size()));
    for (const auto &label : blocks) {
        std::vector<std::size_t> ids;
        part.for_each_member(label, [&](const SubVertex &v) { ids.push_back(id_of(v)); });
        auto expect = listed[label];
        std::sort(ids.begin(), ids.end());
        std::sort(expect.begin(), expect.end());
        if (ids != expect) {
            fail("members(" + label.to_string() + ") disagrees with the materialized partition");
            break;
        }
        const auto got = part.quotient_predecessors(label);
        std::vector<BlockLabel> want;
        if (auto it = preds.find(label); it != preds.end())
            want.assign(it->second.begin(), it->second.end());
        std::sort(want.begin(), want.end());
        if (!std::equal(got.begin(), got.end(), want.begin(), want.end())) {
            fail("quotient_predecessors(" + label.to_string() + ") disagrees with the materialized quotient");
            break;
        }
    }
    for (std::size_t n = 0; n < s && rep.ok; ++n) {
        for (std::size_t p = 0; p < g.in_degree(n); ++p) {
            const EdgeId e{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(p)};
            const std::size_t base = m.edge_base[m.edge_first[n] + p];
            const std::size_t K = part.subdivision_count(e);
            for (std::size_t k = 1; k <= K; ++k)
                if (part.block_of_subvertex(e, k) != m.label[base + k - 1])
                    fail("block_of_subvertex disagrees at edge " + std::to_string(n) + ":" + std::to_string(p));
        }
    }
    return rep;
}

Dag gen_random_dag(std::size_t s, std::size_t d, std::uint64_t seed) {
    if (s <= d || d < 1)
        throw ParamError("random DAG needs s > d >= 1");
    Rng rng(seed);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    // one vertex is forced to reach in-degree d
    const std::size_t heavy = rng.between(d, s - 1);
    // half the edges stay local, the rest reach anywhere back
    const std::size_t reach = rng.between(1, s);
    for (std::size_t n = 1; n < s; ++n) {
        const std::size_t deg = n == heavy ? d : rng.below(std::min(d, n) + 1);
        for (std::size_t p = 0; p < deg; ++p) {
            std::size_t m;
            if (rng.coin()) {
                const std::size_t lo = n > reach ? n - reach : 0;
                m = rng.between(lo, n - 1);
            } else {
                m = rng.below(n);
            }
            edges.emplace_back(m, n);
        }
    }
    return Dag(s, edges);
}

Dag spine_graph(std::size_t b) {
    if (b < 2)
        throw ParamError("spine graph needs b >= 2");
    const std::size_t s = b * b, t = b - 1;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t k = 0; k + 1 < s; ++k)
        edges.emplace_back(k, k + 1);
    for (std::size_t k = b; k < t * b; k += b)
        edges.emplace_back(k, t * b + k / b);
    return Dag(s, edges);
}

} // namespace lowspace
