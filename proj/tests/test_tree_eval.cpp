#include <gtest/gtest.h>

#include <cmath>

#include "lowspace/circuit_tree.hpp"
#include "lowspace/error.hpp"
#include "lowspace/random.hpp"

using namespace lowspace;

namespace {

NodeValue random_value(Rng &rng, std::size_t b) {
    NodeValue v(b);
    for (std::size_t i = 0; i < b; ++i)
        v.set(i, rng.coin());
    return v;
}

// Every node of a tree of height h, in preorder.
std::vector<NodePath> all_nodes(std::size_t h) {
    std::vector<NodePath> out;
    NodePath u;
    auto walk = [&](auto &&self) -> void {
        out.push_back(u);
        if (u.size() == h)
            return;
        for (unsigned c = 0; c < 2; ++c) {
            u.push(c);
            self(self);
            u.pop();
        }
    };
    walk(walk);
    return out;
}

} // namespace

TEST(NodePath, StringRoundTrip) {
    const NodePath u = NodePath::from_string("0110");
    EXPECT_EQ(u.size(), 4u);
    EXPECT_EQ(u[1], 1u);
    EXPECT_EQ(u.to_string(), "0110");
    EXPECT_TRUE(NodePath::from_string("").empty());
}

TEST(BuildInstance, ParamsFromPartition) {
    const Circuit c = gen_random_circuit(12, 0, 4);
    const auto inst = build_instance(c, 10);
    const auto p = inst->params();
    EXPECT_EQ(p.h, 2u);
    EXPECT_EQ(p.d, 2u);
    EXPECT_EQ(p.b, 10u);
    EXPECT_EQ(inst->partition_params().b0, 5u);
    EXPECT_EQ(inst->output_position(), 1u); // (12 - 1) mod 5
}

TEST(BuildInstance, RejectsBadBlockSizes) {
    const Circuit c = gen_random_circuit(10, 0, 1);
    EXPECT_THROW(build_instance(c, 1), ParamError);
    EXPECT_THROW(build_instance(c, 11), ParamError);
    EXPECT_THROW(build_instance(gen_random_circuit(1, 0, 1), 2), ParamError);
    const Circuit full(CircuitKind::Full, 0, c.gates());
    EXPECT_THROW(build_instance(full, 4), Error);
}

TEST(DefaultBlockSize, RoundsUpAndClamps) {
    EXPECT_EQ(default_block_size(16), 8u);  // sqrt(16 * 4)
    EXPECT_EQ(default_block_size(100), 26u); // ceil(sqrt(664.38...))
    EXPECT_EQ(default_block_size(2), 2u);
    EXPECT_EQ(default_block_size(1), 2u);
}

TEST(NodeToBlock, RootAndOverflow) {
    const Circuit c = gen_random_circuit(40, 0, 9);
    const auto inst = build_instance(c, 8); // b0 = 4, t = 9
    EXPECT_EQ(inst->node_to_block(NodePath()), BlockLabel::initial(9));
    EXPECT_EQ(inst->root_block(), BlockLabel::initial(9));
    // every leaf-depth path lands at layer 0 or in a dummy
    for (const auto &u : all_nodes(inst->params().h)) {
        const BlockLabel B = inst->node_to_block(u);
        if (!B.is_dummy()) {
            EXPECT_EQ(Partition::layer_of(B), inst->params().h - u.size()) << u.to_string();
        }
    }
}

TEST(NodeToBlock, FirstPredecessorInLabelOrder) {
    const Circuit c = gen_random_circuit(60, 0, 5);
    const auto inst = build_instance(c, 10);
    const auto &P = inst->partition();
    for (const auto &u : all_nodes(3)) {
        if (u.size() == 3)
            continue;
        const BlockLabel B = inst->node_to_block(u);
        const auto preds = B.is_dummy() ? BlockList{} : P.quotient_predecessors(B);
        for (unsigned c2 = 0; c2 < 2; ++c2) {
            NodePath v = u;
            v.push(c2);
            const BlockLabel want = c2 < preds.size() ? preds[c2] : BlockLabel::dummy();
            EXPECT_EQ(inst->node_to_block(v), want);
        }
    }
}

TEST(Reduction, OutputMatchesNaive) {
    Rng rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t s = rng.between(2, 150);
        const Circuit c = gen_random_circuit(s, 0, rng.next());
        const std::size_t b = rng.between(std::max<std::size_t>(2, s / 6), s);
        const auto inst = build_instance(c, b);
        if (inst->params().h > 12)
            continue;
        EXPECT_EQ(inst->extract_output(tree_value(*inst)), eval_naive(c).get(s - 1)) << "s=" << s << " b=" << b;
    }
}

TEST(Reduction, BlockValuesMatchGateValues) {
    Rng rng(32);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t s = rng.between(8, 60);
        const Circuit c = gen_random_circuit(s, 0, rng.next());
        const std::size_t b = rng.between(std::max<std::size_t>(2, s / 4), s);
        const auto inst = build_instance(c, b);
        if (inst->params().h > 8)
            continue;
        const GateValues gates = eval_naive(c);
        const auto &P = inst->partition();
        const CircuitGraph &g = static_cast<const CircuitGraph &>(P.graph());
        for (const auto &u : all_nodes(inst->params().h)) {
            const BlockLabel B = inst->node_to_block(u);
            const NodeValue v = tree_value(*inst, u);
            if (B.is_dummy()) {
                EXPECT_EQ(v.count(), 0u);
                continue;
            }
            const auto members = P.members(B);
            for (std::size_t i = 0; i < members.size(); ++i) {
                const SubVertex &m = members[i];
                const std::size_t gate = m.original ? m.vertex : g.source(m.edge.target, m.edge.position);
                EXPECT_EQ(v.get(i), gates.get(gate)) << B.to_string() << " member " << i;
            }
            for (std::size_t i = members.size(); i < b; ++i)
                EXPECT_FALSE(v.get(i));
        }
    }
}

TEST(LocalEval, PureAndIgnoresMissingChildren) {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t s = rng.between(20, 200);
        const Circuit c = gen_random_circuit(s, 0, rng.next());
        const auto inst = build_instance(c, rng.between(4, 16));
        const auto P = inst->params();
        for (int k = 0; k < 30; ++k) {
            NodePath u;
            const std::size_t depth = rng.below(P.h);
            for (std::size_t i = 0; i < depth; ++i)
                u.push(static_cast<unsigned>(rng.below(2)));
            const BlockLabel B = inst->node_to_block(u);
            const std::size_t npreds = B.is_dummy() ? 0 : inst->partition().quotient_predecessors(B).size();
            std::vector<NodeValue> kids{random_value(rng, P.b), random_value(rng, P.b)};
            Meter m;
            NodeValue a(P.b), again(P.b), padded(P.b);
            inst->evaluate(u, kids, a, m);
            inst->evaluate(u, kids, again, m);
            EXPECT_EQ(a, again);
            for (std::size_t c2 = npreds; c2 < 2; ++c2)
                kids[c2] = random_value(rng, P.b);
            inst->evaluate(u, kids, padded, m);
            EXPECT_EQ(a, padded) << u.to_string();
        }
    }
}

TEST(LocalEval, WorkspaceWithinPinnedBound) {
    Rng rng(34);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t s = rng.between(2, 512);
        const Circuit c = gen_random_circuit(s, 0, rng.next());
        const std::size_t b = rng.between(2, s);
        const auto inst = build_instance(c, b);
        const auto P = inst->params();
        NodePath u;
        const std::size_t depth = P.h ? rng.below(P.h + 1) : 0;
        for (std::size_t i = 0; i < depth; ++i)
            u.push(static_cast<unsigned>(rng.below(2)));
        Meter m;
        NodeValue out(b);
        if (u.size() == P.h) {
            inst->leaf(u, out, m);
        } else {
            std::vector<NodeValue> kids{random_value(rng, b), random_value(rng, b)};
            inst->evaluate(u, kids, out, m);
        }
        EXPECT_EQ(m.live_words(), 0u);
        EXPECT_LE(static_cast<double>(m.peak_words()), local_eval_bound(s, b)) << "s=" << s << " b=" << b;
    }
}

TEST(LocalEval, RejectsWrongWidths) {
    const auto inst = build_instance(gen_random_circuit(20, 0, 1), 6);
    Meter m;
    NodeValue out(5);
    std::vector<NodeValue> kids{NodeValue(6), NodeValue(6)};
    EXPECT_THROW(inst->evaluate(NodePath(), kids, out, m), ParamError);
}
