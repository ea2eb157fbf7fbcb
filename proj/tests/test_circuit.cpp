#include <gtest/gtest.h>

#include "lowspace/circuit.hpp"
#include "lowspace/error.hpp"
#include "lowspace/random.hpp"
#include "oracles.hpp"

using namespace lowspace;

namespace {

std::vector<bool> as_vector(const BitVector &v) {
    std::vector<bool> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v.get(i);
    return out;
}

BitVector random_bits(Rng &rng, std::size_t n) {
    BitVector x(n);
    for (std::size_t i = 0; i < n; ++i)
        x.set(i, rng.coin());
    return x;
}

} // namespace

TEST(GateFunction, TableBitOrder) {
    const auto f = GateFunction::from_string("0001");
    EXPECT_FALSE(f.apply(false, false));
    EXPECT_FALSE(f.apply(false, true));
    EXPECT_FALSE(f.apply(true, false));
    EXPECT_TRUE(f.apply(true, true));
    EXPECT_EQ(f, GateFunction::and_());
    EXPECT_EQ(GateFunction::from_string("0111"), GateFunction::or_());
    EXPECT_EQ(GateFunction::from_string("0110"), GateFunction::xor_());
    EXPECT_EQ(GateFunction::from_string("1000").to_string(), "1000");
    for (int t = 0; t < 16; ++t) {
        const auto g = GateFunction::from_table(static_cast<std::uint8_t>(t));
        EXPECT_EQ(GateFunction::from_string(g.to_string()), g);
    }
}

TEST(GateFunction, NamedFunctions) {
    for (bool a : {false, true}) {
        for (bool b : {false, true}) {
            EXPECT_EQ(GateFunction::ident().apply(a, b), a);
            EXPECT_EQ(GateFunction::not_left().apply(a, b), !a);
            EXPECT_EQ(GateFunction::and_not().apply(a, b), a && !b);
        }
    }
}

TEST(InputRef, TotalOrder) {
    const std::vector<InputRef> sorted{InputRef::constant(false), InputRef::constant(true), InputRef::var(1),
                                       InputRef::var(7), InputRef::gate(0), InputRef::gate(3)};
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        EXPECT_LT(sorted[i], sorted[i + 1]);
}

TEST(Parse, RoundTrip) {
    const std::string text = "circuit s=3 n=2 kind=full\n"
                             "g0 0001 x1 x2\n"
                             "g1 0110 g0 x1\n"
                             "g2 1000 g1 g0\n";
    const Circuit c = parse_circuit(text);
    EXPECT_EQ(c.size(), 3u);
    EXPECT_EQ(c.num_inputs(), 2u);
    EXPECT_FALSE(c.is_simple());
    EXPECT_EQ(serialize_circuit(c), text);
    EXPECT_EQ(parse_circuit(serialize_circuit(c)), c);
}

TEST(Parse, CommentsBlankLinesAndDefaultKind) {
    const Circuit c = parse_circuit("# a comment\n\ncircuit s=1 n=0\n  # another\ng0 0110 1 0\n");
    EXPECT_TRUE(c.is_simple());
    EXPECT_TRUE(eval_naive(c).get(0));
}

TEST(Parse, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string &text) {
        try {
            parse_circuit(text);
        } catch (const ParseError &e) {
            return e.line();
        }
        return std::size_t{999};
    };
    EXPECT_EQ(line_of("circuit s=1 n=0\ng0 012 0 0\n"), 2u);
    EXPECT_EQ(line_of("circuit s=2 n=0\ng0 0001 0 0\ng1 0001 g1 0\n"), 3u);
    EXPECT_EQ(line_of("circuit s=1 n=0\ng0 0001 x1 0\n"), 2u);
    EXPECT_EQ(line_of("circuit s=1 n=1 kind=full\ng0 0001 x2 0\n"), 2u);
    EXPECT_EQ(line_of("circuit s=2 n=0\ng1 0001 0 0\n"), 2u);
    EXPECT_EQ(line_of("circuit s=1 n=0 kind=weird\n"), 1u);
    EXPECT_THROW(parse_circuit("circuit s=2 n=0\ng0 0001 0 0\n"), ParseError);
    EXPECT_THROW(parse_circuit(""), ParseError);
}

TEST(EvalNaive, MatchesTruthTableOracle) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t s = rng.between(1, 300);
        const Circuit c = gen_random_circuit(s, 0, rng.next());
        EXPECT_EQ(as_vector(eval_naive(c)), oracle::truth_table_eval(serialize_circuit(c), {}));
    }
}

TEST(EvalNaive, RejectsFullCircuits) {
    const Circuit c = parse_circuit("circuit s=1 n=1 kind=full\ng0 1100 x1 0\n");
    EXPECT_THROW(eval_naive(c), Error);
}

TEST(FullToSimple, MatchesOracleOnShuffledCircuits) {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t s = rng.between(1, 200);
        const std::size_t n = rng.between(0, std::min<std::size_t>(s, 10));
        const Circuit c = gen_random_full_circuit(s, n, rng.next());
        const BitVector x = random_bits(rng, n);
        const auto conv = full_to_simple(c, x);
        EXPECT_TRUE(conv.circuit.is_simple());
        EXPECT_EQ(as_vector(conv.pull_back(eval_naive(conv.circuit))),
                  oracle::truth_table_eval(serialize_circuit(c), as_vector(x)));
    }
}

TEST(FullToSimple, SortedInputKeepsOrder) {
    const Circuit c = gen_random_circuit(50, 0, 3);
    const Circuit full(CircuitKind::Full, 0, c.gates());
    const auto conv = full_to_simple(full, BitVector());
    EXPECT_EQ(conv.circuit, c);
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_EQ(conv.renumbering[i], i);
}

TEST(FullToSimple, DetectsCycles) {
    const Circuit c = parse_circuit("circuit s=2 n=0 kind=full\ng0 0001 g1 1\ng1 0001 g0 1\n");
    EXPECT_THROW(full_to_simple(c, BitVector()), CycleError);
}

TEST(BakeInputs, SubstitutesConstants) {
    const Circuit c = parse_circuit("circuit s=2 n=2 kind=full\ng0 0110 x1 x2\ng1 1100 x2 0\n");
    const Circuit baked = bake_inputs(c, BitVector::from_string("10"));
    EXPECT_EQ(baked.gate(0).left, InputRef::constant(true));
    EXPECT_EQ(baked.gate(0).right, InputRef::constant(false));
    EXPECT_EQ(baked.gate(1).left, InputRef::constant(false));
}

TEST(Generators, Deterministic) {
    EXPECT_EQ(gen_random_circuit(100, 0, 9), gen_random_circuit(100, 0, 9));
    EXPECT_EQ(gen_random_full_circuit(100, 5, 9), gen_random_full_circuit(100, 5, 9));
    EXPECT_NE(gen_random_circuit(100, 0, 9), gen_random_circuit(100, 0, 10));
}
