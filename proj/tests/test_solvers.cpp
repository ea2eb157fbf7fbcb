#include <gtest/gtest.h>

#include "lowspace/circuit_tree.hpp"
#include "lowspace/error.hpp"
#include "lowspace/gf2k.hpp"
#include "lowspace/random.hpp"
#include "lowspace/synthetic_tree.hpp"
#include "lowspace/tree_solvers.hpp"

using namespace lowspace;

namespace {

// Schoolbook carry-less product reduced one bit at a time.
std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, std::uint32_t modulus, unsigned k) {
    std::uint64_t p = 0;
    for (unsigned i = 0; i < k; ++i)
        if ((b >> i) & 1)
            p ^= std::uint64_t{a} << i;
    for (int i = 2 * static_cast<int>(k); i >= static_cast<int>(k); --i)
        if ((p >> i) & 1)
            p ^= std::uint64_t{modulus} << (i - static_cast<int>(k));
    return static_cast<std::uint32_t>(p);
}

std::uint32_t slow_order(const GF2k &f, std::uint32_t a) {
    std::uint32_t x = a, n = 1;
    while (x != 1) {
        x = slow_mul(x, a, f.modulus(), f.degree());
        ++n;
    }
    return n;
}

void expect_agree(const TreeEvalInstance &inst, const std::string &what) {
    const NodeValue want = tree_value(inst);
    for (TreeSolver s : {TreeSolver::Dfs, TreeSolver::CookMertz}) {
        Meter m;
        const auto r = solve(inst, s, m);
        EXPECT_EQ(r.root_value, want) << what << " " << solver_name(s);
        EXPECT_EQ(m.live_words(), 0u);
        EXPECT_LE(static_cast<double>(r.peak_words), analytic_space_bound(inst.params(), s))
            << what << " " << solver_name(s);
    }
}

} // namespace

TEST(GF2k, MatchesSchoolbookMultiplication) {
    Rng rng(41);
    for (unsigned k = 1; k <= 16; ++k) {
        const GF2k f(k);
        EXPECT_EQ(f.modulus() >> k, 1u);
        for (int i = 0; i < 200; ++i) {
            const auto a = static_cast<std::uint32_t>(rng.below(std::size_t{1} << k));
            const auto b = static_cast<std::uint32_t>(rng.below(std::size_t{1} << k));
            EXPECT_EQ(f.mul(a, b), slow_mul(a, b, f.modulus(), k)) << "k=" << k;
        }
    }
}

TEST(GF2k, GeneratorIsPrimitive) {
    for (unsigned k = 1; k <= 12; ++k) {
        const GF2k f(k);
        EXPECT_EQ(slow_order(f, f.generator()), f.order()) << "k=" << k;
    }
}

TEST(GF2k, RootsOfUnityHaveExactOrder) {
    const GF2k f(6); // 63 = 3 * 3 * 7
    for (std::uint32_t m : {3u, 7u, 9u, 21u, 63u}) {
        const auto w = f.root_of_unity(m);
        EXPECT_EQ(slow_order(f, w), m);
        EXPECT_EQ(f.pow(w, m), 1u);
    }
}

TEST(GF2k, OrderOfTwoAndGrid) {
    EXPECT_EQ(order_of_two(3), 2u);
    EXPECT_EQ(order_of_two(5), 4u);
    EXPECT_EQ(order_of_two(7), 3u);
    EXPECT_EQ(order_of_two(9), 6u);
    EXPECT_EQ(order_of_two(23), 11u);
    for (std::size_t deg = 1; deg < 200; ++deg) {
        const auto g = choose_root_grid(deg);
        EXPECT_GT(g.m, deg);
        EXPECT_EQ(g.m % 2, 1u);
        EXPECT_EQ(g.k, order_of_two(g.m));
        EXPECT_LE(g.k, 16u);
        for (std::uint32_t m = static_cast<std::uint32_t>(deg) + 1; m < g.m; ++m)
            if (m % 2 == 1 && m > 1) {
                EXPECT_GT(order_of_two(m), 16u) << "deg=" << deg << " skipped m=" << m;
            }
    }
}

TEST(Solvers, XorOfTwoLeaves) {
    const BitwiseInstance inst(1, 8, 5, GateFunction::xor_());
    Meter scratch;
    NodeValue l(8), r(8);
    inst.leaf(NodePath::from_string("0"), l, scratch);
    inst.leaf(NodePath::from_string("1"), r, scratch);
    NodeValue want(8);
    for (std::size_t i = 0; i < 8; ++i)
        want.set(i, l.get(i) != r.get(i));
    for (TreeSolver s : {TreeSolver::Dfs, TreeSolver::CookMertz}) {
        Meter m;
        EXPECT_EQ(solve(inst, s, m).root_value, want);
    }
}

TEST(Solvers, AgreeOnRandomTables) {
    Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t d = rng.between(2, 3);
        const std::size_t b = rng.between(1, d == 2 ? 3 : 2);
        const std::size_t h = rng.between(0, d == 2 ? 3 : 2);
        const RandomTableInstance inst({h, d, b}, rng.next());
        expect_agree(inst, "table h=" + std::to_string(h) + " d=" + std::to_string(d) + " b=" + std::to_string(b));
    }
}

TEST(Solvers, AgreeOnBitwiseTrees) {
    Rng rng(43);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t h = rng.between(0, 6);
        const std::size_t b = rng.between(1, 80);
        const BitwiseInstance inst(h, b, rng.next());
        expect_agree(inst, "bitwise h=" + std::to_string(h) + " b=" + std::to_string(b));
    }
}

TEST(Solvers, AgreeOnSmallCircuits) {
    Rng rng(44);
    int done = 0;
    for (int trial = 0; trial < 200 && done < 10; ++trial) {
        const std::size_t s = rng.between(2, 12);
        const Circuit c = gen_random_circuit(s, 0, rng.next());
        const auto inst = build_instance(c, rng.between(std::max<std::size_t>(2, s / 2), s));
        if (inst->params().h > 2 || inst->params().b > 8)
            continue;
        ++done;
        expect_agree(*inst, "circuit s=" + std::to_string(s));
        Meter m;
        EXPECT_EQ(inst->extract_output(solve_cookmertz(*inst, m).root_value), eval_naive(c).get(s - 1));
    }
    EXPECT_GT(done, 0);
}

TEST(Solvers, GridExceedsDegreeBound) {
    const BitwiseInstance bw(3, 16, 1);
    EXPECT_GT(cookmertz_grid(bw).m, bw.degree_bound());
    const RandomTableInstance rt({2, 2, 3}, 1);
    EXPECT_GT(cookmertz_grid(rt).m, rt.degree_bound());
    EXPECT_EQ(rt.degree_bound(), 6u);
}

TEST(Solvers, BudgetIsEnforced) {
    const BitwiseInstance inst(10, 8, 2);
    SolveOptions opts;
    opts.max_calls = 100;
    for (TreeSolver s : {TreeSolver::Dfs, TreeSolver::CookMertz}) {
        Meter m;
        EXPECT_THROW(solve(inst, s, m, opts), BudgetExceeded);
    }
}

TEST(Solvers, Deterministic) {
    const BitwiseInstance inst(5, 20, 9);
    for (TreeSolver s : {TreeSolver::Dfs, TreeSolver::CookMertz}) {
        Meter m1, m2;
        const auto a = solve(inst, s, m1), b = solve(inst, s, m2);
        EXPECT_EQ(a.root_value, b.root_value);
        EXPECT_EQ(a.peak_words, b.peak_words);
        EXPECT_EQ(a.node_fn_calls, b.node_fn_calls);
    }
}

TEST(Solvers, DfsCallsAreLinearInTreeSize) {
    const BitwiseInstance inst(6, 4, 3);
    Meter m;
    EXPECT_EQ(solve_dfs(inst, m).node_fn_calls, (std::uint64_t{1} << 7) - 1);
}

TEST(Solvers, CatalyticUsesLessSpaceOnTallTrees) {
    const BitwiseInstance inst(16, 64, 4);
    const auto dfs = probe_peak_words(inst, TreeSolver::Dfs, 1 << 16);
    const auto cm = probe_peak_words(inst, TreeSolver::CookMertz, 1 << 16);
    EXPECT_LT(cm, dfs);
    EXPECT_LE(static_cast<double>(cm), analytic_space_bound(inst.params(), TreeSolver::CookMertz));
    EXPECT_LE(static_cast<double>(dfs), analytic_space_bound(inst.params(), TreeSolver::Dfs));
}

TEST(Solvers, AnalyticBounds) {
    const TreeEvalParams p{4, 2, 8};
    EXPECT_DOUBLE_EQ(analytic_space_bound(p, TreeSolver::Dfs), 2.0 * 5 * 2 * 8);
    EXPECT_DOUBLE_EQ(analytic_space_bound(p, TreeSolver::CookMertz), 4 * 4.0 + 8.0 * 16);
}
