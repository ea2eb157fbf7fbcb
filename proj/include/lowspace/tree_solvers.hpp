#pragma once

// Tree-evaluation solvers over a node-function oracle, both metered.
//
// solve_dfs keeps the d child values of every node on the current path.
//
// solve_cookmertz keeps d+1 registers of b field elements, shared by every
// level. A call add(u, R, a) performs R += a * v_u and leaves all other
// registers as it found them. For an internal node, each child register
// R_c is cycled through omega^j * tau_c + v_c for j = 0..m-1, where tau_c is
// whatever R_c held on entry and omega is a primitive m-th root of unity,
// and a * F(child registers) is added to R each time. When the extension F
// has degree < m the sum over j collapses to f_u(v_{u0}, ..., v_{u(d-1)}),
// because m is odd and the field has characteristic 2. A final pass
// subtracts v_c from each child register and one more multiplication by
// omega restores tau_c. Each level keeps O(1) words of loop state.
//
// Bit j of a b-bit value is register element j, embedded as 0 or 1.

#include <cstdint>

#include "lowspace/tree_eval.hpp"

namespace lowspace {

enum class TreeSolver { Dfs, CookMertz };

const char *solver_name(TreeSolver s);

struct SolveOptions {
    /// Oracle calls (leaf, evaluate, extension) allowed before
    /// BudgetExceeded is thrown.
    std::uint64_t max_calls = std::uint64_t{1} << 24;
};

struct SolveReport {
    NodeValue root_value;
    std::size_t peak_words = 0;
    std::uint64_t node_fn_calls = 0;
    double wall_seconds = 0;
};

SolveReport solve_dfs(const TreeEvalInstance &inst, Meter &meter, const SolveOptions &opts = {});
SolveReport solve_cookmertz(const TreeEvalInstance &inst, Meter &meter, const SolveOptions &opts = {});
SolveReport solve(const TreeEvalInstance &inst, TreeSolver solver, Meter &meter, const SolveOptions &opts = {});

/// Constants of the space contracts, in words:
///   dfs: dfs_c * (h + 1) * d * b
///   cm:  cm_c1 * h * log2(d b) + cm_c2 * d * b
struct SpaceConstants {
    double dfs_c;
    double cm_c1;
    double cm_c2;
};

inline constexpr SpaceConstants kSpaceConstants{2.0, 1.0, 8.0};

double analytic_space_bound(const TreeEvalParams &p, TreeSolver solver, const SpaceConstants &k = kSpaceConstants);

/// Peak workspace of a run cut off after `call_budget` oracle calls (or of
/// the full run, if it finishes first). Both solvers reach their deepest
/// stack on the first root-to-leaf descent.
std::size_t probe_peak_words(const TreeEvalInstance &inst, TreeSolver solver, std::uint64_t call_budget);

/// Field grid the catalytic solver uses for an instance: m roots of unity
/// in GF(2^k).
struct CookMertzGrid {
    std::uint32_t m;
    unsigned k;
};
CookMertzGrid cookmertz_grid(const TreeEvalInstance &inst);

} // namespace lowspace
