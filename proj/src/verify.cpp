#include "lowspace/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>

#include "lowspace/circuit_tree.hpp"
#include "lowspace/dag_partition.hpp"
#include "lowspace/error.hpp"
#include "lowspace/pippenger.hpp"
#include "lowspace/random.hpp"
#include "lowspace/synthetic_tree.hpp"
#include "lowspace/tm_compile.hpp"
#include "lowspace/tree_solvers.hpp"

namespace lowspace {

namespace {

constexpr std::size_t kMaxReported = 5;

void fail(SuiteResult &r, std::string what) {
    ++r.failed;
    if (r.failures.size() < kMaxReported)
        r.failures.push_back(std::move(what));
}

void check(SuiteResult &r, bool ok, const std::string &what) {
    if (ok)
        ++r.passed;
    else
        fail(r, what);
}

BitVector bits_of(std::uint64_t v, std::size_t n) {
    BitVector x(n);
    for (std::size_t i = 0; i < n; ++i)
        x.set(i, (v >> i) & 1);
    return x;
}

std::vector<std::filesystem::path> machines(const SuiteOptions &opts) {
    if (opts.machine_dir.empty())
        throw ParamError("the tm and e2e suites need a machine directory");
    std::vector<std::filesystem::path> out;
    for (const auto &entry : std::filesystem::directory_iterator(opts.machine_dir))
        if (entry.path().extension() == ".tm")
            out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    if (out.empty())
        throw ParamError("no .tm files in " + opts.machine_dir);
    return out;
}

SuiteResult partition_suite(const SuiteOptions &opts) {
    SuiteResult r;
    r.name = "partition";
    Rng rng(opts.seed);
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        const std::size_t d = rng.between(2, 8);
        const std::size_t s = rng.between(d + 1, 400);
        const std::size_t dprime = rng.between(2, d + 1);
        const std::uint64_t seed = rng.next();
        const Dag g = gen_random_dag(s, d, seed);
        // smallest b with b0 >= 1 is ceil(d / (d' - 1))
        const std::size_t b_min = (d + dprime - 2) / (dprime - 1);
        if (b_min > s)
            continue;
        const std::size_t b = rng.between(b_min, s);
        const auto report = verify_partition(g, compute_params(s, d, dprime, b));
        check(r, report.ok,
              "s=" + std::to_string(s) + " d=" + std::to_string(d) + " d'=" + std::to_string(dprime) +
                  " b=" + std::to_string(b) + ": " + report.failure);
    }
    return r;
}

SuiteResult solvers_suite(const SuiteOptions &opts) {
    SuiteResult r;
    r.name = "solvers";
    Rng rng(opts.seed);
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        std::unique_ptr<TreeEvalInstance> inst;
        const std::uint64_t seed = rng.next();
        std::string name;
        if (rng.coin()) {
            const std::size_t d = rng.between(2, 3);
            const TreeEvalParams p{rng.between(0, d == 2 ? 4 : 2), d, rng.between(1, d == 2 ? 3 : 2)};
            inst = std::make_unique<RandomTableInstance>(p, seed);
            name = "table";
        } else {
            inst = std::make_unique<BitwiseInstance>(rng.between(0, 6), rng.between(1, 64), seed);
            name = "bitwise";
        }
        const auto p = inst->params();
        const std::string tag = name + " h=" + std::to_string(p.h) + " d=" + std::to_string(p.d) +
                                " b=" + std::to_string(p.b) + " seed=" + std::to_string(seed);
        const NodeValue want = tree_value(*inst);
        Meter m1, m2;
        const auto dfs = solve_dfs(*inst, m1, {opts.max_calls});
        check(r, dfs.root_value == want, tag + ": dfs disagrees with the recursive value");
        check(r, dfs.peak_words <= analytic_space_bound(p, TreeSolver::Dfs), tag + ": dfs over its space bound");
        SolveReport cm;
        try {
            cm = solve_cookmertz(*inst, m2, {opts.max_calls});
        } catch (const BudgetExceeded &) {
            ++r.inconclusive;
            continue;
        }
        check(r, cm.root_value == want, tag + ": catalytic solver disagrees with the recursive value");
        check(r, cm.peak_words <= analytic_space_bound(p, TreeSolver::CookMertz),
              tag + ": catalytic solver over its space bound");
    }
    return r;
}

SuiteResult pippenger_suite(const SuiteOptions &opts) {
    SuiteResult r;
    r.name = "pippenger";
    Rng rng(opts.seed);
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        const std::size_t s = rng.between(1, 512);
        const std::size_t n = rng.between(0, std::min<std::size_t>(s, 16));
        const std::uint64_t seed = rng.next();
        const bool full = rng.coin();
        const Circuit c = full ? gen_random_full_circuit(s, n, seed) : gen_random_circuit(s, 0, seed);
        const BitVector x = bits_of(rng.next(), c.num_inputs());
        const auto conv = full_to_simple(c, x);
        const GateValues want = conv.pull_back(eval_naive(conv.circuit));
        const auto got = pippenger::eval_pippenger(c, x, true);
        const double log_s = std::max(1.0, std::ceil(std::log2(static_cast<double>(s))));
        check(r, got.values == want,
              std::string(full ? "full" : "simple") + " s=" + std::to_string(s) + " seed=" + std::to_string(seed) +
                  ": gate values differ");
        if (s >= pippenger::kOpCountMinSize)
            check(r, static_cast<double>(got.op_count) <= pippenger::kOpCountConstant * s * log_s * log_s,
                  "s=" + std::to_string(s) + ": op count " + std::to_string(got.op_count) + " over bound");
    }
    return r;
}

SuiteResult tm_suite(const SuiteOptions &opts) {
    SuiteResult r;
    r.name = "tm";
    for (const auto &path : machines(opts)) {
        const TuringMachine m = read_tm_file(path.string());
        for (std::size_t n = 0; n <= 5; ++n) {
            const std::size_t t = 3 * n + 3;
            const SimulatorCircuit sim = build_simulator_circuit(m, n, t);
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
                const BitVector x = bits_of(v, n);
                const std::string tag = path.filename().string() + " x=" + x.to_string();
                const Configuration want =
                    simulate_direct(m, initial_configuration(m, x, sim.window, sim.offset), sim.steps);
                const GateValues values = eval_simulator(sim, x);
                try {
                    check(r, decode_output(m, sim, values, x) == want, tag + ": final configuration differs");
                } catch (const Error &e) {
                    fail(r, tag + ": " + e.what());
                }
                check(r, values.get(sim.circuit.size() - 1) == (want.state == m.accept()),
                      tag + ": accept bit differs");
            }
        }
    }
    return r;
}

// Accept bit through the tree reduction. A catalytic run cut off by the
// budget counts as inconclusive; the depth-first solver still checks the
// reduction on that circuit.
SuiteResult e2e_suite(const SuiteOptions &opts) {
    SuiteResult r;
    r.name = "e2e";
    for (const auto &path : machines(opts)) {
        const TuringMachine m = read_tm_file(path.string());
        for (std::size_t n = 0; n <= 2; ++n) {
            const SimulatorCircuit sim = build_simulator_circuit(m, n, std::max<std::size_t>(n, 1));
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
                const BitVector x = bits_of(v, n);
                const std::string tag = path.filename().string() + " x=" + x.to_string();
                const Configuration final_cfg =
                    simulate_direct(m, initial_configuration(m, x, sim.window, sim.offset), sim.steps);
                const bool want = final_cfg.state == m.accept();
                const Circuit simple = full_to_simple(sim.circuit, x).circuit;
                const auto inst = build_instance(simple, default_block_size(simple.size()));
                Meter meter;
                try {
                    const auto rep = solve_cookmertz(*inst, meter, {opts.max_calls});
                    check(r, inst->extract_output(rep.root_value) == want, tag + ": accept bit differs");
                } catch (const BudgetExceeded &) {
                    ++r.inconclusive;
                    Meter dfs_meter;
                    try {
                        const auto rep = solve_dfs(*inst, dfs_meter, {opts.max_calls});
                        check(r, inst->extract_output(rep.root_value) == want, tag + ": dfs accept bit differs");
                    } catch (const BudgetExceeded &) {
                    }
                }
            }
        }
    }
    return r;
}

using SuiteFn = std::function<SuiteResult(const SuiteOptions &)>;

const std::vector<std::pair<std::string, SuiteFn>> &registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> suites{
        {"partition", partition_suite}, {"solvers", solvers_suite}, {"pippenger", pippenger_suite},
        {"tm", tm_suite},               {"e2e", e2e_suite},
    };
    return suites;
}

} // namespace

const std::vector<std::string> &suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto &[name, fn] : registry())
            out.push_back(name);
        return out;
    }();
    return names;
}

SuiteResult run_suite(const std::string &name, const SuiteOptions &opts) {
    for (const auto &[suite, fn] : registry())
        if (suite == name)
            return fn(opts);
    throw ParamError("unknown suite '" + name + "'");
}

} // namespace lowspace
