// lowspace: batch front end for evaluation, partitioning, compilation and
// verification.
//
// Exit codes: 0 ok, 1 mismatch or failed check, 2 parse or parameter error,
// 3 call budget exceeded.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lowspace/circuit.hpp"
#include "lowspace/circuit_tree.hpp"
#include "lowspace/dag_partition.hpp"
#include "lowspace/error.hpp"
#include "lowspace/pippenger.hpp"
#include "lowspace/random.hpp"
#include "lowspace/tm_compile.hpp"
#include "lowspace/tree_solvers.hpp"
#include "lowspace/verify.hpp"

#ifndef LOWSPACE_DATA_DIR
#define LOWSPACE_DATA_DIR "data"
#endif

using namespace lowspace;

namespace {

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kBudget = 3 };

const std::vector<std::string> kAlgos{"naive", "pippenger", "tree:dfs", "tree:cm"};

struct Row {
    std::size_t s = 0, b = 0, dprime = 2, h = 0;
    std::string algo;
    std::size_t peak_words = 0;
    std::uint64_t op_count = 0, node_fn_calls = 0;
    std::string ok;
    double wall = 0;
};

std::string csv_header(bool timing) {
    return std::string("s,b,dprime,h,algo,peak_words,op_count,node_fn_calls,ok") + (timing ? ",wall_time" : "");
}

std::string csv_row(const Row &r, bool timing) {
    std::ostringstream out;
    out << r.s << ',' << r.b << ',' << r.dprime << ',' << r.h << ',' << r.algo << ',' << r.peak_words << ','
        << r.op_count << ',' << r.node_fn_calls << ',' << r.ok;
    if (timing) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ",%.6f", r.wall);
        out << buf;
    }
    return out.str();
}

void append_report(const std::string &path, const Row &row, bool timing) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw Error("cannot write " + path);
    if (fresh)
        out << csv_header(timing) << '\n';
    out << csv_row(row, timing) << '\n';
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << text;
}

// b and h of the d' = 2 reduction for a circuit of s gates, when defined.
void fill_shape(Row &row, std::size_t s, std::size_t b) {
    row.s = s;
    row.b = b;
    if (s >= 2 && b >= 2 && b <= s)
        row.h = compute_params(s, 2, 2, b).t;
}

struct Outcome {
    GateValues values; ///< all gates (naive, pippenger) or empty
    bool output = false;
    Row row;
};

// Runs one algorithm on (c, x). Tree solvers see the simple conversion.
Outcome run_algo(const Circuit &c, const BitVector &x, const std::string &algo, std::size_t b,
                 std::uint64_t max_calls) {
    Outcome res;
    res.row.algo = algo;
    const auto start = std::chrono::steady_clock::now();
    if (algo == "naive") {
        const auto conv = full_to_simple(c, x);
        res.values = conv.pull_back(eval_naive(conv.circuit));
        res.row.op_count = c.size();
    } else if (algo == "pippenger") {
        auto r = pippenger::eval_pippenger(c, x);
        res.values = std::move(r.values);
        res.row.op_count = r.op_count;
    } else {
        const auto conv = full_to_simple(c, x);
        const std::size_t s = conv.circuit.size();
        if (b == 0)
            b = default_block_size(s);
        fill_shape(res.row, s, b);
        const auto inst = build_instance(conv.circuit, b);
        Meter meter;
        const auto rep = solve(*inst, algo == "tree:dfs" ? TreeSolver::Dfs : TreeSolver::CookMertz, meter,
                               {max_calls});
        res.output = inst->extract_output(rep.root_value);
        res.row.peak_words = rep.peak_words;
        res.row.node_fn_calls = rep.node_fn_calls;
        res.row.wall = rep.wall_seconds;
        return res;
    }
    res.row.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.size() > 0)
        res.output = res.values.get(c.size() - 1);
    fill_shape(res.row, c.size(), b == 0 && c.size() >= 2 ? default_block_size(c.size()) : b);
    return res;
}

BitVector parse_input(const std::string &bits, std::size_t n) {
    const BitVector x = BitVector::from_string(bits);
    if (x.size() != n)
        throw ParamError("input has " + std::to_string(x.size()) + " bits, circuit expects " + std::to_string(n));
    return x;
}

// ---- eval

struct EvalArgs {
    std::string circuit, input, algo = "naive", report;
    std::size_t b = 0;
    bool check = false, all = false, timing = false;
    std::uint64_t max_calls = SolveOptions{}.max_calls;
};

int cmd_eval(const EvalArgs &a) {
    const Circuit c = read_circuit_file(a.circuit);
    if (c.size() == 0)
        throw ParamError("circuit has no gates");
    const BitVector x = parse_input(a.input, c.num_inputs());
    const bool tree = a.algo.rfind("tree:", 0) == 0;
    if (a.all && tree)
        throw ParamError("--all needs an algorithm that computes every gate");
    Outcome out;
    try {
        out = run_algo(c, x, a.algo, a.b, a.max_calls);
    } catch (const BudgetExceeded &e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        if (!a.report.empty()) {
            Row r;
            r.algo = a.algo;
            fill_shape(r, c.size(), a.b ? a.b : default_block_size(c.size()));
            r.node_fn_calls = e.calls();
            r.peak_words = e.peak_words();
            r.ok = "budget";
            append_report(a.report, r, a.timing);
        }
        return kBudget;
    }
    bool ok = true;
    if (a.check) {
        const auto conv = full_to_simple(c, x);
        const GateValues want = conv.pull_back(eval_naive(conv.circuit));
        ok = out.output == want.get(c.size() - 1) && (tree || out.values == want);
    }
    out.row.ok = a.check ? (ok ? "1" : "0") : "1";
    if (a.all)
        std::cout << out.values.to_string() << '\n';
    else
        std::cout << (out.output ? 1 : 0) << '\n';
    if (tree)
        std::cerr << a.algo << ": b=" << out.row.b << " h=" << out.row.h << " peak_words=" << out.row.peak_words
                  << " node_fn_calls=" << out.row.node_fn_calls << '\n';
    if (!a.report.empty())
        append_report(a.report, out.row, a.timing);
    if (!ok) {
        std::cerr << "mismatch against the naive evaluator\n";
        return kMismatch;
    }
    return kOk;
}

// ---- partition

struct PartitionArgs {
    std::string circuit;
    std::size_t random_s = 0, d = 2, dprime = 2, b = 0, spine = 0;
    std::uint64_t seed = 1;
    bool no_cables = false;
};

int cmd_partition(const PartitionArgs &a) {
    std::optional<Circuit> circuit;
    std::unique_ptr<InEdgeGraph> graph;
    std::size_t d = a.d, dprime = a.dprime, b = a.b;
    if (a.spine) {
        graph = std::make_unique<Dag>(spine_graph(a.spine));
        d = 2;
        if (b == 0)
            b = a.spine;
    } else if (a.random_s) {
        graph = std::make_unique<Dag>(gen_random_dag(a.random_s, d, a.seed));
    } else if (!a.circuit.empty()) {
        circuit = read_circuit_file(a.circuit);
        if (!circuit->is_simple())
            circuit = full_to_simple(*circuit, BitVector(circuit->num_inputs())).circuit;
        graph = std::make_unique<CircuitGraph>(*circuit);
        d = 2;
    } else {
        throw ParamError("give a circuit file, --random or --spine");
    }
    const std::size_t s = graph->size();
    if (b == 0)
        b = default_block_size(s);
    const PartitionParams p = compute_params(s, d, dprime, b);
    std::cout << "s=" << p.s << " d=" << p.d << " dprime=" << p.dprime << " b=" << p.b << " b0=" << p.b0
              << " t=" << p.t << '\n';
    VerifyOptions opts;
    opts.cables = !a.no_cables;
    opts.check_closed_forms = !a.no_cables;
    const auto r = verify_partition(*graph, p, opts);
    std::cout << "max_block_size=" << r.max_block_size << " max_in_degree=" << r.max_in_degree
              << " layers=" << r.layer_count << " blocks=" << r.num_blocks
              << " subdivision_vertices=" << r.total_subvertices << '\n';
    std::cout << "stated_layer_bound=" << r.stated_layer_bound << (r.stated_layer_bound_ok ? " (holds)" : " (exceeded)")
              << '\n';
    if (!r.ok) {
        std::cout << "FAIL " << r.failure << '\n';
        return kMismatch;
    }
    std::cout << "ok\n";
    return kOk;
}

// ---- treeify

void dump_tree(const CircuitTreeInstance &inst, NodePath &u, NodeValue &out, std::ostream &os) {
    const auto P = inst.params();
    Meter meter;
    if (u.size() == P.h) {
        inst.leaf(u, out, meter);
    } else {
        std::vector<NodeValue> kids(2, NodeValue(P.b));
        for (unsigned c = 0; c < 2; ++c) {
            u.push(c);
            dump_tree(inst, u, kids[c], os);
            u.pop();
        }
        inst.evaluate(u, kids, out, meter);
    }
    os << (u.size() ? u.to_string() : std::string("-")) << ' ' << inst.node_to_block(u).to_string() << ' '
       << out.to_string() << '\n';
}

int cmd_treeify(const std::string &path, std::size_t b, bool dump) {
    Circuit c = read_circuit_file(path);
    if (!c.is_simple())
        c = full_to_simple(c, BitVector(c.num_inputs())).circuit;
    if (b == 0)
        b = default_block_size(c.size());
    const auto inst = build_instance(c, b);
    const auto P = inst->params();
    const auto &pp = inst->partition_params();
    std::cout << "h=" << P.h << " d=" << P.d << " b=" << P.b << " b0=" << pp.b0 << " t=" << pp.t
              << " root=" << inst->root_block().to_string() << " output_bit=" << inst->output_position() << '\n';
    if (dump) {
        if (P.h >= 20 || (std::size_t{1} << P.h) * P.b > (std::size_t{1} << 20)) {
            std::cout << "tree too large to dump\n";
        } else {
            NodePath u;
            NodeValue root(P.b);
            dump_tree(*inst, u, root, std::cout);
        }
    }
    return kOk;
}

// ---- compile-tm

struct CompileArgs {
    std::string machine, output;
    std::size_t steps = 0;
    std::optional<std::size_t> n;
    std::vector<std::size_t> size_report;
};

int cmd_compile(const CompileArgs &a) {
    const TuringMachine m = read_tm_file(a.machine);
    if (!a.size_report.empty()) {
        std::cout << "t,gates,gates_per_t_log_t\n";
        for (const auto &row : circuit_size_report(m, a.size_report)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", row.per_t_log_t);
            std::cout << row.t << ',' << row.gates << ',' << buf << '\n';
        }
        return kOk;
    }
    if (a.steps == 0)
        throw ParamError("--steps must be positive");
    const std::size_t n = a.n.value_or(a.steps);
    if (n > a.steps)
        throw ParamError("input length exceeds the step budget");
    const SimulatorCircuit sim = build_simulator_circuit(m, n, a.steps);
    const std::string text = serialize_circuit(sim.circuit);
    if (a.output.empty() || a.output == "-")
        std::cout << text;
    else
        write_file(a.output, text);
    std::cerr << "window=" << sim.window << " steps=" << sim.steps << " inputs=" << n
              << " gates=" << sim.circuit.size() << '\n';
    return kOk;
}

// ---- gen

int cmd_gen(std::size_t s, std::size_t n, std::uint64_t seed, bool full, const std::string &output) {
    const Circuit c = full ? gen_random_full_circuit(s, n, seed) : gen_random_circuit(s, 0, seed);
    const std::string text = serialize_circuit(c);
    if (output.empty() || output == "-")
        std::cout << text;
    else
        write_file(output, text);
    return kOk;
}

// ---- verify

int cmd_verify(std::vector<std::string> suites, const SuiteOptions &opts) {
    if (suites.empty())
        suites = suite_names();
    bool ok = true;
    for (const auto &name : suites) {
        const SuiteResult r = run_suite(name, opts);
        std::cout << r.name << ": " << r.passed << " passed, " << r.failed << " failed";
        if (r.inconclusive)
            std::cout << ", " << r.inconclusive << " inconclusive (budget)";
        std::cout << '\n';
        for (const auto &f : r.failures)
            std::cout << "  " << f << '\n';
        ok = ok && r.ok();
    }
    return ok ? kOk : kMismatch;
}

// ---- bench

struct BenchArgs {
    std::vector<std::string> algos;
    std::vector<std::string> sizes; ///< empty tokens are skipped
    std::string circuit, output;
    bool sweep_b = false, timing = false;
    std::size_t trials = 1, b = 0, b_step = 1;
    std::uint64_t seed = 1;
    std::uint64_t max_calls = std::uint64_t{1} << 20;
};

Row bench_one(const Circuit &c, const std::string &algo, std::size_t b, std::uint64_t max_calls) {
    const BitVector x(c.num_inputs());
    try {
        Outcome out = run_algo(c, x, algo, b, max_calls);
        const auto conv = full_to_simple(c, x);
        out.row.ok = out.output == eval_naive(conv.circuit).get(conv.renumbering[c.size() - 1]) ? "1" : "0";
        return out.row;
    } catch (const BudgetExceeded &e) {
        Row r;
        r.algo = algo;
        fill_shape(r, c.size(), b ? b : default_block_size(c.size()));
        r.peak_words = e.peak_words();
        r.node_fn_calls = e.calls();
        r.ok = "budget";
        return r;
    }
}

std::size_t parse_size(const std::string &token, const std::string &flag) {
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        throw ParamError(flag + ": not a size: " + token);
    return v;
}

int cmd_bench(BenchArgs a) {
    if (a.algos.empty())
        a.algos = kAlgos;
    std::vector<Row> rows;
    if (a.sweep_b) {
        if (a.circuit.empty())
            throw ParamError("--sweep-b needs --circuit");
        const Circuit c = read_circuit_file(a.circuit);
        for (std::size_t b = 2; b <= c.size(); b += a.b_step)
            for (const auto &algo : a.algos)
                rows.push_back(bench_one(c, algo, b, a.max_calls));
    } else if (!a.circuit.empty()) {
        const Circuit c = read_circuit_file(a.circuit);
        for (const auto &algo : a.algos)
            rows.push_back(bench_one(c, algo, a.b, a.max_calls));
    } else {
        Rng rng(a.seed);
        for (const auto &token : a.sizes) {
            if (token.empty())
                continue;
            const std::size_t s = parse_size(token, "--sizes");
            for (std::size_t trial = 0; trial < a.trials; ++trial) {
                const Circuit c = gen_random_circuit(s, 0, rng.next());
                for (const auto &algo : a.algos)
                    rows.push_back(bench_one(c, algo, a.b, a.max_calls));
            }
        }
    }
    std::ostringstream out;
    out << csv_header(a.timing) << '\n';
    for (const auto &r : rows)
        out << csv_row(r, a.timing) << '\n';
    if (a.output.empty() || a.output == "-")
        std::cout << out.str();
    else
        write_file(a.output, out.str());
    for (const auto &r : rows)
        if (r.ok == "0")
            return kMismatch;
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Low-space circuit evaluation toolkit"};
    app.require_subcommand(1);

    EvalArgs ev;
    auto *eval = app.add_subcommand("eval", "Evaluate a circuit on an input");
    eval->add_option("circuit", ev.circuit, "Circuit file")->required();
    eval->add_option("--input,-x", ev.input, "Input bits, x1 first");
    eval->add_option("--algo", ev.algo, "naive, pippenger, tree:dfs or tree:cm")
        ->check(CLI::IsMember(kAlgos));
    eval->add_option("--b", ev.b, "Block size for tree solvers (0: ceil(sqrt(s log2 s)))");
    eval->add_flag("--check", ev.check, "Compare against the naive evaluator");
    eval->add_flag("--all", ev.all, "Print every gate value");
    eval->add_option("--report", ev.report, "Append a CSV row to this file");
    eval->add_flag("--timing", ev.timing, "Add a wall_time column to the report");
    eval->add_option("--max-calls", ev.max_calls, "Oracle call budget for tree solvers");

    PartitionArgs pa;
    auto *part = app.add_subcommand("partition", "Partition a DAG and run the partition checks");
    part->add_option("circuit", pa.circuit, "Circuit file");
    part->add_option("--random", pa.random_s, "Random DAG on this many vertices");
    part->add_option("--d", pa.d, "Max in-degree of the random DAG");
    part->add_option("--dprime", pa.dprime, "Target quotient in-degree");
    part->add_option("--b", pa.b, "Max block size (0: ceil(sqrt(s log2 s)))");
    part->add_option("--spine", pa.spine, "Spine graph with s = b*b");
    part->add_option("--seed", pa.seed, "Seed for --random");
    part->add_flag("--no-cables", pa.no_cables, "Check the plain interval partition");

    std::string tree_path;
    std::size_t tree_b = 0;
    bool tree_dump = false;
    auto *treeify = app.add_subcommand("treeify", "Print tree-evaluation parameters of a circuit");
    treeify->add_option("circuit", tree_path, "Circuit file")->required();
    treeify->add_option("--b", tree_b, "Block size (0: ceil(sqrt(s log2 s)))");
    treeify->add_flag("--dump", tree_dump, "Print every node with its block and value");

    CompileArgs ca;
    auto *compile = app.add_subcommand("compile-tm", "Compile a Turing machine into a circuit");
    compile->add_option("machine", ca.machine, "Machine file")->required();
    compile->add_option("--steps", ca.steps, "Step budget t");
    compile->add_option("--n", ca.n, "Input length (default: t)");
    compile->add_option("-o,--output", ca.output, "Output circuit file (default stdout)");
    compile->add_option("--size-report", ca.size_report, "Print C_t gate counts for these t instead")->delimiter(',');

    std::size_t gen_s = 16, gen_n = 0;
    std::uint64_t gen_seed = 1;
    bool gen_full = false;
    std::string gen_out;
    auto *gen = app.add_subcommand("gen", "Generate a random circuit");
    gen->add_option("--gates,-s", gen_s, "Gate count");
    gen->add_option("--inputs,-n", gen_n, "Input variables (full circuits)");
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_flag("--full", gen_full, "Shuffled full circuit with variables");
    gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

    std::vector<std::string> suites;
    SuiteOptions so;
    so.machine_dir = std::string(LOWSPACE_DATA_DIR) + "/machines";
    auto *verify = app.add_subcommand("verify", "Run the seeded property suites");
    verify->add_option("--suite", suites, "Suite to run (repeatable; default all)")
        ->check(CLI::IsMember(suite_names()));
    verify->add_option("--trials", so.trials, "Trials per randomized suite");
    verify->add_option("--seed", so.seed, "Seed");
    verify->add_option("--machines", so.machine_dir, "Directory of sample .tm files");
    verify->add_option("--max-calls", so.max_calls, "Oracle call budget per catalytic solve");

    BenchArgs ba;
    auto *bench = app.add_subcommand("bench", "Write a CSV benchmark report");
    bench->add_option("--algo", ba.algos, "Algorithms (repeatable; default all)")->check(CLI::IsMember(kAlgos));
    bench->add_option("--sizes", ba.sizes, "Random circuit sizes (empty for none)")
        ->delimiter(',')
        ->expected(0, CLI::detail::expected_max_vector_size);
    bench->add_option("--trials", ba.trials, "Circuits per size");
    bench->add_option("--seed", ba.seed, "Seed");
    bench->add_option("--circuit", ba.circuit, "Fixed circuit instead of random ones");
    bench->add_flag("--sweep-b", ba.sweep_b, "One row per b in [2, s] on --circuit");
    bench->add_option("--b-step", ba.b_step, "Step of the b sweep")->check(CLI::PositiveNumber);
    bench->add_option("--b", ba.b, "Block size (0: ceil(sqrt(s log2 s)))");
    bench->add_option("--max-calls", ba.max_calls, "Oracle call budget per tree solve");
    bench->add_flag("--timing", ba.timing, "Add a wall_time column");
    bench->add_option("-o,--output", ba.output, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*eval)
            return cmd_eval(ev);
        if (*part)
            return cmd_partition(pa);
        if (*treeify)
            return cmd_treeify(tree_path, tree_b, tree_dump);
        if (*compile)
            return cmd_compile(ca);
        if (*gen)
            return cmd_gen(gen_s, gen_n, gen_seed, gen_full, gen_out);
        if (*verify)
            return cmd_verify(suites, so);
        if (*bench)
            return cmd_bench(ba);
    } catch (const BudgetExceeded &e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kBudget;
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParamError &e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMismatch;
    }
    return kOk;
}
