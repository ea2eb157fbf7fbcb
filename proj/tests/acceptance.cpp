// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 3,5] [--known-failures 1,8]
//
// A failing criterion listed in --known-failures is printed as FAIL (known)
// and does not change the exit status.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lowspace/circuit.hpp"
#include "lowspace/circuit_tree.hpp"
#include "lowspace/dag_partition.hpp"
#include "lowspace/error.hpp"
#include "lowspace/pippenger.hpp"
#include "lowspace/random.hpp"
#include "lowspace/synthetic_tree.hpp"
#include "lowspace/tm_compile.hpp"
#include "lowspace/tree_solvers.hpp"
#include "oracles.hpp"

using namespace lowspace;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::string first_failure;

    void require(bool cond, const std::string &what) {
        if (!cond && pass) {
            pass = false;
            first_failure = what;
        }
    }
};

BitVector bits_of(std::uint64_t v, std::size_t n) {
    BitVector x(n);
    for (std::size_t i = 0; i < n; ++i)
        x.set(i, (v >> i) & 1);
    return x;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

std::size_t ceil_log2(std::size_t s) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(static_cast<double>(s)))));
}

TuringMachine load_machine(const std::string &name) {
    return read_tm_file(std::string(LOWSPACE_DATA_DIR) + "/machines/" + name + ".tm");
}

// 1. Partition properties, including the stated layer bound.
Outcome partition_properties() {
    Outcome o;
    Rng rng(1001);
    std::size_t graphs = 0, structural_fail = 0, bound_fail = 0;
    std::string bound_example;
    while (graphs < 1000) {
        const std::size_t d = rng.between(2, 8);
        const std::size_t s = rng.between(d + 1, 2000);
        const std::size_t dprime = rng.between(2, d + 1);
        const std::size_t b_min = ceil_div(d, dprime - 1);
        if (b_min > s)
            continue;
        // log-uniform b keeps small blocks (long cables) from dominating the run
        const double lb = std::log(static_cast<double>(b_min)), ub = std::log(static_cast<double>(s));
        const auto b = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::exp(lb + (ub - lb) * rng.uniform())), b_min, s);
        const auto params = compute_params(s, d, dprime, b);
        if (params.t > 600)
            continue;
        ++graphs;
        const Dag g = gen_random_dag(s, d, rng.next());
        const auto r = verify_partition(g, params);
        std::ostringstream tag;
        tag << "s=" << s << " d=" << d << " d'=" << dprime << " b=" << b;
        if (!r.ok) {
            ++structural_fail;
            o.require(false, tag.str() + ": " + r.failure);
        }
        if (!r.stated_layer_bound_ok) {
            if (bound_fail++ == 0) {
                std::ostringstream ex;
                ex << tag.str() << " layers=" << r.layer_count << " > " << r.stated_layer_bound;
                bound_example = ex.str();
            }
            o.require(false, "layer bound: " + bound_example);
        }
    }
    std::ostringstream d;
    d << graphs << " DAGs, " << structural_fail << " structural failures, " << bound_fail
      << " over the ceiling layer bound";
    if (bound_fail)
        d << " (e.g. " << bound_example << ")";
    o.detail = d.str();
    return o;
}

// 2. Spine graph: cables bring the in-degree from t - 1 down to at most 3.
Outcome spine_witness() {
    Outcome o;
    std::ostringstream d;
    for (std::size_t b : {8u, 16u, 32u}) {
        const auto params = compute_params(b * b, 2, 3, b);
        VerifyOptions plain;
        plain.cables = false;
        plain.check_closed_forms = false;
        const auto without = verify_partition(spine_graph(b), params, plain);
        const auto with = verify_partition(spine_graph(b), params);
        o.require(without.max_in_degree == params.t - 1, "b=" + std::to_string(b) + ": cable-free in-degree");
        o.require(with.ok && with.max_in_degree <= 3, "b=" + std::to_string(b) + ": " + with.failure);
        d << "b=" << b << " t-1=" << params.t - 1 << " plain=" << without.max_in_degree
          << " cabled=" << with.max_in_degree << "; ";
    }
    o.detail = d.str();
    return o;
}

struct CorpusItem {
    Circuit circuit;
    std::size_t b;
};

// Criterion-3 corpus: b rotates through the four sizes; s is redrawn until
// the tree height is at most kMaxHeight.
constexpr std::size_t kMaxHeight = 14;

std::vector<CorpusItem> reduction_corpus() {
    std::vector<CorpusItem> corpus;
    Rng rng(3003);
    for (std::size_t i = 0; i < 1000; ++i) {
        for (;;) {
            const std::size_t s = rng.between(2, 512);
            const double sd = static_cast<double>(s);
            std::size_t b = 0;
            switch (i % 4) {
            case 0: b = 2; break;
            case 1: b = static_cast<std::size_t>(std::ceil(std::sqrt(sd))); break;
            case 2: b = default_block_size(s); break;
            default: b = s;
            }
            b = std::clamp<std::size_t>(b, 2, s);
            if (compute_params(s, 2, 2, b).t > kMaxHeight)
                continue;
            corpus.push_back({gen_random_circuit(s, 0, rng.next()), b});
            break;
        }
    }
    return corpus;
}

// 3. Reduction correctness through the depth-first solver.
Outcome reduction(const std::vector<CorpusItem> &corpus) {
    Outcome o;
    std::size_t max_h = 0;
    for (const auto &item : corpus) {
        const auto inst = build_instance(item.circuit, item.b);
        Meter m;
        const auto rep = solve_dfs(*inst, m, {std::uint64_t{1} << 26});
        const std::size_t s = item.circuit.size();
        max_h = std::max(max_h, inst->params().h);
        o.require(inst->extract_output(rep.root_value) == eval_naive(item.circuit).get(s - 1),
                  "s=" + std::to_string(s) + " b=" + std::to_string(item.b));
    }
    o.detail = std::to_string(corpus.size()) + " circuits, h <= " + std::to_string(max_h);
    return o;
}

// 4. Solver agreement and pinned space contracts.
Outcome solvers() {
    Outcome o;
    Rng rng(4004);
    std::size_t bitwise = 0, tables = 0, circuits = 0;
    double worst_dfs = 0, worst_cm = 0;
    auto run = [&](const TreeEvalInstance &inst, const std::string &tag) {
        const NodeValue want = tree_value(inst);
        const auto p = inst.params();
        Meter m1, m2;
        const auto dfs = solve_dfs(inst, m1);
        const auto cm = solve_cookmertz(inst, m2);
        o.require(dfs.root_value == want, tag + ": dfs value");
        o.require(cm.root_value == want, tag + ": catalytic value");
        const double bd = analytic_space_bound(p, TreeSolver::Dfs);
        const double bc = analytic_space_bound(p, TreeSolver::CookMertz);
        o.require(dfs.peak_words <= bd, tag + ": dfs peak " + std::to_string(dfs.peak_words));
        o.require(cm.peak_words <= bc, tag + ": catalytic peak " + std::to_string(cm.peak_words));
        worst_dfs = std::max(worst_dfs, dfs.peak_words / bd);
        worst_cm = std::max(worst_cm, cm.peak_words / bc);
    };
    while (bitwise + tables + circuits < 200) {
        const std::size_t kind = rng.below(3);
        if (kind == 0) {
            const std::size_t h = rng.between(0, 7), b = rng.between(1, 64);
            run(BitwiseInstance(h, b, rng.next()), "bitwise h=" + std::to_string(h) + " b=" + std::to_string(b));
            ++bitwise;
        } else if (kind == 1) {
            const std::size_t d = rng.between(2, 3);
            const TreeEvalParams p{rng.between(0, d == 2 ? 3 : 2), d, rng.between(1, d == 2 ? 3 : 2)};
            run(RandomTableInstance(p, rng.next()), "table h=" + std::to_string(p.h) + " d=" + std::to_string(d) +
                                                       " b=" + std::to_string(p.b));
            ++tables;
        } else {
            const std::size_t s = rng.between(2, 12);
            const Circuit c = gen_random_circuit(s, 0, rng.next());
            const auto inst = build_instance(c, rng.between(std::max<std::size_t>(2, s / 2), s));
            if (inst->params().h > 2 || inst->params().b > 8)
                continue;
            run(*inst, "circuit s=" + std::to_string(s));
            ++circuits;
        }
    }
    const BitwiseInstance tall(16, 64, 4016);
    const auto pd = probe_peak_words(tall, TreeSolver::Dfs, 1 << 16);
    const auto pc = probe_peak_words(tall, TreeSolver::CookMertz, 1 << 16);
    o.require(pc < pd, "h=16 b=64: catalytic peak not below dfs peak");
    o.require(pc <= analytic_space_bound(tall.params(), TreeSolver::CookMertz), "h=16 b=64: catalytic bound");
    std::ostringstream d;
    d.precision(3);
    d << bitwise << " bitwise, " << tables << " table, " << circuits << " circuit instances; worst peak/bound dfs "
      << worst_dfs << " cm " << worst_cm << "; h=16 b=64 peaks cm " << pc << " < dfs " << pd;
    o.detail = d.str();
    return o;
}

// 5. One local evaluation stays within the pinned workspace bound.
Outcome local_eval(const std::vector<CorpusItem> &corpus) {
    Outcome o;
    Rng rng(5005);
    double worst = 0;
    std::size_t calls = 0;
    for (const auto &item : corpus) {
        const auto inst = build_instance(item.circuit, item.b);
        const auto p = inst->params();
        const std::size_t s = item.circuit.size();
        for (int k = 0; k < 16; ++k) {
            NodePath u;
            const std::size_t depth = rng.below(p.h + 1);
            for (std::size_t i = 0; i < depth; ++i)
                u.push(static_cast<unsigned>(rng.below(2)));
            Meter m;
            NodeValue out(p.b);
            if (depth == p.h) {
                inst->leaf(u, out, m);
            } else {
                std::vector<NodeValue> kids(2, NodeValue(p.b));
                for (auto &kid : kids)
                    for (std::size_t i = 0; i < p.b; ++i)
                        kid.set(i, rng.coin());
                inst->evaluate(u, kids, out, m);
            }
            ++calls;
            const double bound = local_eval_bound(s, p.b);
            worst = std::max(worst, m.peak_words() / bound);
            o.require(m.peak_words() <= bound, "s=" + std::to_string(s) + " b=" + std::to_string(p.b) + " u=" +
                                                   u.to_string() + ": peak " + std::to_string(m.peak_words()));
        }
    }
    std::ostringstream d;
    d.precision(3);
    d << calls << " local evaluations, worst peak/bound " << worst;
    o.detail = d.str();
    return o;
}

// 6. Record-based evaluator: values and operation count.
Outcome pippenger_eval() {
    Outcome o;
    Rng rng(6006);
    for (int i = 0; i < 500; ++i) {
        const std::size_t s = rng.between(1, 4096);
        const std::size_t n = rng.between(0, std::min<std::size_t>(s, 16));
        const bool full = rng.coin();
        const Circuit c = full ? gen_random_full_circuit(s, n, rng.next()) : gen_random_circuit(s, 0, rng.next());
        const BitVector x = bits_of(rng.next(), c.num_inputs());
        std::vector<bool> xv(c.num_inputs());
        for (std::size_t j = 0; j < xv.size(); ++j)
            xv[j] = x.get(j);
        const auto want = oracle::truth_table_eval(serialize_circuit(c), xv);
        const auto got = pippenger::eval_pippenger(c, x);
        bool same = got.values.size() == want.size();
        for (std::size_t j = 0; same && j < want.size(); ++j)
            same = got.values.get(j) == want[j];
        o.require(same, "values differ at s=" + std::to_string(s));
    }
    std::ostringstream d;
    d.precision(3);
    d << "500 circuits agree; op_count/(s ceil(log2 s)^2):";
    for (std::size_t s = 256; s <= 16384; s *= 2) {
        double worst = 0;
        for (int k = 0; k < 3; ++k) {
            const auto r = pippenger::eval_pippenger(gen_random_circuit(s, 0, rng.next()), BitVector());
            const double lg = static_cast<double>(ceil_log2(s));
            worst = std::max(worst, r.op_count / (s * lg * lg));
        }
        o.require(worst <= pippenger::kOpCountConstant, "op count over bound at s=" + std::to_string(s));
        d << " " << s << ":" << worst;
    }
    o.detail = d.str();
    return o;
}

// 7. Compiled circuits agree with direct simulation; size recurrence.
Outcome tm_compiler() {
    Outcome o;
    std::size_t checked = 0;
    double worst_scaffold = 0, worst_ratio = 0;
    for (const std::string name : {"parity", "write_and_move", "palindrome2", "trivial_halt"}) {
        const TuringMachine m = load_machine(name);
        for (std::size_t n = 0; n <= 8; ++n) {
            for (std::size_t t : {std::max<std::size_t>(n, 1), std::size_t{27}, std::size_t{243}}) {
                if (t == 243 && n != 8)
                    continue;
                const SimulatorCircuit sim = build_simulator_circuit(m, n, t);
                for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
                    const BitVector x = bits_of(v, n);
                    const Configuration want =
                        simulate_direct(m, initial_configuration(m, x, sim.window, sim.offset), sim.steps);
                    const GateValues values = eval_simulator(sim, x);
                    const std::string tag = name + " n=" + std::to_string(n) + " t=" + std::to_string(t) +
                                            " x=" + x.to_string();
                    try {
                        o.require(decode_output(m, sim, values, x) == want, tag + ": configuration");
                    } catch (const Error &e) {
                        o.require(false, tag + ": " + e.what());
                    }
                    o.require(values.get(sim.circuit.size() - 1) == (want.state == m.accept()), tag + ": accept");
                    ++checked;
                }
            }
        }
        const double w = static_cast<double>(scaffold_width(m));
        for (std::size_t t = 27; t <= 2187; t *= 3) {
            const double size = static_cast<double>(ct_size(m, t)), lower = static_cast<double>(ct_size(m, t / 3));
            const double td = static_cast<double>(t);
            worst_scaffold = std::max(worst_scaffold, (size - 3 * lower) / (w * td));
            worst_ratio = std::max(worst_ratio, size / (w * td * std::log2(td)));
        }
    }
    o.require(worst_scaffold <= kScaffoldConstant, "scaffold constant exceeded");
    o.require(worst_ratio <= kSizeRatioConstant, "size ratio constant exceeded");
    std::ostringstream d;
    d.precision(4);
    d << checked << " (machine, n, t, x) runs agree; per width: max (size(t)-3 size(t/3))/t " << worst_scaffold
      << ", max size/(t log2 t) " << worst_ratio;
    o.detail = d.str();
    return o;
}

// 8. Parity at t = 81 through the catalytic solver with the default b.
// One oracle call on this instance costs milliseconds.
constexpr std::uint64_t kEndToEndCalls = std::uint64_t{1} << 12;

Outcome end_to_end() {
    Outcome o;
    const TuringMachine m = load_machine("parity");
    const std::size_t n = 6;
    const SimulatorCircuit sim = build_simulator_circuit(m, n, 81);
    std::size_t s = 0, b = 0, h = 0;
    bool cm_attempted = false;
    std::string cm_note;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        const BitVector x = bits_of(v, n);
        const bool want =
            simulate_direct(m, initial_configuration(m, x, sim.window, sim.offset), sim.steps).state == m.accept();
        const Circuit simple = full_to_simple(sim.circuit, x).circuit;
        s = simple.size();
        b = default_block_size(s);
        const auto inst = build_instance(simple, b);
        h = inst->params().h;
        o.require(h <= ceil_div(2 * s, b), "h over ceil(2s/b)");
        o.require(eval_naive(simple).get(s - 1) == want, "compiled circuit accept bit, x=" + x.to_string());
        // every input gives an instance of the same shape; one attempt
        // settles whether the catalytic run fits the call budget
        if (!cm_attempted) {
            cm_attempted = true;
            Meter meter;
            const auto start = std::chrono::steady_clock::now();
            try {
                const auto rep = solve_cookmertz(*inst, meter, {kEndToEndCalls});
                o.require(inst->extract_output(rep.root_value) == want, "catalytic accept bit, x=" + x.to_string());
                cm_note = "catalytic run finished";
            } catch (const BudgetExceeded &) {
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                std::ostringstream note;
                note.precision(3);
                note << "catalytic run exceeded " << kEndToEndCalls << " oracle calls after " << secs << " s (peak "
                     << meter.peak_words() << " words)";
                cm_note = note.str();
                o.require(false, "x=" + x.to_string() + ": " + cm_note);
            }
        }
    }
    std::ostringstream d;
    d << "s=" << s << " b=" << b << " h=" << h << " ceil(2s/b)=" << ceil_div(2 * s, b) << "; " << cm_note;
    o.detail = d.str();
    return o;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> known, only;
    app.add_option("--known-failures", known, "Criteria expected to fail")->delimiter(',');
    app.add_option("--only", only, "Run just these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    const std::set<int> known_set(known.begin(), known.end()), only_set(only.begin(), only.end());

    std::vector<CorpusItem> corpus;
    auto corpus_ref = [&]() -> const std::vector<CorpusItem> & {
        if (corpus.empty())
            corpus = reduction_corpus();
        return corpus;
    };
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"partition properties", partition_properties},
        {"spine witness", spine_witness},
        {"reduction correctness", [&] { return reduction(corpus_ref()); }},
        {"solver agreement and space", solvers},
        {"local computability", [&] { return local_eval(corpus_ref()); }},
        {"pippenger", pippenger_eval},
        {"tm compiler", tm_compiler},
        {"end to end", end_to_end},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only_set.empty() && !only_set.count(id))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o.pass = false;
            o.first_failure = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream line;
        line.precision(3);
        if (o.pass) {
            line << "PASS " << id << " " << criteria[i].first;
        } else {
            line << "FAIL " << id << " " << criteria[i].first << (known_set.count(id) ? " (known)" : "");
            if (!known_set.count(id))
                ++unexpected;
        }
        line << " [" << secs << " s]: " << o.detail;
        if (!o.pass)
            line << " | first failure: " << o.first_failure;
        std::cout << line.str() << std::endl;
    }
    return unexpected ? 1 : 0;
}
