#include "lowspace/tree_solvers.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <vector>

#include "lowspace/error.hpp"
#include "lowspace/gf2k.hpp"

namespace lowspace {

namespace {

// Words of loop state per recursion level.
constexpr std::size_t kFrameWords = 1;

std::size_t path_words(const TreeEvalParams &P) {
    const std::size_t digit_bits = P.d <= 1 ? 1 : std::bit_width(P.d - 1);
    return words_for_bits(P.h * digit_bits);
}

class CallCounter {
  public:
    CallCounter(const Meter &meter, std::uint64_t cap) : meter_(&meter), cap_(cap) {}
    void tick() {
        if (calls_ >= cap_)
            throw BudgetExceeded(calls_, meter_->peak_words());
        ++calls_;
    }
    std::uint64_t calls() const { return calls_; }
    /// Throws now if n more calls would not fit.
    void reserve(std::uint64_t n) const {
        if (n > cap_ - calls_)
            throw BudgetExceeded(calls_, meter_->peak_words());
    }

  private:
    const Meter *meter_;
    std::uint64_t cap_;
    std::uint64_t calls_ = 0;
};

class DfsSolver {
  public:
    DfsSolver(const TreeEvalInstance &inst, Meter &meter, std::uint64_t cap)
        : inst_(inst), P_(inst.params()), meter_(meter), calls_(meter, cap) {}

    void run(NodeValue &out) {
        const Charge path(meter_, path_words(P_));
        NodePath u;
        visit(u, out);
    }
    std::uint64_t calls() const { return calls_.calls(); }

  private:
    void visit(NodePath &u, NodeValue &out) {
        if (u.size() == P_.h) {
            calls_.tick();
            inst_.leaf(u, out, meter_);
            return;
        }
        const Charge frame(meter_, kFrameWords);
        const Charge buffers(meter_, P_.d * words_for_bits(P_.b));
        std::vector<NodeValue> children(P_.d, NodeValue(P_.b));
        for (unsigned c = 0; c < P_.d; ++c) {
            u.push(c);
            visit(u, children[c]);
            u.pop();
        }
        calls_.tick();
        inst_.evaluate(u, children, out, meter_);
    }

    const TreeEvalInstance &inst_;
    TreeEvalParams P_;
    Meter &meter_;
    CallCounter calls_;
};

class CookMertzSolver {
  public:
    CookMertzSolver(const TreeEvalInstance &inst, Meter &meter, std::uint64_t cap)
        : inst_(inst), P_(inst.params()), grid_(cookmertz_grid(inst)), field_(grid_.k),
          omega_(field_.root_of_unity(grid_.m)), meter_(meter), calls_(meter, cap) {}

    void run(NodeValue &out) {
        const Charge path(meter_, path_words(P_));
        PackedArray regs(meter_, (P_.d + 1) * P_.b, grid_.k);
        regs_ = &regs;
        NodePath u;
        add(u, 0, 1);
        for (std::size_t i = 0; i < P_.b; ++i) {
            const auto v = regs.get(i);
            if (v > 1)
                throw Error("catalytic solver produced a non-Boolean root value");
            out.set(i, v == 1);
        }
        regs_ = nullptr;
    }
    std::uint64_t calls() const { return calls_.calls(); }

  private:
    RegisterRef reg(std::size_t r) const { return {regs_, r * P_.b}; }

    // register r += coeff * v_u
    void add(NodePath &u, std::size_t r, std::uint32_t coeff) {
        if (u.size() == P_.h) {
            MeteredBits value(meter_, P_.b);
            NodeValue &v = value.bits();
            calls_.tick();
            inst_.leaf(u, v, meter_);
            const RegisterRef R = reg(r);
            for (std::size_t i = 0; i < P_.b; ++i)
                if (v.get(i))
                    R.set(i, GF2k::add(R.get(i), coeff));
            return;
        }
        const Charge frame(meter_, kFrameWords);
        auto child_reg = [&](unsigned c) { return (r + 1 + c) % (P_.d + 1); };
        const std::uint32_t shift = GF2k::add(1, omega_);
        for (std::uint32_t j = 0; j < grid_.m; ++j) {
            for (unsigned c = 0; c < P_.d; ++c) {
                u.push(c);
                if (j == 0) {
                    add(u, child_reg(c), 1);
                } else {
                    scale(child_reg(c), omega_);
                    add(u, child_reg(c), shift);
                }
                u.pop();
            }
            accumulate(u, r, coeff, child_reg);
        }
        for (unsigned c = 0; c < P_.d; ++c) {
            u.push(c);
            add(u, child_reg(c), 1);
            u.pop();
            scale(child_reg(c), omega_);
        }
    }

    void scale(std::size_t r, std::uint32_t a) {
        const RegisterRef R = reg(r);
        for (std::size_t i = 0; i < P_.b; ++i)
            R.set(i, field_.mul(R.get(i), a));
    }

    template <typename ChildReg> void accumulate(const NodePath &u, std::size_t r, std::uint32_t coeff, ChildReg &&child_reg) {
        std::vector<RegisterRef> children;
        children.reserve(P_.d);
        for (unsigned c = 0; c < P_.d; ++c)
            children.push_back(reg(child_reg(c)));
        const Charge refs(meter_, P_.d);
        calls_.tick();
        if (inst_.accumulate_extension(u, field_, children, reg(r), coeff, meter_))
            return;
        multilinear(u, children, reg(r), coeff);
    }

    // out[i] += coeff * sum over Boolean a on the support of f_u(a)_i * eq(a, y)
    void multilinear(const NodePath &u, const std::vector<RegisterRef> &y, RegisterRef out, std::uint32_t coeff) {
        const std::size_t db = P_.d * P_.b;
        MeteredBits mask(meter_, db);
        inst_.support(u, mask.bits(), meter_);
        const std::size_t width = mask.bits().count();
        if (width > inst_.degree_bound())
            throw Error("node support exceeds the declared degree bound");

        const Charge buffers(meter_, P_.d * words_for_bits(P_.b));
        std::vector<NodeValue> a(P_.d, NodeValue(P_.b));
        MeteredBits value(meter_, P_.b);
        const Charge scalars(meter_, 2); // weight, loop index
        bool first = true;
        while (true) {
            std::uint32_t w = 1;
            for (std::size_t x = 0; x < db; ++x) {
                if (!mask.get(x))
                    continue;
                const std::uint32_t yx = y[x / P_.b].get(x % P_.b);
                w = field_.mul(w, a[x / P_.b].get(x % P_.b) ? yx : GF2k::add(1, yx));
            }
            calls_.tick();
            inst_.evaluate(u, a, value.bits(), meter_);
            if (first) {
                // the other 2^width - 1 evaluations must fit the budget
                calls_.reserve(width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1);
                first = false;
            }
            const std::uint32_t term = field_.mul(coeff, w);
            for (std::size_t i = 0; i < P_.b; ++i)
                if (value.get(i))
                    out.set(i, GF2k::add(out.get(i), term));
            // next assignment: binary increment over the support positions
            std::size_t x = 0;
            for (; x < db; ++x) {
                if (!mask.get(x))
                    continue;
                NodeValue &cv = a[x / P_.b];
                const bool bit = cv.get(x % P_.b);
                cv.set(x % P_.b, !bit);
                if (!bit)
                    break;
            }
            if (x == db)
                break;
        }
    }

    const TreeEvalInstance &inst_;
    TreeEvalParams P_;
    CookMertzGrid grid_;
    GF2k field_;
    std::uint32_t omega_;
    Meter &meter_;
    CallCounter calls_;
    PackedArray *regs_ = nullptr;
};

template <typename Solver> SolveReport run_solver(const TreeEvalInstance &inst, Meter &meter, const SolveOptions &opts) {
    const auto start = std::chrono::steady_clock::now();
    SolveReport rep;
    rep.root_value = NodeValue(inst.params().b);
    Solver solver(inst, meter, opts.max_calls);
    meter.scope([&] { solver.run(rep.root_value); });
    rep.peak_words = meter.peak_words();
    rep.node_fn_calls = solver.calls();
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace

const char *solver_name(TreeSolver s) { return s == TreeSolver::Dfs ? "tree:dfs" : "tree:cm"; }

CookMertzGrid cookmertz_grid(const TreeEvalInstance &inst) {
    const auto g = choose_root_grid(inst.degree_bound());
    return {g.m, g.k};
}

SolveReport solve_dfs(const TreeEvalInstance &inst, Meter &meter, const SolveOptions &opts) {
    return run_solver<DfsSolver>(inst, meter, opts);
}

SolveReport solve_cookmertz(const TreeEvalInstance &inst, Meter &meter, const SolveOptions &opts) {
    return run_solver<CookMertzSolver>(inst, meter, opts);
}

SolveReport solve(const TreeEvalInstance &inst, TreeSolver solver, Meter &meter, const SolveOptions &opts) {
    return solver == TreeSolver::Dfs ? solve_dfs(inst, meter, opts) : solve_cookmertz(inst, meter, opts);
}

double analytic_space_bound(const TreeEvalParams &p, TreeSolver solver, const SpaceConstants &k) {
    const double h = static_cast<double>(p.h), d = static_cast<double>(p.d), b = static_cast<double>(p.b);
    if (solver == TreeSolver::Dfs)
        return k.dfs_c * (h + 1) * d * b;
    return k.cm_c1 * h * std::log2(d * b) + k.cm_c2 * d * b;
}

std::size_t probe_peak_words(const TreeEvalInstance &inst, TreeSolver solver, std::uint64_t call_budget) {
    Meter meter;
    try {
        return solve(inst, solver, meter, {call_budget}).peak_words;
    } catch (const BudgetExceeded &e) {
        return e.peak_words();
    }
}

} // namespace lowspace
