#include "lowspace/circuit_tree.hpp"

#include <algorithm>
#include <cmath>

#include "lowspace/error.hpp"
#include "lowspace/gf2k.hpp"

namespace lowspace {

namespace {

// Words charged for one block label and for the predecessor list of a
// block (at most two labels).
constexpr std::size_t kLabelWords = 2;
constexpr std::size_t kPredListWords = 2 * kLabelWords;
// Loop indices and counters of one block evaluation.
constexpr std::size_t kEvalCounterWords = 6;

PartitionParams reduction_params(const Circuit &c, std::size_t b) {
    if (!c.is_simple())
        throw ParamError("tree reduction needs a simple circuit");
    if (b < 2 || b > c.size())
        throw ParamError("block size b must lie in [2, s] (got b=" + std::to_string(b) +
                         ", s=" + std::to_string(c.size()) + ")");
    // every gate has at most two gate inputs, so d = 2 is always a valid declaration
    return compute_params(c.size(), 2, 2, b);
}

unsigned child_slot(const BlockList &preds, const BlockLabel &label) {
    const auto it = std::lower_bound(preds.begin(), preds.end(), label);
    if (it == preds.end() || *it != label)
        throw Error("block " + label.to_string() + " is not a predecessor");
    return static_cast<unsigned>(it - preds.begin());
}

} // namespace

CircuitTreeInstance::CircuitTreeInstance(const Circuit &c, std::size_t b)
    : circuit_(&c), graph_(c), partition_(graph_, reduction_params(c, b)), b_(b) {}

std::unique_ptr<CircuitTreeInstance> build_instance(const Circuit &c, std::size_t b) {
    return std::make_unique<CircuitTreeInstance>(c, b);
}

std::size_t default_block_size(std::size_t s) {
    if (s < 2)
        return 2;
    const double v = std::ceil(std::sqrt(static_cast<double>(s) * std::log2(static_cast<double>(s))));
    return std::clamp<std::size_t>(static_cast<std::size_t>(v), 2, s);
}

double local_eval_bound(std::size_t s, std::size_t b, const LocalEvalConstants &k) {
    return k.bits_c * static_cast<double>(b) + k.log_c * std::log2(static_cast<double>(std::max<std::size_t>(s, 2)));
}

TreeEvalParams CircuitTreeInstance::params() const { return {partition_.params().t, 2, b_}; }

BlockLabel CircuitTreeInstance::root_block() const {
    return partition_.block_of_vertex(partition_.params().s - 1);
}

BlockLabel CircuitTreeInstance::node_to_block(const NodePath &u, Meter &meter) const {
    const Charge label_charge(meter, kLabelWords + 1);
    const Charge preds_charge(meter, kPredListWords);
    BlockLabel cur = root_block();
    for (std::size_t i = 0; i < u.size() && !cur.is_dummy(); ++i) {
        const BlockList preds = partition_.quotient_predecessors(cur);
        cur = u[i] < preds.size() ? preds[u[i]] : BlockLabel::dummy();
    }
    return cur;
}

BlockLabel CircuitTreeInstance::node_to_block(const NodePath &u) const {
    Meter scratch;
    return node_to_block(u, scratch);
}

std::size_t CircuitTreeInstance::output_position() const {
    const auto &P = partition_.params();
    return (P.s - 1) % P.b0;
}

std::size_t CircuitTreeInstance::degree_bound() const { return 2 * partition_.params().b0; }

template <typename Read, typename Mark>
void CircuitTreeInstance::eval_block(const BlockLabel &block, const BlockList &preds, MeteredBits &values, Read &&read,
                                     Mark &&mark, Meter &meter) const {
    const Charge counters(meter, kEvalCounterWords);
    const auto &P = partition_.params();
    auto fetch = [&](const BlockLabel &src, std::size_t pos) {
        const unsigned c = child_slot(preds, src);
        mark(c, pos);
        return read(c, pos);
    };

    if (block.is_initial()) {
        const std::size_t j = block.j;
        const std::size_t base = j * P.b0;
        std::size_t cable_seen = 0; // subdivided in-edges met so far, in r order
        std::size_t q = 0;
        partition_.for_each_member(block, [&](const SubVertex &m) {
            const Gate &g = circuit_->gate(m.vertex);
            std::size_t p = 0;
            auto input = [&](const InputRef &ref) -> bool {
                if (ref.is_const())
                    return ref.bit();
                const std::size_t w = ref.index();
                ++p;
                const std::size_t i = w / P.b0;
                if (i == j)
                    return values.get(w - base);
                if (i + 1 == j)
                    return fetch(BlockLabel::initial(static_cast<std::uint32_t>(j - 1)), w - (j - 1) * P.b0);
                const auto l = static_cast<std::uint32_t>((P.d * (m.vertex % P.b0) + p - 1) / P.b);
                return fetch(BlockLabel::cable(static_cast<std::uint32_t>(j), 1, l), cable_seen++);
            };
            const bool a = input(g.left);
            const bool bb = input(g.right);
            values.set(q++, g.fn.apply(a, bb));
        });
        return;
    }
    if (block.is_cable()) {
        const std::size_t j = block.j, k = block.k;
        std::size_t next_seen = 0; // members of the next cable block met so far
        std::size_t q = 0;
        partition_.for_each_member(block, [&](const SubVertex &m) {
            const std::size_t K = partition_.subdivision_count(m.edge);
            bool v;
            if (K > k) {
                v = fetch(BlockLabel::cable(block.j, block.k + 1, block.l), next_seen++);
            } else {
                const std::size_t w = graph_.source(m.edge.target, m.edge.position);
                const std::size_t i = j - k - 1;
                v = fetch(BlockLabel::initial(static_cast<std::uint32_t>(i)), w - i * P.b0);
            }
            values.set(q++, v);
        });
    }
}

void CircuitTreeInstance::leaf(const NodePath &u, NodeValue &out, Meter &meter) const {
    if (out.size() != b_)
        throw ParamError("node value must have b bits");
    const BlockLabel block = node_to_block(u, meter);
    out.clear();
    if (block.is_dummy())
        return;
    const Charge preds_charge(meter, kPredListWords);
    const BlockList preds = partition_.quotient_predecessors(block);
    if (!preds.empty())
        throw Error("leaf block " + block.to_string() + " has inputs");
    MeteredBits values(meter, b_);
    eval_block(
        block, preds, values, [](unsigned, std::size_t) { return false; }, [](unsigned, std::size_t) {}, meter);
    for (std::size_t i = 0; i < b_; ++i)
        out.set(i, values.get(i));
}

void CircuitTreeInstance::evaluate(const NodePath &u, std::span<const NodeValue> children, NodeValue &out,
                                   Meter &meter) const {
    if (out.size() != b_ || children.size() != 2 || children[0].size() != b_ || children[1].size() != b_)
        throw ParamError("node values must have b bits");
    const BlockLabel block = node_to_block(u, meter);
    out.clear();
    if (block.is_dummy())
        return;
    const Charge preds_charge(meter, kPredListWords);
    const BlockList preds = partition_.quotient_predecessors(block);
    MeteredBits values(meter, b_);
    eval_block(
        block, preds, values, [&](unsigned c, std::size_t pos) { return children[c].get(pos); },
        [](unsigned, std::size_t) {}, meter);
    for (std::size_t i = 0; i < b_; ++i)
        out.set(i, values.get(i));
}

void CircuitTreeInstance::support(const NodePath &u, BitVector &mask, Meter &meter) const {
    mask.clear();
    const BlockLabel block = node_to_block(u, meter);
    if (block.is_dummy())
        return;
    const Charge preds_charge(meter, kPredListWords);
    const BlockList preds = partition_.quotient_predecessors(block);
    MeteredBits values(meter, b_);
    eval_block(
        block, preds, values, [](unsigned, std::size_t) { return false; },
        [&](unsigned c, std::size_t pos) { mask.set(c * b_ + pos, true); }, meter);
}

bool CircuitTreeInstance::accumulate_extension(const NodePath &u, const GF2k &field,
                                               std::span<const RegisterRef> children, RegisterRef out,
                                               std::uint32_t coeff, Meter &meter) const {
    // Cable members copy one child bit, so the extension is linear. Initial
    // blocks fall back to the generic multilinear extension.
    const BlockLabel block = node_to_block(u, meter);
    if (block.is_dummy())
        return true;
    if (!block.is_cable())
        return false;
    const Charge preds_charge(meter, kPredListWords);
    const BlockList preds = partition_.quotient_predecessors(block);
    std::size_t q = 0;
    const Charge counters(meter, kEvalCounterWords);
    const auto &P = partition_.params();
    std::size_t next_seen = 0;
    partition_.for_each_member(block, [&](const SubVertex &m) {
        const std::size_t K = partition_.subdivision_count(m.edge);
        unsigned c;
        std::size_t pos;
        if (K > block.k) {
            c = child_slot(preds, BlockLabel::cable(block.j, block.k + 1, block.l));
            pos = next_seen++;
        } else {
            const std::size_t i = block.j - block.k - 1;
            c = child_slot(preds, BlockLabel::initial(static_cast<std::uint32_t>(i)));
            pos = graph_.source(m.edge.target, m.edge.position) - i * P.b0;
        }
        out.set(q, GF2k::add(out.get(q), field.mul(coeff, children[c].get(pos))));
        ++q;
    });
    return true;
}

} // namespace lowspace
