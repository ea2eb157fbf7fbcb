#include "lowspace/tree_eval.hpp"

#include "lowspace/error.hpp"

namespace lowspace {

NodePath NodePath::from_string(std::string_view digits) {
    NodePath p;
    for (char ch : digits) {
        if (ch < '0' || ch > '9')
            throw ParamError(std::string("bad node path digit '") + ch + "'");
        p.push(static_cast<unsigned>(ch - '0'));
    }
    return p;
}

std::string NodePath::to_string() const {
    std::string out;
    for (auto c : digits_)
        out.push_back(static_cast<char>('0' + c));
    return out;
}

void TreeEvalInstance::support(const NodePath &, BitVector &mask, Meter &) const {
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask.set(i, true);
}

std::size_t TreeEvalInstance::degree_bound() const {
    const auto p = params();
    return p.d * p.b;
}

bool TreeEvalInstance::accumulate_extension(const NodePath &, const GF2k &, std::span<const RegisterRef>, RegisterRef,
                                            std::uint32_t, Meter &) const {
    return false;
}

namespace {

NodeValue tree_value_at(const TreeEvalInstance &inst, const TreeEvalParams &P, NodePath &u, Meter &meter) {
    NodeValue out(P.b);
    if (u.size() == P.h) {
        inst.leaf(u, out, meter);
        return out;
    }
    std::vector<NodeValue> children;
    children.reserve(P.d);
    for (unsigned c = 0; c < P.d; ++c) {
        u.push(c);
        children.push_back(tree_value_at(inst, P, u, meter));
        u.pop();
    }
    inst.evaluate(u, children, out, meter);
    return out;
}

} // namespace

NodeValue tree_value(const TreeEvalInstance &inst, NodePath u) {
    const auto P = inst.params();
    if (u.size() > P.h)
        throw ParamError("node path longer than the tree height");
    Meter scratch;
    return tree_value_at(inst, P, u, scratch);
}

} // namespace lowspace
