#include "lowspace/synthetic_tree.hpp"

#include "lowspace/gf2k.hpp"

namespace lowspace {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_path(std::uint64_t seed, const NodePath &u) {
    std::uint64_t h = mix(seed ^ (0xA5A5ull + u.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        h = mix(h ^ (u[i] + 1));
    return h;
}

void fill_bits(std::uint64_t h, NodeValue &out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i % 64 == 0)
            h = mix(h + i);
        out.set(i, (h >> (i % 64)) & 1u);
    }
}

} // namespace

void RandomTableInstance::leaf(const NodePath &u, NodeValue &out, Meter &) const {
    fill_bits(hash_path(seed_, u) ^ 0x1EAFull, out);
}

void RandomTableInstance::evaluate(const NodePath &u, std::span<const NodeValue> children, NodeValue &out,
                                   Meter &) const {
    std::uint64_t h = hash_path(seed_, u);
    for (const auto &c : children)
        for (auto w : c.words())
            h = mix(h ^ w);
    fill_bits(h, out);
}

GateFunction BitwiseInstance::function_at(const NodePath &u, std::size_t i) const {
    if (fixed_)
        return *fixed_;
    return GateFunction::from_table(static_cast<std::uint8_t>(mix(hash_path(seed_, u) + i) & 0xF));
}

void BitwiseInstance::leaf(const NodePath &u, NodeValue &out, Meter &) const {
    fill_bits(hash_path(seed_, u) ^ 0x1EAFull, out);
}

void BitwiseInstance::evaluate(const NodePath &u, std::span<const NodeValue> children, NodeValue &out,
                               Meter &) const {
    for (std::size_t i = 0; i < params_.b; ++i)
        out.set(i, function_at(u, i).apply(children[0].get(i), children[1].get(i)));
}

void BitwiseInstance::support(const NodePath &, BitVector &mask, Meter &) const {
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask.set(i, true);
}

bool BitwiseInstance::accumulate_extension(const NodePath &u, const GF2k &field, std::span<const RegisterRef> children,
                                           RegisterRef out, std::uint32_t coeff, Meter &) const {
    // phi(X, Y) = sum over a, b of phi(a, b) eq(a, X) eq(b, Y)
    for (std::size_t i = 0; i < params_.b; ++i) {
        const GateFunction fn = function_at(u, i);
        const std::uint32_t x = children[0].get(i), y = children[1].get(i);
        const std::uint32_t ex[2] = {GF2k::add(1, x), x};
        const std::uint32_t ey[2] = {GF2k::add(1, y), y};
        std::uint32_t acc = 0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (fn.apply(a, b))
                    acc = GF2k::add(acc, field.mul(ex[a], ey[b]));
        out.set(i, GF2k::add(out.get(i), field.mul(coeff, acc)));
    }
    return true;
}

} // namespace lowspace
