#pragma once

// Synthetic tree-evaluation instances, seeded and pure.

#include <cstdint>
#include <optional>

#include "lowspace/circuit.hpp"
#include "lowspace/tree_eval.hpp"

namespace lowspace {

/// Every leaf value and every node function is a pseudo-random table drawn
/// from (seed, u). The catalytic solver falls back to the multilinear
/// extension over all d*b child bits, so keep d*b small.
class RandomTableInstance final : public TreeEvalInstance {
  public:
    RandomTableInstance(TreeEvalParams params, std::uint64_t seed) : params_(params), seed_(seed) {}

    TreeEvalParams params() const override { return params_; }
    void leaf(const NodePath &u, NodeValue &out, Meter &meter) const override;
    void evaluate(const NodePath &u, std::span<const NodeValue> children, NodeValue &out, Meter &meter) const override;

  private:
    TreeEvalParams params_;
    std::uint64_t seed_;
};

/// Binary tree where bit i of f_u(x, y) is phi_{u,i}(x_i, y_i) for a
/// two-input function drawn from (seed, u, i), or a fixed one. Each output
/// bit has a degree-2 extension, so any b is cheap for the catalytic solver.
class BitwiseInstance final : public TreeEvalInstance {
  public:
    BitwiseInstance(std::size_t h, std::size_t b, std::uint64_t seed, std::optional<GateFunction> fixed = {})
        : params_{h, 2, b}, seed_(seed), fixed_(fixed) {}

    TreeEvalParams params() const override { return params_; }
    void leaf(const NodePath &u, NodeValue &out, Meter &meter) const override;
    void evaluate(const NodePath &u, std::span<const NodeValue> children, NodeValue &out, Meter &meter) const override;
    void support(const NodePath &u, BitVector &mask, Meter &meter) const override;
    std::size_t degree_bound() const override { return 2; }
    bool accumulate_extension(const NodePath &u, const GF2k &field, std::span<const RegisterRef> children,
                              RegisterRef out, std::uint32_t coeff, Meter &meter) const override;

    GateFunction function_at(const NodePath &u, std::size_t i) const;

  private:
    TreeEvalParams params_;
    std::uint64_t seed_;
    std::optional<GateFunction> fixed_;
};

} // namespace lowspace
