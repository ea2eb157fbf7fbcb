#pragma once

// Circuit evaluation as tree evaluation.
//
// The gate graph of a simple circuit is partitioned with d' = 2, so every
// block has at most two predecessor blocks and the quotient is strictly
// layered. Unrolling the quotient from the block of the last gate gives a
// binary tree of height t; a node's value is the packed values of its
// block's members. Subdivision vertices act as identity gates.
//
// Node functions are computed from (circuit, b, u, x, y) alone: the block of
// u is found by walking down from the root, and every input bit is located
// by counting inside the child block.

#include <cstddef>
#include <memory>

#include "lowspace/circuit.hpp"
#include "lowspace/dag_partition.hpp"
#include "lowspace/tree_eval.hpp"

namespace lowspace {

class CircuitTreeInstance final : public TreeEvalInstance {
  public:
    /// c must be simple; b in [2, s]. Keeps a reference to c.
    CircuitTreeInstance(const Circuit &c, std::size_t b);
    CircuitTreeInstance(const CircuitTreeInstance &) = delete;
    CircuitTreeInstance &operator=(const CircuitTreeInstance &) = delete;

    TreeEvalParams params() const override;
    const PartitionParams &partition_params() const { return partition_.params(); }
    const Partition &partition() const { return partition_; }
    const Circuit &circuit() const { return *circuit_; }

    /// Block addressed by u: bit 0 takes the first predecessor in label
    /// order, bit 1 the second; missing predecessors give Dummy.
    BlockLabel node_to_block(const NodePath &u, Meter &meter) const;
    BlockLabel node_to_block(const NodePath &u) const;
    BlockLabel root_block() const;

    void leaf(const NodePath &u, NodeValue &out, Meter &meter) const override;
    void evaluate(const NodePath &u, std::span<const NodeValue> children, NodeValue &out, Meter &meter) const override;
    void support(const NodePath &u, BitVector &mask, Meter &meter) const override;
    std::size_t degree_bound() const override;
    bool accumulate_extension(const NodePath &u, const GF2k &field, std::span<const RegisterRef> children,
                              RegisterRef out, std::uint32_t coeff, Meter &meter) const override;

    /// Bit of the root value holding the last gate: (s - 1) mod b0.
    std::size_t output_position() const;
    bool extract_output(const NodeValue &root) const { return root.get(output_position()); }

  private:
    struct Source {
        unsigned child; // index into the predecessor list
        std::size_t pos;
    };
    // Values of the members of `block` into `values`, reading child bits
    // through `read`. `mark` is called for every child bit read.
    template <typename Read, typename Mark>
    void eval_block(const BlockLabel &block, const BlockList &preds, MeteredBits &values, Read &&read,
                    Mark &&mark, Meter &meter) const;

    const Circuit *circuit_;
    CircuitGraph graph_;
    Partition partition_;
    std::size_t b_;
};

std::unique_ptr<CircuitTreeInstance> build_instance(const Circuit &c, std::size_t b);

/// Workspace contract of one leaf or evaluate call, in words:
/// bits_c * b + log_c * log2 s.
struct LocalEvalConstants {
    double bits_c;
    double log_c;
};
inline constexpr LocalEvalConstants kLocalEvalConstants{1.0 / 32, 12.0};

double local_eval_bound(std::size_t s, std::size_t b, const LocalEvalConstants &k = kLocalEvalConstants);

/// ceil(sqrt(s log2 s)), clamped to [2, s].
std::size_t default_block_size(std::size_t s);

} // namespace lowspace
