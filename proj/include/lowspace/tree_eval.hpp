#pragma once

// Tree evaluation instances given by node-function oracles.
//
// A full d-ary tree of height h. Leaves carry b-bit values; an internal node
// u computes v_u = f_u(v_{u0}, ..., v_{u(d-1)}). Instances never store the
// tree: values are produced on demand from the node path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lowspace/bit_vector.hpp"
#include "lowspace/space_meter.hpp"

namespace lowspace {

class GF2k;

struct TreeEvalParams {
    std::size_t h = 0; ///< height, edges from root to leaf
    std::size_t d = 2; ///< arity
    std::size_t b = 1; ///< value size in bits
};

/// Child-index string from the root; digits are in [0, d).
class NodePath {
  public:
    NodePath() = default;
    static NodePath from_string(std::string_view digits);

    std::size_t size() const { return digits_.size(); }
    bool empty() const { return digits_.empty(); }
    unsigned operator[](std::size_t i) const { return digits_[i]; }
    void push(unsigned c) { digits_.push_back(static_cast<std::uint8_t>(c)); }
    void pop() { digits_.pop_back(); }

    std::string to_string() const;

    friend bool operator==(const NodePath &, const NodePath &) = default;

  private:
    std::vector<std::uint8_t> digits_;
};

using NodeValue = BitVector;

/// A slice of b field elements inside a packed register file.
struct RegisterRef {
    PackedArray *file = nullptr;
    std::size_t offset = 0;

    std::uint32_t get(std::size_t i) const { return file->get(offset + i); }
    void set(std::size_t i, std::uint32_t v) const { file->set(offset + i, v); }
};

class TreeEvalInstance {
  public:
    virtual ~TreeEvalInstance() = default;

    virtual TreeEvalParams params() const = 0;

    /// v_u for a leaf (|u| = h). `out` has b bits.
    virtual void leaf(const NodePath &u, NodeValue &out, Meter &meter) const = 0;

    /// f_u(children) for an internal node (|u| < h). children[c] is v_{uc}.
    virtual void evaluate(const NodePath &u, std::span<const NodeValue> children, NodeValue &out,
                          Meter &meter) const = 0;

    /// Marks in `mask` (d*b bits, bit c*b+j = bit j of child c) every child
    /// bit f_u may read. The default marks all of them.
    virtual void support(const NodePath &u, BitVector &mask, Meter &meter) const;

    /// Upper bound, over all internal nodes and output bits, on the degree of
    /// the low-degree extension used by the catalytic solver. The default is
    /// d*b, the multilinear bound.
    virtual std::size_t degree_bound() const;

    /// Optional closed-form extension: out[i] += coeff * F_i(children), where
    /// F_i extends bit i of f_u to field arguments. Returns false when the
    /// instance has none; the solver then uses the multilinear extension
    /// over support().
    virtual bool accumulate_extension(const NodePath &u, const GF2k &field, std::span<const RegisterRef> children,
                                      RegisterRef out, std::uint32_t coeff, Meter &meter) const;
};

/// The defining recursion, unmetered. Exponential in h; reference only.
NodeValue tree_value(const TreeEvalInstance &inst, NodePath u = {});

} // namespace lowspace
