#pragma once

// Arithmetic in GF(2^k), k <= 16, as polynomials over GF(2) modulo a
// primitive polynomial. Elements are k-bit integers; addition is XOR.
// Multiplication is shift-and-add, so the field costs no tables.

#include <cstdint>

namespace lowspace {

class GF2k {
  public:
    /// Field with 2^k elements; the modulus is the smallest primitive
    /// polynomial of degree k.
    explicit GF2k(unsigned k);

    unsigned degree() const { return k_; }
    std::uint32_t modulus() const { return modulus_; }
    std::uint32_t order() const { return (std::uint32_t{1} << k_) - 1; } ///< multiplicative group size

    static std::uint32_t add(std::uint32_t a, std::uint32_t b) { return a ^ b; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;

    /// Generator of the multiplicative group (the class of x).
    std::uint32_t generator() const { return k_ == 1 ? 1 : 2; }
    /// A primitive m-th root of unity; m must divide 2^k - 1.
    std::uint32_t root_of_unity(std::uint32_t m) const;

  private:
    unsigned k_;
    std::uint32_t modulus_; // includes the x^k term
};

/// Multiplicative order of 2 modulo an odd m > 1.
unsigned order_of_two(std::uint32_t m);

/// Evaluation grid for a polynomial of degree <= deg: the smallest odd
/// m > deg with ord_m(2) <= 16, and k = ord_m(2), so GF(2^k) holds m-th
/// roots of unity.
struct RootGrid {
    std::uint32_t m;
    unsigned k;
};
RootGrid choose_root_grid(std::size_t deg);

} // namespace lowspace
