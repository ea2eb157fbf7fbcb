#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lowspace {

inline constexpr std::size_t kWordBits = 64;

/// Number of 64-bit words needed to hold `bits` bits.
constexpr std::size_t words_for_bits(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

/// Fixed-length packed bit string. Bit 0 is the first character of the
/// textual form.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_(words_for_bits(size), 0) {}

    static BitVector from_string(std::string_view bits);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
    bool operator[](std::size_t i) const { return get(i); }

    void set(std::size_t i, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
        if (value)
            words_[i / kWordBits] |= mask;
        else
            words_[i / kWordBits] &= ~mask;
    }

    void clear() {
        for (auto &w : words_)
            w = 0;
    }

    std::size_t count() const;
    std::string to_string() const;

    const std::vector<std::uint64_t> &words() const { return words_; }

    friend bool operator==(const BitVector &a, const BitVector &b) = default;

  private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace lowspace
