#pragma once

// Word-granularity workspace accounting.
//
// Solvers and the local node evaluator draw every piece of working memory
// through a Meter, so "space" becomes a measurable peak-word count. The
// read-only input and the final output are not charged.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "lowspace/bit_vector.hpp"
#include "lowspace/error.hpp"

namespace lowspace {

class Meter {
  public:
    /// Opaque allocation id: slot in the low 32 bits, generation above.
    using Handle = std::uint64_t;

    Meter() = default;
    Meter(const Meter &) = delete;
    Meter &operator=(const Meter &) = delete;

    Handle alloc(std::size_t words);
    /// Throws MeterError on a handle that is not live (double free).
    void free(Handle h);

    std::size_t live_words() const { return live_; }
    std::size_t peak_words() const { return peak_; }

    /// Runs body; every allocation made inside must be released by the time
    /// it returns, otherwise MeterError is thrown.
    template <typename Body> decltype(auto) scope(Body &&body) {
        const std::size_t before = live_;
        if constexpr (std::is_void_v<std::invoke_result_t<Body>>) {
            std::forward<Body>(body)();
            check_balanced(before);
        } else {
            decltype(auto) result = std::forward<Body>(body)();
            check_balanced(before);
            return result;
        }
    }

  private:
    void check_balanced(std::size_t before) const;
    void check_thread();

    std::vector<std::size_t> slot_words_;
    std::vector<std::uint32_t> slot_generation_;
    std::vector<bool> slot_live_;
    std::vector<std::uint32_t> free_slots_;
    std::size_t live_ = 0;
    std::size_t peak_ = 0;
#ifndef NDEBUG
    std::thread::id owner_{};
#endif
};

/// RAII charge of a fixed number of words.
class Charge {
  public:
    Charge() = default;
    Charge(Meter &meter, std::size_t words) : meter_(&meter), handle_(meter.alloc(words)) {}
    Charge(const Charge &) = delete;
    Charge &operator=(const Charge &) = delete;
    Charge(Charge &&o) noexcept : meter_(std::exchange(o.meter_, nullptr)), handle_(o.handle_) {}
    Charge &operator=(Charge &&o) noexcept {
        if (this != &o) {
            release();
            meter_ = std::exchange(o.meter_, nullptr);
            handle_ = o.handle_;
        }
        return *this;
    }
    ~Charge() { release(); }

    void release() {
        if (meter_)
            std::exchange(meter_, nullptr)->free(handle_);
    }

  private:
    Meter *meter_ = nullptr;
    Meter::Handle handle_ = 0;
};

/// Metered bit buffer; charges ceil(bits / 64) words.
class MeteredBits {
  public:
    MeteredBits(Meter &meter, std::size_t bits) : bits_(bits), charge_(meter, words_for_bits(bits)) {}

    BitVector &bits() { return bits_; }
    const BitVector &bits() const { return bits_; }
    bool get(std::size_t i) const { return bits_.get(i); }
    void set(std::size_t i, bool v) { bits_.set(i, v); }
    std::size_t size() const { return bits_.size(); }

  private:
    BitVector bits_;
    Charge charge_;
};

/// Metered array of small unsigned integers, each `width` bits wide, packed
/// into 64-bit words and charged accordingly.
class PackedArray {
  public:
    PackedArray(Meter &meter, std::size_t count, unsigned width)
        : count_(count), width_(width), mask_(width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1),
          words_(words_for_bits(count * width), 0), charge_(meter, words_.size()) {
        assert(width >= 1 && width <= 32);
    }

    std::size_t size() const { return count_; }

    std::uint32_t get(std::size_t i) const {
        const std::size_t bit = i * width_;
        const std::size_t w = bit / kWordBits, off = bit % kWordBits;
        std::uint64_t v = words_[w] >> off;
        if (off + width_ > kWordBits)
            v |= words_[w + 1] << (kWordBits - off);
        return static_cast<std::uint32_t>(v & mask_);
    }

    void set(std::size_t i, std::uint32_t value) {
        const std::size_t bit = i * width_;
        const std::size_t w = bit / kWordBits, off = bit % kWordBits;
        const std::uint64_t v = value & mask_;
        words_[w] = (words_[w] & ~(mask_ << off)) | (v << off);
        if (off + width_ > kWordBits) {
            const std::size_t spill = kWordBits - off;
            words_[w + 1] = (words_[w + 1] & ~(mask_ >> spill)) | (v >> spill);
        }
    }

  private:
    std::size_t count_;
    unsigned width_;
    std::uint64_t mask_;
    std::vector<std::uint64_t> words_;
    Charge charge_;
};

} // namespace lowspace
