#include "lowspace/space_meter.hpp"

#include <string>

namespace lowspace {

Meter::Handle Meter::alloc(std::size_t words) {
    check_thread();
    std::uint32_t slot;
    if (!free_slots_.empty()) {
        slot = free_slots_.back();
        free_slots_.pop_back();
    } else {
        slot = static_cast<std::uint32_t>(slot_words_.size());
        slot_words_.push_back(0);
        slot_generation_.push_back(0);
        slot_live_.push_back(false);
    }
    slot_words_[slot] = words;
    slot_live_[slot] = true;
    live_ += words;
    if (live_ > peak_)
        peak_ = live_;
    return (static_cast<Handle>(slot_generation_[slot]) << 32) | slot;
}

void Meter::free(Handle h) {
    check_thread();
    const auto slot = static_cast<std::uint32_t>(h & 0xFFFFFFFFu);
    const auto generation = static_cast<std::uint32_t>(h >> 32);
    if (slot >= slot_words_.size() || !slot_live_[slot] || slot_generation_[slot] != generation)
        throw MeterError("free of a handle that is not live (double free?)");
    live_ -= slot_words_[slot];
    slot_live_[slot] = false;
    ++slot_generation_[slot];
    free_slots_.push_back(slot);
}

void Meter::check_balanced(std::size_t before) const {
    if (live_ != before)
        throw MeterError("scope leaked " + std::to_string(static_cast<long long>(live_) - static_cast<long long>(before)) +
                         " words");
}

void Meter::check_thread() {
#ifndef NDEBUG
    if (owner_ == std::thread::id{})
        owner_ = std::this_thread::get_id();
    assert(owner_ == std::this_thread::get_id() && "Meter used from more than one thread");
#endif
}

} // namespace lowspace
