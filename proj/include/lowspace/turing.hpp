#pragma once

// Multitape Turing machines and their direct simulation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lowspace/bit_vector.hpp"

namespace lowspace {

enum class Move : std::int8_t { L = -1, S = 0, R = 1 };

struct Transition {
    std::uint32_t next = 0;
    std::vector<std::uint8_t> write; ///< one symbol per tape
    std::vector<Move> moves;         ///< one move per tape
};

/// k-tape machine. Symbol 0 is the blank. Accept and reject states halt;
/// every other state has a transition for every combination of symbols.
class TuringMachine {
  public:
    TuringMachine(std::size_t tapes, std::size_t states, std::uint32_t start, std::uint32_t accept,
                  std::uint32_t reject, std::string alphabet);

    std::size_t tapes() const { return k_; }
    std::size_t num_states() const { return states_; }
    std::uint32_t start() const { return start_; }
    std::uint32_t accept() const { return accept_; }
    std::uint32_t reject() const { return reject_; }
    const std::string &alphabet() const { return alphabet_; }
    std::size_t num_symbols() const { return alphabet_.size(); }

    bool is_halting(std::uint32_t q) const { return q == accept_ || q == reject_; }

    void set(std::uint32_t q, const std::vector<std::uint8_t> &read, Transition tr);
    /// Transition for (q, read), or nullptr.
    const Transition *delta(std::uint32_t q, const std::vector<std::uint8_t> &read) const;

    /// Throws ParseError naming the first non-halting (state, symbols) pair
    /// with no transition.
    void check_total() const;

    /// Symbol written to the input tape for input bit `bit`: alphabet
    /// position 1 for 0 and position 2 for 1.
    std::uint8_t input_symbol(bool bit) const { return bit ? 2 : 1; }

  private:
    std::size_t key(std::uint32_t q, const std::vector<std::uint8_t> &read) const;

    std::size_t k_;
    std::size_t states_;
    std::uint32_t start_, accept_, reject_;
    std::string alphabet_;
    std::vector<std::optional<Transition>> table_;
};

TuringMachine parse_tm(std::string_view text);
TuringMachine read_tm_file(const std::string &path);
std::string serialize_tm(const TuringMachine &m);

struct Configuration {
    std::uint32_t state = 0;
    std::vector<std::vector<std::uint8_t>> tapes; ///< k tapes of t cells
    std::vector<std::size_t> heads;

    friend bool operator==(const Configuration &, const Configuration &) = default;
};

/// t-cell configuration in the start state, all heads on cell `offset`,
/// input bits written on tape 0 from `offset` on.
Configuration initial_configuration(const TuringMachine &m, const BitVector &input, std::size_t t, std::size_t offset);

/// Runs `steps` steps; halting states absorb. Throws TapeBoundsError when a
/// head leaves the window.
Configuration simulate_direct(const TuringMachine &m, Configuration cfg, std::size_t steps);

std::string to_string(const TuringMachine &m, const Configuration &cfg);

} // namespace lowspace
