#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lowspace {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed circuit or machine text. Carries the 1-based line number (0 when
/// the error is not tied to a line).
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string &what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// A numeric parameter outside the range an operation accepts.
class ParamError : public Error {
  public:
    using Error::Error;
};

/// The gate dependency graph of a full circuit has a cycle.
class CycleError : public Error {
  public:
    using Error::Error;
};

/// A solver hit its node-function call cap. The peak workspace observed up to
/// that point is kept so truncated runs can still be inspected.
class BudgetExceeded : public Error {
  public:
    BudgetExceeded(std::uint64_t calls, std::size_t peak_words)
        : Error("node function call budget exceeded after " + std::to_string(calls) + " calls"),
          calls_(calls), peak_words_(peak_words) {}

    std::uint64_t calls() const { return calls_; }
    std::size_t peak_words() const { return peak_words_; }

  private:
    std::uint64_t calls_;
    std::size_t peak_words_;
};

/// Misuse of the workspace meter: double free, leaked scope.
class MeterError : public Error {
  public:
    using Error::Error;
};

/// A Turing machine head left its tape window during direct simulation.
class TapeBoundsError : public Error {
  public:
    using Error::Error;
};

} // namespace lowspace
