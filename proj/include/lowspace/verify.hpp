#pragma once

// Seeded property suites behind `lowspace verify`.

#include <cstdint>
#include <string>
#include <vector>

namespace lowspace {

struct SuiteOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::string machine_dir; ///< sample .tm files for the tm and e2e suites
    std::uint64_t max_calls = std::uint64_t{1} << 18;
};

struct SuiteResult {
    std::string name;
    std::size_t passed = 0;
    std::size_t failed = 0;
    /// Catalytic runs cut off by the call budget; not failures.
    std::size_t inconclusive = 0;
    std::vector<std::string> failures; ///< first few failure descriptions

    bool ok() const { return failed == 0; }
};

const std::vector<std::string> &suite_names();

/// Throws ParamError on an unknown name.
SuiteResult run_suite(const std::string &name, const SuiteOptions &opts);

} // namespace lowspace
