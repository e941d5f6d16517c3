#pragma once

#include "specbound/classify.hpp"

#include <string>
#include <vector>

namespace specbound {

struct SuiteResult {
    int index = 0;
    std::string name;
    bool pass = false;
    int checked = 0;   // items exercised
    int failed = 0;    // items that violated their property
    double seconds = 0.0;
    std::string detail;  // first failure, or a summary line
};

/// The acceptance suite. `quick` cuts sample counts to roughly a tenth.
/// Every suite derives its randomness from `seed` through labeled child
/// seeds; the ambient tolerance is threaded into every toleranced call so
/// that a deliberately corrupted tolerance surfaces as a suite failure.
std::vector<SuiteResult> run_acceptance(bool quick, std::uint64_t seed,
                                        const Tolerance& tol = {});

}  // namespace specbound
