// Runs the full acceptance suite and prints one pass/fail line per
// criterion. Exit status 0 iff every suite passes.
#include "specbound/selftest.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
    bool quick = false;
    std::uint64_t seed = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
            seed = std::strtoull(argv[i + 1], nullptr, 10);
    }
    auto results = specbound::run_acceptance(quick, seed);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.index << " (" << r.name
                  << "): " << r.checked << " checks, " << r.failed << " failures, " << r.seconds
                  << " s";
        if (!r.detail.empty()) std::cout << "  [" << r.detail << "]";
        std::cout << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
