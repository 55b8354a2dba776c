#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace latept {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the twelve-point acceptance suite in order. `quick` shrinks the
// sample counts of the heavy criteria (noted in their detail strings) for a
// smoke pass; tolerances are identical in both modes. `threads` caps replica
// parallelism in the Monte Carlo criterion only.
std::vector<CriterionResult> run_acceptance(bool quick = false, int threads = 1,
                                            std::uint64_t master_seed = 20260825ULL);

}  // namespace latept
