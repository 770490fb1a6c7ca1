#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace growthlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string details;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t master_seed = 20250809;
    int threads = 0; // 0: auto
};

/// Runs the full verification suite (batch localization checks, oracle
/// agreement, progression properties, certificate soundness, determinism)
/// with pinned instances and tolerances.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// Prints one pass/fail line per criterion; returns the number of failures.
int run_acceptance_and_print(std::ostream& out, const AcceptanceOptions& options = {});

} // namespace growthlab
