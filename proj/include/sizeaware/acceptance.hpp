#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sizeaware {

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
    double seconds;
};

struct AcceptanceOptions {
    /// Reduced job and replication counts; results are indicative only.
    bool quick = false;
    std::uint64_t seed = 20240601;
    /// Mutation hook forwarded to the FIFO value contexts of the value oracle.
    double fifo_perturbation = 1.0;
    /// Criteria to run; empty runs all nine.
    std::vector<int> only;
};

inline constexpr int acceptance_criteria = 9;

/// Runs the criteria in order. When progress is given, one line per finished
/// criterion is written to it as soon as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream* progress = nullptr);

std::string format_result(const CriterionResult& r, bool quick);

}  // namespace sizeaware
