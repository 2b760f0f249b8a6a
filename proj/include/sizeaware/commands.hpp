#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sizeaware/config.hpp"

namespace sizeaware {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_acceptance_failure = 2;

struct CommandOptions {
    std::string config_path;
    std::string out_path;  // overrides the config's output; empty and unset means stdout
    std::optional<std::uint64_t> seed;
    bool quick = false;
};

/// Column contracts of the CSV outputs, in order.
extern const std::vector<std::string> simulate_columns;
extern const std::vector<std::string> analytic_columns;
extern const std::vector<std::string> value_check_columns;

/// The commands write CSV to `out` and diagnostics to `log`.
void write_simulate_csv(const ExperimentConfig& cfg, bool quick, std::ostream& out, std::ostream& log);
void write_analytic_csv(const ExperimentConfig& cfg, std::ostream& out);
void write_value_check_csv(const ExperimentConfig& cfg, bool quick, std::ostream& out, std::ostream& log);

/// CLI entry points returning the process exit code.
int cmd_simulate(const CommandOptions& o, std::ostream& log);
int cmd_analytic(const CommandOptions& o, std::ostream& log);
int cmd_value_check(const CommandOptions& o, std::ostream& log);

struct ValidateOptions {
    std::optional<std::uint64_t> seed;
    bool quick = false;
    std::string out_path;
    std::vector<int> only;
    double fifo_perturbation = 1.0;
};
int cmd_validate(const ValidateOptions& o, std::ostream& report);

/// Formats a double for CSV: shortest round-trip digits, "inf" and "nan" spelled out.
std::string csv_number(double v);

}  // namespace sizeaware
