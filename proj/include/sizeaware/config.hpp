#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sizeaware/dispatch.hpp"
#include "sizeaware/workload.hpp"

namespace sizeaware {

/// Parse or validation failure; message carries the line or field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int config_schema_version = 1;

struct NamedSystem {
    std::string name;
    std::vector<ServerSpec> servers;
};

struct ValueCheckConfig {
    std::vector<Discipline> disciplines{Discipline::fifo, Discipline::lifo, Discipline::spt, Discipline::srpt,
                                        Discipline::sptp};
    std::vector<double> loads{0.3, 0.6};
    std::size_t states = 3;
    std::size_t max_jobs = 4;
    std::size_t min_replications = 10000;
    std::size_t max_replications = 400000;
    double target_relative_half_width = 0.02;
};

struct ExperimentConfig {
    int schema_version = config_schema_version;
    std::vector<NamedSystem> systems;
    std::string reference_system;
    SizeLaw distribution = BoundedPareto{0.33959, 1000.0, 1.5};
    HoldingCostModel::Kind cost_model = HoldingCostModel::Kind::slowdown;
    std::vector<PolicySpec> policies;
    std::string reference_policy;
    std::vector<double> loads;
    std::size_t jobs = 200000;
    std::optional<std::size_t> warmup_jobs;  // default: 20% of jobs
    std::size_t batches = 30;
    std::uint64_t seed = 1;
    std::string output;
    std::optional<ValueCheckConfig> value_check;

    std::size_t effective_warmup() const { return warmup_jobs ? *warmup_jobs : jobs / 5; }
    JobSizeDistribution make_distribution() const { return JobSizeDistribution(distribution); }
    HoldingCostModel make_model() const;
    /// System for one named constellation at offered load rho = lambda E[Y] / sum(nu).
    SystemSpec make_system(const NamedSystem& s, double rho) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

nlohmann::json law_to_json(const SizeLaw& law);
SizeLaw law_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json policy_to_json(const PolicySpec& p);
PolicySpec policy_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace sizeaware
