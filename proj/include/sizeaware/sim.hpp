#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sizeaware/dispatch.hpp"
#include "sizeaware/engine.hpp"
#include "sizeaware/stats.hpp"
#include "sizeaware/value.hpp"

namespace sizeaware {

struct SimulationConfig {
    SystemSpec system;
    PolicySpec policy;
    std::size_t n_jobs = 200000;
    std::size_t warmup_jobs = 40000;
    std::uint64_t seed = 1;
    std::size_t batches = 30;
    /// Keep per-job samples for paired comparisons.
    bool keep_samples = false;
};

struct QueueReport {
    double observed_load = 0.0;
    double mean_slowdown = 0.0;  // gamma in this server's own time units
    double mean_waiting = 0.0;
    std::size_t jobs = 0;
};

struct DecileReport {
    double lower = 0.0;
    double upper = 0.0;
    ConfidenceInterval slowdown;
    std::size_t jobs = 0;
};

struct SimulationReport {
    std::string policy;
    /// "ok"; "unstable" when the static split overloads a server or the
    /// backlog grows without bound (no statistics); "overloaded" when some
    /// queue received more work than it could serve during the window
    /// (statistics kept, but they describe a transient).
    std::string status = "ok";
    ConfidenceInterval slowdown_star;
    ConfidenceInterval sojourn;
    std::vector<QueueReport> per_queue;
    std::vector<DecileReport> deciles;
    /// Time-average number in system over lambda_effective * E[T].
    double little_ratio = 0.0;
    std::size_t jobs = 0;
    /// Per-job gamma* and sojourn in arrival order (post warm-up) when kept.
    std::vector<double> gamma_star_samples;
    std::vector<double> sojourn_samples;
};

SimulationReport run(const SimulationConfig& config);

/// Paired batch-means interval for mean(a) - mean(b) over the same jobs.
ConfidenceInterval compare_paired(const SimulationReport& a, const SimulationReport& b, std::size_t batches = 30);

struct ValueEstimate {
    double estimate = 0.0;
    double half_width = 0.0;
    std::size_t replications = 0;
};

struct PairedEstimatorOptions {
    std::size_t min_replications = 10000;
    std::size_t max_replications = 400000;
    /// Stop once the 95% half-width is this fraction of |estimate|.
    double target_relative_half_width = 0.02;
};

/// Coupled estimate of v_z - v_0: System 1 starts in z, System 2 empty, both
/// see the same arrivals; the holding-cost difference is accrued until System
/// 1 first empties. z is in service order and time units, as for value_of.
ValueEstimate estimate_value_paired(Discipline d, const ValueContext& ctx, std::span<const ValueJob> z,
                                    std::uint64_t seed, const PairedEstimatorOptions& options = {});

/// Random state of 1..max_jobs jobs drawn from ctx.dist(), reachable under d:
/// only the head is partially served for FIFO and SPT, any job for the
/// preemptive disciplines. Returned in service order.
std::vector<ValueJob> random_value_state(Discipline d, const ValueContext& ctx, std::size_t max_jobs, Rng& rng);

/// Fixed replication count variant.
ValueEstimate estimate_value_paired(Discipline d, const ValueContext& ctx, std::span<const ValueJob> z,
                                    std::size_t replications, std::uint64_t seed);

}  // namespace sizeaware
