#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sizeaware/engine.hpp"
#include "sizeaware/value.hpp"
#include "sizeaware/workload.hpp"

namespace sizeaware {

struct ServerSpec {
    double rate;
    Discipline discipline;
};

/// Servers, Poisson arrival rate and the job-size law Y in work units.
struct SystemSpec {
    std::vector<ServerSpec> servers;
    double lambda;
    JobSizeDistribution dist;
    HoldingCostModel model = HoldingCostModel::slowdown();

    double total_rate() const;
    /// rho = lambda E[Y] / sum of rates.
    double load() const;
    std::vector<double> rates() const;
    /// Holding rate of a job of y work units in system units: sum(nu)/y for
    /// slowdown (the gamma* convention), 1 for sojourn, c(y) for custom costs.
    double system_holding(double y) const;
};

enum class PolicyKind {
    rnd,
    rnd_rho,
    rnd_u,
    rnd_opt,
    sita_e,
    sita_es,
    round_robin,
    lwl_minus,
    lwl_plus,
    jsq,
    myopic,
    fpi,
};

struct PolicySpec {
    PolicyKind kind = PolicyKind::rnd_rho;
    std::vector<double> p;               // rnd only
    PolicyKind base = PolicyKind::rnd_rho;  // fpi only

    static PolicySpec simple(PolicyKind k) { return PolicySpec{k, {}, PolicyKind::rnd_rho}; }
    static PolicySpec fpi_on(PolicyKind base) { return PolicySpec{PolicyKind::fpi, {}, base}; }

    /// Short label, e.g. "sita_e" or "fpi-rnd_opt".
    std::string label() const;
    bool state_independent() const;
};

std::string to_string(PolicyKind k);
PolicyKind parse_policy_kind(const std::string& name);

/// Probability split minimising mean gamma* over LIFO/PS servers; slow servers
/// whose share would go negative are dropped one at a time.
std::vector<double> rnd_opt_probabilities(std::span<const double> rates, double lambda, double mean_size);

/// Thresholds xi_0 = 0 < ... < xi_m = inf. Interval k carries load proportional
/// to the k-th fastest rate; the smallest sizes go to the fastest server.
std::vector<double> sita_e_thresholds(const JobSizeDistribution& dist, std::span<const double> rates);

/// Per-queue Poisson input implied by a state-independent policy.
struct QueueInput {
    double lambda;
    JobSizeDistribution dist;
};
std::vector<QueueInput> base_inputs(const SystemSpec& sys, const PolicySpec& base);

/// Static split of a state-independent policy: probabilities (RND kinds) or
/// size intervals mapped to servers (SITA kinds).
struct StaticSplit {
    std::vector<double> p;
    std::vector<double> thresholds;
    std::vector<std::size_t> interval_server;  // server that takes interval k
};
StaticSplit static_split(const SystemSpec& sys, const PolicySpec& policy);

/// Admittance-cost displays for slowdown in gamma* units; backlog in time units.
double fifo_admit_display(double total_rate, double rate, double backlog_time, double y, double lambda_i,
                          double mean_y, double inv_mean_y);
double lifo_admit_display(double total_rate, double rate, std::span<const double> originals_time, double y,
                          double lambda_i, double mean_y);

class Dispatcher {
public:
    Dispatcher(const SystemSpec& sys, const PolicySpec& policy, std::uint64_t seed);

    /// Server for a job of y work units.
    std::size_t decide(const std::vector<QueueState>& queues, double y);
    /// Post-assignment rearrangement (SITA-Es); no-op for other policies.
    void after_assignment(std::vector<QueueState>& queues) const;

    /// FPI cost of sending y to queue i, in gamma* units for slowdown.
    double admit_cost_scaled(std::size_t i, const QueueState& q, double y) const;

    const PolicySpec& policy() const { return policy_; }
    const StaticSplit& split() const { return split_; }
    /// Per-queue value contexts (FPI only).
    const std::vector<std::optional<ValueContext>>& contexts() const { return contexts_; }

private:
    std::size_t argmin(std::span<const double> cost) const;
    std::size_t sample_split();
    std::size_t sita_lookup(double y) const;

    SystemSpec sys_;
    PolicySpec policy_;
    Rng rng_;
    std::size_t rr_next_ = 0;
    StaticSplit split_;
    std::vector<double> cumulative_p_;
    std::vector<QueueInput> inputs_;
    std::vector<std::optional<ValueContext>> contexts_;
    std::vector<double> cost_buf_;
};

/// Groups of interchangeable servers (equal rate and discipline), each with two or more members.
std::vector<std::vector<std::size_t>> identical_groups(const SystemSpec& sys);

/// Permutes the contents of identical servers to the arrangement with the
/// lowest total relative value; keeps the current one unless strictly better.
/// Returns true when the contents moved.
bool switch_roles(std::vector<QueueState>& queues, const SystemSpec& sys,
                  std::span<const std::optional<ValueContext>> contexts);

/// Sorts the contents of identical servers so that backlogs ascend with the index.
void sort_identical_by_backlog(std::vector<QueueState>& queues, const SystemSpec& sys);

}  // namespace sizeaware
