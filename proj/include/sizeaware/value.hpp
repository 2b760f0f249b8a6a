#pragma once

#include <memory>
#include <span>
#include <vector>

#include "sizeaware/engine.hpp"
#include "sizeaware/tables.hpp"
#include "sizeaware/workload.hpp"

namespace sizeaware {

/// One M/G/1 queue seen in its own time units: X = Y / rate.
class ValueContext {
public:
    /// work_dist is the law of Y in work units.
    ValueContext(double lambda, const JobSizeDistribution& work_dist, double rate, HoldingCostModel model,
                 std::size_t knots = 1024);

    double lambda() const { return lambda_; }
    double rate() const { return rate_; }
    const JobSizeDistribution& dist() const { return dist_; }
    const HoldingCostModel& model() const { return model_; }
    const IntegralTables& tables() const { return *tables_; }

    double rho() const { return rho_; }
    /// E[B] = E[b(X)].
    double mean_holding() const { return mean_holding_; }
    /// b(x) for a job of x time units.
    double holding(double x) const { return model_.rate(x); }
    double rho_below(double x) const { return tables_->rho_below(x); }

    /// lambda E[B] / (2 (1 - rho)), the backlog coefficient of the FIFO value.
    double fifo_coefficient() const;
    /// Mutation hook: scales the FIFO backlog coefficient.
    void perturb_fifo_coefficient(double factor) { fifo_factor_ = factor; }

private:
    double lambda_;
    double rate_;
    JobSizeDistribution dist_;
    HoldingCostModel model_;
    double rho_;
    double mean_holding_;
    double fifo_factor_ = 1.0;
    std::shared_ptr<const IntegralTables> tables_;
};

/// A job as the value functions see it, in server time units.
struct ValueJob {
    double remaining;
    double original;
    double holding;
};

/// Jobs of a queue in service order with holding rates b = model(original / rate).
std::vector<ValueJob> value_jobs(const QueueState& q, const HoldingCostModel& model);

// In every value_* call z lists the jobs in service order: FIFO oldest first,
// LIFO newest first, SPTP by remaining*original, SRPT by remaining, SPT with
// the job in service first and the waiting jobs by size.

double value_fifo(const ValueContext& ctx, std::span<const ValueJob> z);
double admit_fifo(const ValueContext& ctx, std::span<const ValueJob> z, double x);

double value_lifo(const ValueContext& ctx, std::span<const ValueJob> z);
double admit_lifo(const ValueContext& ctx, std::span<const ValueJob> z, double x);

double value_sptp(const ValueContext& ctx, std::span<const ValueJob> z);
double admit_sptp(const ValueContext& ctx, std::span<const ValueJob> z, double x);

double value_spt(const ValueContext& ctx, std::span<const ValueJob> z);
double admit_spt(const ValueContext& ctx, std::span<const ValueJob> z, double x);

double value_srpt(const ValueContext& ctx, std::span<const ValueJob> z);
double admit_srpt(const ValueContext& ctx, std::span<const ValueJob> z, double x);

/// Dispatches on discipline; PS has no value function and throws.
double value_of(const ValueContext& ctx, Discipline d, std::span<const ValueJob> z);
double admit_of(const ValueContext& ctx, Discipline d, std::span<const ValueJob> z, double x);

/// Mean remaining sojourn of job i (0-based) of z.
double remaining_sojourn(const ValueContext& ctx, Discipline d, std::span<const ValueJob> z, std::size_t i);

struct GittinsClass {
    double size;
    double weight;
    double attained;
};

/// argmax w / (x - a); ties go to the lowest index.
std::size_t gittins_select(std::span<const GittinsClass> classes);

}  // namespace sizeaware
