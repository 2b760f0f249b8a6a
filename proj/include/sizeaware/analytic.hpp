#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "sizeaware/workload.hpp"

namespace sizeaware {

class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads at or above this are treated as unstable.
inline constexpr double stability_margin = 1e-9;

/// Throws InstabilityError when rho >= 1 - stability_margin.
void require_stable(double rho, const std::string& where);

/// One M/G/1 queue: Poisson arrivals at rate lambda, sizes in work units,
/// served at the given rate so that X = Y / rate.
struct QueueLoadSpec {
    double lambda;
    JobSizeDistribution dist;
    double rate = 1.0;

    double load() const { return lambda * dist.moment(1) / rate; }
};

ExtendedValue fifo_mean_slowdown(const QueueLoadSpec& spec);
double fifo_mean_sojourn(const QueueLoadSpec& spec);
double lifo_conditional_slowdown(const QueueLoadSpec& spec);
double lifo_conditional_slowdown(double rho);
/// 2E[X] > E[X^2] E[1/X]; false when E[1/X] diverges.
bool fifo_better_than_lifo(const JobSizeDistribution& dist);

/// Mean gamma* of random splitting over preemptive LIFO (or PS) servers.
double rnd_lifo_system_slowdown(std::span<const double> p, std::span<const double> rates, double lambda,
                                double mean_size);

}  // namespace sizeaware
