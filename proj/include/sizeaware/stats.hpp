#pragma once

#include <cstddef>
#include <span>

namespace sizeaware {

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
    std::size_t batches = 0;

    double lower() const { return mean - half_width; }
    double upper() const { return mean + half_width; }
    bool contains(double v) const { return v >= lower() && v <= upper(); }
};

/// Two-sided Student t quantile, e.g. p = 0.975.
double student_t_quantile(double p, double dof);

/// Batch means over contiguous equal batches (the remainder at the end is
/// dropped); 95% interval.
ConfidenceInterval batch_means(std::span<const double> xs, std::size_t batches);

/// Mean with a 95% interval treating the samples as independent.
ConfidenceInterval iid_mean(std::span<const double> xs);

}  // namespace sizeaware
