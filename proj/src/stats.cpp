#include "sizeaware/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace sizeaware {

double student_t_quantile(double p, double dof) {
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, p);
}

ConfidenceInterval iid_mean(std::span<const double> xs) {
    ConfidenceInterval ci;
    const std::size_t n = xs.size();
    ci.batches = n;
    if (n == 0) return ci;
    // Welford for stability on long heavy-tailed series.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (xs[i] - mean);
    }
    ci.mean = mean;
    if (n > 1) {
        const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
        ci.half_width = student_t_quantile(0.975, static_cast<double>(n - 1)) * sd / std::sqrt(static_cast<double>(n));
    }
    return ci;
}

ConfidenceInterval batch_means(std::span<const double> xs, std::size_t batches) {
    if (batches < 2) throw std::invalid_argument("batch means needs at least two batches");
    const std::size_t per = xs.size() / batches;
    if (per == 0) {
        ConfidenceInterval ci = iid_mean(xs);
        ci.half_width = std::numeric_limits<double>::infinity();
        return ci;
    }
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += xs[i];
        means[b] = s / static_cast<double>(per);
    }
    ConfidenceInterval ci = iid_mean(means);
    ci.batches = batches;
    return ci;
}

}  // namespace sizeaware
