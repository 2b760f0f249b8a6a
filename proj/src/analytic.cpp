#include "sizeaware/analytic.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace sizeaware {

void require_stable(double rho, const std::string& where) {
    if (!(rho < 1.0 - stability_margin)) {
        std::ostringstream os;
        os << where << ": unstable load rho = " << rho;
        throw InstabilityError(os.str());
    }
}

ExtendedValue fifo_mean_slowdown(const QueueLoadSpec& spec) {
    if (spec.lambda == 0.0) return ExtendedValue::finite(1.0);
    const double rho = spec.load();
    require_stable(rho, "fifo_mean_slowdown");
    const double inv = spec.dist.moment(-1);
    if (std::isinf(inv)) return ExtendedValue::infinite();
    const double second_x = spec.dist.moment(2) / (spec.rate * spec.rate);
    const double inv_x = inv * spec.rate;
    return ExtendedValue::finite(1.0 + spec.lambda * second_x / (2.0 * (1.0 - rho)) * inv_x);
}

double fifo_mean_sojourn(const QueueLoadSpec& spec) {
    const double rho = spec.load();
    require_stable(rho, "fifo_mean_sojourn");
    const double second_x = spec.dist.moment(2) / (spec.rate * spec.rate);
    return spec.dist.moment(1) / spec.rate + spec.lambda * second_x / (2.0 * (1.0 - rho));
}

double lifo_conditional_slowdown(double rho) {
    require_stable(rho, "lifo_conditional_slowdown");
    return 1.0 / (1.0 - rho);
}

double lifo_conditional_slowdown(const QueueLoadSpec& spec) {
    return lifo_conditional_slowdown(spec.load());
}

bool fifo_better_than_lifo(const JobSizeDistribution& dist) {
    const double inv = dist.moment(-1);
    if (std::isinf(inv)) return false;
    return 2.0 * dist.moment(1) > dist.moment(2) * inv;
}

double rnd_lifo_system_slowdown(std::span<const double> p, std::span<const double> rates, double lambda,
                                double mean_size) {
    if (p.size() != rates.size() || p.empty())
        throw std::invalid_argument("split and rate vectors must be nonempty and of equal length");
    const double psum = std::accumulate(p.begin(), p.end(), 0.0);
    if (std::abs(psum - 1.0) > 1e-9) throw std::invalid_argument("split probabilities must sum to 1");
    const double nu_sum = std::accumulate(rates.begin(), rates.end(), 0.0);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0) throw std::invalid_argument("split probabilities must be nonnegative");
        if (p[i] == 0.0) continue;
        require_stable(p[i] * lambda * mean_size / rates[i], "rnd_lifo_system_slowdown");
        s += p[i] / (rates[i] - p[i] * lambda * mean_size);
    }
    return nu_sum * s;
}

}  // namespace sizeaware
