#include "sizeaware/tables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sizeaware/analytic.hpp"
#include "sizeaware/numerics.hpp"

namespace sizeaware {

namespace {

// Exponential tails are cut where the remaining mass is below 1e-21.
constexpr double tail_cut_means = 50.0;

}  // namespace

int IntegralTables::f_slot(int k) {
    switch (k) {
    case 0: return 0;
    case 2: return 1;
    case 4: return 2;
    default: throw std::invalid_argument("F_k is tabulated for k in {0, 2, 4}");
    }
}

IntegralTables::IntegralTables(double lambda, const JobSizeDistribution& dist, const HoldingCostModel& model,
                               std::size_t knots)
    : lambda_(lambda), dist_(dist), model_(model) {
    if (!(lambda >= 0)) throw std::invalid_argument("arrival rate must be nonnegative");
    rho_ = lambda * dist.moment(1);
    require_stable(rho_, "integral tables");
    if (!model.mean_rate(dist).is_finite())
        throw std::invalid_argument("holding cost rate times density is not integrable near zero");

    if (dist.has_atoms()) {
        double g[2] = {0.0, 0.0};
        double prev = 0.0, rho_prev = 0.0;
        for (const auto& a : dist.atoms()) {
            AtomRow row{};
            row.x = a.size;
            for (int d = 0; d < 2; ++d) {
                g[d] += (std::pow(a.size, d + 1) - std::pow(prev, d + 1)) / ((d + 1) * (1.0 - rho_prev));
                row.g_at[d] = g[d];
            }
            row.rho_after = rho_prev + lambda * a.size * a.prob;
            const double b = model.rate(a.size) * a.prob / ((1.0 - rho_prev) * (1.0 - row.rho_after));
            for (int s = 0; s < 3; ++s) row.jump[s] = std::pow(a.size, 2 * s) * b;
            atoms_.push_back(row);
            prev = a.size;
            rho_prev = row.rho_after;
        }
        return;
    }

    const double lo = dist.support_min();
    double hi = dist.support_max();
    if (!std::isfinite(hi)) hi = std::max(lo, dist.quantile(0.0)) + tail_cut_means * dist.moment(1);
    cont_hi_ = hi;
    if (knots < 16) knots = 16;

    if (lo > 0) {
        const double ratio = std::log(hi / lo);
        for (std::size_t i = 0; i < knots; ++i)
            grid_.push_back(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(knots - 1)));
    } else {
        grid_.push_back(0.0);
        const double start = hi * 1e-8;
        const double ratio = std::log(hi / start);
        for (std::size_t i = 0; i + 1 < knots; ++i)
            grid_.push_back(start * std::exp(ratio * static_cast<double>(i) / static_cast<double>(knots - 2)));
    }
    grid_.back() = hi;

    for (int s = 0; s < 3; ++s) {
        fval_[s].assign(grid_.size(), 0.0);
        fslope_[s].assign(grid_.size(), 0.0);
    }
    for (int d = 0; d < 2; ++d) {
        gval_[d].assign(grid_.size(), 0.0);
        gslope_[d].assign(grid_.size(), 0.0);
    }
    // G below the support has rho = 0.
    gval_[0][0] = grid_[0];
    gval_[1][0] = 0.5 * grid_[0] * grid_[0];

    for (std::size_t i = 0; i < grid_.size(); ++i) {
        // One-sided slopes inside the support so that density jumps at the ends do not leak.
        const double t = grid_[i];
        double probe = t;
        if (i == 0) probe = std::nextafter(t, cont_hi_);
        if (i + 1 == grid_.size()) probe = std::nextafter(t, 0.0);
        for (int s = 0; s < 3; ++s) fslope_[s][i] = f_integrand(2 * s, probe);
        for (int d = 0; d < 2; ++d) gslope_[d][i] = g_integrand(d, t);
        if (i == 0) continue;
        const double a = grid_[i - 1];
        for (int s = 0; s < 3; ++s)
            fval_[s][i] =
                fval_[s][i - 1] + numerics::integrate([&](double u) { return f_integrand(2 * s, u); }, a, t);
        for (int d = 0; d < 2; ++d)
            gval_[d][i] = gval_[d][i - 1] + numerics::integrate([&](double u) { return g_integrand(d, u); }, a, t);
    }
}

double IntegralTables::f_integrand(int k, double t) const {
    const double f = dist_.pdf(t);
    if (f == 0.0) return 0.0;
    const double r = 1.0 - rho_below(t);
    return std::pow(t, k) * model_.rate(t) * f / (r * r);
}

double IntegralTables::g_integrand(int d, double t) const {
    return std::pow(t, d) / (1.0 - rho_below(t));
}

std::size_t IntegralTables::segment(double x) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, grid_.size() - 2);
}

double IntegralTables::hermite(const std::vector<double>& v, const std::vector<double>& m, std::size_t i,
                               double x) const {
    const double x0 = grid_[i], x1 = grid_[i + 1];
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    double d0 = m[i] * h, d1 = m[i + 1] * h;
    const double delta = v[i + 1] - v[i];
    // Fritsch-Carlson limiter keeps each piece monotone.
    if (delta <= 0) {
        d0 = d1 = 0;
    } else {
        const double a = d0 / delta, b = d1 / delta;
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            d0 *= tau;
            d1 *= tau;
        }
    }
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v[i] + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * v[i + 1] +
           (t3 - t2) * d1;
}

double IntegralTables::F(int k, double x) const {
    const int s = f_slot(k);
    if (!atoms_.empty()) {
        double total = 0.0;
        for (const auto& a : atoms_) {
            if (a.x >= x) break;
            total += a.jump[s];
        }
        return total;
    }
    if (x <= grid_.front()) return 0.0;
    if (x >= cont_hi_) return fval_[s].back();
    return hermite(fval_[s], fslope_[s], segment(x), x);
}

double IntegralTables::F_le(int k, double x) const {
    const int s = f_slot(k);
    if (!atoms_.empty()) {
        double total = 0.0;
        for (const auto& a : atoms_) {
            if (a.x > x) break;
            total += a.jump[s];
        }
        return total;
    }
    return F(k, x);
}

double IntegralTables::F_total(int k) const {
    const int s = f_slot(k);
    if (!atoms_.empty()) {
        double total = 0.0;
        for (const auto& a : atoms_) total += a.jump[s];
        return total;
    }
    return fval_[s].back();
}

double IntegralTables::G(int d, double x) const {
    if (d != 0 && d != 1) throw std::invalid_argument("G_d is tabulated for d in {0, 1}");
    if (x <= 0) return 0.0;
    auto extend = [&](double from, double g_from, double r) {
        return g_from + (std::pow(x, d + 1) - std::pow(from, d + 1)) / ((d + 1) * (1.0 - r));
    };
    if (!atoms_.empty()) {
        double from = 0.0, g_from = 0.0, r = 0.0;
        for (const auto& a : atoms_) {
            if (a.x >= x) break;
            from = a.x;
            g_from = a.g_at[d];
            r = a.rho_after;
        }
        return extend(from, g_from, r);
    }
    if (x <= grid_.front()) return extend(0.0, 0.0, 0.0);
    if (x >= cont_hi_) return extend(cont_hi_, gval_[d].back(), rho_at_or_below(cont_hi_));
    return hermite(gval_[d], gslope_[d], segment(x), x);
}

}  // namespace sizeaware
