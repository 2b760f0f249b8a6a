#include "sizeaware/value.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sizeaware/analytic.hpp"

namespace sizeaware {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Integral of the F_k integrand over [lo, hi), with hi = inf meaning the whole tail.
double f_between(const IntegralTables& t, int k, double lo, double hi) {
    const double upper = std::isinf(hi) ? t.F_total(k) : t.F(k, hi);
    return upper - t.F(k, lo);
}

void require_nondecreasing(std::span<const ValueJob> z, std::size_t from, double (*key)(const ValueJob&),
                           const char* what) {
    for (std::size_t i = from + 1; i < z.size(); ++i)
        if (key(z[i]) < key(z[i - 1])) throw std::invalid_argument(what);
}

double product_key(const ValueJob& j) { return j.remaining * j.original; }
double remaining_key(const ValueJob& j) { return j.remaining; }

}  // namespace

ValueContext::ValueContext(double lambda, const JobSizeDistribution& work_dist, double rate, HoldingCostModel model,
                           std::size_t knots)
    : lambda_(lambda), rate_(rate), dist_(work_dist.scaled(1.0 / rate)), model_(std::move(model)) {
    if (!(rate > 0)) throw std::invalid_argument("server rate must be positive");
    if (!(lambda >= 0)) throw std::invalid_argument("arrival rate must be nonnegative");
    rho_ = lambda * dist_.moment(1);
    require_stable(rho_, "value context");
    if (model_.kind() == HoldingCostModel::Kind::slowdown && !(dist_.support_min() > 0))
        throw std::invalid_argument("slowdown holding cost needs job sizes bounded away from zero");
    model_.check_positive_on(dist_);
    const ExtendedValue eb = model_.mean_rate(dist_);
    if (!eb.is_finite()) throw std::invalid_argument("mean holding cost rate E[B] is not finite");
    mean_holding_ = eb.value();
    tables_ = std::make_shared<const IntegralTables>(lambda, dist_, model_, knots);
}

double ValueContext::fifo_coefficient() const {
    return fifo_factor_ * lambda_ * mean_holding_ / (2.0 * (1.0 - rho_));
}

std::vector<ValueJob> value_jobs(const QueueState& q, const HoldingCostModel& model) {
    std::vector<ValueJob> out;
    out.reserve(q.size());
    for (std::size_t i : q.priority_order()) {
        const auto& j = q.jobs()[i];
        const double orig = j.original / q.rate();
        out.push_back({j.remaining / q.rate(), orig, model.rate(orig)});
    }
    return out;
}

// FIFO

double value_fifo(const ValueContext& ctx, std::span<const ValueJob> z) {
    double u = 0.0, h = 0.0;
    for (const auto& j : z) {
        u += j.remaining;
        h += j.holding * u;
    }
    return h + ctx.fifo_coefficient() * u * u;
}

double admit_fifo(const ValueContext& ctx, std::span<const ValueJob> z, double x) {
    double u = 0.0;
    for (const auto& j : z) u += j.remaining;
    const double c = ctx.fifo_coefficient();
    switch (ctx.model().kind()) {
    case HoldingCostModel::Kind::sojourn: return x + u + c * (2 * u * x + x * x);
    case HoldingCostModel::Kind::slowdown: return 1.0 + u / x + c * (2 * u * x + x * x);
    default: break;
    }
    std::vector<ValueJob> ext(z.begin(), z.end());
    ext.push_back({x, x, ctx.holding(x)});
    return value_fifo(ctx, ext) - value_fifo(ctx, z);
}

// Preemptive LIFO

double value_lifo(const ValueContext& ctx, std::span<const ValueJob> z) {
    double u = 0.0, h = 0.0;
    for (const auto& j : z) {
        u += j.remaining;
        h += j.holding * u;
    }
    return h / (1.0 - ctx.rho());
}

double admit_lifo(const ValueContext& ctx, std::span<const ValueJob> z, double x) {
    const double r = 1.0 - ctx.rho();
    switch (ctx.model().kind()) {
    case HoldingCostModel::Kind::sojourn: return static_cast<double>(z.size() + 1) * x / r;
    case HoldingCostModel::Kind::slowdown: {
        double s = 1.0;
        for (const auto& j : z) s += x / j.original;
        return s / r;
    }
    default: break;
    }
    double b = ctx.holding(x);
    for (const auto& j : z) b += j.holding;
    return x * b / r;
}

// SPTP

double value_sptp(const ValueContext& ctx, std::span<const ValueJob> z) {
    require_nondecreasing(z, 0, product_key, "SPTP state must be sorted by remaining*original");
    const auto& t = ctx.tables();
    const std::size_t n = z.size();
    std::vector<double> tilde(n);
    double h1 = 0.0, u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tilde[i] = std::sqrt(z[i].remaining * z[i].original);
        h1 += z[i].holding *
              (u / (1.0 - ctx.rho_below(tilde[i])) + 2.0 / z[i].original * t.G(1, tilde[i]));
        u += z[i].remaining;
    }
    // Segment i runs over [tilde_i, tilde_{i+1}) with tilde_0 = 0 and the last one open.
    std::vector<double> tail_inv_sq(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail_inv_sq[i] = tail_inv_sq[i + 1] + 1.0 / (z[i].original * z[i].original);
    double h2 = 0.0, work = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double lo = i == 0 ? 0.0 : tilde[i - 1];
        const double hi = i == n ? inf : tilde[i];
        if (i > 0) work += z[i - 1].remaining;
        h2 += work * work * f_between(t, 0, lo, hi) + tail_inv_sq[i] * f_between(t, 4, lo, hi);
    }
    return h1 + 0.5 * ctx.lambda() * h2;
}

double admit_sptp(const ValueContext& ctx, std::span<const ValueJob> z, double x) {
    require_nondecreasing(z, 0, product_key, "SPTP state must be sorted by remaining*original");
    const auto& t = ctx.tables();
    const double bx = ctx.holding(x);
    std::size_t k = 0;
    double u = 0.0;
    while (k < z.size() && z[k].remaining * z[k].original <= x * x) u += z[k++].remaining;

    double h1 = bx * (u / (1.0 - ctx.rho_below(x)) + 2.0 / x * t.G(1, x));
    for (std::size_t j = k; j < z.size(); ++j)
        h1 += x * z[j].holding / (1.0 - ctx.rho_below(std::sqrt(z[j].remaining * z[j].original)));

    double h2 = t.F(4, x) / (x * x);
    double lo = x, work = u;
    for (std::size_t j = k; j <= z.size(); ++j) {
        const double hi = j == z.size() ? inf : std::sqrt(z[j].remaining * z[j].original);
        h2 += (2.0 * work + x) * x * f_between(t, 0, lo, hi);
        if (j < z.size()) work += z[j].remaining;
        lo = hi;
    }
    return h1 + 0.5 * ctx.lambda() * h2;
}

// SRPT

double value_srpt(const ValueContext& ctx, std::span<const ValueJob> z) {
    require_nondecreasing(z, 0, remaining_key, "SRPT state must be sorted by remaining work");
    const auto& t = ctx.tables();
    const std::size_t n = z.size();
    double h1 = 0.0, u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        h1 += z[i].holding * (u / (1.0 - ctx.rho_below(z[i].remaining)) + t.G(0, z[i].remaining));
        u += z[i].remaining;
    }
    double h2 = 0.0, work = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double lo = i == 0 ? 0.0 : z[i - 1].remaining;
        const double hi = i == n ? inf : z[i].remaining;
        if (i > 0) work += z[i - 1].remaining;
        h2 += static_cast<double>(n - i) * f_between(t, 2, lo, hi) + work * work * f_between(t, 0, lo, hi);
    }
    return h1 + 0.5 * ctx.lambda() * h2;
}

double admit_srpt(const ValueContext& ctx, std::span<const ValueJob> z, double x) {
    require_nondecreasing(z, 0, remaining_key, "SRPT state must be sorted by remaining work");
    const auto& t = ctx.tables();
    const double bx = ctx.holding(x);
    std::size_t k = 0;
    double u = 0.0;
    while (k < z.size() && z[k].remaining <= x) u += z[k++].remaining;

    double h1 = bx * (u / (1.0 - ctx.rho_below(x)) + t.G(0, x));
    for (std::size_t j = k; j < z.size(); ++j) h1 += x * z[j].holding / (1.0 - ctx.rho_below(z[j].remaining));

    double h2 = t.F(2, x);
    double lo = x, work = u;
    for (std::size_t j = k; j <= z.size(); ++j) {
        const double hi = j == z.size() ? inf : z[j].remaining;
        h2 += (2.0 * work + x) * x * f_between(t, 0, lo, hi);
        if (j < z.size()) work += z[j].remaining;
        lo = hi;
    }
    return h1 + 0.5 * ctx.lambda() * h2;
}

// Non-preemptive SPT; z[0] is the job in service.

double value_spt(const ValueContext& ctx, std::span<const ValueJob> z) {
    require_nondecreasing(z, 1, remaining_key, "SPT waiting jobs must be sorted by size");
    const auto& t = ctx.tables();
    const std::size_t n = z.size();
    double h1 = 0.0, u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        h1 += z[i].holding * (z[i].remaining + (i == 0 ? 0.0 : u / (1.0 - ctx.rho_below(z[i].remaining))));
        u += z[i].remaining;
    }
    std::vector<double> tail_sq(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) tail_sq[i] = tail_sq[i + 1] + z[i].remaining * z[i].remaining;
    double h2 = 0.0, work = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? 0.0 : z[i].remaining;
        const double hi = i + 1 == n ? inf : z[i + 1].remaining;
        work += z[i].remaining;
        h2 += (work * work + tail_sq[i + 1]) * f_between(t, 0, lo, hi);
    }
    return h1 + 0.5 * ctx.lambda() * h2;
}

double admit_spt(const ValueContext& ctx, std::span<const ValueJob> z, double x) {
    require_nondecreasing(z, 1, remaining_key, "SPT waiting jobs must be sorted by size");
    const auto& t = ctx.tables();
    const double bx = ctx.holding(x);
    if (z.empty()) return bx * x + 0.5 * ctx.lambda() * x * x * t.F_total(0);

    std::size_t k = 1;
    double u = z[0].remaining;
    while (k < z.size() && z[k].remaining <= x) u += z[k++].remaining;

    double h1 = bx * (x + u / (1.0 - ctx.rho_below(x)));
    for (std::size_t j = k; j < z.size(); ++j) h1 += x * z[j].holding / (1.0 - ctx.rho_below(z[j].remaining));

    double h2 = x * x * t.F(0, x);
    double lo = x, work = u;
    for (std::size_t j = k; j <= z.size(); ++j) {
        const double hi = j == z.size() ? inf : z[j].remaining;
        h2 += (2.0 * work + x) * x * f_between(t, 0, lo, hi);
        if (j < z.size()) work += z[j].remaining;
        lo = hi;
    }
    return h1 + 0.5 * ctx.lambda() * h2;
}

double value_of(const ValueContext& ctx, Discipline d, std::span<const ValueJob> z) {
    switch (d) {
    case Discipline::fifo: return value_fifo(ctx, z);
    case Discipline::lifo: return value_lifo(ctx, z);
    case Discipline::sptp: return value_sptp(ctx, z);
    case Discipline::spt: return value_spt(ctx, z);
    case Discipline::srpt: return value_srpt(ctx, z);
    case Discipline::ps: break;
    }
    throw std::invalid_argument("no value function for processor sharing");
}

double admit_of(const ValueContext& ctx, Discipline d, std::span<const ValueJob> z, double x) {
    switch (d) {
    case Discipline::fifo: return admit_fifo(ctx, z, x);
    case Discipline::lifo: return admit_lifo(ctx, z, x);
    case Discipline::sptp: return admit_sptp(ctx, z, x);
    case Discipline::spt: return admit_spt(ctx, z, x);
    case Discipline::srpt: return admit_srpt(ctx, z, x);
    case Discipline::ps: break;
    }
    throw std::invalid_argument("no value function for processor sharing");
}

double remaining_sojourn(const ValueContext& ctx, Discipline d, std::span<const ValueJob> z, std::size_t i) {
    if (i >= z.size()) throw std::out_of_range("job index outside the state");
    double ahead = 0.0;
    for (std::size_t j = 0; j < i; ++j) ahead += z[j].remaining;
    const ValueJob& job = z[i];
    switch (d) {
    case Discipline::fifo: return ahead + job.remaining;
    case Discipline::lifo: return (ahead + job.remaining) / (1.0 - ctx.rho());
    case Discipline::spt:
        return job.remaining + (i == 0 ? 0.0 : ahead / (1.0 - ctx.rho_below(job.remaining)));
    case Discipline::srpt:
        return ahead / (1.0 - ctx.rho_below(job.remaining)) + ctx.tables().G(0, job.remaining);
    case Discipline::sptp: {
        const double tilde = std::sqrt(job.remaining * job.original);
        return ahead / (1.0 - ctx.rho_below(tilde)) + 2.0 / job.original * ctx.tables().G(1, tilde);
    }
    case Discipline::ps: break;
    }
    throw std::invalid_argument("no remaining-sojourn formula for processor sharing");
}

std::size_t gittins_select(std::span<const GittinsClass> classes) {
    if (classes.empty()) throw std::invalid_argument("gittins_select needs at least one class");
    std::size_t best = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        if (!(c.attained >= 0 && c.attained < c.size && c.weight > 0))
            throw std::invalid_argument("Gittins class needs 0 <= attained < size and weight > 0");
        if (i == 0) continue;
        const auto& b = classes[best];
        // Compare w_i / (x_i - a_i) against the incumbent without dividing.
        const double lhs = c.weight * (b.size - b.attained);
        const double rhs = b.weight * (c.size - c.attained);
        if (lhs > rhs && lhs - rhs > 1e-12 * std::max(lhs, rhs)) best = i;
    }
    return best;
}

}  // namespace sizeaware
