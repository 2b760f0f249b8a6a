#include "sizeaware/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sizeaware/analytic.hpp"

namespace sizeaware {

double SystemSpec::total_rate() const {
    double s = 0.0;
    for (const auto& sv : servers) s += sv.rate;
    return s;
}

double SystemSpec::load() const { return lambda * dist.moment(1) / total_rate(); }

std::vector<double> SystemSpec::rates() const {
    std::vector<double> r;
    for (const auto& sv : servers) r.push_back(sv.rate);
    return r;
}

double SystemSpec::system_holding(double y) const {
    switch (model.kind()) {
    case HoldingCostModel::Kind::slowdown: return total_rate() / y;
    case HoldingCostModel::Kind::sojourn: return 1.0;
    default: return model.rate(y);
    }
}

std::string to_string(PolicyKind k) {
    switch (k) {
    case PolicyKind::rnd: return "rnd";
    case PolicyKind::rnd_rho: return "rnd_rho";
    case PolicyKind::rnd_u: return "rnd_u";
    case PolicyKind::rnd_opt: return "rnd_opt";
    case PolicyKind::sita_e: return "sita_e";
    case PolicyKind::sita_es: return "sita_es";
    case PolicyKind::round_robin: return "round_robin";
    case PolicyKind::lwl_minus: return "lwl_minus";
    case PolicyKind::lwl_plus: return "lwl_plus";
    case PolicyKind::jsq: return "jsq";
    case PolicyKind::myopic: return "myopic";
    case PolicyKind::fpi: return "fpi";
    }
    return "unknown";
}

PolicyKind parse_policy_kind(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(PolicyKind::fpi); ++i) {
        const auto k = static_cast<PolicyKind>(i);
        if (to_string(k) == name) return k;
    }
    if (name == "lwl") return PolicyKind::lwl_minus;
    throw std::invalid_argument("unknown policy '" + name + "'");
}

std::string PolicySpec::label() const {
    if (kind == PolicyKind::fpi) return "fpi-" + to_string(base);
    return to_string(kind);
}

bool PolicySpec::state_independent() const {
    switch (kind) {
    case PolicyKind::rnd:
    case PolicyKind::rnd_rho:
    case PolicyKind::rnd_u:
    case PolicyKind::rnd_opt:
    case PolicyKind::sita_e: return true;
    default: return false;
    }
}

std::vector<double> rnd_opt_probabilities(std::span<const double> rates, double lambda, double mean_size) {
    const std::size_t m = rates.size();
    if (m == 0) throw std::invalid_argument("rnd_opt needs at least one server");
    const double offered = lambda * mean_size;
    const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
    require_stable(offered / total, "rnd_opt_probabilities");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rates[a] > rates[b]; });

    std::vector<double> p(m, 0.0);
    if (offered == 0.0) {
        // Light-traffic limit: everything to the fastest servers.
        const double top = rates[order[0]];
        std::size_t count = 0;
        for (std::size_t i : order) count += rates[i] == top;
        for (std::size_t i : order)
            if (rates[i] == top) p[i] = 1.0 / static_cast<double>(count);
        return p;
    }
    for (std::size_t active = m; active > 0; --active) {
        double nu_sum = 0.0, sqrt_sum = 0.0;
        for (std::size_t k = 0; k < active; ++k) {
            nu_sum += rates[order[k]];
            sqrt_sum += std::sqrt(rates[order[k]]);
        }
        const double g = (nu_sum - offered) / sqrt_sum;
        bool feasible = true;
        std::fill(p.begin(), p.end(), 0.0);
        for (std::size_t k = 0; k < active; ++k) {
            const double nu = rates[order[k]];
            p[order[k]] = (nu - std::sqrt(nu) * g) / offered;
            if (p[order[k]] < 0) feasible = false;
        }
        if (feasible) return p;
    }
    throw std::logic_error("rnd_opt exclusion loop did not terminate");
}

std::vector<double> sita_e_thresholds(const JobSizeDistribution& dist, std::span<const double> rates) {
    const std::size_t m = rates.size();
    if (m == 0) throw std::invalid_argument("SITA-E needs at least one server");
    if (dist.has_atoms())
        throw std::invalid_argument("SITA-E needs a continuous job-size law (an atom could straddle a threshold)");
    std::vector<double> sorted(rates.begin(), rates.end());
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    const double mean = dist.moment(1);

    std::vector<double> xi{0.0};
    double cum_rate = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        cum_rate += sorted[k];
        const double target = mean * cum_rate / total;
        double lo = std::max(dist.support_min(), xi.back());
        double hi = dist.support_max();
        if (!std::isfinite(hi)) {
            hi = std::max(lo, 1.0) * 2.0;
            while (dist.partial_moment_le(1, hi) < target) hi *= 2.0;
        }
        for (int it = 0; it < 400 && hi > lo; ++it) {
            const double mid = lo > 0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (dist.partial_moment_le(1, mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        xi.push_back(hi);
    }
    xi.push_back(std::numeric_limits<double>::infinity());
    return xi;
}

StaticSplit static_split(const SystemSpec& sys, const PolicySpec& policy) {
    StaticSplit s;
    const auto rates = sys.rates();
    const std::size_t m = rates.size();
    const double total = sys.total_rate();
    switch (policy.kind) {
    case PolicyKind::rnd:
        if (policy.p.size() != m) throw std::invalid_argument("rnd split needs one probability per server");
        if (std::any_of(policy.p.begin(), policy.p.end(), [](double v) { return v < 0; }) ||
            std::abs(std::accumulate(policy.p.begin(), policy.p.end(), 0.0) - 1.0) > 1e-9)
            throw std::invalid_argument("rnd split must be a probability vector");
        s.p = policy.p;
        break;
    case PolicyKind::rnd_rho:
        for (double r : rates) s.p.push_back(r / total);
        break;
    case PolicyKind::rnd_u: s.p.assign(m, 1.0 / static_cast<double>(m)); break;
    case PolicyKind::rnd_opt: s.p = rnd_opt_probabilities(rates, sys.lambda, sys.dist.moment(1)); break;
    case PolicyKind::sita_e:
    case PolicyKind::sita_es: {
        s.thresholds = sita_e_thresholds(sys.dist, rates);
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rates[a] > rates[b]; });
        s.interval_server = order;
        break;
    }
    default: throw std::invalid_argument("policy " + policy.label() + " has no static split");
    }
    return s;
}

std::vector<QueueInput> base_inputs(const SystemSpec& sys, const PolicySpec& base) {
    if (!base.state_independent()) throw std::invalid_argument("FPI needs a state-independent base policy");
    const StaticSplit s = static_split(sys, base);
    const std::size_t m = sys.servers.size();
    std::vector<QueueInput> out;
    if (!s.p.empty()) {
        for (std::size_t i = 0; i < m; ++i) out.push_back({sys.lambda * s.p[i], sys.dist});
        return out;
    }
    std::vector<std::optional<QueueInput>> by_server(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double a = s.thresholds[k], b = s.thresholds[k + 1];
        const double prob = sys.dist.interval_moment(0, a, b);
        by_server[s.interval_server[k]] =
            prob > 0 ? QueueInput{sys.lambda * prob, sys.dist.conditioned(a, b)} : QueueInput{0.0, sys.dist};
    }
    for (auto& q : by_server) out.push_back(*q);
    return out;
}

double fifo_admit_display(double total_rate, double rate, double backlog_time, double y, double lambda_i,
                          double mean_y, double inv_mean_y) {
    const double u = backlog_time;
    return total_rate * (1.0 / rate + u / y +
                         lambda_i * inv_mean_y / 2.0 * (2.0 * u * y + y * y / rate) / (rate - lambda_i * mean_y));
}

double lifo_admit_display(double total_rate, double rate, std::span<const double> originals_time, double y,
                          double lambda_i, double mean_y) {
    double s = 0.0;
    for (double d : originals_time) s += 1.0 / d;
    return total_rate * (1.0 + (y / rate) * s) / (rate - lambda_i * mean_y);
}

Dispatcher::Dispatcher(const SystemSpec& sys, const PolicySpec& policy, std::uint64_t seed)
    : sys_(sys), policy_(policy), rng_(seed) {
    if (sys.servers.empty()) throw std::invalid_argument("system needs at least one server");
    const std::size_t m = sys.servers.size();
    cost_buf_.resize(m);
    switch (policy.kind) {
    case PolicyKind::rnd:
    case PolicyKind::rnd_rho:
    case PolicyKind::rnd_u:
    case PolicyKind::rnd_opt:
    case PolicyKind::sita_e:
    case PolicyKind::sita_es: split_ = static_split(sys, policy); break;
    case PolicyKind::fpi: {
        inputs_ = base_inputs(sys, PolicySpec{policy.base, policy.p, policy.base});
        for (std::size_t i = 0; i < m; ++i) {
            if (sys.servers[i].discipline == Discipline::ps)
                throw std::invalid_argument("FPI has no value function for processor-sharing servers");
            contexts_.emplace_back(ValueContext(inputs_[i].lambda, inputs_[i].dist, sys.servers[i].rate, sys.model));
        }
        break;
    }
    default: break;
    }
    if (!split_.p.empty()) {
        double c = 0.0;
        for (double v : split_.p) cumulative_p_.push_back(c += v);
    }
}

std::size_t Dispatcher::argmin(std::span<const double> cost) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cost.size(); ++i) {
        const double tol = 1e-12 * std::max(std::abs(cost[i]), std::abs(cost[best]));
        if (cost[i] < cost[best] - tol) {
            best = i;
        } else if (std::abs(cost[i] - cost[best]) <= tol && sys_.servers[i].rate > sys_.servers[best].rate) {
            best = i;
        }
    }
    return best;
}

std::size_t Dispatcher::sample_split() {
    const double u = rng_.uniform();
    for (std::size_t i = 0; i < cumulative_p_.size(); ++i)
        if (u < cumulative_p_[i] && split_.p[i] > 0) return i;
    for (std::size_t i = split_.p.size(); i-- > 0;)
        if (split_.p[i] > 0) return i;
    return 0;
}

std::size_t Dispatcher::sita_lookup(double y) const {
    const auto& xi = split_.thresholds;
    for (std::size_t k = 0; k + 1 < xi.size(); ++k)
        if (y <= xi[k + 1]) return split_.interval_server[k];
    return split_.interval_server.back();
}

double Dispatcher::admit_cost_scaled(std::size_t i, const QueueState& q, double y) const {
    const ValueContext& ctx = *contexts_.at(i);
    const double nu = q.rate();
    const double total = sys_.total_rate();
    const Discipline d = sys_.servers[i].discipline;
    if (sys_.model.kind() == HoldingCostModel::Kind::slowdown) {
        const QueueInput& in = inputs_[i];
        if (d == Discipline::fifo)
            return fifo_admit_display(total, nu, q.backlog_time(), y, in.lambda, in.dist.moment(1),
                                      in.dist.moment(-1));
        if (d == Discipline::lifo) {
            std::vector<double> originals;
            originals.reserve(q.size());
            for (const auto& j : q.jobs()) originals.push_back(j.original / nu);
            return lifo_admit_display(total, nu, originals, y, in.lambda, in.dist.moment(1));
        }
    }
    const auto z = value_jobs(q, sys_.model);
    const double scale = sys_.model.kind() == HoldingCostModel::Kind::slowdown ? total / nu : 1.0;
    return scale * admit_of(ctx, d, z, y / nu);
}

std::size_t Dispatcher::decide(const std::vector<QueueState>& queues, double y) {
    if (!(y > 0)) throw std::invalid_argument("job size must be positive");
    const std::size_t m = queues.size();
    switch (policy_.kind) {
    case PolicyKind::rnd:
    case PolicyKind::rnd_rho:
    case PolicyKind::rnd_u:
    case PolicyKind::rnd_opt: return sample_split();
    case PolicyKind::sita_e:
    case PolicyKind::sita_es: return sita_lookup(y);
    case PolicyKind::round_robin: {
        const std::size_t i = rr_next_;
        rr_next_ = (rr_next_ + 1) % m;
        return i;
    }
    case PolicyKind::lwl_minus:
        for (std::size_t i = 0; i < m; ++i) cost_buf_[i] = queues[i].backlog() / queues[i].rate();
        break;
    case PolicyKind::lwl_plus:
        for (std::size_t i = 0; i < m; ++i) cost_buf_[i] = (queues[i].backlog() + y) / queues[i].rate();
        break;
    case PolicyKind::jsq:
        for (std::size_t i = 0; i < m; ++i) cost_buf_[i] = static_cast<double>(queues[i].size());
        break;
    case PolicyKind::myopic: {
        const double b = sys_.system_holding(y);
        for (std::size_t i = 0; i < m; ++i) {
            QueueState with = queues[i];
            with.admit(y, b);
            cost_buf_[i] = with.drain_cost() - queues[i].drain_cost();
        }
        break;
    }
    case PolicyKind::fpi:
        for (std::size_t i = 0; i < m; ++i) cost_buf_[i] = admit_cost_scaled(i, queues[i], y);
        break;
    }
    return argmin(std::span<const double>(cost_buf_.data(), m));
}

void Dispatcher::after_assignment(std::vector<QueueState>& queues) const {
    if (policy_.kind == PolicyKind::sita_es) sort_identical_by_backlog(queues, sys_);
}

std::vector<std::vector<std::size_t>> identical_groups(const SystemSpec& sys) {
    std::vector<std::vector<std::size_t>> groups;
    std::vector<bool> used(sys.servers.size(), false);
    for (std::size_t i = 0; i < sys.servers.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> g{i};
        for (std::size_t j = i + 1; j < sys.servers.size(); ++j) {
            if (!used[j] && sys.servers[j].rate == sys.servers[i].rate &&
                sys.servers[j].discipline == sys.servers[i].discipline) {
                g.push_back(j);
                used[j] = true;
            }
        }
        if (g.size() > 1) groups.push_back(std::move(g));
    }
    return groups;
}

void sort_identical_by_backlog(std::vector<QueueState>& queues, const SystemSpec& sys) {
    for (const auto& g : identical_groups(sys)) {
        // Selection sort by swapping whole contents; groups are tiny.
        for (std::size_t a = 0; a < g.size(); ++a) {
            std::size_t best = a;
            for (std::size_t b = a + 1; b < g.size(); ++b)
                if (queues[g[b]].backlog() < queues[g[best]].backlog()) best = b;
            if (best != a) queues[g[a]].swap_contents(queues[g[best]]);
        }
    }
}

bool switch_roles(std::vector<QueueState>& queues, const SystemSpec& sys,
                  std::span<const std::optional<ValueContext>> contexts) {
    bool moved = false;
    for (const auto& g : identical_groups(sys)) {
        const Discipline d = sys.servers[g[0]].discipline;
        std::vector<std::vector<ValueJob>> content;
        for (std::size_t i : g) content.push_back(value_jobs(queues[i], sys.model));
        auto total = [&](const std::vector<std::size_t>& perm) {
            double v = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) v += value_of(*contexts[g[k]], d, content[perm[k]]);
            return v;
        };
        std::vector<std::size_t> perm(g.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        const double current = total(perm);
        double best_value = current;
        std::vector<std::size_t> best = perm;
        while (std::next_permutation(perm.begin(), perm.end())) {
            const double v = total(perm);
            if (v < best_value - 1e-12 * std::abs(current)) {
                best_value = v;
                best = perm;
            }
        }
        if (best_value < current - 1e-12 * std::abs(current)) {
            std::vector<QueueState> copies;
            for (std::size_t i : g) copies.push_back(queues[i]);
            for (std::size_t k = 0; k < g.size(); ++k) {
                QueueState& target = queues[g[k]];
                QueueState src = copies[best[k]];
                target.swap_contents(src);
            }
            moved = true;
        }
    }
    return moved;
}

}  // namespace sizeaware
