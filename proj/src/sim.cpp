#include "sizeaware/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sizeaware/analytic.hpp"

namespace sizeaware {

namespace {

// A run whose queues hold this many jobs is declared unstable.
constexpr std::size_t runaway_jobs = 500000;

bool static_split_unstable(const SystemSpec& sys, const PolicySpec& policy) {
    PolicySpec split_policy = policy;
    if (policy.kind == PolicyKind::fpi) split_policy = PolicySpec{policy.base, policy.p, policy.base};
    if (!split_policy.state_independent() && split_policy.kind != PolicyKind::sita_es) return false;
    const StaticSplit s = static_split(sys, split_policy);
    const double mean = sys.dist.moment(1);
    for (std::size_t i = 0; i < sys.servers.size(); ++i) {
        double offered = 0.0;
        if (!s.p.empty()) {
            offered = sys.lambda * s.p[i] * mean;
        } else {
            for (std::size_t k = 0; k < s.interval_server.size(); ++k)
                if (s.interval_server[k] == i)
                    offered = sys.lambda * sys.dist.interval_moment(1, s.thresholds[k], s.thresholds[k + 1]);
        }
        if (offered / sys.servers[i].rate >= 1.0 - stability_margin) return true;
    }
    return false;
}

}  // namespace

SimulationReport run(const SimulationConfig& cfg) {
    const SystemSpec& sys = cfg.system;
    if (sys.servers.empty()) throw std::invalid_argument("simulation needs at least one server");
    if (!(cfg.n_jobs > cfg.warmup_jobs)) throw std::invalid_argument("n_jobs must exceed warmup_jobs");
    if (!(sys.lambda > 0)) throw std::invalid_argument("simulation needs a positive arrival rate");

    SimulationReport rep;
    rep.policy = cfg.policy.label();
    const std::size_t m = sys.servers.size();
    rep.per_queue.resize(m);

    if (sys.load() >= 1.0 - stability_margin || static_split_unstable(sys, cfg.policy)) {
        rep.status = "unstable";
        return rep;
    }
    Dispatcher dispatcher(sys, cfg.policy, derive_seed(cfg.seed, 3));

    Rng arrivals(derive_seed(cfg.seed, 1));
    Rng sizes(derive_seed(cfg.seed, 2));
    const double total_rate = sys.total_rate();

    std::vector<QueueState> queues;
    for (const auto& s : sys.servers) queues.emplace_back(s.discipline, s.rate);

    const std::size_t n = cfg.n_jobs;
    const std::size_t recorded = n - cfg.warmup_jobs;
    std::vector<double> arrival_time(n), job_size(n);
    std::vector<double> gamma_star(recorded, 0.0), sojourn(recorded, 0.0);
    std::vector<std::uint32_t> job_queue(n, 0);
    std::size_t outstanding = recorded;

    double t = 0.0;
    double window_start = 0.0, window_end = 0.0, jobs_area = 0.0;
    std::vector<double> work_in_window(m, 0.0);
    std::size_t arrivals_in_window = 0;
    std::size_t in_system = 0;

    auto record = [&](std::size_t id, double depart) {
        if (id < cfg.warmup_jobs || id >= n) return;
        const std::size_t r = id - cfg.warmup_jobs;
        const double T = depart - arrival_time[id];
        sojourn[r] = T;
        gamma_star[r] = T * total_rate / job_size[id];
        --outstanding;
    };

    for (std::size_t j = 0; outstanding > 0; ++j) {
        const double dt = arrivals.exponential(sys.lambda);
        for (std::size_t qi = 0; qi < m; ++qi) {
            const AdvanceResult res = queues[qi].advance(dt);
            for (const auto& d : res.departures) record(d.id, t + d.offset);
            in_system -= res.departures.size();
            if (j > cfg.warmup_jobs && j <= n) jobs_area += res.job_time;
        }
        t += dt;
        const double y = sys.dist.sample(sizes);
        if (j == cfg.warmup_jobs) window_start = t;
        if (j == n) window_end = t;
        if (j < n) {
            arrival_time[j] = t;
            job_size[j] = y;
        }
        const std::size_t qi = dispatcher.decide(queues, y);
        if (j < n) job_queue[j] = static_cast<std::uint32_t>(qi);
        if (j >= cfg.warmup_jobs && j < n) {
            work_in_window[qi] += y;
            ++arrivals_in_window;
        }
        QueuedJob job;
        job.id = j;
        job.arrival_seq = j;
        job.remaining = job.original = y;
        job.holding_rate = sys.system_holding(y);
        queues[qi].admit(job);
        dispatcher.after_assignment(queues);
        if (++in_system > runaway_jobs) {
            rep.status = "unstable";
            return rep;
        }
    }
    if (window_end == 0.0) window_end = t;

    // Queue membership can move under SITA-Es; per-queue figures use the queue at arrival.
    rep.jobs = recorded;
    rep.slowdown_star = batch_means(gamma_star, cfg.batches);
    rep.sojourn = batch_means(sojourn, cfg.batches);

    const double span_t = window_end - window_start;
    for (std::size_t qi = 0; qi < m; ++qi) {
        rep.per_queue[qi].observed_load = work_in_window[qi] / sys.servers[qi].rate / span_t;
        if (rep.per_queue[qi].observed_load >= 1.0) rep.status = "overloaded";
    }
    std::vector<double> gsum(m, 0.0), wsum(m, 0.0);
    for (std::size_t r = 0; r < recorded; ++r) {
        const std::size_t id = r + cfg.warmup_jobs;
        const std::size_t qi = job_queue[id];
        const double service = job_size[id] / sys.servers[qi].rate;
        gsum[qi] += sojourn[r] / service;
        wsum[qi] += sojourn[r] - service;
        ++rep.per_queue[qi].jobs;
    }
    for (std::size_t qi = 0; qi < m; ++qi) {
        if (rep.per_queue[qi].jobs == 0) continue;
        rep.per_queue[qi].mean_slowdown = gsum[qi] / static_cast<double>(rep.per_queue[qi].jobs);
        rep.per_queue[qi].mean_waiting = wsum[qi] / static_cast<double>(rep.per_queue[qi].jobs);
    }

    // Size deciles of the job-size law; gamma* in arrival order within each.
    std::vector<double> edges{0.0};
    for (int k = 1; k < 10; ++k) edges.push_back(sys.dist.quantile(k / 10.0));
    edges.push_back(std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> bucket(10);
    for (std::size_t r = 0; r < recorded; ++r) {
        const double y = job_size[r + cfg.warmup_jobs];
        std::size_t k = static_cast<std::size_t>(std::upper_bound(edges.begin() + 1, edges.end() - 1, y) -
                                                 (edges.begin() + 1));
        bucket[std::min<std::size_t>(k, 9)].push_back(gamma_star[r]);
    }
    for (std::size_t k = 0; k < 10; ++k) {
        DecileReport d;
        d.lower = edges[k];
        d.upper = edges[k + 1];
        d.jobs = bucket[k].size();
        if (d.jobs >= 2 * cfg.batches) d.slowdown = batch_means(bucket[k], cfg.batches);
        else d.slowdown = iid_mean(bucket[k]);
        rep.deciles.push_back(d);
    }

    const double lambda_eff = static_cast<double>(arrivals_in_window) / span_t;
    rep.little_ratio = (jobs_area / span_t) / (lambda_eff * rep.sojourn.mean);

    if (cfg.keep_samples) {
        rep.gamma_star_samples = std::move(gamma_star);
        rep.sojourn_samples = std::move(sojourn);
    }
    return rep;
}

ConfidenceInterval compare_paired(const SimulationReport& a, const SimulationReport& b, std::size_t batches) {
    if (a.gamma_star_samples.size() != b.gamma_star_samples.size() || a.gamma_star_samples.empty())
        throw std::invalid_argument("paired comparison needs kept samples over the same jobs");
    std::vector<double> diff(a.gamma_star_samples.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.gamma_star_samples[i] - b.gamma_star_samples[i];
    return batch_means(diff, batches);
}

namespace {

QueueState initial_state(Discipline d, std::span<const ValueJob> z) {
    QueueState q(d, 1.0);
    const std::size_t n = z.size();
    for (std::size_t i = 0; i < n; ++i) {
        QueuedJob j;
        j.id = i;
        // z is in service order; LIFO serves the newest first.
        j.arrival_seq = d == Discipline::lifo ? n - 1 - i : i;
        j.remaining = z[i].remaining;
        j.original = z[i].original;
        j.holding_rate = z[i].holding;
        q.admit(j);
    }
    return q;
}

double one_replication(Discipline d, const ValueContext& ctx, const QueueState& start, Rng& rng) {
    QueueState s1 = start;
    QueueState s2(d, 1.0);
    std::uint64_t seq = start.size() + 1;
    double diff = 0.0;
    while (!s1.empty()) {
        const double dt = rng.exponential(ctx.lambda());
        diff += s1.advance(dt).holding_cost - s2.advance(dt).holding_cost;
        if (s1.empty()) break;
        const double x = ctx.dist().sample(rng);
        QueuedJob j;
        j.id = j.arrival_seq = seq++;
        j.remaining = j.original = x;
        j.holding_rate = ctx.holding(x);
        s1.admit(j);
        s2.admit(j);
    }
    return diff;
}

}  // namespace

ValueEstimate estimate_value_paired(Discipline d, const ValueContext& ctx, std::span<const ValueJob> z,
                                    std::uint64_t seed, const PairedEstimatorOptions& options) {
    ValueEstimate est;
    if (z.empty()) return est;
    if (ctx.lambda() == 0.0) {
        const QueueState q = initial_state(d, z);
        QueueState drain = q;
        est.estimate = drain.advance(std::numeric_limits<double>::infinity()).holding_cost;
        est.replications = 1;
        return est;
    }
    const QueueState start = initial_state(d, z);
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    while (n < options.max_replications) {
        Rng rng(derive_seed(seed, n));
        const double v = one_replication(d, ctx, start, rng);
        ++n;
        const double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
        if (n >= options.min_replications && n % 1000 == 0) {
            const double hw = 1.96 * std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
            if (hw <= options.target_relative_half_width * std::abs(mean)) break;
        }
    }
    est.estimate = mean;
    est.replications = n;
    est.half_width = n > 1 ? student_t_quantile(0.975, static_cast<double>(n - 1)) *
                                 std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))
                           : 0.0;
    return est;
}

std::vector<ValueJob> random_value_state(Discipline d, const ValueContext& ctx, std::size_t max_jobs, Rng& rng) {
    if (max_jobs == 0) return {};
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_jobs));
    const bool preemptive = d == Discipline::lifo || d == Discipline::srpt || d == Discipline::sptp || d == Discipline::ps;
    QueueState q(d, 1.0);
    for (std::size_t i = 0; i < std::min(n, max_jobs); ++i) {
        QueuedJob j;
        j.id = j.arrival_seq = i;
        j.original = ctx.dist().sample(rng);
        j.remaining = j.original;
        if ((preemptive || i == 0) && rng.uniform() < 0.5) j.remaining = j.original * rng.uniform();
        j.holding_rate = ctx.holding(j.original);
        q.admit(j);
    }
    return value_jobs(q, ctx.model());
}

ValueEstimate estimate_value_paired(Discipline d, const ValueContext& ctx, std::span<const ValueJob> z,
                                    std::size_t replications, std::uint64_t seed) {
    PairedEstimatorOptions o;
    o.min_replications = replications;
    o.max_replications = replications;
    o.target_relative_half_width = 0.0;
    return estimate_value_paired(d, ctx, z, seed, o);
}

}  // namespace sizeaware
