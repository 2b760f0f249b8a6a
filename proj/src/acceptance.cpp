#include "sizeaware/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "sizeaware/analytic.hpp"
#include "sizeaware/dispatch.hpp"
#include "sizeaware/sim.hpp"
#include "sizeaware/value.hpp"

namespace sizeaware {

namespace {

using Clock = std::chrono::steady_clock;

const BoundedPareto default_pareto{0.33959, 1000.0, 1.5};

// Recorded jobs per dispatching cell.
constexpr std::size_t dispatch_jobs = 2000000;

// Widens a 95% interval to a family-wise 95% level over `family` intervals.
double bonferroni_half_width(double half_width_95, std::size_t family, double dof) {
    if (family <= 1) return half_width_95;
    return half_width_95 * student_t_quantile(1.0 - 0.025 / static_cast<double>(family), dof) /
           student_t_quantile(0.975, dof);
}

std::string fmt(double v, int precision = 5) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

class Criterion {
public:
    void check(bool ok, const std::string& what) {
        if (ok) return;
        if (failures_++ < 8) failed_ << "; FAILED " << what;
    }
    bool passed() const { return failures_ == 0; }
    std::string failures() const {
        return failures_ > 8 ? failed_.str() + " (+" + std::to_string(failures_ - 8) + " more)" : failed_.str();
    }

private:
    std::ostringstream failed_;
    std::size_t failures_ = 0;
};

struct Scale {
    bool quick;
    std::size_t jobs(std::size_t full) const { return quick ? std::max<std::size_t>(full / 10, 20000) : full; }
};

SystemSpec single_server(Discipline d, const JobSizeDistribution& dist, double lambda) {
    return SystemSpec{{{1.0, d}}, lambda, dist, HoldingCostModel::slowdown()};
}

SystemSpec system_at(std::vector<ServerSpec> servers, double rho) {
    SystemSpec sys{std::move(servers), 0.0, JobSizeDistribution(default_pareto), HoldingCostModel::slowdown()};
    sys.lambda = rho * sys.total_rate() / sys.dist.moment(1);
    return sys;
}

std::vector<ServerSpec> two_identical(Discipline d) { return {{1.0, d}, {1.0, d}}; }
std::vector<ServerSpec> three_heterogeneous(Discipline d) { return {{1.0, d}, {0.5, d}, {0.5, d}}; }

SimulationReport simulate(const SystemSpec& sys, const PolicySpec& policy, std::size_t recorded, std::uint64_t seed) {
    SimulationConfig cfg{sys, policy};
    cfg.warmup_jobs = recorded / 4;
    cfg.n_jobs = recorded + cfg.warmup_jobs;
    cfg.seed = seed;
    cfg.keep_samples = true;
    SimulationReport rep = run(cfg);
    rep.sojourn_samples.clear();
    rep.sojourn_samples.shrink_to_fit();
    return rep;
}

// Paired comparison a < b: the 95% batch-means interval of mean(a - b) lies below zero.
bool significantly_lower(const SimulationReport& a, const SimulationReport& b, std::string& note) {
    if (a.status != "ok" || b.status != "ok") {
        note = a.policy + " vs " + b.policy + " not both stable";
        return false;
    }
    const ConfidenceInterval d = compare_paired(a, b);
    note = a.policy + "-" + b.policy + "=" + fmt(d.mean, 4) + "+-" + fmt(d.half_width, 3);
    return d.upper() < 0.0;
}

// 1: P-K mean slowdown of a single FIFO server with deterministic sizes.
void criterion_pk(const AcceptanceOptions& o, Criterion& c, std::ostringstream& detail) {
    const Scale s{o.quick};
    const auto dist = JobSizeDistribution::deterministic(1.0);
    const SystemSpec sys = single_server(Discipline::fifo, dist, 0.5);
    const double expected = fifo_mean_slowdown(QueueLoadSpec{0.5, dist, 1.0}).value();
    const auto rep = simulate(sys, PolicySpec::simple(PolicyKind::rnd_u), s.jobs(500000), derive_seed(o.seed, 1));
    const double rel = std::abs(rep.slowdown_star.mean - expected) / expected;
    detail << "E[gamma]=" << fmt(rep.slowdown_star.mean, 6) << " formula=" << fmt(expected) << " rel.err=" << fmt(rel, 3)
           << " jobs=" << rep.jobs << "; ";
    c.check(std::abs(expected - 1.5) < 1e-12, "formula value " + fmt(expected) + " != 1.5");
    c.check(rel <= 0.02, "relative error above 2%");
}

// 2: preemptive LIFO conditional slowdown is flat in the job size.
void criterion_lifo_flat(const AcceptanceOptions& o, Criterion& c, std::ostringstream& detail) {
    const Scale s{o.quick};
    const JobSizeDistribution dist(default_pareto);
    const SystemSpec sys = single_server(Discipline::lifo, dist, 0.5 / dist.moment(1));
    const double expected = lifo_conditional_slowdown(0.5);
    const auto rep = simulate(sys, PolicySpec::simple(PolicyKind::rnd_u), s.jobs(500000), derive_seed(o.seed, 2));
    detail << "deciles:";
    for (std::size_t k = 0; k < rep.deciles.size(); ++k) {
        const auto& dec = rep.deciles[k];
        const double hw = bonferroni_half_width(dec.slowdown.half_width, rep.deciles.size(),
                                                static_cast<double>(dec.slowdown.batches) - 1.0);
        detail << ' ' << fmt(dec.slowdown.mean, 4) << "+-" << fmt(hw, 2);
        c.check(std::abs(dec.slowdown.mean - expected) <= hw,
                "decile " + std::to_string(k + 1) + " interval misses " + fmt(expected));
    }
    detail << " (family-wise 95% over 10 deciles); ";
}

// 3: the FIFO-vs-LIFO predicate predicts the simulated ordering.
void criterion_fifo_lifo(const AcceptanceOptions& o, Criterion& c, std::ostringstream& detail) {
    const Scale s{o.quick};
    const std::vector<std::pair<std::string, JobSizeDistribution>> laws{
        {"uniform(0.5,1.5)", JobSizeDistribution::uniform(0.5, 1.5)}, {"bounded_pareto", JobSizeDistribution(default_pareto)}};
    std::uint64_t stream = 30;
    for (const auto& [name, dist] : laws) {
        const bool fifo_wins = fifo_better_than_lifo(dist);
        for (double rho : {0.5, 0.8}) {
            const double lambda = rho / dist.moment(1);
            const std::uint64_t seed = derive_seed(o.seed, stream++);
            const auto f = simulate(single_server(Discipline::fifo, dist, lambda), PolicySpec::simple(PolicyKind::rnd_u),
                                    s.jobs(500000), seed);
            const auto l = simulate(single_server(Discipline::lifo, dist, lambda), PolicySpec::simple(PolicyKind::rnd_u),
                                    s.jobs(500000), seed);
            const ConfidenceInterval d = compare_paired(f, l);
            detail << name << " rho=" << rho << " predicate=" << (fifo_wins ? "fifo" : "lifo")
                   << " fifo-lifo=" << fmt(d.mean, 4) << "+-" << fmt(d.half_width, 3) << "; ";
            const bool ok = fifo_wins ? d.upper() < 0.0 : d.lower() > 0.0;
            c.check(ok, name + " rho=" + fmt(rho) + " ordering not significant in the predicted direction");
        }
    }
    c.check(fifo_better_than_lifo(laws[0].second) && !fifo_better_than_lifo(laws[1].second),
            "predicate disagrees with the expected verdicts");
}

// 4: closed-form relative values against the coupled two-system estimator.
void criterion_value_oracle(const AcceptanceOptions& o, Criterion& c, std::ostringstream& detail) {
    const JobSizeDistribution dist(default_pareto);
    const std::vector<Discipline> disciplines{Discipline::fifo, Discipline::lifo, Discipline::spt, Discipline::srpt,
                                              Discipline::sptp};
    const std::vector<double> loads{0.3, 0.6};
    const std::size_t states = 3;
    const std::size_t family = disciplines.size() * loads.size() * states;
    PairedEstimatorOptions eo;
    eo.min_replications = o.quick ? 2000 : 10000;
    eo.max_replications = o.quick ? 40000 : 4000000;
    eo.target_relative_half_width = 0.02;
    std::size_t inside = 0, precise = 0, total = 0;
    double worst_z = 0.0;
    std::uint64_t stream = 400;
    for (Discipline d : disciplines) {
        for (double rho : loads) {
            ValueContext ctx(rho / dist.moment(1), dist, 1.0, HoldingCostModel::slowdown());
            if (d == Discipline::fifo) ctx.perturb_fifo_coefficient(o.fifo_perturbation);
            for (std::size_t k = 0; k < states; ++k) {
                Rng rng(derive_seed(o.seed, stream++));
                const auto z = random_value_state(d, ctx, 4, rng);
                const double closed = value_of(ctx, d, z);
                const auto est = estimate_value_paired(d, ctx, z, derive_seed(o.seed, 10000 + stream), eo);
                const double hw = bonferroni_half_width(est.half_width, family, static_cast<double>(est.replications) - 1.0);
                const double rel = est.half_width / std::abs(est.estimate);
                const bool in = std::abs(closed - est.estimate) <= hw;
                ++total;
                inside += in;
                precise += rel <= 0.02 && est.replications >= 10000;
                if (est.half_width > 0) worst_z = std::max(worst_z, std::abs(closed - est.estimate) / est.half_width);
                const std::string tag = to_string(d) + " rho=" + fmt(rho) + " state " + std::to_string(k) + " (n=" +
                                        std::to_string(z.size()) + ")";
                c.check(in, tag + ": closed " + fmt(closed) + " outside " + fmt(est.estimate) + "+-" + fmt(hw, 3));
                c.check(rel <= 0.02, tag + ": relative half-width " + fmt(rel, 3) + " above 2%");
                c.check(est.replications >= 10000 || o.quick, tag + ": fewer than 10^4 replications");
            }
        }
    }
    detail << inside << "/" << total << " inside family-wise 95% intervals, " << precise << "/" << total
           << " with rel. half-width <= 2% and >= 1e4 replications, max |closed-est|/hw95=" << fmt(worst_z, 3) << "; ";
}

// 5: Gittins index with w = 1/x picks an SPTP job in every state.
void criterion_gittins(const AcceptanceOptions&, Criterion& c, std::ostringstream& detail) {
    const double step = 0.25;
    std::size_t states = 0, agree = 0;
    std::vector<double> sizes;
    std::function<void(int)> sizes_rec;
    std::function<void(std::size_t, std::vector<GittinsClass>&)> attained_rec = [&](std::size_t i,
                                                                                   std::vector<GittinsClass>& cls) {
        if (i == cls.size()) {
            ++states;
            const std::size_t g = gittins_select(cls);
            // SPTP: smallest remaining * original, lowest index on ties.
            std::size_t best = 0;
            for (std::size_t j = 1; j < cls.size(); ++j)
                if ((cls[j].size - cls[j].attained) * cls[j].size < (cls[best].size - cls[best].attained) * cls[best].size)
                    best = j;
            // The engine's SPTP selection on the same state.
            QueueState q(Discipline::sptp, 1.0);
            for (std::size_t j = 0; j < cls.size(); ++j) q.admit(QueuedJob{j, cls[j].size - cls[j].attained, cls[j].size, 1.0 / cls[j].size, j});
            const auto served = q.select_in_service();
            const bool engine_ok = served.size() == 1 && served[0].id == best;
            agree += g == best && engine_ok;
            return;
        }
        for (double a = 0.0; a < cls[i].size - 1e-12; a += step) {
            cls[i].attained = a;
            attained_rec(i + 1, cls);
        }
    };
    sizes_rec = [&](int min_size) {
        if (!sizes.empty()) {
            std::vector<GittinsClass> cls;
            for (double x : sizes) cls.push_back({x, 1.0 / x, 0.0});
            attained_rec(0, cls);
        }
        if (sizes.size() == 4) return;
        for (int x = min_size; x <= 4; ++x) {
            sizes.push_back(x);
            sizes_rec(x);
            sizes.pop_back();
        }
    };
    sizes_rec(1);
    detail << agree << "/" << states << " states agree (gittins, brute-force product, engine); ";
    c.check(agree == states && states > 0, "disagreement in " + std::to_string(states - agree) + " states");
}

// 6: SPTP <= SRPT <= {SPT, LIFO, PS, FIFO} for one server.
void criterion_single_queue(const AcceptanceOptions& o, Criterion& c, std::ostringstream& detail) {
    const Scale s{o.quick};
    const JobSizeDistribution dist(default_pareto);
    const std::vector<Discipline> others{Discipline::spt, Discipline::lifo, Discipline::ps, Discipline::fifo};
    std::uint64_t stream = 60;
    for (double rho : {0.5, 0.8}) {
        const double lambda = rho / dist.moment(1);
        const std::uint64_t seed = derive_seed(o.seed, stream++);
        auto sim = [&](Discipline d) {
            auto r = simulate(single_server(d, dist, lambda), PolicySpec::simple(PolicyKind::rnd_u), s.jobs(2000000), seed);
            r.policy = to_string(d);
            return r;
        };
        const auto sptp = sim(Discipline::sptp);
        const auto srpt = sim(Discipline::srpt);
        detail << "rho=" << rho << ": sptp=" << fmt(sptp.slowdown_star.mean) << " srpt=" << fmt(srpt.slowdown_star.mean);
        std::string note;
        const bool sptp_wins = significantly_lower(sptp, srpt, note);
        c.check(sptp_wins, "rho=" + fmt(rho) + " " + note);
        detail << " [" << note << "]";
        for (Discipline d : others) {
            const auto r = sim(d);
            detail << ' ' << r.policy << '=' << fmt(r.slowdown_star.mean);
            const bool srpt_wins = significantly_lower(srpt, r, note);
            c.check(srpt_wins, "rho=" + fmt(rho) + " " + note);
        }
        detail << "; ";
    }
}

using Reports = std::map<std::string, SimulationReport>;

Reports simulate_all(const SystemSpec& sys, const std::vector<PolicySpec>& policies, std::size_t recorded,
                     std::uint64_t seed) {
    Reports out;
    for (const auto& p : policies) out[p.label()] = simulate(sys, p, recorded, seed);
    return out;
}

void require_lower(Criterion& c, const Reports& r, const std::string& tag, const std::vector<std::string>& better,
                   const std::vector<std::string>& worse) {
    for (const auto& a : better) {
        for (const auto& b : worse) {
            std::string note;
            const bool ok = significantly_lower(r.at(a), r.at(b), note);
            c.check(ok, tag + " " + note);
        }
    }
}

void summarize(std::ostringstream& detail, const std::string& tag, const Reports& r) {
    detail << tag << ":";
    for (const auto& [name, rep] : r)
        detail << ' ' << name << '=' << (rep.status == "ok" ? fmt(rep.slowdown_star.mean, 4) : rep.status);
    detail << "; ";
}

PolicySpec simple(PolicyKind k) { return PolicySpec::simple(k); }
PolicySpec fpi(PolicyKind k) { return PolicySpec::fpi_on(k); }

// 7: orderings of the dispatching experiments.
void criterion_dispatch(const AcceptanceOptions& o, Criterion& c, std::ostringstream& detail) {
    const Scale s{o.quick};
    const std::size_t jobs = s.jobs(dispatch_jobs);
    const std::vector<double> loads{0.5, 0.7, 0.9};
    std::uint64_t stream = 700;

    // (a) two identical FIFO servers
    for (double rho : loads) {
        const auto r = simulate_all(system_at(two_identical(Discipline::fifo), rho),
                                    {fpi(PolicyKind::sita_e), simple(PolicyKind::sita_e), simple(PolicyKind::lwl_minus),
                                     simple(PolicyKind::jsq), simple(PolicyKind::rnd_u), simple(PolicyKind::round_robin)},
                                    jobs, derive_seed(o.seed, stream++));
        const std::string tag = "(a) rho=" + fmt(rho);
        summarize(detail, tag, r);
        require_lower(c, r, tag, {"fpi-sita_e"}, {"sita_e"});
        require_lower(c, r, tag, {"sita_e"}, {"lwl_minus", "jsq"});
        require_lower(c, r, tag, {"lwl_minus", "jsq"}, {"rnd_u", "round_robin"});
    }
    // (b) three heterogeneous FIFO servers at heavy load
    {
        const auto r = simulate_all(
            system_at(three_heterogeneous(Discipline::fifo), 0.9),
            {fpi(PolicyKind::sita_e), simple(PolicyKind::rnd_rho), simple(PolicyKind::rnd_opt), simple(PolicyKind::sita_e),
             simple(PolicyKind::sita_es), simple(PolicyKind::jsq), simple(PolicyKind::lwl_minus),
             simple(PolicyKind::lwl_plus), simple(PolicyKind::myopic), fpi(PolicyKind::rnd_rho), fpi(PolicyKind::rnd_opt)},
            jobs, derive_seed(o.seed, stream++));
        summarize(detail, "(b) rho=0.9", r);
        std::vector<std::string> rest;
        for (const auto& [name, rep] : r)
            if (name != "fpi-sita_e") rest.push_back(name);
        require_lower(c, r, "(b) rho=0.9", {"fpi-sita_e"}, rest);
    }
    // (c) two identical LIFO servers
    for (double rho : loads) {
        const auto r = simulate_all(system_at(two_identical(Discipline::lifo), rho),
                                    {simple(PolicyKind::myopic), fpi(PolicyKind::rnd_rho), simple(PolicyKind::rnd_u),
                                     simple(PolicyKind::lwl_minus), simple(PolicyKind::round_robin), simple(PolicyKind::jsq)},
                                    jobs, derive_seed(o.seed, stream++));
        const std::string tag = "(c) rho=" + fmt(rho);
        summarize(detail, tag, r);
        require_lower(c, r, tag, {"myopic", "fpi-rnd_rho"}, {"rnd_u", "lwl_minus", "round_robin", "jsq"});
    }
    // (d) three heterogeneous SPTP servers
    {
        const auto r = simulate_all(system_at(three_heterogeneous(Discipline::sptp), 0.7),
                                    {fpi(PolicyKind::rnd_opt), simple(PolicyKind::lwl_minus), simple(PolicyKind::myopic),
                                     simple(PolicyKind::rnd_rho)},
                                    jobs, derive_seed(o.seed, stream++));
        summarize(detail, "(d) rho=0.7", r);
        require_lower(c, r, "(d) rho=0.7", {"fpi-rnd_opt"}, {"lwl_minus"});
        require_lower(c, r, "(d) rho=0.7", {"myopic"}, {"lwl_minus", "rnd_rho"});
    }
}

// 8: first policy iteration improves on its base.
void criterion_fpi_improves(const AcceptanceOptions& o, Criterion& c, std::ostringstream& detail) {
    const Scale s{o.quick};
    const std::size_t jobs = s.jobs(dispatch_jobs);
    std::uint64_t stream = 800;
    std::size_t comparisons = 0, wins = 0;
    for (Discipline d : {Discipline::fifo, Discipline::lifo}) {
        for (int testbed = 0; testbed < 2; ++testbed) {
            for (double rho : {0.5, 0.7, 0.9}) {
                const auto servers = testbed == 0 ? two_identical(d) : three_heterogeneous(d);
                const SystemSpec sys = system_at(servers, rho);
                const std::uint64_t seed = derive_seed(o.seed, stream++);
                for (PolicyKind base : {PolicyKind::rnd_rho, PolicyKind::rnd_opt, PolicyKind::sita_e}) {
                    const auto b = simulate(sys, simple(base), jobs, seed);
                    const auto f = simulate(sys, fpi(base), jobs, seed);
                    std::string note;
                    const bool ok = significantly_lower(f, b, note);
                    ++comparisons;
                    wins += ok;
                    c.check(ok, to_string(d) + (testbed == 0 ? " 2x1" : " 1+2x0.5") + " rho=" + fmt(rho) + " " + note);
                }
            }
        }
    }
    detail << wins << "/" << comparisons << " FPI runs significantly below their base; ";
}

// 9: RND-opt against a simplex grid search, SITA-E load balance.
void criterion_constructions(const AcceptanceOptions&, Criterion& c, std::ostringstream& detail) {
    const std::vector<std::vector<double>> rate_sets{{1.0, 1.0}, {1.0, 0.5, 0.5}, {2.0, 1.0, 0.25}};
    for (const auto& rates : rate_sets) {
        double total = 0.0;
        for (double r : rates) total += r;
        for (double rho : {0.3, 0.5, 0.9}) {
            const double lambda = rho * total;
            const auto p = rnd_opt_probabilities(rates, lambda, 1.0);
            const double f = rnd_lifo_system_slowdown(p, rates, lambda, 1.0);
            // Grid over the simplex; unstable points are skipped.
            const double h = rates.size() == 2 ? 1e-5 : 1e-3;
            const auto steps = static_cast<long>(std::lround(1.0 / h));
            double best = std::numeric_limits<double>::infinity();
            std::vector<double> q(rates.size());
            auto eval = [&] {
                for (std::size_t i = 0; i < rates.size(); ++i)
                    if (lambda * q[i] >= rates[i] * (1.0 - 1e-6)) return;
                best = std::min(best, rnd_lifo_system_slowdown(q, rates, lambda, 1.0));
            };
            for (long i = 0; i <= steps; ++i) {
                q[0] = static_cast<double>(i) * h;
                if (rates.size() == 2) {
                    q[1] = 1.0 - q[0];
                    eval();
                    continue;
                }
                for (long j = 0; i + j <= steps; ++j) {
                    q[1] = static_cast<double>(j) * h;
                    q[2] = std::max(0.0, 1.0 - q[0] - q[1]);
                    eval();
                }
            }
            c.check(f <= best + 1e-4, "rnd_opt objective " + fmt(f, 10) + " above grid " + fmt(best, 10));
        }
    }
    detail << "rnd_opt within 1e-4 of the grid minimum on " << rate_sets.size() * 3 << " cases; ";

    const JobSizeDistribution dist(default_pareto);
    double worst = 0.0;
    for (const auto& rates : rate_sets) {
        const auto xi = sita_e_thresholds(dist, rates);
        std::vector<double> sorted = rates;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        std::vector<double> per_speed;
        for (std::size_t k = 0; k + 1 < xi.size(); ++k) per_speed.push_back(dist.interval_moment(1, xi[k], xi[k + 1]) / sorted[k]);
        const auto [lo, hi] = std::minmax_element(per_speed.begin(), per_speed.end());
        const double spread = (*hi - *lo) / *hi;
        worst = std::max(worst, spread);
        c.check(spread <= 1e-9, "sita_e per-speed load spread " + fmt(spread, 3));
        c.check(xi.front() == 0.0 && std::isinf(xi.back()), "sita_e intervals do not cover the support");
    }
    detail << "sita_e worst relative per-speed load spread " << fmt(worst, 3) << "; ";
}

struct Entry {
    int id;
    const char* name;
    double limit_seconds;
    void (*body)(const AcceptanceOptions&, Criterion&, std::ostringstream&);
};

const Entry entries[] = {
    {1, "P-K mean slowdown, FIFO D/1", 30, criterion_pk},
    {2, "LIFO conditional slowdown flat in size", 60, criterion_lifo_flat},
    {3, "FIFO vs LIFO predicate ordering", 0, criterion_fifo_lifo},
    {4, "value functions vs paired simulation", 900, criterion_value_oracle},
    {5, "Gittins index equals SPTP choice", 10, criterion_gittins},
    {6, "SPTP single-queue dominance", 300, criterion_single_queue},
    {7, "dispatching orderings", 1800, criterion_dispatch},
    {8, "FPI improves on its base", 0, criterion_fpi_improves},
    {9, "RND-opt and SITA-E constructions", 10, criterion_constructions},
};

}  // namespace

std::string format_result(const CriterionResult& r, bool quick) {
    std::ostringstream os;
    os << "criterion " << r.id << " " << (r.passed ? "PASS" : "FAIL") << (quick ? " (indicative)" : "") << "  "
       << r.name << "  [" << fmt(r.seconds, 3) << " s]  " << r.detail;
    return os.str();
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream* progress) {
    std::vector<CriterionResult> results;
    for (const auto& e : entries) {
        if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end())
            continue;
        std::ostringstream detail;
        Criterion c;
        const auto t0 = Clock::now();
        try {
            e.body(options, c, detail);
        } catch (const std::exception& ex) {
            c.check(false, std::string("exception: ") + ex.what());
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (e.limit_seconds > 0 && !options.quick)
            c.check(seconds <= e.limit_seconds, "runtime above " + fmt(e.limit_seconds) + " s");
        std::string text = detail.str();
        if (text.size() >= 2 && text.compare(text.size() - 2, 2, "; ") == 0) text.resize(text.size() - 2);
        CriterionResult r{e.id, e.name, c.passed(), text + c.failures(), seconds};
        if (progress) *progress << format_result(r, options.quick) << std::endl;
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace sizeaware
