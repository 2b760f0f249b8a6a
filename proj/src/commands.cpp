#include "sizeaware/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "sizeaware/acceptance.hpp"
#include "sizeaware/analytic.hpp"
#include "sizeaware/sim.hpp"
#include "sizeaware/value.hpp"

namespace sizeaware {

const std::vector<std::string> simulate_columns{"system",       "policy",      "rho",
                                                "lambda",       "mean_slowdown_star", "ci_halfwidth",
                                                "relative_to_reference", "mean_sojourn", "jobs",
                                                "status"};
const std::vector<std::string> analytic_columns{"system", "rho", "quantity", "index", "value"};
const std::vector<std::string> value_check_columns{"discipline",  "rho",      "state",
                                                   "jobs",        "closed_form", "estimate",
                                                   "ci_halfwidth", "relative_halfwidth", "replications",
                                                   "inside_ci"};

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void header(std::ostream& out, const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
}

struct Cell {
    std::string system;
    std::string policy;
    double rho;
    double lambda;
    SimulationReport report;
};

// Opens the output stream: --out, then the config's output, then stdout.
std::ostream& open_output(const std::string& flag, const std::string& fallback, std::unique_ptr<std::ofstream>& file) {
    const std::string& path = flag.empty() ? fallback : flag;
    if (path.empty()) return std::cout;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw ConfigError("cannot open output file '" + path + "'");
    return *file;
}

ExperimentConfig load_with_overrides(const CommandOptions& o) {
    if (o.config_path.empty()) throw ConfigError("--config is required");
    ExperimentConfig cfg = load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

template <class F>
int guarded(std::ostream& log, F&& body) {
    try {
        body();
        return exit_ok;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
    }
    return exit_config_error;
}

}  // namespace

void write_simulate_csv(const ExperimentConfig& cfg, bool quick, std::ostream& out, std::ostream& log) {
    header(out, simulate_columns);
    const std::size_t scale = quick ? 10 : 1;
    std::vector<Cell> cells;
    for (const auto& named : cfg.systems) {
        for (double rho : cfg.loads) {
            const SystemSpec sys = cfg.make_system(named, rho);
            for (const auto& policy : cfg.policies) {
                SimulationConfig sc{sys, policy};
                sc.n_jobs = cfg.jobs / scale;
                sc.warmup_jobs = cfg.effective_warmup() / scale;
                sc.seed = cfg.seed;
                sc.batches = cfg.batches;
                log << "simulate " << named.name << " rho=" << rho << " " << policy.label() << '\n';
                cells.push_back({named.name, policy.label(), rho, sys.lambda, run(sc)});
            }
        }
    }
    auto reference_of = [&](const Cell& c) -> const Cell* {
        if (cfg.reference_policy.empty() && cfg.reference_system.empty()) return nullptr;
        const std::string& sys = cfg.reference_system.empty() ? c.system : cfg.reference_system;
        const std::string& pol = cfg.reference_policy.empty() ? c.policy : cfg.reference_policy;
        for (const auto& r : cells)
            if (r.system == sys && r.policy == pol && r.rho == c.rho) return &r;
        return nullptr;
    };
    for (const auto& c : cells) {
        const bool ok = c.report.status != "unstable";
        out << c.system << ',' << c.policy << ',' << csv_number(c.rho) << ',' << csv_number(c.lambda) << ',';
        if (ok) {
            out << csv_number(c.report.slowdown_star.mean) << ',' << csv_number(c.report.slowdown_star.half_width)
                << ',';
            const Cell* ref = reference_of(c);
            if (ref && ref->report.status != "unstable") out << csv_number(c.report.slowdown_star.mean / ref->report.slowdown_star.mean);
            out << ',' << csv_number(c.report.sojourn.mean) << ',' << c.report.jobs;
        } else {
            out << ",,,,";
        }
        out << ',' << c.report.status << '\n';
    }
}

void write_analytic_csv(const ExperimentConfig& cfg, std::ostream& out) {
    header(out, analytic_columns);
    const JobSizeDistribution dist = cfg.make_distribution();
    const double mean = dist.moment(1);
    auto row = [&](const std::string& sys, double rho, const std::string& q, std::size_t i, const std::string& v) {
        out << sys << ',' << csv_number(rho) << ',' << q << ',' << i << ',' << v << '\n';
    };
    for (const auto& named : cfg.systems) {
        std::vector<double> rates;
        for (const auto& s : named.servers) rates.push_back(s.rate);
        double total = 0.0;
        for (double r : rates) total += r;
        row(named.name, 0.0, "fifo_better_than_lifo", 0, fifo_better_than_lifo(dist) ? "true" : "false");
        for (double rho : cfg.loads) {
            const double lambda = rho * total / mean;
            // Single-queue figures for one server carrying the system load.
            const QueueLoadSpec single{lambda, dist, total};
            row(named.name, rho, "fifo_mean_slowdown", 0, csv_number(fifo_mean_slowdown(single).raw()));
            row(named.name, rho, "lifo_conditional_slowdown", 0, csv_number(lifo_conditional_slowdown(rho)));
            const auto p = rnd_opt_probabilities(rates, lambda, mean);
            for (std::size_t i = 0; i < p.size(); ++i) row(named.name, rho, "rnd_opt_p", i, csv_number(p[i]));
            row(named.name, rho, "rnd_lifo_system_slowdown", 0,
                csv_number(rnd_lifo_system_slowdown(p, rates, lambda, mean)));
            if (dist.is_continuous()) {
                const auto xi = sita_e_thresholds(dist, rates);
                for (std::size_t k = 1; k + 1 < xi.size(); ++k)
                    row(named.name, rho, "sita_e_threshold", k, csv_number(xi[k]));
            }
        }
    }
}

void write_value_check_csv(const ExperimentConfig& cfg, bool quick, std::ostream& out, std::ostream& log) {
    header(out, value_check_columns);
    const ValueCheckConfig vc = cfg.value_check.value_or(ValueCheckConfig{});
    const JobSizeDistribution dist = cfg.make_distribution();
    PairedEstimatorOptions eo;
    eo.min_replications = quick ? std::max<std::size_t>(vc.min_replications / 10, 100) : vc.min_replications;
    eo.max_replications = quick ? std::max(vc.max_replications / 10, eo.min_replications) : vc.max_replications;
    eo.target_relative_half_width = vc.target_relative_half_width;
    std::uint64_t stream = 0;
    for (Discipline d : vc.disciplines) {
        for (double rho : vc.loads) {
            const ValueContext ctx(rho / dist.moment(1), dist, 1.0, cfg.make_model());
            for (std::size_t s = 0; s < vc.states; ++s) {
                Rng rng(derive_seed(cfg.seed, 1000 + stream++));
                const auto z = random_value_state(d, ctx, vc.max_jobs, rng);
                const double closed = value_of(ctx, d, z);
                const auto est = estimate_value_paired(d, ctx, z, derive_seed(cfg.seed, 5000 + stream), eo);
                log << "value-check " << to_string(d) << " rho=" << rho << " state " << s << '\n';
                const double rel = est.estimate != 0.0 ? est.half_width / std::abs(est.estimate) : 0.0;
                const bool inside = std::abs(closed - est.estimate) <= est.half_width;
                out << to_string(d) << ',' << csv_number(rho) << ',' << s << ',' << z.size() << ','
                    << csv_number(closed) << ',' << csv_number(est.estimate) << ',' << csv_number(est.half_width)
                    << ',' << csv_number(rel) << ',' << est.replications << ',' << (inside ? "true" : "false")
                    << '\n';
            }
        }
    }
}

int cmd_simulate(const CommandOptions& o, std::ostream& log) {
    return guarded(log, [&] {
        const ExperimentConfig cfg = load_with_overrides(o);
        std::unique_ptr<std::ofstream> file;
        write_simulate_csv(cfg, o.quick, open_output(o.out_path, cfg.output, file), log);
    });
}

int cmd_analytic(const CommandOptions& o, std::ostream& log) {
    return guarded(log, [&] {
        const ExperimentConfig cfg = load_with_overrides(o);
        std::unique_ptr<std::ofstream> file;
        write_analytic_csv(cfg, open_output(o.out_path, cfg.output, file));
    });
}

int cmd_value_check(const CommandOptions& o, std::ostream& log) {
    return guarded(log, [&] {
        const ExperimentConfig cfg = load_with_overrides(o);
        std::unique_ptr<std::ofstream> file;
        write_value_check_csv(cfg, o.quick, open_output(o.out_path, cfg.output, file), log);
    });
}

int cmd_validate(const ValidateOptions& o, std::ostream& report) {
    AcceptanceOptions ao;
    ao.quick = o.quick;
    if (o.seed) ao.seed = *o.seed;
    ao.only = o.only;
    ao.fifo_perturbation = o.fifo_perturbation;
    std::unique_ptr<std::ofstream> file;
    if (!o.out_path.empty()) {
        file = std::make_unique<std::ofstream>(o.out_path);
        if (!*file) {
            report << "error: cannot open output file '" << o.out_path << "'\n";
            return exit_config_error;
        }
    }
    if (o.quick) report << "quick mode: reduced job and replication counts, results are indicative\n";
    const auto results = run_acceptance(ao, &report);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        if (file) *file << format_result(r, o.quick) << '\n';
    }
    report << (all ? "all criteria passed" : "some criteria failed") << '\n';
    return all ? exit_ok : exit_acceptance_failure;
}

}  // namespace sizeaware
