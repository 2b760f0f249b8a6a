#include "sizeaware/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace sizeaware {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& need(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(join(path, key), "missing");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0)) fail(path, "must be positive");
    return v;
}

std::size_t count(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
    const auto v = j.get<long long>();
    if (v < 0) fail(path, "expected a nonnegative integer");
    return static_cast<std::size_t>(v);
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<ServerSpec> servers_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of servers");
    std::vector<ServerSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        only_keys(j[i], p, {"rate", "discipline"});
        ServerSpec s{positive(need(j[i], p, "rate"), p + ".rate"), Discipline::fifo};
        try {
            s.discipline = parse_discipline(text(need(j[i], p, "discipline"), p + ".discipline"));
        } catch (const std::invalid_argument& e) {
            fail(p + ".discipline", e.what());
        }
        out.push_back(s);
    }
    return out;
}

json servers_to_json(const std::vector<ServerSpec>& servers) {
    json arr = json::array();
    for (const auto& s : servers) arr.push_back({{"rate", s.rate}, {"discipline", to_string(s.discipline)}});
    return arr;
}

}  // namespace

json law_to_json(const SizeLaw& law) {
    if (auto d = std::get_if<BoundedPareto>(&law)) return {{"kind", "bounded_pareto"}, {"k", d->k}, {"p", d->p}, {"alpha", d->alpha}};
    if (auto d = std::get_if<Uniform>(&law)) return {{"kind", "uniform"}, {"a", d->a}, {"b", d->b}};
    if (auto d = std::get_if<Exponential>(&law)) return {{"kind", "exponential"}, {"mean", d->mean}};
    if (auto d = std::get_if<Deterministic>(&law)) return {{"kind", "deterministic"}, {"x", d->x}};
    const auto& d = std::get<Discrete>(law);
    json pts = json::array();
    for (const auto& a : d.atoms) pts.push_back({a.size, a.prob});
    return {{"kind", "discrete"}, {"points", pts}};
}

SizeLaw law_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string kind = text(need(j, path, "kind"), join(path, "kind"));
    SizeLaw law;
    if (kind == "bounded_pareto") {
        only_keys(j, path, {"kind", "k", "p", "alpha"});
        law = BoundedPareto{number(need(j, path, "k"), join(path, "k")), number(need(j, path, "p"), join(path, "p")),
                            number(need(j, path, "alpha"), join(path, "alpha"))};
    } else if (kind == "uniform") {
        only_keys(j, path, {"kind", "a", "b"});
        law = Uniform{number(need(j, path, "a"), join(path, "a")), number(need(j, path, "b"), join(path, "b"))};
    } else if (kind == "exponential") {
        only_keys(j, path, {"kind", "mean"});
        law = Exponential{number(need(j, path, "mean"), join(path, "mean"))};
    } else if (kind == "deterministic") {
        only_keys(j, path, {"kind", "x"});
        law = Deterministic{number(need(j, path, "x"), join(path, "x"))};
    } else if (kind == "discrete") {
        only_keys(j, path, {"kind", "points"});
        const json& pts = need(j, path, "points");
        if (!pts.is_array()) fail(join(path, "points"), "expected an array of [size, probability] pairs");
        Discrete d;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string p = join(path, "points") + "[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].size() != 2) fail(p, "expected [size, probability]");
            d.atoms.push_back({number(pts[i][0], p + "[0]"), number(pts[i][1], p + "[1]")});
        }
        law = d;
    } else {
        fail(join(path, "kind"), "unknown distribution kind '" + kind + "'");
    }
    try {
        JobSizeDistribution check(law);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return law;
}

json policy_to_json(const PolicySpec& p) {
    if (p.kind == PolicyKind::fpi) return {{"kind", "fpi"}, {"base", to_string(p.base)}};
    if (p.kind == PolicyKind::rnd) return {{"kind", "rnd"}, {"p", p.p}};
    return to_string(p.kind);
}

PolicySpec policy_from_json(const json& j, const std::string& path) {
    try {
        if (j.is_string()) {
            const PolicyKind k = parse_policy_kind(j.get<std::string>());
            if (k == PolicyKind::fpi) fail(path, "fpi needs a base policy: {\"kind\": \"fpi\", \"base\": ...}");
            if (k == PolicyKind::rnd) fail(path, "rnd needs probabilities: {\"kind\": \"rnd\", \"p\": [...]}");
            return PolicySpec::simple(k);
        }
        only_keys(j, path, {"kind", "base", "p"});
        PolicySpec p = PolicySpec::simple(parse_policy_kind(text(need(j, path, "kind"), join(path, "kind"))));
        if (p.kind == PolicyKind::fpi) {
            p.base = parse_policy_kind(text(need(j, path, "base"), join(path, "base")));
            if (!PolicySpec::simple(p.base).state_independent())
                fail(join(path, "base"), "FPI base must be a state-independent policy");
        } else if (j.contains("base")) {
            fail(join(path, "base"), "only fpi takes a base policy");
        }
        if (p.kind == PolicyKind::rnd) {
            const json& pr = need(j, path, "p");
            if (!pr.is_array()) fail(join(path, "p"), "expected an array of probabilities");
            for (std::size_t i = 0; i < pr.size(); ++i)
                p.p.push_back(number(pr[i], join(path, "p") + "[" + std::to_string(i) + "]"));
        } else if (j.contains("p")) {
            fail(join(path, "p"), "only rnd takes probabilities");
        }
        return p;
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

HoldingCostModel ExperimentConfig::make_model() const {
    return cost_model == HoldingCostModel::Kind::sojourn ? HoldingCostModel::sojourn() : HoldingCostModel::slowdown();
}

SystemSpec ExperimentConfig::make_system(const NamedSystem& s, double rho) const {
    SystemSpec sys{s.servers, 0.0, make_distribution(), make_model()};
    sys.lambda = rho * sys.total_rate() / sys.dist.moment(1);
    return sys;
}

ExperimentConfig parse_config(const std::string& input) {
    json j;
    try {
        j = json::parse(input);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line and column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < input.size(); ++i) {
            if (input[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << "config parse error at line " << line << ", column " << col << ": " << e.what();
        throw ConfigError(os.str());
    }
    only_keys(j, "", {"schema_version", "system", "systems", "reference_system", "distribution", "cost_model",
                      "policy", "policies", "reference_policy", "loads", "jobs", "warmup_jobs", "batches", "seed",
                      "output", "value_check"});

    ExperimentConfig cfg;
    cfg.schema_version = static_cast<int>(count(need(j, "", "schema_version"), "schema_version"));
    if (cfg.schema_version != config_schema_version)
        fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version));

    if (j.contains("system") && j.contains("systems")) fail("systems", "give either 'system' or 'systems', not both");
    if (j.contains("system")) {
        only_keys(j["system"], "system", {"name", "servers"});
        NamedSystem s;
        s.name = j["system"].contains("name") ? text(j["system"]["name"], "system.name") : "system";
        s.servers = servers_from_json(need(j["system"], "system", "servers"), "system.servers");
        cfg.systems.push_back(s);
    } else if (j.contains("systems")) {
        const json& arr = j["systems"];
        if (!arr.is_array() || arr.empty()) fail("systems", "expected a nonempty array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = "systems[" + std::to_string(i) + "]";
            only_keys(arr[i], p, {"name", "servers"});
            NamedSystem s;
            s.name = text(need(arr[i], p, "name"), p + ".name");
            s.servers = servers_from_json(need(arr[i], p, "servers"), p + ".servers");
            cfg.systems.push_back(s);
        }
    } else {
        fail("system", "missing");
    }
    if (j.contains("reference_system")) {
        cfg.reference_system = text(j["reference_system"], "reference_system");
        if (std::none_of(cfg.systems.begin(), cfg.systems.end(),
                         [&](const NamedSystem& s) { return s.name == cfg.reference_system; }))
            fail("reference_system", "names no configured system");
    }

    if (j.contains("distribution")) cfg.distribution = law_from_json(j["distribution"], "distribution");
    if (j.contains("cost_model")) {
        const std::string m = text(j["cost_model"], "cost_model");
        if (m == "slowdown") cfg.cost_model = HoldingCostModel::Kind::slowdown;
        else if (m == "sojourn") cfg.cost_model = HoldingCostModel::Kind::sojourn;
        else fail("cost_model", "expected 'slowdown' or 'sojourn'");
    }

    if (j.contains("policy") && j.contains("policies")) fail("policies", "give either 'policy' or 'policies', not both");
    if (j.contains("policy")) cfg.policies.push_back(policy_from_json(j["policy"], "policy"));
    if (j.contains("policies")) {
        if (!j["policies"].is_array()) fail("policies", "expected an array");
        for (std::size_t i = 0; i < j["policies"].size(); ++i)
            cfg.policies.push_back(policy_from_json(j["policies"][i], "policies[" + std::to_string(i) + "]"));
    }
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        const auto& p = cfg.policies[i];
        if (p.kind == PolicyKind::rnd)
            for (const auto& s : cfg.systems)
                if (p.p.size() != s.servers.size())
                    fail("policies[" + std::to_string(i) + "].p", "needs one probability per server of " + s.name);
    }
    if (j.contains("reference_policy")) {
        cfg.reference_policy = text(j["reference_policy"], "reference_policy");
        if (std::none_of(cfg.policies.begin(), cfg.policies.end(),
                         [&](const PolicySpec& p) { return p.label() == cfg.reference_policy; }))
            fail("reference_policy", "names no configured policy");
    }

    if (j.contains("loads")) {
        if (!j["loads"].is_array()) fail("loads", "expected an array");
        for (std::size_t i = 0; i < j["loads"].size(); ++i) {
            const std::string p = "loads[" + std::to_string(i) + "]";
            const double r = number(j["loads"][i], p);
            if (!(r > 0 && r < 1)) fail(p, "offered load must lie in (0, 1)");
            cfg.loads.push_back(r);
        }
    }
    if (j.contains("jobs")) cfg.jobs = count(j["jobs"], "jobs");
    if (j.contains("warmup_jobs")) cfg.warmup_jobs = count(j["warmup_jobs"], "warmup_jobs");
    if (cfg.jobs <= cfg.effective_warmup()) fail("jobs", "must exceed warmup_jobs");
    if (j.contains("batches")) {
        cfg.batches = count(j["batches"], "batches");
        if (cfg.batches < 10) fail("batches", "at least 10 batches are needed for intervals");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) fail("seed", "expected an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("output")) cfg.output = text(j["output"], "output");

    if (j.contains("value_check")) {
        const json& v = j["value_check"];
        only_keys(v, "value_check", {"disciplines", "loads", "states", "max_jobs", "min_replications",
                                     "max_replications", "target_relative_half_width"});
        ValueCheckConfig vc;
        if (v.contains("disciplines")) {
            vc.disciplines.clear();
            if (!v["disciplines"].is_array()) fail("value_check.disciplines", "expected an array");
            for (std::size_t i = 0; i < v["disciplines"].size(); ++i) {
                const std::string p = "value_check.disciplines[" + std::to_string(i) + "]";
                try {
                    const Discipline d = parse_discipline(text(v["disciplines"][i], p));
                    if (d == Discipline::ps) fail(p, "processor sharing has no value function");
                    vc.disciplines.push_back(d);
                } catch (const std::invalid_argument& e) {
                    fail(p, e.what());
                }
            }
        }
        if (v.contains("loads")) {
            vc.loads.clear();
            for (std::size_t i = 0; i < v["loads"].size(); ++i) {
                const std::string p = "value_check.loads[" + std::to_string(i) + "]";
                const double r = number(v["loads"][i], p);
                if (!(r > 0 && r < 1)) fail(p, "load must lie in (0, 1)");
                vc.loads.push_back(r);
            }
        }
        if (v.contains("states")) vc.states = count(v["states"], "value_check.states");
        if (v.contains("max_jobs")) vc.max_jobs = count(v["max_jobs"], "value_check.max_jobs");
        if (vc.max_jobs == 0) fail("value_check.max_jobs", "must be positive");
        if (v.contains("min_replications")) vc.min_replications = count(v["min_replications"], "value_check.min_replications");
        if (v.contains("max_replications")) vc.max_replications = count(v["max_replications"], "value_check.max_replications");
        if (vc.max_replications < vc.min_replications)
            fail("value_check.max_replications", "must be at least min_replications");
        if (v.contains("target_relative_half_width"))
            vc.target_relative_half_width =
                positive(v["target_relative_half_width"], "value_check.target_relative_half_width");
        cfg.value_check = vc;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    json systems = json::array();
    for (const auto& s : cfg.systems) systems.push_back({{"name", s.name}, {"servers", servers_to_json(s.servers)}});
    j["systems"] = systems;
    if (!cfg.reference_system.empty()) j["reference_system"] = cfg.reference_system;
    j["distribution"] = law_to_json(cfg.distribution);
    j["cost_model"] = cfg.cost_model == HoldingCostModel::Kind::sojourn ? "sojourn" : "slowdown";
    json policies = json::array();
    for (const auto& p : cfg.policies) policies.push_back(policy_to_json(p));
    j["policies"] = policies;
    if (!cfg.reference_policy.empty()) j["reference_policy"] = cfg.reference_policy;
    j["loads"] = cfg.loads;
    j["jobs"] = cfg.jobs;
    if (cfg.warmup_jobs) j["warmup_jobs"] = *cfg.warmup_jobs;
    j["batches"] = cfg.batches;
    j["seed"] = cfg.seed;
    if (!cfg.output.empty()) j["output"] = cfg.output;
    if (cfg.value_check) {
        const auto& v = *cfg.value_check;
        json d = json::array();
        for (auto x : v.disciplines) d.push_back(to_string(x));
        j["value_check"] = {{"disciplines", d},
                            {"loads", v.loads},
                            {"states", v.states},
                            {"max_jobs", v.max_jobs},
                            {"min_replications", v.min_replications},
                            {"max_replications", v.max_replications},
                            {"target_relative_half_width", v.target_relative_half_width}};
    }
    return j;
}

}  // namespace sizeaware
