#include <doctest.h>

#include <string>

#include "sizeaware/config.hpp"

using namespace sizeaware;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const std::string minimal = R"({"schema_version": 1, "system": {"servers": [{"rate": 1, "discipline": "fifo"}]}})";

std::string with_field(const std::string& field) {
    return R"({"schema_version": 1, "system": {"servers": [{"rate": 1, "discipline": "fifo"}]}, )" + field + "}";
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
    const ExperimentConfig c = parse_config(minimal);
    REQUIRE(c.systems.size() == 1);
    CHECK(c.systems[0].name == "system");
    CHECK(std::holds_alternative<BoundedPareto>(c.distribution));
    CHECK(c.cost_model == HoldingCostModel::Kind::slowdown);
    CHECK(c.policies.empty());
    CHECK(c.batches == 30);
    CHECK(c.effective_warmup() == c.jobs / 5);
}

TEST_CASE("full config") {
    const ExperimentConfig c = parse_config(R"({
      "schema_version": 1,
      "systems": [
        {"name": "a", "servers": [{"rate": 2, "discipline": "lifo"}]},
        {"name": "b", "servers": [{"rate": 1, "discipline": "lifo"}, {"rate": 1, "discipline": "sptp"}]}
      ],
      "reference_system": "b",
      "distribution": {"kind": "discrete", "points": [[1, 0.5], [3, 0.5]]},
      "cost_model": "sojourn",
      "policies": ["jsq", "lwl", {"kind": "fpi", "base": "rnd_opt"}],
      "reference_policy": "fpi-rnd_opt",
      "loads": [0.25, 0.5],
      "jobs": 1000,
      "warmup_jobs": 100,
      "batches": 10,
      "seed": 18446744073709551615,
      "output": "out.csv"
    })");
    CHECK(c.systems.size() == 2);
    CHECK(c.reference_system == "b");
    CHECK(std::get<Discrete>(c.distribution).atoms.size() == 2);
    CHECK(c.cost_model == HoldingCostModel::Kind::sojourn);
    REQUIRE(c.policies.size() == 3);
    CHECK(c.policies[1].kind == PolicyKind::lwl_minus);
    CHECK(c.policies[2].label() == "fpi-rnd_opt");
    CHECK(c.seed == 18446744073709551615ull);
    CHECK(c.effective_warmup() == 100);
    const SystemSpec s = c.make_system(c.systems[1], 0.5);
    CHECK(s.load() == doctest::Approx(0.5));
}

TEST_CASE("config diagnostics name the field") {
    CHECK(error_of(with_field(R"("sede": 3)")).find("'sede'") != std::string::npos);
    CHECK(error_of(R"({"system": {"servers": [{"rate": 1, "discipline": "fifo"}]}})").find("schema_version") != std::string::npos);
    CHECK(error_of(with_field(R"("loads": [0.5, 1.2])")).find("loads[1]") != std::string::npos);
    CHECK(error_of(with_field(R"("policies": ["fpi"])")).find("policies[0]") != std::string::npos);
    CHECK(error_of(with_field(R"("policies": [{"kind": "fpi", "base": "jsq"}])")).find("policies[0]") != std::string::npos);
    CHECK(error_of(with_field(R"("policies": [{"kind": "fpi", "base": "sita_es"}])")).find("policies[0]") != std::string::npos);
    CHECK(error_of(with_field(R"("policies": [{"kind": "rnd", "p": [0.5, 0.5]}])")).find("policies[0].p") != std::string::npos);
    CHECK(error_of(with_field(R"("distribution": {"kind": "uniform", "a": 2, "b": 1})")).find("distribution") != std::string::npos);
    CHECK(error_of(with_field(R"("batches": 5)")).find("batches") != std::string::npos);
    CHECK(error_of(with_field(R"("jobs": 10, "warmup_jobs": 10)")).find("jobs") != std::string::npos);
    CHECK(error_of(with_field(R"("reference_policy": "jsq")")).find("reference_policy") != std::string::npos);
    CHECK(error_of(with_field(R"("cost_model": "energy")")).find("cost_model") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 2, "system": {"servers": [{"rate": 1, "discipline": "fifo"}]}})")
              .find("schema_version") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 1, "system": {"servers": [{"rate": 1, "discipline": "edf"}]}})")
              .find("system.servers[0].discipline") != std::string::npos);
    CHECK(error_of(R"({"schema_version": 1, "system": {"servers": [{"rate": 0, "discipline": "fifo"}]}})")
              .find("system.servers[0].rate") != std::string::npos);

    const std::string broken = "{\n  \"schema_version\": 1,\n  \"jobs\": ,\n}";
    CHECK(error_of(broken).find("line 3") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("configs survive a round trip") {
    const std::string text = R"({
      "schema_version": 1,
      "systems": [{"name": "x", "servers": [{"rate": 1, "discipline": "fifo"}, {"rate": 0.5, "discipline": "srpt"}]}],
      "distribution": {"kind": "exponential", "mean": 2},
      "policies": ["sita_es", {"kind": "fpi", "base": "sita_e"}, {"kind": "rnd", "p": [0.25, 0.75]}],
      "reference_policy": "sita_es",
      "loads": [0.3],
      "jobs": 5000,
      "seed": 4,
      "value_check": {"disciplines": ["lifo"], "states": 2}
    })";
    const ExperimentConfig a = parse_config(text);
    const nlohmann::json ja = to_json(a);
    const ExperimentConfig b = parse_config(ja.dump());
    CHECK(to_json(b) == ja);
    CHECK(b.policies[2].p == std::vector<double>{0.25, 0.75});
    REQUIRE(b.value_check.has_value());
    CHECK(b.value_check->disciplines == std::vector<Discipline>{Discipline::lifo});
    CHECK(b.value_check->states == 2);

    for (const char* law : {R"({"kind": "bounded_pareto", "k": 0.5, "p": 100, "alpha": 1.2})",
                            R"({"kind": "uniform", "a": 0.5, "b": 1.5})", R"({"kind": "deterministic", "x": 2})",
                            R"({"kind": "discrete", "points": [[1, 0.2], [2, 0.8]]})"}) {
        const SizeLaw l = law_from_json(nlohmann::json::parse(law), "distribution");
        CHECK(law_to_json(law_from_json(law_to_json(l), "distribution")) == law_to_json(l));
    }
}

TEST_CASE("shipped configs parse") {
    for (const char* name : {"fifo_two_identical", "fifo_heterogeneous", "lifo_constellations", "value_check",
                             "uniform_fifo_vs_lifo"})
        CHECK_NOTHROW(load_config(std::string(SIZEAWARE_SOURCE_DIR) + "/configs/" + name + ".json"));
}
