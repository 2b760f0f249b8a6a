#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sizeaware/analytic.hpp"
#include "sizeaware/commands.hpp"
#include "sizeaware/config.hpp"
#include "sizeaware/dispatch.hpp"
#include "sizeaware/sim.hpp"
#include "sizeaware/value.hpp"

namespace py = pybind11;
using namespace sizeaware;

namespace {

JobSizeDistribution distribution_from(const py::dict& d) {
    const auto text = py::module_::import("json").attr("dumps")(d).cast<std::string>();
    return JobSizeDistribution(law_from_json(nlohmann::json::parse(text), "distribution"));
}

HoldingCostModel model_from(const std::string& name) {
    if (name == "slowdown") return HoldingCostModel::slowdown();
    if (name == "sojourn") return HoldingCostModel::sojourn();
    throw py::value_error("cost model must be 'slowdown' or 'sojourn'");
}

std::vector<ValueJob> jobs_from(const std::vector<std::tuple<double, double, double>>& z) {
    std::vector<ValueJob> out;
    for (const auto& [rem, orig, b] : z) out.push_back({rem, orig, b});
    return out;
}

}  // namespace

PYBIND11_MODULE(_sizeaware, m) {
    m.doc() = "Size-aware dispatching and scheduling in parallel queues";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_ArithmeticError);

    m.def("fifo_mean_slowdown",
          [](double lambda, const py::dict& dist, double rate) {
              return fifo_mean_slowdown({lambda, distribution_from(dist), rate}).raw();
          },
          py::arg("lam"), py::arg("distribution"), py::arg("rate") = 1.0,
          "Mean slowdown of an M/G/1-FIFO queue; inf when E[1/X] diverges.");
    m.def("lifo_conditional_slowdown", py::overload_cast<double>(&lifo_conditional_slowdown), py::arg("rho"));
    m.def("fifo_better_than_lifo", [](const py::dict& dist) { return fifo_better_than_lifo(distribution_from(dist)); },
          py::arg("distribution"));
    m.def("rnd_lifo_system_slowdown",
          [](const std::vector<double>& p, const std::vector<double>& rates, double lambda, double mean_size) {
              return rnd_lifo_system_slowdown(p, rates, lambda, mean_size);
          },
          py::arg("p"), py::arg("rates"), py::arg("lam"), py::arg("mean_size"));
    m.def("rnd_opt_probabilities",
          [](const std::vector<double>& rates, double lambda, double mean_size) {
              return rnd_opt_probabilities(rates, lambda, mean_size);
          },
          py::arg("rates"), py::arg("lam"), py::arg("mean_size"));
    m.def("sita_e_thresholds",
          [](const py::dict& dist, const std::vector<double>& rates) {
              return sita_e_thresholds(distribution_from(dist), rates);
          },
          py::arg("distribution"), py::arg("rates"));

    m.def("value",
          [](const std::string& discipline, double lambda, const py::dict& dist, const std::string& model,
             const std::vector<std::tuple<double, double, double>>& z) {
              const ValueContext ctx(lambda, distribution_from(dist), 1.0, model_from(model));
              return value_of(ctx, parse_discipline(discipline), jobs_from(z));
          },
          py::arg("discipline"), py::arg("lam"), py::arg("distribution"), py::arg("model"), py::arg("jobs"),
          "Relative value v_z - v_0; jobs are (remaining, original, holding rate) in service order.");
    m.def("admit",
          [](const std::string& discipline, double lambda, const py::dict& dist, const std::string& model,
             const std::vector<std::tuple<double, double, double>>& z, double x) {
              const ValueContext ctx(lambda, distribution_from(dist), 1.0, model_from(model));
              return admit_of(ctx, parse_discipline(discipline), jobs_from(z), x);
          },
          py::arg("discipline"), py::arg("lam"), py::arg("distribution"), py::arg("model"), py::arg("jobs"),
          py::arg("x"));
    m.def("estimate_value",
          [](const std::string& discipline, double lambda, const py::dict& dist, const std::string& model,
             const std::vector<std::tuple<double, double, double>>& z, std::size_t replications, std::uint64_t seed) {
              const ValueContext ctx(lambda, distribution_from(dist), 1.0, model_from(model));
              const Discipline d = parse_discipline(discipline);
              const auto jobs = jobs_from(z);
              ValueEstimate e;
              {
                  py::gil_scoped_release release;
                  e = estimate_value_paired(d, ctx, jobs, replications, seed);
              }
              return py::make_tuple(e.estimate, e.half_width);
          },
          py::arg("discipline"), py::arg("lam"), py::arg("distribution"), py::arg("model"), py::arg("jobs"),
          py::arg("replications"), py::arg("seed") = 1, "Paired-simulation estimate and 95% half-width.");

    m.def("simulate",
          [](const std::string& config_json, bool quick) {
              const ExperimentConfig cfg = parse_config(config_json);
              std::ostringstream out, log;
              {
                  py::gil_scoped_release release;
                  write_simulate_csv(cfg, quick, out, log);
              }
              return out.str();
          },
          py::arg("config_json"), py::arg("quick") = false, "Runs the simulate command and returns its CSV.");
    m.def("analytic",
          [](const std::string& config_json) {
              std::ostringstream out;
              write_analytic_csv(parse_config(config_json), out);
              return out.str();
          },
          py::arg("config_json"), "Runs the analytic command and returns its CSV.");
    m.attr("simulate_columns") = simulate_columns;
    m.attr("analytic_columns") = analytic_columns;
    m.attr("value_check_columns") = value_check_columns;
}
