#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sizeaware/commands.hpp"

int main(int argc, char** argv) {
    using namespace sizeaware;

    CLI::App app{"Size-aware dispatching and scheduling experiments"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out", opts.out_path, "CSV output path (default: config output, else stdout)");
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_flag("--quick", opts.quick, "Reduced job and replication counts");
    };
    auto* simulate = app.add_subcommand("simulate", "Simulate every (system, load, policy) cell");
    add_common(simulate);
    auto* analytic = app.add_subcommand("analytic", "Closed-form quantities for the configured systems");
    add_common(analytic);
    auto* value_check = app.add_subcommand("value-check", "Closed-form relative values against paired simulation");
    add_common(value_check);

    ValidateOptions vopts;
    auto* validate = app.add_subcommand("validate", "Run the acceptance criteria");
    validate->add_option("--out", vopts.out_path, "Also write the report to this file");
    validate->add_option("--seed", seed, "Base seed of the acceptance runs");
    validate->add_flag("--quick", vopts.quick, "Reduced counts; results are indicative");
    validate->add_option("--only", vopts.only, "Run only these criteria")->check(CLI::Range(1, 9));
    validate->add_option("--perturb-fifo", vopts.fifo_perturbation,
                         "Scale the FIFO backlog coefficient (mutation check)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    auto seed_given = [&](CLI::App* sub) { return sub->count("--seed") > 0; };
    if (*simulate || *analytic || *value_check) {
        CLI::App* sub = *simulate ? simulate : *analytic ? analytic : value_check;
        if (seed_given(sub)) opts.seed = seed;
        if (*simulate) return cmd_simulate(opts, std::cerr);
        if (*analytic) return cmd_analytic(opts, std::cerr);
        return cmd_value_check(opts, std::cerr);
    }
    if (seed_given(validate)) vopts.seed = seed;
    return cmd_validate(vopts, std::cout);
}
