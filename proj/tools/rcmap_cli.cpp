// rcmap_cli.cpp — Command-line front end for the figure pipelines and sweeps

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcmap/bench.hpp"
#include "rcmap/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
    std::string config;
    std::string out;
    std::optional<double> tol;
    std::optional<int> points;
};

rcmap::bench::ExperimentConfig resolve(rcmap::bench::Experiment e, const Options& o) {
    using namespace rcmap::bench;
    ExperimentConfig c = ExperimentConfig::defaults(e);
    if (!o.config.empty()) {
        c = load_config(o.config);
        if (c.experiment != e) {
            throw rcmap::ConfigError("config: file describes '" + to_string(c.experiment) +
                                     "' but the subcommand is '" + to_string(e) + "'");
        }
    }
    if (o.tol) {
        c.quad_tol = *o.tol;
        c.corr_tol = *o.tol;
    }
    if (o.points) {
        if (e == Experiment::fig2 || e == Experiment::custom_sweep) c.sweep.points = *o.points;
        else c.time_grid.points = *o.points;
    }
    if (!o.out.empty()) c.output_dir = o.out;
    validate(c);
    return c;
}

int run_experiment(rcmap::bench::Experiment e, const Options& o) {
    using namespace rcmap::bench;
    ExperimentConfig c;
    try {
        c = resolve(e, o);
    } catch (const rcmap::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kConfigError;
    } catch (const rcmap::ContractError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kConfigError;
    } catch (const std::exception& err) {
        std::cerr << "invalid model: " << err.what() << "\n";
        return kConfigError;
    }
    try {
        const RunResult r = run(c);
        write_outputs(r, c, c.output_dir);
        std::cout << r.summary.dump(2) << "\n";
        if (!r.all_ok) {
            std::cerr << "some points failed; see the error column\n";
            return kNumericalError;
        }
        return kOk;
    } catch (const std::exception& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return kNumericalError;
    }
}

int validate_only(const Options& o) {
    using namespace rcmap::bench;
    if (o.config.empty()) {
        std::cerr << "config error: validate-config needs --config\n";
        return kConfigError;
    }
    try {
        const ExperimentConfig c = load_config(o.config);
        std::cout << to_json(c).dump(2) << "\n";
        return kOk;
    } catch (const std::exception& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kConfigError;
    }
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--tol", o.tol, "relative tolerance for quadrature and correlations")
        ->check(CLI::PositiveNumber);
    sub->add_option("--points", o.points, "sweep points (fig2, sweep) or time points (fig3, fig4)")
        ->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    using rcmap::bench::Experiment;
    CLI::App app{"Reaction-coordinate mapping benchmark: GKLS versus exact Langevin steady states"};
    app.require_subcommand(1);

    Options o;
    auto* fig2 = app.add_subcommand("fig2", "fidelity and heat currents versus residual friction");
    auto* fig3 = app.add_subcommand("fig3", "scaled spectral density and integrated bath correlation");
    auto* fig4 = app.add_subcommand("fig4", "time evolution of <X_h^2> for the three GKLS models");
    auto* sweep = app.add_subcommand("sweep", "generic sweep over one parameter");
    auto* check = app.add_subcommand("validate-config", "parse and validate a configuration");
    for (auto* s : {fig2, fig3, fig4, sweep}) add_common(s, o);
    check->add_option("--config", o.config, "JSON experiment configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*fig2) return run_experiment(Experiment::fig2, o);
    if (*fig3) return run_experiment(Experiment::fig3, o);
    if (*fig4) return run_experiment(Experiment::fig4, o);
    if (*sweep) return run_experiment(Experiment::custom_sweep, o);
    return validate_only(o);
}
