// bench.hpp — Experiment configurations, figure pipelines and tabular output

#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rcmap/network.hpp"

namespace rcmap::bench {

using json = nlohmann::ordered_json;

enum class Experiment { fig2, fig3, fig4, custom_sweep };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s); // ConfigError on unknown tags

struct Grid {
    std::string variable;
    double min{0.0};
    double max{1.0};
    int points{2};
    bool log{false};

    std::vector<double> values() const;
};

struct ExperimentConfig {
    Experiment experiment{Experiment::fig2};
    WireParams wire;
    double gamma_h{1e-3};  // hot Ohmic-algebraic friction
    double cutoff_h{1e3};  // hot cutoff
    // Cold underdamped spectrum, direct form (fig2, custom sweeps).
    double gamma{1e-3};
    double lambda{0.9};
    double omega0{4.0};
    // Cold underdamped spectrum, scaled form (fig3, fig4).
    double alpha1{1e-3};
    double alpha2{1e3};
    double gamma_scaled{1e3};
    double T_h{3.3};
    double T_c{1.2};
    double residual_cutoff{1e3};
    double cutoff_check_factor{10.0};
    Grid sweep{"log_gamma_ratio", 0.0, 11.0, 45, false};
    Grid omega_grid{"omega", 1e-2, 1e5, 141, true};
    Grid time_grid{"gamma_h_t", 1e-7, 1e-1, 121, true}; // zero is always prepended
    double quad_tol{1e-8};
    double corr_tol{1e-8};
    double fig2_ratio_gamma{60.0};
    std::optional<Eigen::MatrixXd> initial_state; // fig4: 6x6, node order (hot, cold, RC)
    std::string output_dir{"out"};

    static ExperimentConfig defaults(Experiment e);
};

// Merges `j` onto the defaults for j["experiment"]. Unknown keys, wrong types
// and invalid values raise ConfigError.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
json to_json(const ExperimentConfig& c);

// Range checks plus model construction for every grid point; throws
// ConfigError (or ModelError for physically invalid models).
void validate(const ExperimentConfig& c);

// Config with one named parameter replaced.
ExperimentConfig with_parameter(ExperimentConfig c, const std::string& variable, double value);

struct SweepRow {
    double value{0.0};
    double gamma{0.0};
    double fidelity_reduced{0.0};   // reduced GKLS (3-node) vs exact wire
    double fidelity_augmented{0.0}; // GKLS vs exact, both 3-node
    double fidelity_mapping{0.0};   // exact 3-node reduced vs exact wire
    double cutoff_shift_augmented{0.0}; // |change| under residual cutoff x factor
    double cutoff_shift_mapping{0.0};
    double q_hot_me{0.0};
    double q_cold_me{0.0}; // residual bath into the augmented system
    double q_hot_ex{0.0};  // exact wire
    double q_cold_ex{0.0};
    double q_hot_ex3{0.0};
    double q_res_ex3{0.0};
    double conservation_me{0.0};
    double conservation_ex3{0.0};
    double dual_form_ex{0.0};
    double secular_ratio{0.0};
    double weak_coupling_ratio{0.0};
    bool physical{true};
    std::vector<std::string> flags;
    std::string error;

    bool ok() const { return error.empty(); }
};

// Full two-method comparison at one parameter point; never throws, failures
// go into row.error.
SweepRow evaluate_point(const ExperimentConfig& c, double value, const std::string& variable);

using Cell = std::variant<double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct RunResult {
    std::vector<Table> tables;
    std::vector<SweepRow> rows;
    json summary;
    bool all_ok{true};
};

RunResult run_fig2(const ExperimentConfig& c);
RunResult run_fig3(const ExperimentConfig& c);
RunResult run_fig4(const ExperimentConfig& c);
RunResult run_custom_sweep(const ExperimentConfig& c);
RunResult run(const ExperimentConfig& c);

// Level crossing of y(x) from above, by linear interpolation in ln(x) between
// the bracketing samples; nullopt if y never drops below `level`.
std::optional<double> falling_crossing(const std::vector<double>& x, const std::vector<double>& y,
                                       double level);

// Longest span (in decades of x) beyond x_from where the log-slopes of a and b
// have opposite signs at every step.
double opposite_trend_decades(const std::vector<double>& x, const std::vector<double>& a,
                              const std::vector<double>& b, double x_from);

// Saturation of Re int_0^t C: e-folding time of the late approach to the
// plateau, and the time after which it stays within `band` of the plateau.
struct Saturation {
    double time_constant{std::numeric_limits<double>::quiet_NaN()};
    double band_time{std::numeric_limits<double>::quiet_NaN()};
};
Saturation detect_saturation(const std::vector<double>& t, const std::vector<double>& re,
                             double plateau, double band = 0.01);

// RFC 4180 CSV, 17 significant digits, preceded by '# ' lines holding the
// resolved configuration.
std::string to_csv(const Table& t, const json& config);

// Writes <name>.csv per table and <experiment>_summary.json into dir.
void write_outputs(const RunResult& r, const ExperimentConfig& c, const std::filesystem::path& dir);

} // namespace rcmap::bench
