// bench.cpp — Figure pipelines, sweeps and CSV/JSON output

#include "rcmap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rcmap/errors.hpp"
#include "rcmap/gaussian.hpp"
#include "rcmap/gkls.hpp"
#include "rcmap/qle.hpp"
#include "rcmap/spectral.hpp"

namespace rcmap::bench {

namespace {

const std::vector<std::string> kSweepVariables = {
    "log_gamma_ratio", "gamma", "k", "omega_h", "omega_c", "T_h", "T_c",
    "lambda", "omega0", "gamma_h", "cutoff_h", "residual_cutoff"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: '" + where + "." + key + "' has the wrong type");
    }
}

void read_grid(const json& j, Grid& g, const std::string& where, bool variable_allowed) {
    std::set<std::string> keys{"min", "max", "points", "scale"};
    if (variable_allowed) keys.insert("variable");
    check_keys(j, keys, where);
    read(j, "variable", g.variable, where);
    read(j, "min", g.min, where);
    read(j, "max", g.max, where);
    read(j, "points", g.points, where);
    if (j.contains("scale")) {
        std::string s;
        read(j, "scale", s, where);
        if (s != "lin" && s != "log") throw ConfigError("config: " + where + ".scale must be lin or log");
        g.log = s == "log";
    }
}

json grid_json(const Grid& g, bool with_variable) {
    json j;
    if (with_variable) j["variable"] = g.variable;
    j["min"] = g.min;
    j["max"] = g.max;
    j["points"] = g.points;
    j["scale"] = g.log ? "log" : "lin";
    return j;
}

void check_grid(const Grid& g, const std::string& where) {
    if (g.points < 1) throw ConfigError("config: " + where + " grid has no points");
    if (!std::isfinite(g.min) || !std::isfinite(g.max) || g.max < g.min) {
        throw ConfigError("config: " + where + " grid needs finite min <= max");
    }
    if (g.log && !(g.min > 0.0)) throw ConfigError("config: " + where + " log grid needs min > 0");
}

void check_positive(double v, const std::string& name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("config: " + name + " must be positive");
}

spectral::SpectralDensity hot_spectrum(const ExperimentConfig& c) {
    return spectral::SpectralDensity(spectral::OhmicAlgebraic{c.gamma_h, c.cutoff_h});
}

spectral::SpectralDensity cold_direct(const ExperimentConfig& c) {
    return spectral::SpectralDensity(spectral::Underdamped{c.gamma, c.lambda, c.omega0});
}

AugmentedParams augmented_params(const ExperimentConfig& c, const spectral::SpectralDensity& cold,
                                 bool shift = true) {
    AugmentedParams p;
    p.wire = c.wire;
    p.cold = cold;
    p.hot = hot_spectrum(c);
    p.T_h = c.T_h;
    p.T_c = c.T_c;
    p.shift_cold = shift;
    return p;
}

std::string join(const std::vector<std::string>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::string to_string(Experiment e) {
    switch (e) {
    case Experiment::fig2: return "fig2";
    case Experiment::fig3: return "fig3";
    case Experiment::fig4: return "fig4";
    case Experiment::custom_sweep: return "custom-sweep";
    }
    return "unknown";
}

Experiment experiment_from_string(const std::string& s) {
    if (s == "fig2") return Experiment::fig2;
    if (s == "fig3") return Experiment::fig3;
    if (s == "fig4") return Experiment::fig4;
    if (s == "custom-sweep" || s == "sweep") return Experiment::custom_sweep;
    throw ConfigError("config: unknown experiment '" + s + "'");
}

std::vector<double> Grid::values() const {
    std::vector<double> v;
    if (points == 1) return {min};
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        v.push_back(log ? min * std::pow(max / min, f) : min + f * (max - min));
    }
    return v;
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
    case Experiment::fig2:
        break;
    case Experiment::fig3:
        c.T_c = 0.5;
        break;
    case Experiment::fig4:
        c.wire = {0.1, 0.5, 0.4};
        c.T_h = 0.6;
        c.T_c = 0.5;
        c.time_grid = {"gamma_h_t", 1e-5, 50.0, 135, true};
        break;
    case Experiment::custom_sweep:
        c.gamma = 1.0;
        c.sweep = {"k", 0.2, 1.2, 11, false};
        break;
    }
    return c;
}

ExperimentConfig parse_config(const json& j) {
    check_keys(j, {"experiment", "wire", "hot", "cold", "T_h", "T_c", "residual_cutoff",
                   "cutoff_check_factor", "sweep", "omega_grid", "time_grid", "tolerances",
                   "fig2_ratio_gamma", "initial_state", "output_dir"},
               "config");
    std::string tag = "fig2";
    read(j, "experiment", tag, "config");
    ExperimentConfig c = ExperimentConfig::defaults(experiment_from_string(tag));
    if (j.contains("wire")) {
        const auto& w = j["wire"];
        check_keys(w, {"omega_h", "omega_c", "k"}, "wire");
        read(w, "omega_h", c.wire.omega_h, "wire");
        read(w, "omega_c", c.wire.omega_c, "wire");
        read(w, "k", c.wire.k, "wire");
    }
    if (j.contains("hot")) {
        const auto& h = j["hot"];
        check_keys(h, {"gamma", "cutoff"}, "hot");
        read(h, "gamma", c.gamma_h, "hot");
        read(h, "cutoff", c.cutoff_h, "hot");
    }
    if (j.contains("cold")) {
        const auto& k = j["cold"];
        check_keys(k, {"gamma", "lambda", "omega0", "alpha1", "alpha2", "gamma_scaled"}, "cold");
        read(k, "gamma", c.gamma, "cold");
        read(k, "lambda", c.lambda, "cold");
        read(k, "omega0", c.omega0, "cold");
        read(k, "alpha1", c.alpha1, "cold");
        read(k, "alpha2", c.alpha2, "cold");
        read(k, "gamma_scaled", c.gamma_scaled, "cold");
    }
    read(j, "T_h", c.T_h, "config");
    read(j, "T_c", c.T_c, "config");
    read(j, "residual_cutoff", c.residual_cutoff, "config");
    read(j, "cutoff_check_factor", c.cutoff_check_factor, "config");
    read(j, "fig2_ratio_gamma", c.fig2_ratio_gamma, "config");
    read(j, "output_dir", c.output_dir, "config");
    if (j.contains("sweep")) read_grid(j["sweep"], c.sweep, "sweep", true);
    if (j.contains("omega_grid")) read_grid(j["omega_grid"], c.omega_grid, "omega_grid", false);
    if (j.contains("time_grid")) read_grid(j["time_grid"], c.time_grid, "time_grid", false);
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, {"quadrature", "correlation"}, "tolerances");
        read(t, "quadrature", c.quad_tol, "tolerances");
        read(t, "correlation", c.corr_tol, "tolerances");
    }
    if (j.contains("initial_state")) {
        std::vector<std::vector<double>> rows;
        read(j, "initial_state", rows, "config");
        const auto n = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
                throw ConfigError("config: initial_state must be a square matrix");
            }
            for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
        c.initial_state = m;
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = to_string(c.experiment);
    j["wire"] = {{"omega_h", c.wire.omega_h}, {"omega_c", c.wire.omega_c}, {"k", c.wire.k}};
    j["hot"] = {{"gamma", c.gamma_h}, {"cutoff", c.cutoff_h}};
    j["cold"] = {{"gamma", c.gamma},   {"lambda", c.lambda}, {"omega0", c.omega0},
                 {"alpha1", c.alpha1}, {"alpha2", c.alpha2}, {"gamma_scaled", c.gamma_scaled}};
    j["T_h"] = c.T_h;
    j["T_c"] = c.T_c;
    j["residual_cutoff"] = c.residual_cutoff;
    j["cutoff_check_factor"] = c.cutoff_check_factor;
    j["sweep"] = grid_json(c.sweep, true);
    j["omega_grid"] = grid_json(c.omega_grid, false);
    j["time_grid"] = grid_json(c.time_grid, false);
    j["tolerances"] = {{"quadrature", c.quad_tol}, {"correlation", c.corr_tol}};
    j["fig2_ratio_gamma"] = c.fig2_ratio_gamma;
    if (c.initial_state) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < c.initial_state->rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < c.initial_state->cols(); ++k) row.push_back((*c.initial_state)(i, k));
            rows.push_back(row);
        }
        j["initial_state"] = rows;
    }
    j["output_dir"] = c.output_dir;
    return j;
}

ExperimentConfig with_parameter(ExperimentConfig c, const std::string& variable, double value) {
    if (variable == "log_gamma_ratio") c.gamma = c.gamma_h * std::exp(value);
    else if (variable == "gamma") c.gamma = value;
    else if (variable == "k") c.wire.k = value;
    else if (variable == "omega_h") c.wire.omega_h = value;
    else if (variable == "omega_c") c.wire.omega_c = value;
    else if (variable == "T_h") c.T_h = value;
    else if (variable == "T_c") c.T_c = value;
    else if (variable == "lambda") c.lambda = value;
    else if (variable == "omega0") c.omega0 = value;
    else if (variable == "gamma_h") c.gamma_h = value;
    else if (variable == "cutoff_h") c.cutoff_h = value;
    else if (variable == "residual_cutoff") c.residual_cutoff = value;
    else throw ConfigError("config: unknown sweep variable '" + variable + "'");
    return c;
}

void validate(const ExperimentConfig& c) {
    check_positive(c.wire.omega_h, "wire.omega_h");
    check_positive(c.wire.omega_c, "wire.omega_c");
    if (!std::isfinite(c.wire.k)) throw ConfigError("config: wire.k must be finite");
    check_positive(c.gamma_h, "hot.gamma");
    check_positive(c.cutoff_h, "hot.cutoff");
    check_positive(c.gamma, "cold.gamma");
    check_positive(c.lambda, "cold.lambda");
    check_positive(c.omega0, "cold.omega0");
    check_positive(c.alpha1, "cold.alpha1");
    check_positive(c.alpha2, "cold.alpha2");
    check_positive(c.gamma_scaled, "cold.gamma_scaled");
    check_positive(c.T_h, "T_h");
    check_positive(c.T_c, "T_c");
    check_positive(c.residual_cutoff, "residual_cutoff");
    check_positive(c.fig2_ratio_gamma, "fig2_ratio_gamma");
    if (!(c.cutoff_check_factor > 1.0)) throw ConfigError("config: cutoff_check_factor must be > 1");
    for (double tol : {c.quad_tol, c.corr_tol}) {
        if (!(tol > 0.0) || tol > 0.1) throw ConfigError("config: tolerances must lie in (0, 0.1]");
    }

    switch (c.experiment) {
    case Experiment::fig2:
    case Experiment::custom_sweep: {
        check_grid(c.sweep, "sweep");
        if (std::find(kSweepVariables.begin(), kSweepVariables.end(), c.sweep.variable) ==
            kSweepVariables.end()) {
            throw ConfigError("config: unknown sweep variable '" + c.sweep.variable + "'");
        }
        for (double v : c.sweep.values()) {
            const auto cc = with_parameter(c, c.sweep.variable, v);
            check_positive(cc.gamma, "cold.gamma");
            const auto p = augmented_params(cc, cold_direct(cc));
            normal_modes(build_augmented(p));
            const auto wm = qle::wire_model(cc.wire, hot_spectrum(cc), cold_direct(cc), cc.T_h, cc.T_c);
            for (const auto& m : {wm, qle::augmented_model(p, cc.residual_cutoff)}) {
                const auto rep = qle::stability_scan(m, 0.0);
                if (!rep.stable) {
                    throw ModelError("config: " + m.label + " unstable at " + c.sweep.variable +
                                     " = " + format_number(v) + ": " + rep.message);
                }
            }
        }
        break;
    }
    case Experiment::fig3:
        check_grid(c.omega_grid, "omega_grid");
        check_grid(c.time_grid, "time_grid");
        break;
    case Experiment::fig4: {
        check_grid(c.time_grid, "time_grid");
        if (c.initial_state) {
            if (c.initial_state->rows() != 6) {
                throw ConfigError("config: initial_state must be 6x6 (hot, cold, RC)");
            }
            try {
                gaussian::CovarianceMatrix C(*c.initial_state);
                if (!gaussian::is_physical(C).physical) {
                    throw ConfigError("config: initial_state is not a physical covariance matrix");
                }
            } catch (const ContractError& e) {
                throw ConfigError(std::string("config: initial_state: ") + e.what());
            }
        }
        const auto cold = spectral::scaled_underdamped(c.alpha1, c.alpha2, c.gamma_scaled);
        normal_modes(build_augmented(augmented_params(c, cold, true)));
        normal_modes(build_augmented(augmented_params(c, cold, false)));
        break;
    }
    }
}

SweepRow evaluate_point(const ExperimentConfig& c, double value, const std::string& variable) {
    SweepRow row;
    row.value = value;
    try {
        const ExperimentConfig cc = with_parameter(c, variable, value);
        row.gamma = cc.gamma;
        const auto cold = cold_direct(cc);
        const auto hot = hot_spectrum(cc);
        const auto p = augmented_params(cc, cold);

        const auto net = build_augmented(p);
        const auto basis = normal_modes(net);
        const auto diag = gkls::validity_diagnostics(net, basis);
        row.secular_ratio = diag.secular_ratio;
        row.weak_coupling_ratio = diag.weak_coupling_ratio;
        if (!diag.secular_ok) row.flags.push_back("secular");
        if (!diag.weak_coupling_ok) row.flags.push_back("weak-coupling");

        const auto me = gkls::steady_state(net, basis);
        const auto qme = gkls::heat_currents(net, basis, me);
        row.q_hot_me = qme.at("hot");
        row.q_cold_me = qme.at("residual");
        row.conservation_me = qme.conservation_residual;

        const auto wm = qle::wire_model(cc.wire, hot, cold, cc.T_h, cc.T_c);
        const auto ex2 = qle::exact_steady_state(wm, cc.quad_tol);
        const auto q2 = qle::exact_heat_currents(wm, ex2);
        row.q_hot_ex = q2.at("hot");
        row.q_cold_ex = q2.at("cold");
        row.dual_form_ex = q2.dual_form_residual;

        const auto am = qle::augmented_model(p, cc.residual_cutoff);
        const auto ex3 = qle::exact_steady_state(am, cc.quad_tol);
        const auto q3 = qle::exact_heat_currents(am, ex3);
        row.q_hot_ex3 = q3.at("hot");
        row.q_res_ex3 = q3.at("residual");
        row.conservation_ex3 = q3.conservation_residual;
        row.dual_form_ex = std::max(row.dual_form_ex, q3.dual_form_residual);

        const auto am10 = qle::augmented_model(p, cc.cutoff_check_factor * cc.residual_cutoff);
        const auto ex3b = qle::exact_steady_state(am10, cc.quad_tol);

        row.fidelity_reduced = gaussian::uhlmann_fidelity(gaussian::reduce(me, {0, 1}), ex2.covariance);
        row.fidelity_augmented = gaussian::uhlmann_fidelity(me, ex3.covariance);
        row.fidelity_mapping =
            gaussian::uhlmann_fidelity(gaussian::reduce(ex3.covariance, {0, 1}), ex2.covariance);
        row.cutoff_shift_augmented =
            std::abs(gaussian::uhlmann_fidelity(me, ex3b.covariance) - row.fidelity_augmented);
        row.cutoff_shift_mapping = std::abs(
            gaussian::uhlmann_fidelity(gaussian::reduce(ex3b.covariance, {0, 1}), ex2.covariance) -
            row.fidelity_mapping);

        row.physical = gaussian::is_physical(me).physical &&
                       gaussian::is_physical(ex2.covariance, 1e-6).physical &&
                       gaussian::is_physical(ex3.covariance, 1e-6).physical &&
                       gaussian::is_physical(ex3b.covariance, 1e-6).physical;
        if (!row.physical) row.flags.push_back("unphysical");
        if (row.conservation_me > 1e-8) row.flags.push_back("conservation-me");
        if (row.conservation_ex3 > 10.0 * cc.quad_tol) row.flags.push_back("conservation-exact");
    } catch (const std::exception& e) {
        row.error = e.what();
        row.flags.push_back("failed");
    }
    return row;
}

std::optional<double> falling_crossing(const std::vector<double>& x, const std::vector<double>& y,
                                       double level) {
    for (std::size_t i = 0; i + 1 < x.size() && i + 1 < y.size(); ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(y[i + 1])) continue;
        if (y[i] >= level && y[i + 1] < level) {
            const double f = (y[i] - level) / (y[i] - y[i + 1]);
            return std::exp(std::log(x[i]) + f * (std::log(x[i + 1]) - std::log(x[i])));
        }
    }
    return std::nullopt;
}

double opposite_trend_decades(const std::vector<double>& x, const std::vector<double>& a,
                              const std::vector<double>& b, double x_from) {
    double best = 0.0;
    double run_start = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        bool opposite = false;
        if (x[i] >= x_from && a[i] > 0 && a[i + 1] > 0 && b[i] > 0 && b[i + 1] > 0) {
            const double sa = std::log(a[i + 1] / a[i]);
            const double sb = std::log(b[i + 1] / b[i]);
            opposite = sa * sb < 0.0;
        }
        if (opposite) {
            if (std::isnan(run_start)) run_start = x[i];
            best = std::max(best, std::log10(x[i + 1] / run_start));
        } else {
            run_start = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return best;
}

Saturation detect_saturation(const std::vector<double>& t, const std::vector<double>& re,
                             double plateau, double band) {
    Saturation s;
    const std::size_t n = std::min(t.size(), re.size());
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::abs(re[i] - plateau);

    // Band time: last excursion outside the band, then the next sample.
    for (std::size_t i = n; i-- > 0;) {
        if (d[i] > band * std::abs(plateau)) {
            if (i + 1 < n) s.band_time = t[i + 1];
            break;
        }
        if (i == 0) s.band_time = t[0];
    }

    // Time constant from the last decreasing pair still well above round-off.
    const double floor = 1e-4 * std::abs(plateau);
    for (std::size_t i = n - 1; i-- > 0;) {
        if (d[i + 1] >= floor && d[i] > d[i + 1] && t[i] > 0.0) {
            s.time_constant = (t[i + 1] - t[i]) / std::log(d[i] / d[i + 1]);
            break;
        }
    }
    return s;
}

namespace {

std::vector<Cell> row_cells(const SweepRow& r, bool fidelity_table) {
    if (fidelity_table) {
        return {r.value,
                r.gamma,
                r.fidelity_reduced,
                r.fidelity_augmented,
                r.fidelity_mapping,
                r.cutoff_shift_augmented,
                r.cutoff_shift_mapping,
                r.secular_ratio,
                r.weak_coupling_ratio,
                std::string(r.physical ? "1" : "0"),
                join(r.flags, ';'),
                r.error};
    }
    return {r.value,     r.gamma,     r.q_hot_me,        r.q_cold_me,        r.q_hot_ex,
            r.q_cold_ex, r.q_hot_ex3, r.q_res_ex3,       r.conservation_me,  r.conservation_ex3,
            r.dual_form_ex, join(r.flags, ';'), r.error};
}

const std::vector<std::string> kFidelityColumns = {
    "value", "gamma", "fidelity_reduced", "fidelity_augmented", "fidelity_mapping",
    "cutoff_shift_augmented", "cutoff_shift_mapping", "secular_ratio", "weak_coupling_ratio",
    "physical", "flags", "error"};
const std::vector<std::string> kCurrentColumns = {
    "value", "gamma", "q_hot_me", "q_residual_me", "q_hot_exact", "q_cold_exact",
    "q_hot_exact3", "q_residual_exact3", "conservation_me", "conservation_exact3",
    "dual_form_exact", "flags", "error"};

std::vector<SweepRow> sweep_rows(const ExperimentConfig& c) {
    std::vector<SweepRow> rows;
    for (double v : c.sweep.values()) rows.push_back(evaluate_point(c, v, c.sweep.variable));
    return rows;
}

json row_json(const SweepRow& r) {
    return {{"value", r.value},
            {"gamma", r.gamma},
            {"fidelity_reduced", r.fidelity_reduced},
            {"fidelity_augmented", r.fidelity_augmented},
            {"q_hot_me", r.q_hot_me},
            {"q_hot_exact", r.q_hot_ex},
            {"flags", r.flags},
            {"error", r.error}};
}

} // namespace

RunResult run_fig2(const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult out;
    out.rows = sweep_rows(c);

    Table fid{"fig2_fidelity", kFidelityColumns, {}};
    Table cur{"fig2_currents", kCurrentColumns, {}};
    std::vector<double> g, fr, fa, qme, qex;
    int failures = 0;
    double max_shift_aug = 0.0;
    double max_shift_map = 0.0;
    double min_map = 1.0;
    for (const auto& r : out.rows) {
        fid.rows.push_back(row_cells(r, true));
        cur.rows.push_back(row_cells(r, false));
        if (!r.ok()) {
            ++failures;
            continue;
        }
        g.push_back(r.gamma);
        fr.push_back(r.fidelity_reduced);
        fa.push_back(r.fidelity_augmented);
        qme.push_back(r.q_hot_me);
        qex.push_back(r.q_hot_ex);
        max_shift_aug = std::max(max_shift_aug, r.cutoff_shift_augmented);
        max_shift_map = std::max(max_shift_map, r.cutoff_shift_mapping);
        min_map = std::min(min_map, r.fidelity_mapping);
    }
    out.tables = {fid, cur};

    const auto cross_reduced = falling_crossing(g, fr, 0.95);
    const auto cross_aug = falling_crossing(g, fa, 0.95);
    const SweepRow at_ratio = evaluate_point(c, c.fig2_ratio_gamma, "gamma");
    const double trend = cross_reduced ? opposite_trend_decades(g, qme, qex, *cross_reduced) : 0.0;

    out.all_ok = failures == 0 && at_ratio.ok();
    out.summary = {
        {"experiment", "fig2"},
        {"points", out.rows.size()},
        {"failures", failures},
        {"crossing_gamma_reduced", optional_number(cross_reduced)},
        {"crossing_gamma_augmented", optional_number(cross_aug)},
        {"ratio_gamma", c.fig2_ratio_gamma},
        {"current_ratio_me_over_exact",
         at_ratio.ok() && at_ratio.q_hot_ex != 0.0 ? json(at_ratio.q_hot_me / at_ratio.q_hot_ex)
                                                    : json(nullptr)},
        {"ratio_point", row_json(at_ratio)},
        {"opposite_trend_decades_beyond_crossing", trend},
        {"residual_cutoff", c.residual_cutoff},
        {"cutoff_check_factor", c.cutoff_check_factor},
        {"max_cutoff_shift_augmented", max_shift_aug},
        {"max_cutoff_shift_mapping", max_shift_map},
        {"min_fidelity_mapping", min_map},
        {"runtime_seconds", seconds_since(t0)}};
    return out;
}

RunResult run_custom_sweep(const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult out;
    out.rows = sweep_rows(c);
    Table fid{"sweep_fidelity", kFidelityColumns, {}};
    Table cur{"sweep_currents", kCurrentColumns, {}};
    int failures = 0;
    json sign_changes = json::array();
    const SweepRow* prev = nullptr;
    for (const auto& r : out.rows) {
        fid.rows.push_back(row_cells(r, true));
        cur.rows.push_back(row_cells(r, false));
        if (!r.ok()) {
            ++failures;
            continue;
        }
        if (prev && (prev->q_hot_ex > 0) != (r.q_hot_ex > 0)) {
            sign_changes.push_back({{"between", {prev->value, r.value}}});
        }
        prev = &r;
    }
    out.tables = {fid, cur};
    out.all_ok = failures == 0;
    out.summary = {{"experiment", "custom-sweep"},
                   {"variable", c.sweep.variable},
                   {"points", out.rows.size()},
                   {"failures", failures},
                   {"exact_current_sign_changes", sign_changes},
                   {"runtime_seconds", seconds_since(t0)}};
    return out;
}

RunResult run_fig3(const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult out;
    const auto scaled = spectral::scaled_underdamped(c.alpha1, c.alpha2, c.gamma_scaled);
    const auto limit = spectral::overdamped_limit(c.alpha1, c.alpha2);

    Table js{"fig3_spectral_density", {"omega", "J_scaled", "J_limit", "relative_difference"}, {}};
    double max_rel_low = 0.0;
    for (double w : c.omega_grid.values()) {
        const double a = spectral::evaluate(scaled, w);
        const double b = spectral::evaluate(limit, w);
        const double rel = std::abs(a - b) / b;
        if (w <= 10.0) max_rel_low = std::max(max_rel_low, rel);
        js.rows.push_back({w, a, b, rel});
    }

    Table corr{"fig3_integrated_correlation", {"gamma_h_t", "t", "re", "im", "abs"}, {}};
    std::vector<double> times{0.0};
    for (double x : c.time_grid.values()) times.push_back(x);
    std::vector<double> re;
    int failures = 0;
    std::string first_error;
    for (double x : times) {
        const double t = x / c.gamma_h;
        try {
            const auto v = spectral::integrated_correlation(scaled, c.T_c, t, c.corr_tol);
            corr.rows.push_back({x, t, v.real(), v.imag(), std::abs(v)});
            re.push_back(v.real());
        } catch (const std::exception& e) {
            ++failures;
            if (first_error.empty()) first_error = e.what();
            const double nan = std::numeric_limits<double>::quiet_NaN();
            corr.rows.push_back({x, t, nan, nan, nan});
            re.push_back(nan);
        }
    }
    const double plateau_re = c.T_c * spectral::low_frequency_friction(scaled);
    const double plateau_im = -0.5 * spectral::renormalisation_shift(scaled);
    const auto sat = detect_saturation(times, re, plateau_re);

    out.tables = {js, corr};
    out.all_ok = failures == 0;
    out.summary = {{"experiment", "fig3"},
                   {"temperature", c.T_c},
                   {"saturation_time_gamma_h_t", finite_or_null(sat.time_constant)},
                   {"plateau_band_time_gamma_h_t", finite_or_null(sat.band_time)},
                   {"plateau_band", 0.01},
                   {"plateau_re", plateau_re},
                   {"plateau_im", plateau_im},
                   {"max_relative_difference_omega_le_10", max_rel_low},
                   {"failures", failures},
                   {"first_error", first_error},
                   {"runtime_seconds", seconds_since(t0)}};
    return out;
}

RunResult run_fig4(const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult out;
    const auto hot = hot_spectrum(c);
    const auto cold = spectral::scaled_underdamped(c.alpha1, c.alpha2, c.gamma_scaled);
    const auto cold_limit = spectral::overdamped_limit(c.alpha1, c.alpha2);

    const auto wire = build_wire(c.wire, false, 0.0,
                                 {{0, hot, c.T_h, "hot"}, {1, cold_limit, c.T_c, "cold"}}, "wire");
    const auto p_shift = augmented_params(c, cold, true);
    const auto p_plain = augmented_params(c, cold, false);
    const auto aug = build_augmented(p_shift, "augmented");
    const auto plain = build_augmented(p_plain, "augmented-unshifted");
    const auto bw = normal_modes(wire);
    const auto ba = normal_modes(aug);
    const auto bp = normal_modes(plain);

    gaussian::CovarianceMatrix C0a = [&] {
        if (c.initial_state) return gaussian::CovarianceMatrix(*c.initial_state);
        const auto& V = wire.V();
        const double w0 = cold.as<spectral::Underdamped>().resonance;
        return gaussian::direct_sum({gaussian::thermal_oscillator(std::sqrt(V(0, 0)), c.T_h),
                                     gaussian::thermal_oscillator(std::sqrt(V(1, 1)), c.T_c),
                                     gaussian::thermal_oscillator(w0, c.T_c)});
    }();
    const auto C0w = gaussian::reduce(C0a, {0, 1});

    std::vector<double> gt{0.0};
    for (double x : c.time_grid.values()) gt.push_back(x);
    std::vector<double> times;
    for (double x : gt) times.push_back(x / c.gamma_h);
    const auto tw = gkls::propagate(wire, bw, C0w, times);
    const auto ta = gkls::propagate(aug, ba, C0a, times);
    const auto tp = gkls::propagate(plain, bp, C0a, times);

    Table traj{"fig4_trajectories", {"gamma_h_t", "t", "xh2_wire", "xh2_augmented", "xh2_unshifted", "physical"}, {}};
    double sup_shift = 0.0;
    double sup_plain = 0.0;
    double sup_plain_at = 0.0;
    int unphysical = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double a = tw.states[i].xx(0, 0);
        const double b = ta.states[i].xx(0, 0);
        const double p = tp.states[i].xx(0, 0);
        sup_shift = std::max(sup_shift, std::abs(b - a) / std::abs(a));
        const double dp = std::abs(p - a) / std::abs(a);
        if (dp > sup_plain) {
            sup_plain = dp;
            sup_plain_at = gt[i];
        }
        const bool phys = gaussian::is_physical(tw.states[i]).physical &&
                          gaussian::is_physical(ta.states[i]).physical &&
                          gaussian::is_physical(tp.states[i]).physical;
        if (!phys) ++unphysical;
        traj.rows.push_back({gt[i], times[i], a, b, p, std::string(phys ? "1" : "0")});
    }

    const double rc_shift = gkls::steady_state(aug, ba).xx(2, 2);
    const double rc_plain = gkls::steady_state(plain, bp).xx(2, 2);
    double rc_exact = std::numeric_limits<double>::quiet_NaN();
    std::string exact_error;
    try {
        rc_exact = qle::exact_steady_covariance(qle::augmented_model(p_shift, c.residual_cutoff),
                                                c.quad_tol).xx(2, 2);
    } catch (const std::exception& e) {
        exact_error = e.what();
    }
    Table stat{"fig4_stationary_rc", {"method", "x_rc2"}, {}};
    stat.rows.push_back({std::string("gkls-shifted"), rc_shift});
    stat.rows.push_back({std::string("gkls-unshifted"), rc_plain});
    stat.rows.push_back({std::string("exact"), rc_exact});

    const auto diag = gkls::validity_diagnostics(wire, bw);
    json modes = json::array();
    for (int j = 0; j < bw.size(); ++j) modes.push_back(bw.Omega(j));

    out.tables = {traj, stat};
    out.all_ok = unphysical == 0 && exact_error.empty();
    out.summary = {{"experiment", "fig4"},
                   {"wire_normal_modes", modes},
                   {"wire_secular_ratio", diag.secular_ratio},
                   {"wire_weak_coupling_ratio", diag.weak_coupling_ratio},
                   {"sup_relative_deviation_shifted", sup_shift},
                   {"peak_relative_deviation_unshifted", sup_plain},
                   {"peak_unshifted_at_gamma_h_t", sup_plain_at},
                   {"deviation_ratio", sup_shift > 0.0 ? json(sup_plain / sup_shift) : json(nullptr)},
                   {"x_rc2_gkls_shifted", rc_shift},
                   {"x_rc2_gkls_unshifted", rc_plain},
                   {"x_rc2_exact", finite_or_null(rc_exact)},
                   {"x_rc2_relative_gap", finite_or_null(std::abs(rc_shift - rc_exact) / rc_exact)},
                   {"exact_error", exact_error},
                   {"time_grid_gamma_h_t", {{"min", c.time_grid.min}, {"max", c.time_grid.max},
                                            {"points", c.time_grid.points + 1}, {"includes_zero", true}}},
                   {"initial_state", c.initial_state ? "explicit" : "thermal product"},
                   {"unphysical_snapshots", unphysical},
                   {"runtime_seconds", seconds_since(t0)}};
    return out;
}

RunResult run(const ExperimentConfig& c) {
    switch (c.experiment) {
    case Experiment::fig2: return run_fig2(c);
    case Experiment::fig3: return run_fig3(c);
    case Experiment::fig4: return run_fig4(c);
    case Experiment::custom_sweep: return run_custom_sweep(c);
    }
    throw ConfigError("config: unknown experiment");
}

std::string to_csv(const Table& t, const json& config) {
    std::ostringstream os;
    std::istringstream cfg(config.dump(2));
    for (std::string line; std::getline(cfg, line);) os << "# " << line << "\r\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << quote(t.columns[i]);
    }
    os << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            if (const auto* d = std::get_if<double>(&row[i])) os << format_number(*d);
            else os << quote(std::get<std::string>(row[i]));
        }
        os << "\r\n";
    }
    return os.str();
}

void write_outputs(const RunResult& r, const ExperimentConfig& c, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const json cfg = to_json(c);
    for (const auto& t : r.tables) {
        std::ofstream f(dir / (t.name + ".csv"), std::ios::binary);
        f << to_csv(t, cfg);
        if (!f) throw std::runtime_error("cannot write " + (dir / (t.name + ".csv")).string());
    }
    json s = r.summary;
    s["config"] = cfg;
    std::string name = to_string(c.experiment);
    std::replace(name.begin(), name.end(), '-', '_');
    std::ofstream f(dir / (name + "_summary.json"));
    f << s.dump(2) << "\n";
    if (!f) throw std::runtime_error("cannot write summary in " + dir.string());
}

} // namespace rcmap::bench
