// spectral.cpp — Spectral densities, kernels and correlation quadratures

#include "rcmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "rcmap/errors.hpp"
#include "rcmap/quadrature.hpp"

namespace rcmap::spectral {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ContractError(std::string("spectral density parameter '") + name +
                            "' must be positive and finite");
    }
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double max_structure(const SpectralDensity& J) {
    auto f = characteristic_frequencies(J);
    return f.empty() ? 1.0 : *std::max_element(f.begin(), f.end());
}

struct GslCall {
    const std::function<double(double)>* f;
};

double gsl_trampoline(double x, void* params) {
    return (*static_cast<GslCall*>(params)->f)(x);
}

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
struct TableDeleter {
    void operator()(gsl_integration_qawo_table* t) const { gsl_integration_qawo_table_free(t); }
};

// (1/pi) int_0^inf body(w) dw where body(w) = g(w) cos(wt) (or sin) for w > 0.
// [0, pi/t] goes through the adaptive rule (body may be regular where g is
// not); the rest through QAWF, with absolute accuracy rel_tol * int |body|.
double oscillatory_integral(const std::function<double(double)>& body,
                            const std::function<double(double)>& g, double t, bool cosine,
                            double structure, double rel_tol, const char* what) {
    const double a = std::numbers::pi / t;
    std::vector<double> breaks;
    for (double f = structure; f > 1e-6 * structure; f /= 10.0) breaks.push_back(f);

    quad::Options rough;
    rough.rel_tol = 1e-3;
    const auto head_scale =
        quad::integrate([&](double w) { return std::abs(body(w)); }, 0.0, a, breaks, rough);
    const auto tail_scale = quad::integrate_to_infinity([&](double w) { return std::abs(g(w)); },
                                                        a, std::max(2.0 * a, 20.0 * structure),
                                                        breaks, rough);
    const double scale = head_scale.value + tail_scale.value;

    quad::Options opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 0.1 * rel_tol * scale;
    const auto head = quad::integrate(body, 0.0, a, breaks, opts);

    gsl_set_error_handler_off();
    constexpr std::size_t limit = 2000;
    std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(limit));
    std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> cycles(
        gsl_integration_workspace_alloc(limit));
    std::unique_ptr<gsl_integration_qawo_table, TableDeleter> table(gsl_integration_qawo_table_alloc(
        t, 1.0, cosine ? GSL_INTEG_COSINE : GSL_INTEG_SINE, 60));
    GslCall call{&g};
    gsl_function F{&gsl_trampoline, &call};
    double tail = 0.0;
    double tail_err = 0.0;
    const int status = gsl_integration_qawf(&F, a, 0.5 * rel_tol * scale, limit, ws.get(),
                                            cycles.get(), table.get(), &tail, &tail_err);

    if (!head.converged || status != GSL_SUCCESS) {
        std::ostringstream msg;
        msg << what << ": quadrature did not converge (t = " << t << ", head error "
            << head.error_estimate << ", tail error " << tail_err << ", scale " << scale;
        if (status != GSL_SUCCESS) msg << ", gsl: " << gsl_strerror(status);
        msg << ")";
        throw NumericalError(msg.str());
    }
    return (head.value + tail) / std::numbers::pi;
}

double oscillatory_integral(const std::function<double(double)>& g, double t, bool cosine,
                            double structure, double rel_tol, const char* what) {
    auto body = [&](double w) { return g(w) * (cosine ? std::cos(w * t) : std::sin(w * t)); };
    return oscillatory_integral(body, g, t, cosine, structure, rel_tol, what);
}

} // namespace

SpectralDensity::SpectralDensity(OhmicAlgebraic p) : params_(p) {
    require_positive(p.gamma, "gamma");
    require_positive(p.cutoff, "cutoff");
}

SpectralDensity::SpectralDensity(Underdamped p) : params_(p) {
    require_positive(p.gamma, "gamma");
    require_positive(p.coupling, "coupling");
    require_positive(p.resonance, "resonance");
}

SpectralDensity::SpectralDensity(OhmicLinear p) : params_(p) {
    require_positive(p.gamma, "gamma");
}

std::string SpectralDensity::kind() const {
    return std::visit(overloaded{[](const OhmicAlgebraic&) { return std::string("ohmic-algebraic"); },
                                 [](const Underdamped&) { return std::string("underdamped"); },
                                 [](const OhmicLinear&) { return std::string("ohmic-linear"); }},
                      params_);
}

double evaluate(const SpectralDensity& J, double omega) {
    if (omega < 0.0) {
        throw ContractError("spectral density evaluated at negative frequency");
    }
    return omega * evaluate_over_omega(J, omega);
}

double evaluate_over_omega(const SpectralDensity& J, double omega) {
    return std::visit(
        overloaded{[&](const OhmicAlgebraic& p) {
                       const double L2 = p.cutoff * p.cutoff;
                       return p.gamma * L2 / (omega * omega + L2);
                   },
                   [&](const Underdamped& p) {
                       const double w2 = omega * omega;
                       const double d = w2 - p.resonance * p.resonance;
                       return p.gamma * p.coupling * p.coupling /
                              (p.gamma * p.gamma * w2 + d * d);
                   },
                   [&](const OhmicLinear& p) { return p.gamma; }},
        J.params());
}

double low_frequency_friction(const SpectralDensity& J) { return evaluate_over_omega(J, 0.0); }

double renormalisation_shift(const SpectralDensity& J) {
    return std::visit(
        overloaded{[](const OhmicAlgebraic& p) { return p.gamma * p.cutoff; },
                   [](const Underdamped& p) {
                       return p.coupling * p.coupling / (p.resonance * p.resonance);
                   },
                   [](const OhmicLinear&) -> double {
                       throw ContractError(
                           "renormalisation shift of an Ohmic-linear spectrum needs an explicit "
                           "cutoff (use with_cutoff)");
                   }},
        J.params());
}

std::complex<double> fourier_kernel(const SpectralDensity& J, std::complex<double> omega) {
    return std::visit(
        overloaded{[&](const OhmicAlgebraic& p) -> std::complex<double> {
                       return p.cutoff * p.cutoff * p.gamma / (p.cutoff - kI * omega);
                   },
                   [&](const Underdamped& p) -> std::complex<double> {
                       return p.coupling * p.coupling /
                              (p.resonance * p.resonance - kI * p.gamma * omega - omega * omega);
                   },
                   [](const OhmicLinear&) -> std::complex<double> {
                       throw ContractError(
                           "dissipation kernel of an Ohmic-linear spectrum needs an explicit "
                           "cutoff (use with_cutoff)");
                   }},
        J.params());
}

RationalKernel rational_kernel(const SpectralDensity& J) {
    return std::visit(
        overloaded{[](const OhmicAlgebraic& p) {
                       return RationalKernel{{p.cutoff * p.cutoff * p.gamma}, {p.cutoff, -kI}};
                   },
                   [](const Underdamped& p) {
                       return RationalKernel{{p.coupling * p.coupling},
                                             {p.resonance * p.resonance, -kI * p.gamma, -1.0}};
                   },
                   [](const OhmicLinear&) -> RationalKernel {
                       throw ContractError(
                           "rational kernel of an Ohmic-linear spectrum needs an explicit cutoff");
                   }},
        J.params());
}

std::vector<double> characteristic_frequencies(const SpectralDensity& J) {
    return std::visit(
        overloaded{[](const OhmicAlgebraic& p) { return std::vector<double>{p.cutoff}; },
                   [](const Underdamped& p) {
                       std::vector<double> f{p.resonance, p.resonance + 0.5 * p.gamma};
                       if (p.resonance - 0.5 * p.gamma > 0.0) {
                           f.push_back(p.resonance - 0.5 * p.gamma);
                       }
                       std::sort(f.begin(), f.end());
                       return f;
                   },
                   [](const OhmicLinear&) { return std::vector<double>{}; }},
        J.params());
}

SpectralDensity with_cutoff(const OhmicLinear& J, double cutoff) {
    return SpectralDensity(OhmicAlgebraic{J.gamma, cutoff});
}

SpectralDensity scaled_underdamped(double alpha1, double alpha2, double gamma) {
    require_positive(alpha1, "alpha1");
    require_positive(alpha2, "alpha2");
    require_positive(gamma, "gamma");
    return SpectralDensity(
        Underdamped{gamma, std::sqrt(alpha1 * alpha2 * gamma), std::sqrt(alpha2 * gamma)});
}

SpectralDensity overdamped_limit(double alpha1, double alpha2) {
    require_positive(alpha1, "alpha1");
    require_positive(alpha2, "alpha2");
    return SpectralDensity(OhmicAlgebraic{alpha1 / alpha2, alpha2});
}

double thermal_weight(const SpectralDensity& J, double omega, double temperature) {
    if (omega < 1e-8 * temperature) {
        return 2.0 * temperature * evaluate_over_omega(J, omega);
    }
    return evaluate(J, omega) / std::tanh(omega / (2.0 * temperature));
}

std::complex<double> correlation_function(const SpectralDensity& J, double temperature, double t,
                                          double rel_tol) {
    if (!(temperature > 0.0)) throw ContractError("correlation_function: temperature must be > 0");
    if (t < 0.0) throw ContractError("correlation_function: t must be >= 0");
    if (J.is<OhmicLinear>()) {
        throw ContractError("correlation_function: Ohmic-linear spectrum needs a cutoff");
    }
    const double structure = std::max(max_structure(J), 40.0 * temperature);
    if (t == 0.0) {
        if (J.is<OhmicAlgebraic>()) {
            // J coth ~ gamma L^2 / w at large w: log divergence.
            return {std::numeric_limits<double>::infinity(), 0.0};
        }
        quad::Options opts;
        opts.rel_tol = rel_tol;
        auto r = quad::integrate_to_infinity(
            [&](double w) { return thermal_weight(J, w, temperature); }, 0.0, 20.0 * structure,
            characteristic_frequencies(J), opts);
        if (!r.converged) {
            throw NumericalError("correlation_function: t = 0 quadrature did not converge (error "
                                 "estimate " + std::to_string(r.error_estimate) + ")");
        }
        return {r.value / std::numbers::pi, 0.0};
    }
    const double re = oscillatory_integral(
        [&](double w) { return thermal_weight(J, w, temperature); }, t, true, structure, rel_tol,
        "correlation_function (real part)");
    const double im = -oscillatory_integral([&](double w) { return evaluate(J, w); }, t, false,
                                            structure, rel_tol,
                                            "correlation_function (imaginary part)");
    return {re, im};
}

std::complex<double> integrated_correlation(const SpectralDensity& J, double temperature,
                                            double t, double rel_tol) {
    if (!(temperature > 0.0)) {
        throw ContractError("integrated_correlation: temperature must be > 0");
    }
    if (t < 0.0) throw ContractError("integrated_correlation: t must be >= 0");
    if (J.is<OhmicLinear>()) {
        throw ContractError("integrated_correlation: Ohmic-linear spectrum needs a cutoff");
    }
    if (t == 0.0) return {0.0, 0.0};
    const double structure = std::max(max_structure(J), 40.0 * temperature);
    // Re: (1/pi) int J coth sin(wt)/w ;  Im: -(1/pi) int J (1 - cos wt)/w
    //   = -delta/2 + (1/pi) int (J/w) cos(wt).
    auto sinc_body = [&](double w) {
        const double x = w * t;
        const double sinc = std::abs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        return thermal_weight(J, w, temperature) * t * sinc;
    };
    auto tail_g = [&](double w) { return thermal_weight(J, w, temperature) / w; };
    const double re = oscillatory_integral(sinc_body, tail_g, t, false, structure, rel_tol,
                                           "integrated_correlation (real part)");
    const double im = -0.5 * renormalisation_shift(J) +
                      oscillatory_integral([&](double w) { return evaluate_over_omega(J, w); }, t,
                                           true, structure, rel_tol,
                                           "integrated_correlation (imaginary part)");
    return {re, im};
}

} // namespace rcmap::spectral
