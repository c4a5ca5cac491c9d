// qle.hpp — Exact stationary state of the wire and of its RC-augmented
// version from the frequency-domain quantum Langevin equations.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcmap/gaussian.hpp"
#include "rcmap/gkls.hpp"
#include "rcmap/network.hpp"
#include "rcmap/quadrature.hpp"
#include "rcmap/spectral.hpp"

namespace rcmap::qle {

enum class ModelKind { wire, augmented };

// A dissipative channel: memory kernel and noise acting on one node.
struct Channel {
    int node{0};
    spectral::SpectralDensity spectral;
    double temperature{1.0};
    std::string name;
};

struct LangevinModel {
    ModelKind which{ModelKind::wire};
    std::string label;
    Eigen::MatrixXd potential;     // bare coupling matrix plus all counter-terms delta
    Eigen::VectorXd shifts;        // the counter-terms alone, per node
    std::vector<Channel> channels; // kernels chi(w) enter A(w) on their node
    double coupling_k{0.0};        // hot-cold spring
    double coupling_lambda{0.0};   // cold-RC coupling (augmented only)
    double residual_cutoff{0.0};   // augmented only

    int size() const { return static_cast<int>(potential.rows()); }
};

// Two-node wire, node order (hot, cold); both baths act through kernels.
// With shifts on, delta_h and delta_c are added to the bare potential.
LangevinModel wire_model(const WireParams& w, const spectral::SpectralDensity& hot,
                         const spectral::SpectralDensity& cold, double T_h, double T_c,
                         bool shifts = true, std::string label = "wire");

// Three-node augmented model (hot, cold, RC). The cold node carries the
// static shift lambda^2/omega_0^2 (if p.shift_cold) and no kernel; the RC sees
// an Ohmic residual bath regularised at `residual_cutoff` with shift
// gamma * residual_cutoff.
LangevinModel augmented_model(const AugmentedParams& p, double residual_cutoff = 1e3,
                              std::string label = "augmented");

// A(w) = potential - w^2 - diag(chi(w)); w may be complex (upper half plane).
Eigen::MatrixXcd susceptibility(const LangevinModel& model, std::complex<double> omega);

// Zeros of det A(w) in the complex plane, from the polynomial
// det A(w) * prod(kernel denominators), Newton-polished on A itself.
std::vector<std::complex<double>> poles(const LangevinModel& model);

struct StabilityReport {
    bool stable{true};
    double min_static_eigenvalue{0.0}; // of A(0)
    double max_pole_imag{0.0};         // must be < 0
    double min_relative_det{0.0};      // min |det A| / Hadamard bound on the grid
    double at_omega{0.0};
    std::vector<std::complex<double>> poles;
    std::string message;
};

// Samples |det A(w)| on a refined real grid up to omega_max and checks the
// pole positions and the static matrix. omega_max <= 0 picks ten times the
// largest breakpoint. Never throws.
StabilityReport stability_scan(const LangevinModel& model, double omega_max);

struct ExactSteadyState {
    gaussian::CovarianceMatrix covariance;
    Eigen::MatrixXd error_estimate; // per covariance entry
    double hot_link_transmission{0.0}; // <X_h P_c> from the hot column alone
    int panels_used{0};
    double tolerance{0.0};
    double xp_scale{0.0};           // a-priori magnitude of the XP entries
};

// Throws ModelError on instability, NumericalError if the quadrature misses
// the requested relative tolerance.
ExactSteadyState exact_steady_state(const LangevinModel& model, double tol = 1e-8);

gaussian::CovarianceMatrix exact_steady_covariance(const LangevinModel& model, double tol = 1e-8);

// Hot current k<X_h P_c> = -k<X_c P_h>, cross-checked against the same
// quantity in transmission form; they must agree within 10 tol.
// Wire: labels {hot, cold}. Augmented: {hot, residual} with the residual
// current -lambda <X_c P_RC>.
gkls::HeatCurrentReport exact_heat_currents(const LangevinModel& model, double tol = 1e-8);
gkls::HeatCurrentReport exact_heat_currents(const LangevinModel& model,
                                            const ExactSteadyState& state);

} // namespace rcmap::qle
