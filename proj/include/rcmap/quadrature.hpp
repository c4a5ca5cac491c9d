// quadrature.hpp — Globally adaptive Gauss-Kronrod (10/21) integration of
// scalar and vector-valued integrands with user breakpoints.

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace rcmap::quad {

struct QuadratureResult {
    double value{0.0};
    double error_estimate{0.0};
    int panels_used{0};
    bool converged{false};
};

struct VectorQuadratureResult {
    Eigen::VectorXd value;
    Eigen::VectorXd error_estimate;
    int panels_used{0};
    bool converged{false};
};

// Writes f(x) into `out` (already sized to the integrand dimension).
using VectorIntegrand = std::function<void(double x, Eigen::VectorXd& out)>;
using ScalarIntegrand = std::function<double(double x)>;

struct Options {
    double rel_tol{1e-8};
    double abs_tol{0.0};
    // Components are tolerance-grouped: a component whose magnitude is small
    // compared with the largest member of its group is resolved to
    // rel_tol * group_floor * max|group| instead of rel_tol * |itself|.
    std::vector<int> groups;   // empty -> single group
    double group_floor{1e-3};
    // Optional a-priori magnitude per group, folded into the floor; lets a
    // group whose integrals cancel (e.g. equilibrium currents) terminate.
    std::vector<double> group_scale;
    int max_panels{200000};
};

// One 21-point Kronrod panel: value and |K21 - G10| error.
void gauss_kronrod_21(const VectorIntegrand& f, double a, double b,
                      Eigen::VectorXd& value, Eigen::VectorXd& error,
                      Eigen::VectorXd& scratch);

// Adaptive integration over [a, b]; interior breakpoints split the initial
// panels. Never throws on non-convergence: check `converged`.
VectorQuadratureResult integrate(const VectorIntegrand& f, int dim, double a, double b,
                                 const std::vector<double>& breakpoints,
                                 const Options& opts = {});

QuadratureResult integrate(const ScalarIntegrand& f, double a, double b,
                           const std::vector<double>& breakpoints = {},
                           const Options& opts = {});

// Integration over [a, inf). The upper limit starts at `initial_upper`
// and doubles until |f(W)| * W / 2 (the tail bound for integrands decaying
// at least as 1/x^3) is below the per-component tolerance.
VectorQuadratureResult integrate_to_infinity(const VectorIntegrand& f, int dim, double a,
                                             double initial_upper,
                                             const std::vector<double>& breakpoints,
                                             const Options& opts = {});

QuadratureResult integrate_to_infinity(const ScalarIntegrand& f, double a, double initial_upper,
                                       const std::vector<double>& breakpoints = {},
                                       const Options& opts = {});

} // namespace rcmap::quad
