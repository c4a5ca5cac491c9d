// gkls.hpp — Global Born-Markov-secular (GKLS) master equation for linear
// networks with local baths: decay rates, covariance dynamics, stationary
// state and dissipator heat currents.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcmap/gaussian.hpp"
#include "rcmap/network.hpp"

namespace rcmap::gkls {

// Rows index baths (in network order), columns index normal modes.
struct ModeRates {
    Eigen::MatrixXd gamma_plus;  // Gamma_i(Omega_j) = 2 J_i / (1 - exp(-Omega_j/T_i))
    Eigen::MatrixXd gamma_minus; // Gamma_i(-Omega_j) = Gamma_i(Omega_j) exp(-Omega_j/T_i)
    Eigen::MatrixXd weight;      // P_ij^2 / (2 Omega_j), with P_ij taken at the bath's node
    Eigen::MatrixXd sigma() const { return gamma_minus + gamma_plus; }
    Eigen::MatrixXd delta() const { return gamma_minus - gamma_plus; }

    // sum_i w_ij Delta_i(Omega_j) and sum_i w_ij Sigma_i(Omega_j) per mode.
    Eigen::VectorXd damping() const;
    Eigen::VectorXd diffusion() const;
};

ModeRates decay_rates(const HarmonicNetwork& net, const NormalModeBasis& basis);

struct CovarianceTrajectory {
    std::vector<double> times;
    std::vector<gaussian::CovarianceMatrix> states; // node coordinates
    std::string label;
    std::string method{"gkls"};
};

// Mode-space covariance c = Q^T C Q and back.
Eigen::MatrixXd to_mode_space(const NormalModeBasis& basis, const Eigen::MatrixXd& C);
Eigen::MatrixXd to_node_space(const NormalModeBasis& basis, const Eigen::MatrixXd& c);

// Closed-form solution of the covariance equations of motion at time t:
// free rotation of each mode pair, exponential damping at (d_j + d_k)/2 on
// block (j, k), relaxation of diagonal blocks towards the fixed point.
gaussian::CovarianceMatrix evolve(const HarmonicNetwork& net, const NormalModeBasis& basis,
                                  const gaussian::CovarianceMatrix& C0, double t);

CovarianceTrajectory propagate(const HarmonicNetwork& net, const NormalModeBasis& basis,
                               const gaussian::CovarianceMatrix& C0,
                               const std::vector<double>& times);

// Right-hand side of the mode-space covariance equations (for fixed-point
// residual checks and for independent integrators).
Eigen::MatrixXd mode_space_derivative(const ModeRates& rates, const NormalModeBasis& basis,
                                      const Eigen::MatrixXd& c);

// First moments (eta_j, pi_j) interleaved; evolves a mode-space mean vector.
Eigen::VectorXd evolve_first_moments(const ModeRates& rates, const NormalModeBasis& basis,
                                     const Eigen::VectorXd& mean0, double t);

// Throws ModelError if some mode is not damped by any bath.
gaussian::CovarianceMatrix steady_state(const HarmonicNetwork& net, const NormalModeBasis& basis);

struct HeatCurrentReport {
    std::string method;              // "gkls" or "exact"
    std::vector<std::string> labels; // one per bath
    std::vector<double> currents;    // into the system, one per bath
    double conservation_residual{0.0}; // |sum| / max |current|
    double dual_form_residual{0.0};    // exact only: mismatch of the two link-current forms

    double at(const std::string& label) const;
};

// Stationary current from each bath into the network, from the dissipators.
HeatCurrentReport heat_currents(const HarmonicNetwork& net, const NormalModeBasis& basis,
                                const gaussian::CovarianceMatrix& steady);

struct ValidityReport {
    double min_gap{0.0};          // min_{j != k} {|Omega_j - Omega_k|, 2 Omega_j}
    double max_friction{0.0};     // max_i low-frequency friction of bath i
    double secular_ratio{0.0};    // min_gap / max_friction
    double weak_coupling_ratio{0.0}; // max_friction / min Omega
    bool secular_ok{true};        // secular_ratio >= 10
    bool weak_coupling_ok{true};  // weak_coupling_ratio <= 0.1
};

// Advisory only: nothing downstream refuses to run on a failed check.
ValidityReport validity_diagnostics(const HarmonicNetwork& net, const NormalModeBasis& basis);

} // namespace rcmap::gkls
