// network.hpp — Linear harmonic networks H = (X^T V X + P^T P)/2 with local
// baths, the two-node wire, its reaction-coordinate augmentation, and the
// normal-mode decomposition.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcmap/spectral.hpp"

namespace rcmap {

struct BathAttachment {
    int node{0};
    spectral::SpectralDensity spectral;
    double temperature{1.0};
    std::string name{}; // used to label heat currents; defaults to "node<i>"
};

class HarmonicNetwork {
public:
    // Validates symmetry of V, node indices, T > 0 and one bath per node.
    // Positive definiteness is checked by normal_modes().
    HarmonicNetwork(Eigen::MatrixXd V, std::vector<BathAttachment> baths, std::string label = {});

    int size() const { return static_cast<int>(V_.rows()); }
    const Eigen::MatrixXd& V() const { return V_; }
    const std::vector<BathAttachment>& baths() const { return baths_; }
    const std::string& label() const { return label_; }

    HarmonicNetwork with_baths(std::vector<BathAttachment> baths) const;

private:
    Eigen::MatrixXd V_;
    std::vector<BathAttachment> baths_;
    std::string label_;
};

struct NormalModeBasis {
    Eigen::MatrixXd P;     // columns are modes; P^T V P = diag(Omega^2)
    Eigen::VectorXd Omega; // ascending
    Eigen::MatrixXd Q;     // 2N x 2N, maps mode quadratures to node quadratures

    int size() const { return static_cast<int>(Omega.size()); }
};

struct WireParams {
    double omega_h{1.0};
    double omega_c{3.0};
    double k{0.8};
};

// Node order (hot, cold). The cold diagonal gets `cold_shift` added when
// shift_cold is set.
HarmonicNetwork build_wire(const WireParams& p, bool shift_cold, double cold_shift,
                           std::vector<BathAttachment> baths = {}, std::string label = "wire");

struct AugmentedParams {
    WireParams wire;
    spectral::SpectralDensity cold{spectral::Underdamped{1e-3, 0.9, 4.0}}; // gamma, lambda, omega_0
    spectral::SpectralDensity hot{spectral::OhmicAlgebraic{1e-3, 1e3}};   // on the hot node
    double T_h{3.3};
    double T_c{1.2};
    bool shift_cold{true};              // add lambda^2 / omega_0^2 to the cold node
};

// Node order (hot, cold, RC). The residual bath is Ohmic-linear with the
// friction of the underdamped cold spectrum, attached to the RC.
HarmonicNetwork build_augmented(const AugmentedParams& p, std::string label = "augmented");

// Throws ModelError if V is not positive definite or two modes are closer
// than 1e-9 * max(Omega). Column signs make the largest entry positive.
NormalModeBasis normal_modes(const HarmonicNetwork& net);

// Smallest eigenvalue of V (positive-definiteness margin).
double min_potential_eigenvalue(const Eigen::MatrixXd& V);

} // namespace rcmap
