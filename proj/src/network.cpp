// network.cpp — Model builders and normal-mode decomposition

#include "rcmap/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rcmap/errors.hpp"

namespace rcmap {

namespace {

void require_positive_definite(const Eigen::MatrixXd& V, const std::string& label) {
    const double m = min_potential_eigenvalue(V);
    if (!(m > 0.0)) {
        std::ostringstream msg;
        msg << "network '" << label << "': potential matrix V is not positive definite "
            << "(min eigenvalue " << m << ")";
        throw ModelError(msg.str());
    }
}

} // namespace

HarmonicNetwork::HarmonicNetwork(Eigen::MatrixXd V, std::vector<BathAttachment> baths,
                                 std::string label)
    : V_(std::move(V)), baths_(std::move(baths)), label_(std::move(label)) {
    if (V_.rows() == 0 || V_.rows() != V_.cols()) {
        throw ContractError("HarmonicNetwork: V must be a non-empty square matrix");
    }
    const double scale = std::max(1.0, V_.cwiseAbs().maxCoeff());
    if ((V_ - V_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ContractError("HarmonicNetwork: V must be symmetric");
    }
    V_ = 0.5 * (V_ + V_.transpose()).eval();
    std::set<int> used;
    for (const auto& b : baths_) {
        if (b.node < 0 || b.node >= size()) {
            throw ContractError("HarmonicNetwork: bath attached to out-of-range node " +
                                std::to_string(b.node));
        }
        if (!(b.temperature > 0.0) || !std::isfinite(b.temperature)) {
            throw ContractError("HarmonicNetwork: bath temperature must be positive");
        }
        if (!used.insert(b.node).second) {
            throw ContractError("HarmonicNetwork: more than one bath on node " +
                                std::to_string(b.node));
        }
    }
}

HarmonicNetwork HarmonicNetwork::with_baths(std::vector<BathAttachment> baths) const {
    return HarmonicNetwork(V_, std::move(baths), label_);
}

double min_potential_eigenvalue(const Eigen::MatrixXd& V) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

HarmonicNetwork build_wire(const WireParams& p, bool shift_cold, double cold_shift,
                           std::vector<BathAttachment> baths, std::string label) {
    if (!(p.omega_h > 0.0) || !(p.omega_c > 0.0)) {
        throw ContractError("build_wire: node frequencies must be positive");
    }
    Eigen::MatrixXd V(2, 2);
    V << p.omega_h * p.omega_h + p.k, -p.k,
         -p.k, p.omega_c * p.omega_c + p.k + (shift_cold ? cold_shift : 0.0);
    require_positive_definite(V, label);
    return HarmonicNetwork(V, std::move(baths), std::move(label));
}

HarmonicNetwork build_augmented(const AugmentedParams& p, std::string label) {
    if (!p.cold.is<spectral::Underdamped>()) {
        throw ContractError("build_augmented: cold spectral density must be underdamped");
    }
    const auto& uc = p.cold.as<spectral::Underdamped>();
    const auto& w = p.wire;
    if (!(w.omega_h > 0.0) || !(w.omega_c > 0.0)) {
        throw ContractError("build_augmented: node frequencies must be positive");
    }
    const double lambda = uc.coupling;
    const double w0 = uc.resonance;
    Eigen::MatrixXd V(3, 3);
    V << w.omega_h * w.omega_h + w.k, -w.k, 0.0,
         -w.k, w.omega_c * w.omega_c + w.k + (p.shift_cold ? lambda * lambda / (w0 * w0) : 0.0), -lambda,
         0.0, -lambda, w0 * w0;
    require_positive_definite(V, label);
    std::vector<BathAttachment> baths{
        {0, p.hot, p.T_h, "hot"},
        {2, spectral::SpectralDensity(spectral::OhmicLinear{uc.gamma}), p.T_c, "residual"},
    };
    return HarmonicNetwork(V, std::move(baths), std::move(label));
}

NormalModeBasis normal_modes(const HarmonicNetwork& net) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(net.V());
    if (es.info() != Eigen::Success) {
        throw ModelError("normal_modes: eigendecomposition failed for '" + net.label() + "'");
    }
    const Eigen::VectorXd ev = es.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg << "normal_modes: V of '" << net.label() << "' is not positive definite (min eigenvalue "
            << ev.minCoeff() << ")";
        throw ModelError(msg.str());
    }
    const int n = net.size();
    NormalModeBasis b;
    b.Omega = ev.cwiseSqrt();
    b.P = es.eigenvectors();
    const double omax = b.Omega.maxCoeff();
    for (int j = 0; j + 1 < n; ++j) {
        if (b.Omega(j + 1) - b.Omega(j) < 1e-9 * omax) {
            std::ostringstream msg;
            msg << "normal_modes: modes " << j << " and " << j + 1 << " of '" << net.label()
                << "' are degenerate (" << b.Omega(j) << ", " << b.Omega(j + 1)
                << "); the secular master equation is ill-defined";
            throw ModelError(msg.str());
        }
    }
    for (int j = 0; j < n; ++j) {
        Eigen::Index imax = 0;
        b.P.col(j).cwiseAbs().maxCoeff(&imax);
        if (b.P(imax, j) < 0.0) b.P.col(j) *= -1.0;
    }
    b.Q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            b.Q(2 * i, 2 * j) = b.P(i, j);
            b.Q(2 * i + 1, 2 * j + 1) = b.P(i, j);
        }
    }
    return b;
}

} // namespace rcmap
