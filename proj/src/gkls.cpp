// gkls.cpp — Secular master equation for harmonic networks

#include "rcmap/gkls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rcmap/errors.hpp"

namespace rcmap::gkls {

namespace {

std::string bath_label(const BathAttachment& b) {
    return b.name.empty() ? "node" + std::to_string(b.node) : b.name;
}

// Mode-space fixed point; undamped modes (no bath overlap) are left at zero.
Eigen::MatrixXd mode_space_fixed_point(const ModeRates& rates, const NormalModeBasis& basis) {
    const int n = basis.size();
    const Eigen::VectorXd d = rates.damping();
    const Eigen::VectorXd s = rates.diffusion();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        if (d(j) == 0.0) continue;
        const double w = basis.Omega(j);
        c(2 * j, 2 * j) = -s(j) / (2.0 * d(j) * w);
        c(2 * j + 1, 2 * j + 1) = -s(j) * w / (2.0 * d(j));
    }
    return c;
}

Eigen::MatrixXd free_rotation(const NormalModeBasis& basis, double t) {
    const int n = basis.size();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        const double w = basis.Omega(j);
        const double c = std::cos(w * t);
        const double s = std::sin(w * t);
        R(2 * j, 2 * j) = c;
        R(2 * j, 2 * j + 1) = s / w;
        R(2 * j + 1, 2 * j) = -w * s;
        R(2 * j + 1, 2 * j + 1) = c;
    }
    return R;
}

void require_matching(const HarmonicNetwork& net, const NormalModeBasis& basis) {
    if (basis.size() != net.size()) {
        throw ContractError("gkls: normal-mode basis does not match the network size");
    }
}

} // namespace

Eigen::VectorXd ModeRates::damping() const {
    return (weight.cwiseProduct(delta())).colwise().sum().transpose();
}

Eigen::VectorXd ModeRates::diffusion() const {
    return (weight.cwiseProduct(sigma())).colwise().sum().transpose();
}

ModeRates decay_rates(const HarmonicNetwork& net, const NormalModeBasis& basis) {
    require_matching(net, basis);
    const auto m = static_cast<int>(net.baths().size());
    const int n = basis.size();
    ModeRates r;
    r.gamma_plus.resize(m, n);
    r.gamma_minus.resize(m, n);
    r.weight.resize(m, n);
    for (int i = 0; i < m; ++i) {
        const auto& bath = net.baths()[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const double w = basis.Omega(j);
            const double x = w / bath.temperature;
            const double J = spectral::evaluate(bath.spectral, w);
            r.gamma_plus(i, j) = 2.0 * J / (-std::expm1(-x));
            r.gamma_minus(i, j) = r.gamma_plus(i, j) * std::exp(-x);
            const double p = basis.P(bath.node, j);
            r.weight(i, j) = p * p / (2.0 * w);
        }
    }
    return r;
}

Eigen::MatrixXd to_mode_space(const NormalModeBasis& basis, const Eigen::MatrixXd& C) {
    return basis.Q.transpose() * C * basis.Q;
}

Eigen::MatrixXd to_node_space(const NormalModeBasis& basis, const Eigen::MatrixXd& c) {
    return basis.Q * c * basis.Q.transpose();
}

Eigen::MatrixXd mode_space_derivative(const ModeRates& rates, const NormalModeBasis& basis,
                                      const Eigen::MatrixXd& c) {
    const int n = basis.size();
    const Eigen::VectorXd d = rates.damping();
    const Eigen::VectorXd s = rates.diffusion();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        A(2 * j, 2 * j + 1) = 1.0;
        A(2 * j + 1, 2 * j) = -basis.Omega(j) * basis.Omega(j);
    }
    Eigen::MatrixXd dc = A * c + c * A.transpose();
    for (int a = 0; a < 2 * n; ++a) {
        for (int b = 0; b < 2 * n; ++b) {
            dc(a, b) += 0.5 * (d(a / 2) + d(b / 2)) * c(a, b);
        }
    }
    for (int j = 0; j < n; ++j) {
        dc(2 * j, 2 * j) += s(j) / (2.0 * basis.Omega(j));
        dc(2 * j + 1, 2 * j + 1) += s(j) * basis.Omega(j) / 2.0;
    }
    return dc;
}

gaussian::CovarianceMatrix evolve(const HarmonicNetwork& net, const NormalModeBasis& basis,
                                  const gaussian::CovarianceMatrix& C0, double t) {
    require_matching(net, basis);
    if (C0.n_modes() != net.size()) {
        throw ContractError("gkls::evolve: initial state has the wrong number of modes");
    }
    const ModeRates rates = decay_rates(net, basis);
    const Eigen::MatrixXd fixed = mode_space_fixed_point(rates, basis);
    const Eigen::MatrixXd R = free_rotation(basis, t);
    const Eigen::VectorXd d = rates.damping();
    Eigen::VectorXd decay(2 * basis.size());
    for (int a = 0; a < decay.size(); ++a) decay(a) = std::exp(0.5 * d(a / 2) * t);

    const Eigen::MatrixXd u0 = to_mode_space(basis, C0.data()) - fixed;
    const Eigen::MatrixXd u = decay.asDiagonal() * (R * u0 * R.transpose()) * decay.asDiagonal();
    return gaussian::CovarianceMatrix(to_node_space(basis, fixed + u));
}

CovarianceTrajectory propagate(const HarmonicNetwork& net, const NormalModeBasis& basis,
                               const gaussian::CovarianceMatrix& C0,
                               const std::vector<double>& times) {
    if (!gaussian::is_physical(C0).physical) {
        throw ContractError("gkls::propagate: initial covariance matrix is not physical");
    }
    CovarianceTrajectory traj;
    traj.label = net.label();
    traj.times = times;
    traj.states.reserve(times.size());
    for (double t : times) {
        if (!(t >= 0.0)) throw ContractError("gkls::propagate: times must be non-negative");
        traj.states.push_back(evolve(net, basis, C0, t));
    }
    return traj;
}

Eigen::VectorXd evolve_first_moments(const ModeRates& rates, const NormalModeBasis& basis,
                                     const Eigen::VectorXd& mean0, double t) {
    const Eigen::VectorXd d = rates.damping();
    const Eigen::MatrixXd R = free_rotation(basis, t);
    Eigen::VectorXd out = R * mean0;
    for (int a = 0; a < out.size(); ++a) out(a) *= std::exp(0.5 * d(a / 2) * t);
    return out;
}

gaussian::CovarianceMatrix steady_state(const HarmonicNetwork& net, const NormalModeBasis& basis) {
    require_matching(net, basis);
    const ModeRates rates = decay_rates(net, basis);
    const Eigen::VectorXd d = rates.damping();
    for (int j = 0; j < basis.size(); ++j) {
        if (!(d(j) < 0.0)) {
            std::ostringstream msg;
            msg << "gkls::steady_state: normal mode " << j << " (Omega = " << basis.Omega(j)
                << ") of '" << net.label() << "' is not damped by any bath; no stationary state";
            throw ModelError(msg.str());
        }
    }
    return gaussian::CovarianceMatrix(to_node_space(basis, mode_space_fixed_point(rates, basis)));
}

double HeatCurrentReport::at(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return currents[i];
    }
    throw ContractError("HeatCurrentReport: no bath labelled '" + label + "'");
}

HeatCurrentReport heat_currents(const HarmonicNetwork& net, const NormalModeBasis& basis,
                                const gaussian::CovarianceMatrix& steady) {
    require_matching(net, basis);
    if (steady.n_modes() != net.size()) {
        throw ContractError("gkls::heat_currents: state does not match the network");
    }
    const ModeRates rates = decay_rates(net, basis);
    const Eigen::MatrixXd c = to_mode_space(basis, steady.data());
    const Eigen::MatrixXd delta = rates.delta();
    const Eigen::MatrixXd sigma = rates.sigma();

    HeatCurrentReport rep;
    rep.method = "gkls";
    double sum = 0.0;
    double largest = 0.0;
    for (std::size_t i = 0; i < net.baths().size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const int node = net.baths()[i].node;
        double q = 0.0;
        for (int j = 0; j < basis.size(); ++j) {
            const double w = basis.Omega(j);
            const double energy = 0.5 * w * w * c(2 * j, 2 * j) + 0.5 * c(2 * j + 1, 2 * j + 1);
            const double p = basis.P(node, j);
            q += rates.weight(row, j) * delta(row, j) * energy + 0.25 * p * p * sigma(row, j);
        }
        rep.labels.push_back(bath_label(net.baths()[i]));
        rep.currents.push_back(q);
        sum += q;
        largest = std::max(largest, std::abs(q));
    }
    rep.conservation_residual = largest > 0.0 ? std::abs(sum) / largest : std::abs(sum);
    return rep;
}

ValidityReport validity_diagnostics(const HarmonicNetwork& net, const NormalModeBasis& basis) {
    ValidityReport rep;
    const int n = basis.size();
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        gap = std::min(gap, 2.0 * basis.Omega(j));
        for (int k = j + 1; k < n; ++k) gap = std::min(gap, std::abs(basis.Omega(j) - basis.Omega(k)));
    }
    rep.min_gap = gap;
    for (const auto& b : net.baths()) {
        rep.max_friction = std::max(rep.max_friction, spectral::low_frequency_friction(b.spectral));
    }
    rep.secular_ratio = rep.max_friction > 0.0 ? gap / rep.max_friction
                                               : std::numeric_limits<double>::infinity();
    rep.weak_coupling_ratio = rep.max_friction / basis.Omega.minCoeff();
    rep.secular_ok = rep.secular_ratio >= 10.0;
    rep.weak_coupling_ok = rep.weak_coupling_ratio <= 0.1;
    return rep;
}

} // namespace rcmap::gkls
