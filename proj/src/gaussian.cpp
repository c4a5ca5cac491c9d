// gaussian.cpp — Covariance algebra and the Gaussian Uhlmann fidelity

#include "rcmap/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "rcmap/errors.hpp"
#include "rcmap/network.hpp"

namespace rcmap::gaussian {

namespace {

using cd = std::complex<double>;

// log|det| and sign for a general real matrix.
std::pair<double, double> log_abs_det(const Eigen::MatrixXd& A) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd& LU = lu.matrixLU();
    double logdet = 0.0;
    double sign = lu.permutationP().determinant();
    for (Eigen::Index i = 0; i < LU.rows(); ++i) {
        const double d = LU(i, i);
        if (d == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
        logdet += std::log(std::abs(d));
        if (d < 0.0) sign = -sign;
    }
    return {logdet, sign};
}

} // namespace

CovarianceMatrix::CovarianceMatrix(const Eigen::MatrixXd& data) {
    if (data.rows() == 0 || data.rows() != data.cols() || data.rows() % 2 != 0) {
        throw ContractError("CovarianceMatrix: data must be a non-empty 2N x 2N matrix");
    }
    const double scale = data.cwiseAbs().maxCoeff();
    const double asym = (data - data.transpose()).cwiseAbs().maxCoeff();
    if (!std::isfinite(scale) || asym > 1e-12 * std::max(scale, 1e-300)) {
        std::ostringstream msg;
        msg << "CovarianceMatrix: input is not symmetric (max |C - C^T| = " << asym << ")";
        throw ContractError(msg.str());
    }
    data_ = 0.5 * (data + data.transpose());
}

CovarianceMatrix CovarianceMatrix::vacuum(int n_modes) {
    return CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int i = 0; i < n_modes; ++i) {
        T(2 * i, 2 * i + 1) = 1.0;
        T(2 * i + 1, 2 * i) = -1.0;
    }
    return T;
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& C) {
    const int n = C.n_modes();
    Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(n) * C.data(), false);
    std::vector<double> mags;
    mags.reserve(static_cast<std::size_t>(2 * n));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mags.begin(), mags.end());
    std::vector<double> nu(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < nu.size(); ++k) nu[k] = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
    return nu;
}

Physicality is_physical(const CovarianceMatrix& C, double tol) {
    Physicality out;
    out.symplectic_eigenvalues = symplectic_eigenvalues(C);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C.data(), Eigen::EigenvaluesOnly);
    out.physical = es.eigenvalues().minCoeff() > 0.0;
    for (double nu : out.symplectic_eigenvalues) {
        out.physical = out.physical && nu >= 0.5 - tol;
    }
    return out;
}

double uhlmann_fidelity(const CovarianceMatrix& C1, const CovarianceMatrix& C2) {
    if (C1.n_modes() != C2.n_modes()) {
        throw ContractError("uhlmann_fidelity: covariance matrices have different mode counts");
    }
    if (!is_physical(C1).physical || !is_physical(C2).physical) {
        throw ContractError("uhlmann_fidelity: input covariance matrix is not physical");
    }
    const int n = C1.n_modes();
    const Eigen::MatrixXd Theta = symplectic_form(n);
    const Eigen::MatrixXd S = C1.data() + C2.data();

    Eigen::LLT<Eigen::MatrixXd> llt(S);
    const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (!(rcond > 1e-14)) {
        std::ostringstream msg;
        msg << "uhlmann_fidelity: C1 + C2 is singular or ill-conditioned (rcond = " << rcond << ")";
        throw NumericalError(msg.str());
    }
    double logdet_S = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i) logdet_S += 2.0 * std::log(llt.matrixL()(i, i));

    const Eigen::MatrixXd G = 0.25 * Theta + C2.data() * Theta * C1.data();
    const Eigen::MatrixXd C_aux = Theta.transpose() * llt.solve(G);

    // det f(C_aux Theta) = prod f(mu) over the eigenvalues mu of C_aux Theta.
    Eigen::EigenSolver<Eigen::MatrixXd> es(C_aux * Theta, false);
    cd log_f{0.0, 0.0};
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cd mu = es.eigenvalues()(i);
        const cd root = std::sqrt(1.0 + 1.0 / (4.0 * mu * mu));
        log_f += std::log(2.0 * (root + 1.0));
    }
    const auto [logdet_G, sign_G] = log_abs_det(G);
    // det(C_aux) = det(G) / det(S); the sign is carried by the complex sum.
    cd log_F4 = log_f + logdet_G - logdet_S;
    if (sign_G < 0.0) log_F4 += cd(0.0, std::numbers::pi);
    // F^4 is real and positive: fold the accumulated phase before taking roots.
    log_F4.imag(std::remainder(log_F4.imag(), 2.0 * std::numbers::pi));

    const cd log_fid = 0.5 * log_F4 - 0.5 * logdet_S;
    const double fid = std::exp(log_fid.real()) * std::cos(log_fid.imag());
    if (!std::isfinite(fid) || std::abs(std::sin(log_fid.imag())) > 1e-6) {
        std::ostringstream msg;
        msg << "uhlmann_fidelity: numerically unstable evaluation (log fidelity = " << log_fid
            << ")";
        throw NumericalError(msg.str());
    }
    if (fid > 1.0 + 1e-9 || fid <= 0.0) {
        std::ostringstream msg;
        msg << "uhlmann_fidelity: result " << fid << " outside (0, 1]";
        throw NumericalError(msg.str());
    }
    return std::min(fid, 1.0);
}

CovarianceMatrix reduce(const CovarianceMatrix& C, const std::vector<int>& keep) {
    if (keep.empty()) throw ContractError("reduce: empty list of modes to keep");
    std::set<int> seen;
    for (int i : keep) {
        if (i < 0 || i >= C.n_modes()) {
            throw ContractError("reduce: mode index " + std::to_string(i) + " out of range");
        }
        if (!seen.insert(i).second) throw ContractError("reduce: repeated mode index");
    }
    const auto m = static_cast<int>(keep.size());
    Eigen::MatrixXd out(2 * m, 2 * m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            out.block<2, 2>(2 * a, 2 * b) = C.data().block<2, 2>(2 * keep[a], 2 * keep[b]);
        }
    }
    return CovarianceMatrix(out);
}

CovarianceMatrix thermal_covariance(const NormalModeBasis& basis, double temperature) {
    if (!(temperature > 0.0)) throw ContractError("thermal_covariance: temperature must be > 0");
    const int n = basis.size();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        const double w = basis.Omega(j);
        if (!(w > 0.0)) throw ContractError("thermal_covariance: mode frequencies must be > 0");
        const double coth = 1.0 / std::tanh(w / (2.0 * temperature));
        c(2 * j, 2 * j) = coth / (2.0 * w);
        c(2 * j + 1, 2 * j + 1) = w * coth / 2.0;
    }
    return CovarianceMatrix(basis.Q * c * basis.Q.transpose());
}

CovarianceMatrix thermal_oscillator(double omega, double temperature) {
    if (!(temperature > 0.0)) throw ContractError("thermal_oscillator: temperature must be > 0");
    if (!(omega > 0.0)) throw ContractError("thermal_oscillator: frequency must be > 0");
    const double coth = 1.0 / std::tanh(omega / (2.0 * temperature));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 0) = coth / (2.0 * omega);
    c(1, 1) = omega * coth / 2.0;
    return CovarianceMatrix(c);
}

CovarianceMatrix direct_sum(const std::vector<CovarianceMatrix>& parts) {
    if (parts.empty()) throw ContractError("direct_sum: no parts");
    Eigen::Index dim = 0;
    for (const auto& p : parts) dim += p.data().rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
        const auto d = p.data().rows();
        out.block(off, off, d, d) = p.data();
        off += d;
    }
    return CovarianceMatrix(out);
}

} // namespace rcmap::gaussian
