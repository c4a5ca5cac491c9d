// test_gaussian.cpp — Covariance toolkit against truncated Fock-space
// density matrices and textbook single-mode results

#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "rcmap/errors.hpp"
#include "rcmap/gaussian.hpp"
#include "rcmap/network.hpp"

using namespace rcmap;
using gaussian::CovarianceMatrix;

namespace {

// Fock-space Gaussian states rho = exp(-H)/Z with H = r^T G r / 2 on n modes,
// each truncated at `dim` levels.
struct Fock {
    int modes, dim;
    std::vector<Eigen::MatrixXcd> r; // X1, P1, X2, P2, ...

    Fock(int n, int d) : modes(n), dim(d) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
        for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
        const Eigen::MatrixXcd x = (a + a.adjoint()) / std::sqrt(2.0);
        const Eigen::MatrixXcd p = std::complex<double>(0, 1) * (a.adjoint() - a) / std::sqrt(2.0);
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
        for (int m = 0; m < n; ++m) {
            for (const auto* op : {&x, &p}) {
                Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(1, 1);
                for (int k = 0; k < n; ++k) full = kron(full, k == m ? *op : id);
                r.push_back(full);
            }
        }
    }

    static Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
        Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        return K;
    }

    Eigen::MatrixXcd state(const Eigen::MatrixXd& G) const {
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(r[0].rows(), r[0].cols());
        for (int i = 0; i < 2 * modes; ++i)
            for (int j = 0; j < 2 * modes; ++j) H += 0.5 * G(i, j) * r[i] * r[j];
        H = 0.5 * (H + H.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        const Eigen::VectorXd w = (-(es.eigenvalues().array() - es.eigenvalues().minCoeff())).exp();
        Eigen::MatrixXcd rho = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
        return rho / rho.trace().real();
    }

    CovarianceMatrix covariance(const Eigen::MatrixXcd& rho) const {
        const int m = 2 * modes;
        Eigen::MatrixXd C(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                C(i, j) = 0.5 * (rho * (r[i] * r[j] + r[j] * r[i])).trace().real();
        return CovarianceMatrix(0.5 * (C + C.transpose()));
    }
};

Eigen::MatrixXcd sqrtm(const Eigen::MatrixXcd& A) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (A + A.adjoint()));
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double fock_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const Eigen::MatrixXcd s = sqrtm(a);
    const double tr = sqrtm(s * b * s).trace().real();
    return tr * tr;
}

Eigen::MatrixXd random_positive(int n, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = u(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    const Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd d(n);
    std::uniform_real_distribution<double> e(lo, hi);
    for (int i = 0; i < n; ++i) d(i) = e(rng);
    return Q * d.asDiagonal() * Q.transpose();
}

} // namespace

TEST_SUITE("gaussian") {

TEST_CASE("single-mode fidelity matches Fock-space density matrices") {
    std::mt19937 rng(7);
    const Fock f(1, 70);
    for (int trial = 0; trial < 4; ++trial) {
        const auto ra = f.state(random_positive(2, rng, 0.6, 2.0));
        const auto rb = f.state(random_positive(2, rng, 0.6, 2.0));
        const double exact = fock_fidelity(ra, rb);
        CHECK(gaussian::uhlmann_fidelity(f.covariance(ra), f.covariance(rb)) ==
              doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("two-mode fidelity matches Fock-space density matrices") {
    std::mt19937 rng(11);
    const Fock f(2, 16);
    for (int trial = 0; trial < 2; ++trial) {
        const auto ra = f.state(random_positive(4, rng, 2.0, 4.0));
        const auto rb = f.state(random_positive(4, rng, 2.0, 4.0));
        const double exact = fock_fidelity(ra, rb);
        CHECK(gaussian::uhlmann_fidelity(f.covariance(ra), f.covariance(rb)) ==
              doctest::Approx(exact).epsilon(1e-7));
    }
}

TEST_CASE("pure-state overlaps") {
    const double r = 0.8;
    Eigen::MatrixXd sq(2, 2);
    sq << 0.5 * std::exp(-2 * r), 0.0, 0.0, 0.5 * std::exp(2 * r);
    const auto vac = CovarianceMatrix::vacuum(1);
    CHECK(gaussian::uhlmann_fidelity(vac, CovarianceMatrix(sq)) ==
          doctest::Approx(1.0 / std::cosh(r)).epsilon(1e-12));
    CHECK(gaussian::uhlmann_fidelity(vac, vac) == doctest::Approx(1.0).epsilon(1e-14));
    // vacuum against thermal: probability of the ground state, 1 - e^{-w/T}
    const double T = 0.9;
    CHECK(gaussian::uhlmann_fidelity(vac, gaussian::thermal_oscillator(1.0, T)) ==
          doctest::Approx(-std::expm1(-1.0 / T)).epsilon(1e-12));
}

TEST_CASE("symplectic spectrum and physicality") {
    const auto th = gaussian::thermal_oscillator(2.0, 1.5);
    const auto nu = gaussian::symplectic_eigenvalues(th);
    REQUIRE(nu.size() == 1);
    CHECK(nu[0] == doctest::Approx(0.5 / std::tanh(2.0 / 3.0)).epsilon(1e-13));
    CHECK(gaussian::is_physical(th).physical);
    CHECK_FALSE(gaussian::is_physical(CovarianceMatrix(0.4 * Eigen::MatrixXd::Identity(2, 2))).physical);
    CHECK(gaussian::is_physical(CovarianceMatrix::vacuum(3)).physical);
}

TEST_CASE("Gibbs state of a network from matrix functions of V") {
    Eigen::MatrixXd V(3, 3);
    V << 2.0, -0.4, 0.1, -0.4, 3.0, -0.7, 0.1, -0.7, 1.5;
    const HarmonicNetwork net(V, {});
    const double T = 0.8;
    const auto C = gaussian::thermal_covariance(normal_modes(net), T);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
    Eigen::VectorXd fx(3), fp(3);
    for (int i = 0; i < 3; ++i) {
        const double w = std::sqrt(es.eigenvalues()(i));
        fx(i) = 0.5 / (w * std::tanh(w / (2 * T)));
        fp(i) = 0.5 * w / std::tanh(w / (2 * T));
    }
    const Eigen::MatrixXd XX = es.eigenvectors() * fx.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd PP = es.eigenvectors() * fp.asDiagonal() * es.eigenvectors().transpose();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(C.xx(i, j) == doctest::Approx(XX(i, j)).epsilon(1e-12).scale(1.0));
            CHECK(C.pp(i, j) == doctest::Approx(PP(i, j)).epsilon(1e-12).scale(1.0));
            CHECK(std::abs(C.xp(i, j)) < 1e-14);
        }
    }
}

TEST_CASE("reduction and direct sums") {
    const auto a = gaussian::thermal_oscillator(1.0, 1.0);
    const auto b = gaussian::thermal_oscillator(2.0, 0.5);
    const auto c = gaussian::thermal_oscillator(3.0, 2.0);
    const auto s = gaussian::direct_sum({a, b, c});
    CHECK(s.n_modes() == 3);
    const auto r = gaussian::reduce(s, {2, 0});
    CHECK(r.xx(0, 0) == doctest::Approx(c.xx(0, 0)));
    CHECK(r.pp(1, 1) == doctest::Approx(a.pp(0, 0)));
    CHECK(r.xx(0, 1) == 0.0);
    CHECK_THROWS_AS(gaussian::reduce(s, {3}), ContractError);
    CHECK_THROWS_AS(gaussian::reduce(s, {1, 1}), ContractError);
}

TEST_CASE("contract errors") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.3, 0.1, 1.0;
    CHECK_THROWS_AS(CovarianceMatrix{bad}, ContractError);
    CHECK_THROWS_AS(CovarianceMatrix{Eigen::MatrixXd::Identity(3, 3)}, ContractError);
    CHECK_THROWS_AS(gaussian::uhlmann_fidelity(CovarianceMatrix::vacuum(1), CovarianceMatrix::vacuum(2)),
                    ContractError);
}

}
