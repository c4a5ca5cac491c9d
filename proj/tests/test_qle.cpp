// test_qle.cpp — Exact Langevin steady state against Matsubara sums,
// classical and weak-coupling limits

#include <doctest.h>

#include <cmath>
#include <complex>

#include "rcmap/errors.hpp"
#include "rcmap/gaussian.hpp"
#include "rcmap/qle.hpp"

using namespace rcmap;
using cd = std::complex<double>;

namespace {

// Equilibrium covariances from the imaginary-frequency resolvent
//   <XX> = T sum_n G(i nu_n),  <PP> = T sum_n (1 - nu_n^2 G(i nu_n)),
// with G^{-1}(i nu) = V_bare + nu^2 + diag(delta - chi(i nu)). `damping`
// returns delta - chi(i nu) per node, written in closed form by the caller.
template <class Damping>
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> matsubara(const Eigen::MatrixXd& V, double T,
                                                      Damping damping) {
    const auto n = V.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    auto G = [&](double nu) {
        Eigen::MatrixXd A = V + nu * nu * I;
        A.diagonal() += damping(nu);
        return Eigen::MatrixXd(A.inverse());
    };
    Eigen::MatrixXd xx = T * G(0.0);
    Eigen::MatrixXd pp = T * I;
    const int N = 400000;
    for (int k = 1; k <= N; ++k) {
        const double nu = 2.0 * M_PI * k * T;
        const Eigen::MatrixXd g = G(nu);
        xx += 2.0 * T * g;
        pp += 2.0 * T * (I - nu * nu * g);
    }
    // Tails: G ~ 1/nu^2 and 1 - nu^2 G ~ (V + asymptotic damping)/nu^2.
    const double tail = 2.0 * T / (4.0 * M_PI * M_PI * T * T * (N + 0.5));
    xx += tail * I;
    Eigen::MatrixXd c = V;
    c.diagonal() += damping(1e12);
    pp += tail * c;
    return {xx, pp};
}

void check_close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rel) {
    const double scale = b.cwiseAbs().maxCoeff();
    CHECK((a - b).cwiseAbs().maxCoeff() < rel * scale);
}

Eigen::MatrixXd block(const gaussian::CovarianceMatrix& C, int off) {
    const int n = C.n_modes();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = C(2 * i + off, 2 * j + off);
    return m;
}

} // namespace

TEST_SUITE("qle") {

TEST_CASE("static susceptibility is the bare potential") {
    const WireParams w{1.0, 3.0, 0.8};
    const spectral::SpectralDensity hot(spectral::OhmicAlgebraic{0.3, 8.0});
    const spectral::SpectralDensity cold(spectral::Underdamped{0.9, 0.9, 4.0});
    const auto m = qle::wire_model(w, hot, cold, 1.0, 1.0);
    const Eigen::MatrixXcd A0 = qle::susceptibility(m, 0.0);
    CHECK((A0.real() - build_wire(w, false, 0.0).V()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(A0.imag().cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("poles are zeros of det A in the lower half plane") {
    const WireParams w{1.0, 3.0, 0.8};
    const spectral::SpectralDensity hot(spectral::OhmicAlgebraic{0.3, 8.0});
    const spectral::SpectralDensity cold(spectral::Underdamped{0.9, 0.9, 4.0});
    const auto m = qle::wire_model(w, hot, cold, 1.0, 1.0);
    const auto ps = qle::poles(m);
    CHECK(ps.size() == 2 * 2 + 1 + 2); // 2 nodes x 2, plus kernel denominator orders
    for (const cd& p : ps) {
        CHECK(p.imag() < 0.0);
        const Eigen::MatrixXcd A = qle::susceptibility(m, p);
        CHECK(std::abs(A.determinant()) < 1e-8 * A.rowwise().norm().prod());
    }
    CHECK(qle::stability_scan(m, 0.0).stable);
}

TEST_CASE("strong-coupling equilibrium wire against the Matsubara sum") {
    const WireParams w{1.0, 3.0, 0.8};
    const double g = 0.3, L = 8.0, gc = 0.9, lc = 0.9, w0 = 4.0, T = 0.7;
    const spectral::SpectralDensity hot(spectral::OhmicAlgebraic{g, L});
    const spectral::SpectralDensity cold(spectral::Underdamped{gc, lc, w0});
    const auto m = qle::wire_model(w, hot, cold, T, T);
    const auto ex = qle::exact_steady_state(m, 1e-10);

    const auto V = build_wire(w, false, 0.0).V();
    const auto [xx, pp] = matsubara(V, T, [&](double nu) {
        Eigen::VectorXd d(2);
        d(0) = g * L * nu / (L + nu);
        d(1) = lc * lc / (w0 * w0) - lc * lc / (w0 * w0 + nu * nu + gc * nu);
        return d;
    });
    check_close(block(ex.covariance, 0), xx, 1e-8);
    check_close(block(ex.covariance, 1), pp, 1e-7);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(ex.covariance.xp(i, j)) < 1e-9);

    const auto q = qle::exact_heat_currents(m, ex);
    CHECK(std::abs(q.at("hot")) < 1e-9);
}

TEST_CASE("equilibrium augmented model against the Matsubara sum") {
    AugmentedParams p;
    p.hot = spectral::SpectralDensity(spectral::OhmicAlgebraic{0.2, 10.0});
    p.cold = spectral::SpectralDensity(spectral::Underdamped{0.5, 0.9, 4.0});
    p.T_h = p.T_c = 1.3;
    const double Lr = 50.0;
    const auto m = qle::augmented_model(p, Lr);
    const auto ex = qle::exact_steady_state(m, 1e-10);
    const auto [xx, pp] = matsubara(build_augmented(p).V(), 1.3, [&](double nu) {
        Eigen::VectorXd d(3);
        d(0) = 0.2 * 10.0 * nu / (10.0 + nu);
        d(1) = 0.0;
        d(2) = 0.5 * Lr * nu / (Lr + nu);
        return d;
    });
    check_close(block(ex.covariance, 0), xx, 1e-8);
    check_close(block(ex.covariance, 1), pp, 1e-7);
}

TEST_CASE("high-temperature classical limit: XX -> T V^-1") {
    const WireParams w{1.0, 3.0, 0.8};
    const spectral::SpectralDensity hot(spectral::OhmicAlgebraic{0.3, 8.0});
    const spectral::SpectralDensity cold(spectral::Underdamped{0.9, 0.9, 4.0});
    const double T = 200.0;
    const auto ex = qle::exact_steady_covariance(qle::wire_model(w, hot, cold, T, T), 1e-9);
    const Eigen::MatrixXd classical = T * build_wire(w, false, 0.0).V().inverse();
    check_close(block(ex, 0), classical, 1e-5);
    // Without the counter-terms the static matrix is V - delta instead (a
    // weaker bath keeps it positive definite).
    const spectral::SpectralDensity weak(spectral::OhmicAlgebraic{0.05, 8.0});
    const auto un = qle::exact_steady_covariance(qle::wire_model(w, weak, cold, T, T, false), 1e-9);
    Eigen::MatrixXd shifted = build_wire(w, false, 0.0).V();
    shifted(0, 0) -= 0.4;
    shifted(1, 1) -= 0.81 / 16.0;
    check_close(block(un, 0), T * shifted.inverse(), 1e-5);
    CHECK(std::abs(un.xx(0, 0) - classical(0, 0)) > 0.1 * classical(0, 0));
}

TEST_CASE("weak coupling: decoupled nodes thermalise to their own baths") {
    const WireParams w{1.0, 3.0, 0.0};
    const spectral::SpectralDensity hot(spectral::OhmicAlgebraic{1e-4, 1e3});
    const spectral::SpectralDensity cold(spectral::Underdamped{1.0, 0.02, 4.0});
    const auto ex = qle::exact_steady_covariance(qle::wire_model(w, hot, cold, 2.0, 0.5), 1e-9);
    CHECK(gaussian::uhlmann_fidelity(gaussian::reduce(ex, {0}), gaussian::thermal_oscillator(1.0, 2.0)) >
          0.9999);
    CHECK(gaussian::uhlmann_fidelity(gaussian::reduce(ex, {1}), gaussian::thermal_oscillator(3.0, 0.5)) >
          0.9999);
}

TEST_CASE("non-equilibrium currents: direction, conservation, dual forms") {
    AugmentedParams p;
    p.cold = spectral::SpectralDensity(spectral::Underdamped{1.0, 0.9, 4.0});
    const auto wm = qle::wire_model(p.wire, p.hot, p.cold, p.T_h, p.T_c);
    const auto q = qle::exact_heat_currents(wm, 1e-9);
    CHECK(q.at("hot") > 0.0);
    CHECK(q.at("cold") == doctest::Approx(-q.at("hot")));
    CHECK(q.dual_form_residual < 1e-8);
    const auto qa = qle::exact_heat_currents(qle::augmented_model(p, 1e3), 1e-9);
    CHECK(qa.at("hot") > 0.0);
    CHECK(qa.conservation_residual < 1e-7);
}

TEST_CASE("instabilities are detected") {
    // Strong hot coupling without counter-terms: A(0) = V - delta is indefinite.
    const WireParams w{1.0, 3.0, 0.8};
    const spectral::SpectralDensity hot(spectral::OhmicAlgebraic{2.0, 10.0});
    const spectral::SpectralDensity cold(spectral::Underdamped{0.9, 0.9, 4.0});
    const auto bad = qle::wire_model(w, hot, cold, 1.0, 1.0, false);
    const auto rep = qle::stability_scan(bad, 0.0);
    CHECK_FALSE(rep.stable);
    CHECK(rep.min_static_eigenvalue < 0.0);
    CHECK(rep.max_pole_imag > 0.0);
    CHECK_THROWS_AS(qle::exact_steady_state(bad), ModelError);
    CHECK(qle::stability_scan(qle::wire_model(w, hot, cold, 1.0, 1.0, true), 0.0).stable);

    // Hand-built indefinite potential.
    auto m = qle::wire_model(w, spectral::SpectralDensity(spectral::OhmicAlgebraic{0.1, 10.0}), cold, 1.0, 1.0);
    m.potential << 0.4, 0.6, 0.6, 0.4;
    CHECK_FALSE(qle::stability_scan(m, 0.0).stable);

    // Unshifted augmented network with lambda^2 > w0^2 (w_c^2 + k - k^2/(w_h^2 + k)).
    AugmentedParams p;
    p.shift_cold = false;
    p.cold = spectral::SpectralDensity(spectral::Underdamped{1.0, 13.0, 4.0});
    CHECK_THROWS_AS(qle::augmented_model(p), ModelError);
    p.shift_cold = true;
    CHECK_NOTHROW(qle::augmented_model(p));
}

TEST_CASE("default augmented network is stable across the friction sweep") {
    for (int i = 0; i <= 12; ++i) {
        const double g = std::pow(10.0, -3.0 + 0.5 * i);
        AugmentedParams p;
        p.cold = spectral::SpectralDensity(spectral::Underdamped{g, 0.9, 4.0});
        const auto wire = qle::wire_model(p.wire, p.hot, p.cold, p.T_h, p.T_c);
        const auto aug = qle::augmented_model(p, 1e3);
        for (const auto* m : {&wire, &aug}) {
            const auto rep = qle::stability_scan(*m, 0.0);
            CHECK(rep.stable);
            CHECK(rep.max_pole_imag < 0.0);
        }
    }
}

TEST_CASE("contract errors") {
    const spectral::SpectralDensity hot(spectral::OhmicAlgebraic{0.1, 10.0});
    const spectral::SpectralDensity ol(spectral::OhmicLinear{0.1});
    CHECK_THROWS_AS(qle::wire_model({1.0, 3.0, 0.8}, hot, ol, 1.0, 1.0), ContractError);
    CHECK_THROWS_AS(qle::wire_model({1.0, 3.0, 0.8}, hot, hot, 0.0, 1.0), ContractError);
    CHECK_THROWS_AS(qle::augmented_model(AugmentedParams{}, -1.0), ContractError);
    CHECK_THROWS_AS(qle::exact_steady_state(qle::wire_model({1.0, 3.0, 0.8}, hot, hot, 1.0, 1.0), 0.0),
                    ContractError);
}

}
