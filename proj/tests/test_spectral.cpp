// test_spectral.cpp — Spectral densities, kernels and bath correlations
// checked against hand-derived closed forms and brute-force Simpson sums

#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>

#include "rcmap/errors.hpp"
#include "rcmap/spectral.hpp"

using namespace rcmap;
using cd = std::complex<double>;

namespace {

// Composite Simpson on [a, b] with n (even) intervals.
cd simpson(const std::function<cd(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    cd s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

struct UD {
    double g, l, w0;
    double J(double w) const {
        const double d = w * w - w0 * w0;
        return g * l * l * w / (g * g * w * w + d * d);
    }
    double J_coth(double w, double T) const {
        if (w == 0.0) return 2.0 * T * g * l * l / (w0 * w0 * w0 * w0);
        return J(w) / std::tanh(w / (2.0 * T));
    }
};

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("closed forms of the three families") {
    const spectral::SpectralDensity oa(spectral::OhmicAlgebraic{0.2, 5.0});
    CHECK(spectral::evaluate(oa, 2.0) == doctest::Approx(0.2 * 25.0 * 2.0 / (4.0 + 25.0)));
    const spectral::SpectralDensity ud(spectral::Underdamped{0.5, 1.0, 2.0});
    CHECK(spectral::evaluate(ud, 1.5) == doctest::Approx(UD{0.5, 1.0, 2.0}.J(1.5)).epsilon(1e-14));
    const spectral::SpectralDensity ol(spectral::OhmicLinear{0.3});
    CHECK(spectral::evaluate(ol, 7.0) == doctest::Approx(2.1));
    CHECK(spectral::low_frequency_friction(ud) == doctest::Approx(0.5 / 16.0).epsilon(1e-14));
}

TEST_CASE("renormalisation shift equals the static kernel") {
    // (2/pi) int J/w: gamma*Lambda for Ohmic-algebraic, lambda^2/w0^2 underdamped.
    const spectral::SpectralDensity oa(spectral::OhmicAlgebraic{0.2, 5.0});
    const spectral::SpectralDensity ud(spectral::Underdamped{0.5, 1.3, 2.0});
    CHECK(spectral::renormalisation_shift(oa) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spectral::renormalisation_shift(ud) == doctest::Approx(1.69 / 4.0).epsilon(1e-14));
    CHECK(spectral::fourier_kernel(oa, 0.0).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(spectral::fourier_kernel(ud, 0.0).real() == doctest::Approx(1.69 / 4.0).epsilon(1e-14));
}

TEST_CASE("kernel: Im part is J on the real axis, Stieltjes form on the imaginary axis") {
    const double g = 0.2, L = 5.0;
    const spectral::SpectralDensity oa(spectral::OhmicAlgebraic{g, L});
    const UD u{0.5, 1.3, 2.0};
    const spectral::SpectralDensity ud(spectral::Underdamped{u.g, u.l, u.w0});
    for (double w : {0.1, 0.9, 2.0, 3.7, 40.0}) {
        CHECK(spectral::fourier_kernel(oa, w).imag() ==
              doctest::Approx(spectral::evaluate(oa, w)).epsilon(1e-12));
        CHECK(spectral::fourier_kernel(ud, w).imag() == doctest::Approx(u.J(w)).epsilon(1e-12));
    }
    // chi(iy) = (2/pi) int v J(v) / (v^2 + y^2) dv, done by hand.
    for (double y : {0.3, 1.0, 12.0}) {
        const cd a = spectral::fourier_kernel(oa, cd(0.0, y));
        CHECK(a.real() == doctest::Approx(g * L * L / (L + y)).epsilon(1e-12));
        CHECK(std::abs(a.imag()) < 1e-14);
        const cd b = spectral::fourier_kernel(ud, cd(0.0, y));
        CHECK(b.real() == doctest::Approx(u.l * u.l / (u.w0 * u.w0 + y * y + u.g * y)).epsilon(1e-12));
    }
}

TEST_CASE("rational kernel agrees with the direct kernel off the axis") {
    for (const auto& J : {spectral::SpectralDensity(spectral::OhmicAlgebraic{0.2, 5.0}),
                          spectral::SpectralDensity(spectral::Underdamped{0.5, 1.3, 2.0})}) {
        const auto rk = spectral::rational_kernel(J);
        for (cd z : {cd(0.7, 0.2), cd(3.0, 1.0), cd(-1.2, 0.5)}) {
            cd num = 0.0, den = 0.0, p = 1.0;
            for (std::size_t i = 0; i < std::max(rk.numerator.size(), rk.denominator.size()); ++i) {
                if (i < rk.numerator.size()) num += rk.numerator[i] * p;
                if (i < rk.denominator.size()) den += rk.denominator[i] * p;
                p *= z;
            }
            const cd direct = spectral::fourier_kernel(J, z);
            CHECK(std::abs(num / den - direct) < 1e-12 * std::abs(direct));
        }
    }
}

TEST_CASE("scaled underdamped spectrum approaches its overdamped limit") {
    const double a1 = 1e-3, a2 = 1e3, gamma = 1e3;
    const auto s = spectral::scaled_underdamped(a1, a2, gamma);
    const auto& u = s.as<spectral::Underdamped>();
    CHECK(u.coupling * u.coupling == doctest::Approx(a1 * a2 * gamma));
    CHECK(u.resonance * u.resonance == doctest::Approx(a2 * gamma));
    double worst = 0.0;
    for (double w = 1e-2; w <= 10.0; w *= 1.1) {
        const double lim = a1 * a2 * w / (w * w + a2 * a2);
        worst = std::max(worst, std::abs(spectral::evaluate(s, w) - lim) / lim);
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("thermal weight has the classical limit at low frequency") {
    const spectral::SpectralDensity oa(spectral::OhmicAlgebraic{0.2, 5.0});
    CHECK(spectral::thermal_weight(oa, 0.0, 1.5) == doctest::Approx(2.0 * 1.5 * 0.2).epsilon(1e-12));
    CHECK(spectral::thermal_weight(oa, 1e-7, 1.5) == doctest::Approx(2.0 * 1.5 * 0.2).epsilon(1e-9));
    const double w = 2.0, T = 0.7;
    CHECK(spectral::thermal_weight(oa, w, T) ==
          doctest::Approx(spectral::evaluate(oa, w) / std::tanh(w / (2 * T))).epsilon(1e-13));
}

TEST_CASE("correlation function and its integral against brute-force Simpson") {
    const UD u{0.5, 1.0, 2.0};
    const spectral::SpectralDensity J(spectral::Underdamped{u.g, u.l, u.w0});
    const double T = 1.0;
    const double W = 4000.0;
    const int n = 4000000;
    for (double t : {0.0, 1.5, 6.0}) {
        const cd brute = simpson([&](double w) {
            return cd(u.J_coth(w, T) * std::cos(w * t), -u.J(w) * std::sin(w * t));
        }, 0.0, W, n) / M_PI;
        const cd lib = spectral::correlation_function(J, T, t, 1e-10);
        CHECK(std::abs(lib - brute) < 2e-7 * std::abs(brute));

        const cd ibrute = simpson([&](double w) {
            if (w == 0.0) return cd(u.J_coth(0.0, T) * t, 0.0);
            return cd(u.J_coth(w, T) * std::sin(w * t) / w, -u.J(w) * (1.0 - std::cos(w * t)) / w);
        }, 0.0, W, n) / M_PI;
        const cd ilib = spectral::integrated_correlation(J, T, t, 1e-10);
        CHECK(std::abs(ilib - ibrute) < 1e-7 * std::max(1e-3, std::abs(ibrute)));
    }
}

TEST_CASE("integrated correlation saturates at friction*T - i delta/2") {
    const auto J = spectral::scaled_underdamped(1e-3, 1e3, 1e3);
    const double T = 0.5;
    const cd late = spectral::integrated_correlation(J, T, 100.0, 1e-8);
    // friction alpha1/alpha2, shift alpha1
    CHECK(late.real() == doctest::Approx(T * 1e-6).epsilon(1e-3));
    CHECK(late.imag() == doctest::Approx(-0.5e-3).epsilon(1e-3));
    CHECK(spectral::integrated_correlation(J, T, 0.0) == cd(0.0, 0.0));
}

TEST_CASE("contract violations") {
    CHECK_THROWS_AS(spectral::SpectralDensity(spectral::OhmicAlgebraic{-1.0, 1.0}), ContractError);
    CHECK_THROWS_AS(spectral::SpectralDensity(spectral::Underdamped{1.0, 1.0, 0.0}), ContractError);
    const spectral::SpectralDensity ol(spectral::OhmicLinear{0.1});
    CHECK_THROWS_AS(spectral::evaluate(ol, -1.0), ContractError);
    CHECK_THROWS_AS(spectral::correlation_function(ol, 1.0, 1.0), ContractError);
    CHECK_THROWS_AS(spectral::integrated_correlation(ol, 1.0, 1.0), ContractError);
    CHECK_THROWS_AS(spectral::fourier_kernel(ol, 1.0), ContractError);
    const auto reg = spectral::with_cutoff(spectral::OhmicLinear{0.1}, 50.0);
    CHECK(spectral::renormalisation_shift(reg) == doctest::Approx(5.0));
}

}
