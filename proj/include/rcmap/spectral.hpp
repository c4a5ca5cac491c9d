// spectral.hpp — Closed-form bath spectral densities, renormalisation shifts,
// dissipation kernels and bath correlation functions.

#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace rcmap::spectral {

// J(w) = gamma * cutoff^2 * w / (w^2 + cutoff^2)
struct OhmicAlgebraic {
    double gamma{0.0};
    double cutoff{0.0};
};

// J(w) = gamma * coupling^2 * w / (gamma^2 w^2 + (w^2 - resonance^2)^2)
struct Underdamped {
    double gamma{0.0};
    double coupling{0.0};  // lambda
    double resonance{0.0}; // omega_0
};

// J(w) = gamma * w. Formal: only meaningful for master-equation rates. Kernels
// and shifts need an explicit cutoff, see with_cutoff().
struct OhmicLinear {
    double gamma{0.0};
};

class SpectralDensity {
public:
    using Variant = std::variant<OhmicAlgebraic, Underdamped, OhmicLinear>;

    SpectralDensity(OhmicAlgebraic p);
    SpectralDensity(Underdamped p);
    SpectralDensity(OhmicLinear p);

    const Variant& params() const { return params_; }
    std::string kind() const;

    template <class T>
    bool is() const { return std::holds_alternative<T>(params_); }
    template <class T>
    const T& as() const { return std::get<T>(params_); }

private:
    Variant params_;
};

// Polynomial in omega, lowest order first.
using ComplexPoly = std::vector<std::complex<double>>;

struct RationalKernel {
    ComplexPoly numerator;
    ComplexPoly denominator;
};

double evaluate(const SpectralDensity& J, double omega);

// J(w)/w, finite at w = 0.
double evaluate_over_omega(const SpectralDensity& J, double omega);

// lim_{w->0} J(w)/w: the low-frequency friction coefficient.
double low_frequency_friction(const SpectralDensity& J);

// delta = (2/pi) int_0^inf J(w)/w dw, in frequency^2 units.
double renormalisation_shift(const SpectralDensity& J);

// Fourier transform of the causal dissipation kernel; valid for complex
// frequency (analytic in the upper half plane).
std::complex<double> fourier_kernel(const SpectralDensity& J, std::complex<double> omega);

// The same kernel as a ratio of polynomials in omega.
RationalKernel rational_kernel(const SpectralDensity& J);

// Frequencies where J has structure (cutoff, resonance and half-width marks).
std::vector<double> characteristic_frequencies(const SpectralDensity& J);

// Ohmic-linear spectrum regularised with the algebraic cutoff.
SpectralDensity with_cutoff(const OhmicLinear& J, double cutoff);

// Underdamped spectrum with lambda^2 = a1 a2 gamma and omega_0^2 = a2 gamma.
SpectralDensity scaled_underdamped(double alpha1, double alpha2, double gamma);

// gamma -> inf limit of scaled_underdamped: a1 a2 w / (w^2 + a2^2).
SpectralDensity overdamped_limit(double alpha1, double alpha2);

// J(w) coth(w / 2T), with the w -> 0 limit 2T J(w)/w taken analytically.
double thermal_weight(const SpectralDensity& J, double omega, double temperature);

// <B(t) B(0)> = (1/pi) int_0^inf J(w) (coth(w/2T) cos wt - i sin wt) dw.
// For the Ohmic-algebraic family the real part diverges logarithmically at
// t = 0 and +inf is returned there.
std::complex<double> correlation_function(const SpectralDensity& J, double temperature,
                                          double t, double rel_tol = 1e-8);

// int_0^t <B(s) B(0)> ds, with the s-integral done analytically.
std::complex<double> integrated_correlation(const SpectralDensity& J, double temperature,
                                            double t, double rel_tol = 1e-8);

} // namespace rcmap::spectral
