// qle.cpp — Frequency-domain quantum Langevin solution for the wire models

#include "rcmap/qle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/Polynomials>

#include "rcmap/errors.hpp"

namespace rcmap::qle {

namespace {

using cd = std::complex<double>;
using RealPoly = std::vector<double>; // lowest order first

RealPoly poly_mul(const RealPoly& a, const RealPoly& b) {
    RealPoly c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

RealPoly poly_add(RealPoly a, const RealPoly& b, double scale = 1.0) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
    return a;
}

template <class T>
T poly_eval(const RealPoly& p, T x) {
    T acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// Kernel as a rational function of s = -i w (real coefficients).
struct LaplaceKernel {
    RealPoly num{0.0};
    RealPoly den{1.0};
};

RealPoly to_laplace(const spectral::ComplexPoly& p) {
    // w^n = (i s)^n
    RealPoly out(p.size(), 0.0);
    cd in{1.0, 0.0};
    for (std::size_t n = 0; n < p.size(); ++n) {
        const cd c = p[n] * in;
        if (std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c))) {
            throw ModelError("qle: dissipation kernel is not real in the Laplace variable");
        }
        out[n] = c.real();
        in *= cd{0.0, 1.0};
    }
    return out;
}

std::vector<LaplaceKernel> node_kernels(const LangevinModel& m) {
    std::vector<LaplaceKernel> k(static_cast<std::size_t>(m.size()));
    for (const auto& ch : m.channels) {
        auto rk = spectral::rational_kernel(ch.spectral);
        k[static_cast<std::size_t>(ch.node)] = {to_laplace(rk.numerator), to_laplace(rk.denominator)};
    }
    return k;
}

// Row a of A(s) multiplied by its kernel denominator; entries are polynomials.
std::vector<std::vector<RealPoly>> polynomial_matrix(const LangevinModel& m) {
    const int n = m.size();
    const auto kernels = node_kernels(m);
    std::vector<std::vector<RealPoly>> M(static_cast<std::size_t>(n),
                                         std::vector<RealPoly>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a) {
        const auto& k = kernels[static_cast<std::size_t>(a)];
        for (int b = 0; b < n; ++b) {
            RealPoly e = poly_mul(k.den, RealPoly{m.potential(a, b)});
            if (a == b) {
                e = poly_add(poly_mul(k.den, RealPoly{m.potential(a, a), 0.0, 1.0}), k.num, -1.0);
            }
            M[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = e;
        }
    }
    return M;
}

RealPoly polynomial_determinant(const std::vector<std::vector<RealPoly>>& M) {
    const int n = static_cast<int>(M.size());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    RealPoly det{0.0};
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
        RealPoly term{inversions % 2 ? -1.0 : 1.0};
        for (int i = 0; i < n; ++i) term = poly_mul(term, M[i][perm[i]]);
        det = poly_add(det, term);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

cd det_M(const std::vector<std::vector<RealPoly>>& M, cd s) {
    const auto n = static_cast<Eigen::Index>(M.size());
    Eigen::MatrixXcd A(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) A(a, b) = poly_eval(M[a][b], s);
    return A.determinant();
}

// Rough magnitudes of the stationary covariances from the bare oscillators.
struct Scales {
    double xx{0.0};
    double pp{0.0};
};

Scales thermal_scales(const LangevinModel& m) {
    double T = 0.0;
    for (const auto& ch : m.channels) T = std::max(T, ch.temperature);
    Eigen::MatrixXd bare = m.potential - Eigen::MatrixXd(m.shifts.asDiagonal());
    Scales s;
    for (int a = 0; a < m.size(); ++a) {
        const double w = std::sqrt(std::max(bare(a, a), 1e-300));
        const double coth = 1.0 / std::tanh(w / (2.0 * T));
        s.xx = std::max(s.xx, 0.5 * coth / w);
        s.pp = std::max(s.pp, 0.5 * coth * w);
    }
    return s;
}

std::vector<double> breakpoints(const LangevinModel& m, const std::vector<cd>& pole_list) {
    std::vector<double> bp;
    for (const cd& p : pole_list) {
        if (p.real() <= 0.0) continue;
        const double width = std::abs(p.imag());
        for (double f : {0.0, 1.0, 3.0, 10.0, 30.0}) {
            bp.push_back(p.real() + f * width);
            if (p.real() - f * width > 0.0) bp.push_back(p.real() - f * width);
        }
    }
    for (const auto& ch : m.channels) {
        for (double f : spectral::characteristic_frequencies(ch.spectral)) bp.push_back(f);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.potential, Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) > 0.0) bp.push_back(std::sqrt(es.eigenvalues()(i)));
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ContractError(std::string("qle: ") + what + " must be positive and finite");
    }
}

} // namespace

LangevinModel wire_model(const WireParams& w, const spectral::SpectralDensity& hot,
                         const spectral::SpectralDensity& cold, double T_h, double T_c,
                         bool shifts, std::string label) {
    require_positive(T_h, "T_h");
    require_positive(T_c, "T_c");
    LangevinModel m;
    m.which = ModelKind::wire;
    m.label = std::move(label);
    m.coupling_k = w.k;
    const auto net = build_wire(w, false, 0.0);
    m.shifts = Eigen::VectorXd::Zero(2);
    if (shifts) {
        m.shifts(0) = spectral::renormalisation_shift(hot);
        m.shifts(1) = spectral::renormalisation_shift(cold);
    }
    m.potential = net.V() + Eigen::MatrixXd(m.shifts.asDiagonal());
    m.channels = {{0, hot, T_h, "hot"}, {1, cold, T_c, "cold"}};
    // Validate that both spectra have a kernel.
    (void)spectral::rational_kernel(hot);
    (void)spectral::rational_kernel(cold);
    return m;
}

LangevinModel augmented_model(const AugmentedParams& p, double residual_cutoff, std::string label) {
    require_positive(p.T_h, "T_h");
    require_positive(p.T_c, "T_c");
    require_positive(residual_cutoff, "residual cutoff");
    const auto net = build_augmented(p, label);
    const auto& uc = p.cold.as<spectral::Underdamped>();
    const auto residual = spectral::with_cutoff(spectral::OhmicLinear{uc.gamma}, residual_cutoff);

    LangevinModel m;
    m.which = ModelKind::augmented;
    m.label = std::move(label);
    m.coupling_k = p.wire.k;
    m.coupling_lambda = uc.coupling;
    m.residual_cutoff = residual_cutoff;
    m.shifts = Eigen::VectorXd::Zero(3);
    m.shifts(0) = spectral::renormalisation_shift(p.hot);
    if (p.shift_cold) m.shifts(1) = uc.coupling * uc.coupling / (uc.resonance * uc.resonance);
    m.shifts(2) = spectral::renormalisation_shift(residual);
    // build_augmented already carries the cold shift.
    m.potential = net.V();
    m.potential(0, 0) += m.shifts(0);
    m.potential(2, 2) += m.shifts(2);
    m.channels = {{0, p.hot, p.T_h, "hot"}, {2, residual, p.T_c, "residual"}};
    (void)spectral::rational_kernel(p.hot);
    return m;
}

Eigen::MatrixXcd susceptibility(const LangevinModel& model, cd omega) {
    Eigen::MatrixXcd A = model.potential.cast<cd>();
    A.diagonal().array() -= omega * omega;
    for (const auto& ch : model.channels) {
        A(ch.node, ch.node) -= spectral::fourier_kernel(ch.spectral, omega);
    }
    return A;
}

std::vector<cd> poles(const LangevinModel& model) {
    const auto M = polynomial_matrix(model);
    RealPoly det = polynomial_determinant(M);
    double big = 0.0;
    for (double c : det) big = std::max(big, std::abs(c));
    while (det.size() > 1 && std::abs(det.back()) <= 1e-300 * big) det.pop_back();
    if (det.size() < 2) return {};

    Eigen::VectorXd coeffs = Eigen::Map<Eigen::VectorXd>(det.data(), static_cast<Eigen::Index>(det.size()));
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);
    std::vector<cd> out;
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        cd s = solver.roots()(i);
        cd f = det_M(M, s);
        for (int it = 0; it < 12; ++it) {
            const cd h = 1e-7 * std::max(1.0, std::abs(s));
            const cd df = (det_M(M, s + h) - det_M(M, s - h)) / (2.0 * h);
            if (df == 0.0) break;
            const cd next = s - f / df;
            const cd fn = det_M(M, next);
            if (!(std::abs(fn) < std::abs(f))) break;
            s = next;
            f = fn;
        }
        out.push_back(cd{0.0, 1.0} * s); // w = i s
    }
    std::sort(out.begin(), out.end(),
              [](const cd& a, const cd& b) { return a.real() != b.real() ? a.real() < b.real()
                                                                          : a.imag() < b.imag(); });
    return out;
}

StabilityReport stability_scan(const LangevinModel& model, double omega_max) {
    StabilityReport rep;
    const Eigen::MatrixXcd A0 = susceptibility(model, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A0.real(), Eigen::EigenvaluesOnly);
    rep.min_static_eigenvalue = es.eigenvalues().minCoeff();
    try {
        rep.poles = poles(model);
    } catch (const std::exception& e) {
        rep.stable = false;
        rep.message = e.what();
        return rep;
    }
    rep.max_pole_imag = -std::numeric_limits<double>::infinity();
    for (const cd& p : rep.poles) rep.max_pole_imag = std::max(rep.max_pole_imag, p.imag());

    std::vector<double> grid = breakpoints(model, rep.poles);
    if (!(omega_max > 0.0)) {
        omega_max = 1.0;
        for (double w : grid) omega_max = std::max(omega_max, 10.0 * w);
    }
    const double lo = 1e-4 * std::max(1e-300, omega_max);
    for (int i = 0; i <= 2000; ++i) grid.push_back(lo * std::pow(omega_max / lo, i / 2000.0));
    rep.min_relative_det = std::numeric_limits<double>::infinity();
    for (double w : grid) {
        if (w > omega_max) continue;
        const Eigen::MatrixXcd A = susceptibility(model, w);
        const double bound = A.rowwise().norm().prod();
        const double rel = bound > 0.0 ? std::abs(A.determinant()) / bound : 0.0;
        if (rel < rep.min_relative_det) {
            rep.min_relative_det = rel;
            rep.at_omega = w;
        }
    }

    std::ostringstream msg;
    if (!(rep.min_static_eigenvalue > 0.0)) {
        rep.stable = false;
        msg << "static matrix A(0) is not positive definite (min eigenvalue "
            << rep.min_static_eigenvalue << "); ";
    }
    if (!(rep.max_pole_imag < 0.0)) {
        rep.stable = false;
        msg << "pole with Im w = " << rep.max_pole_imag << " >= 0; ";
    }
    if (rep.min_relative_det < 1e-12) {
        rep.stable = false;
        msg << "|det A| nearly vanishes at w = " << rep.at_omega << "; ";
    }
    rep.message = msg.str();
    return rep;
}

ExactSteadyState exact_steady_state(const LangevinModel& model, double tol) {
    if (!(tol > 0.0)) throw ContractError("qle: tolerance must be positive");
    const int n = model.size();
    const auto pole_list = poles(model);
    for (const cd& p : pole_list) {
        if (!(p.imag() < 0.0)) {
            std::ostringstream msg;
            msg << "qle '" << model.label << "': unstable, pole at w = " << p.real()
                << (p.imag() < 0 ? " - " : " + ") << std::abs(p.imag()) << "i";
            throw ModelError(msg.str());
        }
    }
    const auto bp = breakpoints(model, pole_list);

    // Layout: XX upper triangle, PP upper triangle, XP full, then the hot
    // link current in transmission form: with sum_g J_g G_ag conj(G_bg) =
    // Im G_ab real, <X_h P_c> needs only the hot column,
    //   -(1/pi) int w (coth_h - coth_o) J_h Im(G_hh conj G_ch).
    if (model.channels.size() != 2 || model.channels[0].node != 0) {
        throw ContractError("qle: models carry exactly two channels, the first on the hot node");
    }
    const int tri = n * (n + 1) / 2;
    const int dim = 2 * tri + n * n + 1;
    const auto& hot = model.channels[0];
    const double T_other = model.channels[1].temperature;
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) pairs.emplace_back(a, b);

    auto integrand = [&](double w, Eigen::VectorXd& out) {
        out.setZero();
        const Eigen::MatrixXcd G = susceptibility(model, w).partialPivLu().inverse();
        for (const auto& ch : model.channels) {
            const double weight = spectral::thermal_weight(ch.spectral, w, ch.temperature);
            const auto g = G.col(ch.node);
            for (int q = 0; q < tri; ++q) {
                const auto [a, b] = pairs[static_cast<std::size_t>(q)];
                const double re = weight * (g(a) * std::conj(g(b))).real();
                out(q) += re;
                out(tri + q) += w * w * re;
            }
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    out(2 * tri + a * n + b) -= weight * w * (g(a) * std::conj(g(b))).imag();
        }
        const double dw = spectral::thermal_weight(hot.spectral, w, hot.temperature) -
                          spectral::thermal_weight(hot.spectral, w, T_other);
        out(dim - 1) = -w * dw * (G(0, 0) * std::conj(G(1, 0))).imag();
    };

    const Scales sc = thermal_scales(model);
    quad::Options opts;
    opts.rel_tol = tol;
    opts.groups.assign(static_cast<std::size_t>(dim), 2);
    std::fill(opts.groups.begin(), opts.groups.begin() + tri, 0);
    std::fill(opts.groups.begin() + tri, opts.groups.begin() + 2 * tri, 1);
    // The integrals below are pi times the covariances.
    const double xp_scale = std::sqrt(sc.xx * sc.pp);
    opts.group_scale = {std::numbers::pi * sc.xx, std::numbers::pi * sc.pp,
                        std::numbers::pi * xp_scale};
    opts.max_panels = 400000;

    const double upper = 10.0 * (bp.empty() ? 1.0 : bp.back());
    auto r = quad::integrate_to_infinity(integrand, dim, 0.0, upper, bp, opts);
    if (!r.converged) {
        Eigen::Index worst = 0;
        (r.error_estimate.array() / r.value.cwiseAbs().array().max(1e-300)).maxCoeff(&worst);
        std::ostringstream msg;
        msg << "qle '" << model.label << "': covariance quadrature missed rel. tolerance " << tol
            << " after " << r.panels_used << " panels (component " << worst << ": value "
            << r.value(worst) << ", error " << r.error_estimate(worst) << ")";
        throw NumericalError(msg.str());
    }
    r.value /= std::numbers::pi;
    r.error_estimate /= std::numbers::pi;

    Eigen::MatrixXd C(2 * n, 2 * n);
    Eigen::MatrixXd E(2 * n, 2 * n);
    for (int q = 0; q < tri; ++q) {
        const auto [a, b] = pairs[static_cast<std::size_t>(q)];
        C(2 * a, 2 * b) = C(2 * b, 2 * a) = r.value(q);
        E(2 * a, 2 * b) = E(2 * b, 2 * a) = r.error_estimate(q);
        C(2 * a + 1, 2 * b + 1) = C(2 * b + 1, 2 * a + 1) = r.value(tri + q);
        E(2 * a + 1, 2 * b + 1) = E(2 * b + 1, 2 * a + 1) = r.error_estimate(tri + q);
    }
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            C(2 * a, 2 * b + 1) = C(2 * b + 1, 2 * a) = r.value(2 * tri + a * n + b);
            E(2 * a, 2 * b + 1) = E(2 * b + 1, 2 * a) = r.error_estimate(2 * tri + a * n + b);
        }
    }
    return {gaussian::CovarianceMatrix(C), E, r.value(dim - 1), r.panels_used, tol, xp_scale};
}

gaussian::CovarianceMatrix exact_steady_covariance(const LangevinModel& model, double tol) {
    return exact_steady_state(model, tol).covariance;
}

gkls::HeatCurrentReport exact_heat_currents(const LangevinModel& model,
                                            const ExactSteadyState& state) {
    const auto& C = state.covariance;
    const double k = model.coupling_k;
    const double forward = k * C.xp(0, 1);                  // k <X_h P_c>
    const double backward = k * state.hot_link_transmission; // transmission form
    const double scale =
        std::max({std::abs(forward), std::abs(backward), 1e-3 * std::abs(k) * state.xp_scale});
    const double mismatch = std::abs(forward - backward) / scale;
    if (mismatch > 10.0 * state.tolerance) {
        std::ostringstream msg;
        msg << "qle '" << model.label << "': link-current forms disagree (" << forward << " vs "
            << backward << ", relative " << mismatch << " > 10 x tol " << state.tolerance << ")";
        throw NumericalError(msg.str());
    }
    const double q_hot = forward;

    gkls::HeatCurrentReport rep;
    rep.method = "exact";
    rep.dual_form_residual = mismatch;
    rep.labels.push_back("hot");
    rep.currents.push_back(q_hot);
    if (model.which == ModelKind::wire) {
        rep.labels.push_back("cold");
        rep.currents.push_back(-q_hot);
        rep.conservation_residual = 0.0;
    } else {
        const double q_res = -model.coupling_lambda * C.xp(1, 2);
        rep.labels.push_back("residual");
        rep.currents.push_back(q_res);
        const double largest = std::max(std::abs(q_hot), std::abs(q_res));
        rep.conservation_residual =
            largest > 0.0 ? std::abs(q_hot + q_res) / std::max(largest, scale) : 0.0;
    }
    return rep;
}

gkls::HeatCurrentReport exact_heat_currents(const LangevinModel& model, double tol) {
    return exact_heat_currents(model, exact_steady_state(model, tol));
}

} // namespace rcmap::qle
