// quadrature.cpp — Gauss-Kronrod 10/21 rule with a global panel heap

#include "rcmap/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace rcmap::quad {

namespace {

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208034224149, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a;
    double b;
    Eigen::VectorXd value;
    Eigen::VectorXd error;
    bool splittable;
};

class AdaptivePool {
public:
    AdaptivePool(const VectorIntegrand& f, int dim, const Options& opts)
        : f_(f), dim_(dim), opts_(opts),
          total_(Eigen::VectorXd::Zero(dim)), total_err_(Eigen::VectorXd::Zero(dim)),
          scratch_(dim) {
        if (!opts_.groups.empty() && static_cast<int>(opts_.groups.size()) != dim) {
            opts_.groups.clear();
        }
    }

    void add_interval(double a, double b) {
        if (!(b > a)) return;
        Panel p{a, b, Eigen::VectorXd(dim_), Eigen::VectorXd(dim_), true};
        gauss_kronrod_21(f_, a, b, p.value, p.error, scratch_);
        push(std::move(p));
    }

    Eigen::VectorXd tolerance() const {
        Eigen::VectorXd mag = total_.cwiseAbs();
        Eigen::VectorXd floor = Eigen::VectorXd::Zero(dim_);
        if (opts_.groups.empty()) {
            floor.setConstant(opts_.group_floor * (dim_ > 0 ? mag.maxCoeff() : 0.0));
        } else {
            int ngroups = 1 + *std::max_element(opts_.groups.begin(), opts_.groups.end());
            std::vector<double> gmax(static_cast<std::size_t>(ngroups), 0.0);
            for (int k = 0; k < dim_; ++k) {
                auto g = static_cast<std::size_t>(opts_.groups[static_cast<std::size_t>(k)]);
                gmax[g] = std::max(gmax[g], mag(k));
            }
            for (std::size_t g = 0; g < gmax.size() && g < opts_.group_scale.size(); ++g) {
                gmax[g] = std::max(gmax[g], opts_.group_scale[g]);
            }
            for (int k = 0; k < dim_; ++k) {
                floor(k) = opts_.group_floor *
                           gmax[static_cast<std::size_t>(opts_.groups[static_cast<std::size_t>(k)])];
            }
        }
        Eigen::VectorXd tol(dim_);
        for (int k = 0; k < dim_; ++k) {
            tol(k) = opts_.rel_tol * std::max(mag(k), floor(k)) + opts_.abs_tol;
        }
        return tol;
    }

    bool satisfied() const {
        Eigen::VectorXd tol = tolerance();
        for (int k = 0; k < dim_; ++k) {
            if (total_err_(k) > tol(k)) return false;
        }
        return true;
    }

    // Bisect the worst panel until the tolerance is met; false on exhaustion.
    bool refine() {
        rebuild();
        while (!satisfied()) {
            if (static_cast<int>(panels_.size()) >= opts_.max_panels) return false;
            if (static_cast<int>(panels_.size()) >= 2 * size_at_rebuild_) rebuild();
            if (heap_.empty()) return false;
            auto [key, idx] = heap_.top();
            heap_.pop();
            // Nothing splittable carries error any more.
            if (!(key > 0.0)) return satisfied();
            Panel& p = panels_[idx];
            double mid = 0.5 * (p.a + p.b);
            if (!(mid > p.a && mid < p.b) ||
                (p.b - p.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(std::abs(p.a), std::abs(p.b))) {
                p.splittable = false;
                continue;
            }
            total_ -= p.value;
            total_err_ -= p.error;
            double b = p.b;
            p.b = mid;
            gauss_kronrod_21(f_, p.a, p.b, p.value, p.error, scratch_);
            total_ += p.value;
            total_err_ += p.error;
            heap_.emplace(key_of(p), idx);
            Panel q{mid, b, Eigen::VectorXd(dim_), Eigen::VectorXd(dim_), true};
            gauss_kronrod_21(f_, q.a, q.b, q.value, q.error, scratch_);
            push(std::move(q));
        }
        return true;
    }

    VectorQuadratureResult result(bool converged) {
        recompute_totals();
        return {total_, total_err_, static_cast<int>(panels_.size()), converged};
    }

    const Options& options() const { return opts_; }

private:
    void push(Panel p) {
        total_ += p.value;
        total_err_ += p.error;
        panels_.push_back(std::move(p));
        heap_.emplace(key_of(panels_.back()), panels_.size() - 1);
    }

    double key_of(const Panel& p) const {
        if (!p.splittable) return -1.0;
        if (weights_.size() != dim_) return 0.0; // keyed properly at the next rebuild
        double k = 0.0;
        for (int i = 0; i < dim_; ++i) {
            k = std::max(k, p.error(i) / weights_(i));
        }
        return k;
    }

    void recompute_totals() {
        total_.setZero();
        total_err_.setZero();
        for (const auto& p : panels_) {
            total_ += p.value;
            total_err_ += p.error;
        }
    }

    void rebuild() {
        recompute_totals();
        weights_ = tolerance();
        for (int k = 0; k < dim_; ++k) {
            if (!(weights_(k) > 0.0)) weights_(k) = std::numeric_limits<double>::min();
        }
        heap_ = {};
        for (std::size_t i = 0; i < panels_.size(); ++i) heap_.emplace(key_of(panels_[i]), i);
        size_at_rebuild_ = std::max<int>(static_cast<int>(panels_.size()), 16);
    }

    const VectorIntegrand& f_;
    int dim_;
    Options opts_;
    std::vector<Panel> panels_;
    std::priority_queue<std::pair<double, std::size_t>> heap_;
    Eigen::VectorXd total_;
    Eigen::VectorXd total_err_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd scratch_;
    int size_at_rebuild_{16};
};

std::vector<double> sorted_points(double a, double b, const std::vector<double>& breakpoints) {
    std::vector<double> pts{a};
    for (double x : breakpoints) {
        if (std::isfinite(x) && x > a && x < b) pts.push_back(x);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

VectorIntegrand lift(const ScalarIntegrand& f) {
    return [&f](double x, Eigen::VectorXd& out) { out(0) = f(x); };
}

QuadratureResult lower(const VectorQuadratureResult& r) {
    return {r.value(0), r.error_estimate(0), r.panels_used, r.converged};
}

} // namespace

void gauss_kronrod_21(const VectorIntegrand& f, double a, double b,
                      Eigen::VectorXd& value, Eigen::VectorXd& error,
                      Eigen::VectorXd& scratch) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    value.setZero();
    error.setZero(); // used as the Gauss accumulator first
    f(c, scratch);
    value += kWgk[10] * scratch;
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        f(c - dx, scratch);
        Eigen::VectorXd pair = scratch;
        f(c + dx, scratch);
        pair += scratch;
        value += kWgk[j] * pair;
        if (j % 2 == 1) error += kWg[j / 2] * pair;
    }
    value *= h;
    error = (value - h * error).cwiseAbs();
}

VectorQuadratureResult integrate(const VectorIntegrand& f, int dim, double a, double b,
                                 const std::vector<double>& breakpoints, const Options& opts) {
    AdaptivePool pool(f, dim, opts);
    auto pts = sorted_points(a, b, breakpoints);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) pool.add_interval(pts[i], pts[i + 1]);
    bool ok = pool.refine();
    return pool.result(ok);
}

QuadratureResult integrate(const ScalarIntegrand& f, double a, double b,
                           const std::vector<double>& breakpoints, const Options& opts) {
    auto g = lift(f);
    return lower(integrate(g, 1, a, b, breakpoints, opts));
}

VectorQuadratureResult integrate_to_infinity(const VectorIntegrand& f, int dim, double a,
                                             double initial_upper,
                                             const std::vector<double>& breakpoints,
                                             const Options& opts) {
    double upper = std::max(initial_upper, a + 1.0);
    for (double x : breakpoints) {
        if (std::isfinite(x)) upper = std::max(upper, 2.0 * x);
    }
    AdaptivePool pool(f, dim, opts);
    auto pts = sorted_points(a, upper, breakpoints);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) pool.add_interval(pts[i], pts[i + 1]);

    Eigen::VectorXd fw(dim);
    bool ok = pool.refine();
    for (int doubling = 0; ok && doubling < 80; ++doubling) {
        f(upper, fw);
        Eigen::VectorXd tail = 0.5 * upper * fw.cwiseAbs();
        Eigen::VectorXd tol = pool.tolerance();
        bool tail_ok = true;
        for (int k = 0; k < dim; ++k) tail_ok = tail_ok && tail(k) <= tol(k);
        if (tail_ok) return pool.result(true);
        pool.add_interval(upper, 2.0 * upper);
        upper *= 2.0;
        ok = pool.refine();
    }
    return pool.result(false);
}

QuadratureResult integrate_to_infinity(const ScalarIntegrand& f, double a, double initial_upper,
                                       const std::vector<double>& breakpoints,
                                       const Options& opts) {
    auto g = lift(f);
    return lower(integrate_to_infinity(g, 1, a, initial_upper, breakpoints, opts));
}

} // namespace rcmap::quad
