#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "geoharm/core.hpp"

namespace geoharm {

// ── adaptive Gauss–Kronrod 15(7) ─────────────────────────────────────────────

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 52;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

namespace detail {

// Kronrod-15 abscissae on [-1,1] (positive half) and weights; every second
// abscissa is a Gauss-7 node with weight wg.
inline constexpr std::array<double, 8> kGk15X = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
inline constexpr std::array<double, 8> kGk15Wk = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
inline constexpr std::array<double, 4> kGk15Wg = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct Gk15Panel {
    double integral;
    double error;
};

template <class F>
Gk15Panel gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(center);
    double resk = kGk15Wk[7] * fc;
    double resg = kGk15Wg[3] * fc;
    double resabs = kGk15Wk[7] * std::abs(fc);

    std::array<double, 7> fsum;  // f(c - hx) + f(c + hx) per positive node
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kGk15X[static_cast<std::size_t>(j)];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fsum[static_cast<std::size_t>(j)] = f1 + f2;
        resk += kGk15Wk[static_cast<std::size_t>(j)] * fsum[static_cast<std::size_t>(j)];
        resabs += kGk15Wk[static_cast<std::size_t>(j)] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)  // indices 1,3,5 are the Gauss-7 nodes
            resg += kGk15Wg[static_cast<std::size_t>(j / 2)] * fsum[static_cast<std::size_t>(j)];
    }

    // QUADPACK-style error estimate: scale |K15-G7| by the smoothness proxy.
    const double reskh = resk * 0.5;
    double resasc = kGk15Wk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kGk15Wk[static_cast<std::size_t>(j)] *
                  std::abs(fsum[static_cast<std::size_t>(j)] - 2.0 * reskh);
    resasc *= std::abs(half);
    resabs *= std::abs(half);

    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    err = std::max(err, round_floor);
    return {resk * half, err};
}

}  // namespace detail

/// Adaptive bisection over GK15 panels. Throws QuadratureError when the
/// interval budget is exhausted before the error estimate meets
/// max(abs_tol, rel_tol*|I|).
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    const QuadratureOptions& opts = {}) {
    QuadratureResult out;
    if (a == b) return out;

    struct Item {
        double a, b;
        detail::Gk15Panel panel;
        int depth;
    };

    detail::Gk15Panel whole = detail::gk15(f, a, b);
    double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(whole.integral));
    const double span = std::abs(b - a);

    std::vector<Item> stack;
    stack.push_back({a, b, whole, 0});
    double value = 0.0;
    double err_sum = 0.0;
    bool depth_exhausted = false;

    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        const double local_budget = target * (std::abs(it.b - it.a) / span);
        if (it.panel.error <= local_budget || it.depth >= opts.max_depth) {
            if (it.panel.error > local_budget) depth_exhausted = true;
            value += it.panel.integral;
            err_sum += it.panel.error;
            ++out.panels;
            continue;
        }
        const double mid = 0.5 * (it.a + it.b);
        stack.push_back({it.a, mid, detail::gk15(f, it.a, mid), it.depth + 1});
        stack.push_back({mid, it.b, detail::gk15(f, mid, it.b), it.depth + 1});
    }

    out.value = value;
    out.error_estimate = err_sum;
    target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    if (depth_exhausted && err_sum > target)
        throw QuadratureError("adaptive quadrature did not converge", err_sum);
    return out;
}

// ── Gauss–Legendre nodes ─────────────────────────────────────────────────────

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

/// Nodes by Newton iteration on the Legendre recurrence; machine-precision
/// and bit-reproducible.
inline GaussLegendreRule make_gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        {   // recompute p0 at the converged x for the weight
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

}  // namespace geoharm
