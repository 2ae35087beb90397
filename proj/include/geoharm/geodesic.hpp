#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "geoharm/core.hpp"
#include "geoharm/metric.hpp"

namespace geoharm {

/// The six independent Christoffel symbols of g11 = g22 = h^2(|z|^2),
/// g12 = 0. With h_x = 2x h'(t), h_y = 2y h'(t) at t = |z|^2:
///   G^1_11 = G^2_12 = h_x/h,   G^2_22 = G^1_12 = h_y/h,
///   G^2_11 = -h_y/h,           G^1_22 = -h_x/h.
struct ChristoffelSymbols {
    double g111, g122, g212, g222, g211, g112;
};

inline ChristoffelSymbols christoffel(const RadialMetric& metric, const Complex& p) {
    metric.require_chart(p, "christoffel");
    auto [h, hp] = metric.profile_jet(std::norm(p));
    const double hx_over_h = 2.0 * p.real() * hp / h;
    const double hy_over_h = 2.0 * p.imag() * hp / h;
    return {hx_over_h, -hx_over_h, hx_over_h, hy_over_h, -hy_over_h, hy_over_h};
}

struct GeodesicState {
    double x, y, vx, vy;

    Complex position() const { return {x, y}; }
    double speed2() const { return vx * vx + vy * vy; }
};

/// Accelerations of the geodesic system: the Christoffel contraction
/// xdd^l = -G^l_mn xd^m xd^n.
inline std::pair<double, double> geodesic_rhs(const RadialMetric& metric,
                                              const GeodesicState& s) {
    const ChristoffelSymbols G = christoffel(metric, s.position());
    const double ax = -(G.g111 * s.vx * s.vx + 2.0 * G.g112 * s.vx * s.vy + G.g122 * s.vy * s.vy);
    const double ay = -(G.g211 * s.vx * s.vx + 2.0 * G.g212 * s.vx * s.vy + G.g222 * s.vy * s.vy);
    return {ax, ay};
}

struct GeodesicSample {
    double s;
    GeodesicState state;
};

/// A dense record of accepted integrator steps. Immutable; metric_speed is
/// the conserved value h(|c|^2)|c'| taken at the initial state.
class GeodesicPath {
public:
    GeodesicPath(std::vector<GeodesicSample> samples, double metric_speed, bool hit_boundary)
        : samples_(std::move(samples)), metric_speed_(metric_speed), hit_boundary_(hit_boundary) {}

    const std::vector<GeodesicSample>& samples() const { return samples_; }
    double metric_speed() const { return metric_speed_; }
    bool hit_boundary() const { return hit_boundary_; }
    const GeodesicSample& front() const { return samples_.front(); }
    const GeodesicSample& back() const { return samples_.back(); }

private:
    std::vector<GeodesicSample> samples_;
    double metric_speed_;
    bool hit_boundary_;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
    static constexpr std::array<double, 7> c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr std::array<std::array<double, 6>, 7> a = {{
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    }};
    // b5 - b4: error estimate coefficients (7 stages, FSAL).
    static constexpr std::array<double, 7> e = {71.0 / 57600,    0.0,          -71.0 / 16695,
                                                71.0 / 1920,     -17253.0 / 339200,
                                                22.0 / 525,      -1.0 / 40};
};

using State4 = std::array<double, 4>;  // x, y, vx, vy

inline State4 axpy(const State4& y, double h, const State4& d) {
    return {y[0] + h * d[0], y[1] + h * d[1], y[2] + h * d[2], y[3] + h * d[3]};
}

}  // namespace detail

/// Integrates the geodesic system from `initial` over s in [0, s_max] with an
/// embedded Dormand-Prince 5(4) pair. Error is controlled per unit step
/// (err/h <= tol), so the accumulated defect over the path stays within the
/// 10*tol budget. Stops early with the boundary flag set when the path
/// reaches |z| > R(1 - 1e-9).
inline GeodesicPath integrate_geodesic(const RadialMetric& metric, const GeodesicState& initial,
                                       double s_max, double tol = 1e-9) {
    using detail::Dopri5;
    using detail::State4;

    metric.require_chart(initial.position(), "integrate_geodesic");
    require_finite(initial.vx, "integrate_geodesic");
    require_finite(initial.vy, "integrate_geodesic");
    if (!(s_max > 0.0)) throw DomainError("integrate_geodesic: s_max must be positive");
    if (!(tol > 0.0)) throw DomainError("integrate_geodesic: tol must be positive");

    const double geo_cutoff = std::isinf(metric.chart_radius())
                                  ? std::numeric_limits<double>::infinity()
                                  : metric.chart_radius() * (1.0 - 1e-9);

    auto rhs = [&metric](const State4& y, State4& dydt) -> bool {
        const GeodesicState st{y[0], y[1], y[2], y[3]};
        if (!metric.inside_chart(st.position())) return false;
        auto [ax, ay] = geodesic_rhs(metric, st);
        dydt = {st.vx, st.vy, ax, ay};
        return true;
    };

    State4 y = {initial.x, initial.y, initial.vx, initial.vy};
    const double speed0 =
        metric.density(initial.position()) * std::sqrt(initial.speed2());

    std::vector<GeodesicSample> samples;
    samples.push_back({0.0, initial});

    State4 k0;
    if (!rhs(y, k0)) throw DomainError("integrate_geodesic: initial state outside chart");

    double s = 0.0;
    double h = std::min(s_max, 1e-2 * (1.0 + std::sqrt(initial.speed2())) /
                                   (1.0 + std::abs(k0[2]) + std::abs(k0[3])));
    h = std::max(h, 1e-8 * s_max);
    double err_prev = 1.0;  // in units of tol
    bool hit_boundary = false;
    const double h_floor = 1e-14 * std::max(1.0, s_max);
    const long max_steps = 20'000'000;

    std::array<State4, 7> k;
    k[0] = k0;
    for (long step = 0; step < max_steps && s < s_max;) {
        h = std::min(h, s_max - s);

        bool stage_ok = true;
        for (int i = 1; i < 7; ++i) {
            State4 yi = y;
            for (int j = 0; j < i; ++j) {
                const double aij = Dopri5::a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (aij != 0.0) yi = detail::axpy(yi, h * aij, k[static_cast<std::size_t>(j)]);
            }
            if (!rhs(yi, k[static_cast<std::size_t>(i)])) {
                stage_ok = false;
                break;
            }
        }

        double err = 0.0;
        State4 y_new{};
        if (stage_ok) {
            y_new = y;
            for (int j = 0; j < 6; ++j) {
                const double a7j = Dopri5::a[6][static_cast<std::size_t>(j)];
                if (a7j != 0.0) y_new = detail::axpy(y_new, h * a7j, k[static_cast<std::size_t>(j)]);
            }
            // error per unit step, scaled per component
            for (int i = 0; i < 4; ++i) {
                double e = 0.0;
                for (int j = 0; j < 7; ++j)
                    e += Dopri5::e[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
                const double sc =
                    1.0 + std::max(std::abs(y[static_cast<std::size_t>(i)]), std::abs(y_new[static_cast<std::size_t>(i)]));
                const double q = e / sc;
                err += q * q;
            }
            err = std::sqrt(err / 4.0);
        }

        if (!stage_ok || err > tol) {
            // reject: shrink and retry (k[0] still matches the unchanged y)
            ++step;
            const double fac = stage_ok ? std::max(0.2, 0.9 * std::pow(tol / err, 0.25)) : 0.5;
            h *= fac;
            if (h < h_floor) {
                if (std::abs(Complex(y[0], y[1])) > 0.9 * geo_cutoff) {
                    hit_boundary = true;
                    break;
                }
                throw DomainError("integrate_geodesic: step size underflow (pole approach)");
            }
            continue;
        }

        // accept
        ++step;
        double s_next = s + h;
        if (s_next >= s_max * (1.0 - 1e-15)) s_next = s_max;
        s = s_next;
        y = y_new;
        samples.push_back({s, GeodesicState{y[0], y[1], y[2], y[3]}});
        if (std::abs(Complex(y[0], y[1])) > geo_cutoff) {
            hit_boundary = true;
            break;
        }

        const double en = std::max(err / tol, 1e-10);
        double fac = 0.9 * std::pow(1.0 / en, 0.7 / 4.0) * std::pow(err_prev, 0.4 / 4.0);
        fac = std::min(5.0, std::max(0.2, fac));
        err_prev = en;
        h *= fac;

        k[0] = k[6];  // FSAL: stage 7 is the derivative at y_new
    }

    if (!hit_boundary && s < s_max)
        throw DomainError("integrate_geodesic: step budget exhausted");
    return GeodesicPath(std::move(samples), speed0, hit_boundary);
}

/// Solves s = F(x) - F(x0) for x by bracketing + bisection/secant on the
/// strictly increasing antiderivative F. |F(x) - F(x0) - s| <= 1e-10.
inline double arclength_to_radius(const RadialMetric& metric, double x0, double s) {
    require_finite(x0, "arclength_to_radius");
    require_finite(s, "arclength_to_radius");
    const double cut = metric.chart_cutoff();
    if (std::abs(x0) > cut) throw DomainError("arclength_to_radius: x0 outside chart");
    if (s == 0.0) return x0;

    const double target = metric.antiderivative(x0) + s;
    const double cap = std::min(cut, 1e12);

    // bracket [lo, hi] with F(lo) <= target <= F(hi)
    double lo = x0, hi = x0;
    if (s > 0.0) {
        double step = std::max(0.5 * std::abs(s), 1e-6);
        for (int i = 0; i < 200 && metric.antiderivative(hi) < target; ++i) {
            lo = hi;
            hi = std::min(cap, hi + step);
            step *= 2.0;
            if (hi >= cap && metric.antiderivative(cap) < target)
                throw DomainError(
                    "arclength_to_radius: no solution inside chart (s exceeds remaining length)");
        }
    } else {
        double step = std::max(0.5 * std::abs(s), 1e-6);
        for (int i = 0; i < 200 && metric.antiderivative(lo) > target; ++i) {
            hi = lo;
            lo = std::max(-cap, lo - step);
            step *= 2.0;
            if (lo <= -cap && metric.antiderivative(-cap) > target)
                throw DomainError(
                    "arclength_to_radius: no solution inside chart (s exceeds remaining length)");
        }
    }

    double flo = metric.antiderivative(lo) - target;
    double fhi = metric.antiderivative(hi) - target;
    if (flo > 0.0 || fhi < 0.0)
        throw DomainError("arclength_to_radius: bracketing failed");

    // bisection with a secant proposal; F evaluations are cheap quadratures
    double mid = lo;
    for (int i = 0; i < 200; ++i) {
        double cand = (fhi != flo) ? (lo - flo * (hi - lo) / (fhi - flo)) : 0.5 * (lo + hi);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        mid = cand;
        const double fm = metric.antiderivative(mid) - target;
        if (std::abs(fm) <= 1e-10) return mid;
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo < 1e-16 * (1.0 + std::abs(lo))) break;
    }
    const double resid = std::abs(metric.antiderivative(mid) - target);
    if (resid > 1e-10)
        throw DomainError("arclength_to_radius: root refinement stalled (residual " +
                          fmt17(resid) + ")");
    return mid;
}

}  // namespace geoharm
