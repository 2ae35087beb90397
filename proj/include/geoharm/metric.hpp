#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "geoharm/core.hpp"
#include "geoharm/expression.hpp"
#include "geoharm/quadrature.hpp"

namespace geoharm {

enum class ProfileKind { Hyperbolic, Spherical, Euclidean, Expression };

inline const char* to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Hyperbolic: return "hyperbolic";
        case ProfileKind::Spherical: return "spherical";
        case ProfileKind::Euclidean: return "euclidean";
        case ProfileKind::Expression: return "expression";
    }
    return "?";
}

/// The profile h of a radial conformal density rho(w) = h(|w|^2).
/// Builtins: hyperbolic h(t) = 1/(1-t), spherical h(t) = 1/(1+t),
/// euclidean h(t) = 1. Expression profiles come from the grammar in
/// Expression and are differentiated with dual numbers.
class RadialProfile {
public:
    static RadialProfile hyperbolic() { return RadialProfile(ProfileKind::Hyperbolic); }
    static RadialProfile spherical() { return RadialProfile(ProfileKind::Spherical); }
    static RadialProfile euclidean() { return RadialProfile(ProfileKind::Euclidean); }

    static RadialProfile parse(std::string_view source) {
        RadialProfile p(ProfileKind::Expression);
        p.expr_ = Expression::parse(source);
        return p;
    }

    ProfileKind kind() const { return kind_; }

    std::string source() const {
        switch (kind_) {
            case ProfileKind::Hyperbolic: return "1/(1-t)";
            case ProfileKind::Spherical: return "1/(1+t)";
            case ProfileKind::Euclidean: return "1";
            case ProfileKind::Expression: return expr_->source();
        }
        return {};
    }

    /// (h(t), h'(t)); builtins use closed forms, expressions dual numbers.
    std::pair<double, double> jet(double t) const {
        switch (kind_) {
            case ProfileKind::Hyperbolic: {
                const double u = 1.0 - t;
                return {1.0 / u, 1.0 / (u * u)};
            }
            case ProfileKind::Spherical: {
                const double u = 1.0 + t;
                return {1.0 / u, -1.0 / (u * u)};
            }
            case ProfileKind::Euclidean: return {1.0, 0.0};
            case ProfileKind::Expression: {
                Dual r = expr_->eval_dual(t);
                return {r.v, r.d};
            }
        }
        return {0.0, 0.0};
    }

    double value(double t) const {
        if (kind_ == ProfileKind::Expression) return expr_->eval(t);
        return jet(t).first;
    }

private:
    explicit RadialProfile(ProfileKind kind) : kind_(kind) {}

    ProfileKind kind_;
    std::optional<Expression> expr_;
};

/// A radial conformal metric rho(w)|dw| = h(|w|^2)|dw| on the chart |w| < R.
/// Immutable after construction; all operations are pure.
class RadialMetric {
public:
    static constexpr double kBoundaryCutoff = 1e-12;  // relative, see inside_chart

    RadialMetric(RadialProfile profile, double chart_radius)
        : profile_(std::move(profile)), radius_(chart_radius) {
        if (!(radius_ > 0.0))  // also rejects NaN
            throw DomainError("chart radius must be positive");
        validate_profile();
    }

    static RadialMetric hyperbolic() { return RadialMetric(RadialProfile::hyperbolic(), 1.0); }
    static RadialMetric spherical() {
        return RadialMetric(RadialProfile::spherical(), std::numeric_limits<double>::infinity());
    }
    static RadialMetric euclidean() {
        return RadialMetric(RadialProfile::euclidean(), std::numeric_limits<double>::infinity());
    }

    const RadialProfile& profile() const { return profile_; }
    double chart_radius() const { return radius_; }

    /// Largest admitted |w|; beyond it a DomainError is raised instead of a
    /// floating-point pole.
    double chart_cutoff() const {
        return std::isinf(radius_) ? radius_ : radius_ * (1.0 - kBoundaryCutoff);
    }

    bool inside_chart(const Complex& w) const {
        return std::isfinite(w.real()) && std::isfinite(w.imag()) &&
               std::abs(w) <= chart_cutoff();
    }

    /// (h, h') at t = |w|^2.
    std::pair<double, double> profile_jet(double t) const {
        require_finite(t, "profile_jet");
        if (t < 0.0) throw DomainError("profile_jet: t must be nonnegative");
        const double cut = chart_cutoff();
        if (!std::isinf(cut) && t > cut * cut)
            throw DomainError("profile_jet: t = " + fmt17(t) + " outside [0, R^2)");
        auto [h, hp] = profile_.jet(t);
        if (!std::isfinite(h) || h <= 0.0)
            throw DomainError("profile_jet: profile not finite positive at t = " + fmt17(t));
        if (!std::isfinite(hp))
            throw DomainError("profile_jet: derivative pole at t = " + fmt17(t));
        return {h, hp};
    }

    /// rho(w) = h(|w|^2).
    double density(const Complex& w) const {
        require_chart(w, "density");
        return profile_jet(std::norm(w)).first;
    }

    /// d/dw of log rho^2 at w: 2 h'(|w|^2) conj(w) / h(|w|^2).
    Complex log_density_derivative(const Complex& w) const {
        require_chart(w, "log_density_derivative");
        auto [h, hp] = profile_jet(std::norm(w));
        return 2.0 * (hp / h) * std::conj(w);
    }

    /// F(s) = int_0^s h(t^2) dt, extended to negative s as an odd function.
    /// Adaptive GK15, relative tolerance 1e-10, absolute floor 1e-14.
    double antiderivative(double s) const {
        require_finite(s, "metric antiderivative");
        if (s == 0.0) return 0.0;
        if (s < 0.0) return -antiderivative(-s);
        if (s > chart_cutoff())
            throw DomainError("metric antiderivative: s = " + fmt17(s) + " outside chart");
        auto result = integrate_adaptive(
            [this](double t) { return profile_.value(t * t); }, 0.0, s, quad_opts());
        return result.value;
    }

    /// d(s1, s2) = |F(s2) - F(s1)| for signed radii on one diameter.
    double radial_distance(double s1, double s2) const {
        return std::abs(antiderivative(s2) - antiderivative(s1));
    }

    /// d(0, w) < r, using rotation invariance: d(0, w) = F(|w|).
    bool geodesic_disk_contains(double r, const Complex& w) const {
        require_finite(r, "geodesic_disk_contains");
        if (!(r > 0.0)) throw DomainError("geodesic_disk_contains: radius must be positive");
        require_chart(w, "geodesic_disk_contains");
        return antiderivative(std::abs(w)) < r;
    }

    /// Metric length of the radial segment [0, R), capped at |s| = 1e8 for
    /// unbounded charts (used only as a guard bound for Schwarz radii).
    double total_length() const {
        const double cap = std::min(chart_cutoff(), 1e8);
        return antiderivative(cap);
    }

    void require_chart(const Complex& w, const char* what) const {
        require_finite(w, what);
        if (!inside_chart(w))
            throw DomainError(std::string(what) + ": point outside chart (|w| = " +
                              fmt17(std::abs(w)) + ", R = " + fmt17(radius_) + ")");
    }

private:
    static QuadratureOptions quad_opts() { return {1e-10, 1e-14, 52}; }

    void validate_profile() {
        // Sample h over the chart; surfaces non-positive or non-finite
        // expression profiles at construction instead of deep inside a run.
        const double tmax = std::isinf(radius_) ? 100.0 : chart_cutoff() * chart_cutoff();
        for (int i = 0; i <= 64; ++i) {
            const double t = tmax * (static_cast<double>(i) / 64.0);
            const double h = profile_.value(t);
            if (!std::isfinite(h) || h <= 0.0)
                throw DomainError("profile is not finite positive at t = " + fmt17(t) +
                                  " (h = " + fmt17(h) + ")");
        }
    }

    RadialProfile profile_;
    double radius_;
};

/// rho(w) and d/dw log rho^2(w) bundled for one evaluation point.
struct MetricJet {
    double density;
    Complex log_density_derivative;
};

inline MetricJet metric_jet(const RadialMetric& metric, const Complex& w) {
    return {metric.density(w), metric.log_density_derivative(w)};
}

}  // namespace geoharm
