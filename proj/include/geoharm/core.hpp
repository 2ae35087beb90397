#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace geoharm {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ── error taxonomy ──────────────────────────────────────────────────────────

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (chart, disk, stencil, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Profile source text rejected by the parser; offset is a byte index.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Adaptive quadrature could not meet the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& message, double achieved)
        : Error(message + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}
    double achieved_error() const { return achieved_; }

private:
    double achieved_;
};

/// A named operation precondition does not hold for the given inputs.
class PreconditionError : public Error {
public:
    using Error::Error;
};

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite value");
}

inline void require_finite(const Complex& z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError(std::string(what) + ": non-finite value");
}

// ── number formatting ───────────────────────────────────────────────────────

/// 17 significant digits: round-trip exact for IEEE doubles, C locale.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ── deterministic seed derivation ───────────────────────────────────────────

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Substream seed for (seed, index); workers get identical streams no matter
/// how work is partitioned.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (0x632be59bd9b4e019ULL + index));
}

}  // namespace detail

}  // namespace geoharm
