#pragma once

// ============================================================================
// Small numeric helpers shared across the library.
//
// The inversion routines work on lattices whose coordinates are produced as
// index * spacing products.  Comparing such coordinates with == is fragile,
// so every index <-> coordinate conversion goes through the snap helpers
// below, which accept a 1e-9 relative slack and otherwise refuse the value.
// ============================================================================

#include <cmath>
#include <optional>

namespace volterra {

/// Relative comparison slack used for lattice alignment checks.
inline constexpr double kAlignTol = 1e-9;

/// x^n for small nonnegative integer n by repeated multiplication.
/// Deterministic across platforms (no libm dispatch).
[[nodiscard]] constexpr double ipow(double x, int n) noexcept {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

/// True when |a - b| <= tol * max(1, |a|, |b|).
[[nodiscard]] inline bool nearly_equal(double a, double b, double tol = kAlignTol) noexcept {
    const double scale = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
    return std::fabs(a - b) <= tol * scale;
}

/// Nearest integer to x when x is within a 1e-9 relative distance of one;
/// empty otherwise.  Used to validate ratios such as T/h and h/delta.
[[nodiscard]] inline std::optional<long long> nearly_integer(double x) noexcept {
    const double r = std::nearbyint(x);
    if (std::fabs(x - r) <= kAlignTol * std::fmax(1.0, std::fabs(x))) {
        return static_cast<long long>(r);
    }
    return std::nullopt;
}

/// Lattice index of coordinate x on the grid {i * delta}: round, then verify
/// the product lands back on x within the alignment slack.  Empty when x is
/// not a lattice point.
[[nodiscard]] inline std::optional<int> snap_index(double x, double delta) noexcept {
    if (!(delta > 0.0)) return std::nullopt;
    const double r = std::nearbyint(x / delta);
    if (std::fabs(x - r * delta) <= kAlignTol * std::fmax(1.0, std::fabs(x))) {
        return static_cast<int>(r);
    }
    return std::nullopt;
}

} // namespace volterra
