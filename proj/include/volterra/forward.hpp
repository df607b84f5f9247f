#pragma once

// ============================================================================
// Forward responses: the ground-truth oracle of every inversion test.
//
// Driving the system with a pair of width-h pulses (one anchored at 0, one
// delayed by upsilon) makes the bilinear response term collapse to the kernel
// mass over a single h x h cell:
//   series 1:  f(t, upsilon) = integral of K over [t-h, t] x [t-u-h, t-u]
//   series 2:  f(t, upsilon) = integral of K over [t-u-h, t-u] x [t-h, t]
// (u = upsilon).  Both series coincide at upsilon = 0.  The module offers a
// quadrature evaluator for arbitrary kernel sources, closed forms for the
// benchmark kernel a*s1^2 - b*s2 and for general polynomial kernels, and a
// sampler that fills the triangular response lattice.
// ============================================================================

#include "volterra/kernels.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/signals.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace volterra {

/// Double integral of the kernel over the cell
/// [s1_lo, s1_lo + h] x [s2_lo, s2_lo + h], by the tensor-product rule.
/// Throws std::domain_error when the cell extends below 0 in either
/// coordinate (kernel arguments are times), std::invalid_argument for a
/// malformed rule or h <= 0.
[[nodiscard]] double cell_integral(const KernelSource& src, double s1_lo, double s2_lo, double h,
                                   const QuadratureRule& rule);

/// Response f(t, upsilon) of one series, as the cell integral selected by the
/// pulse pair.  Throws std::domain_error unless upsilon >= 0 and
/// upsilon + h <= t (admissible triangle, with the 1e-9 alignment slack).
[[nodiscard]] double response_series(const KernelSource& src, Series series, double t,
                                     double upsilon, double h, const QuadratureRule& rule);

/// Closed-form responses of the benchmark kernel a*s1^2 - b*s2:
///   series 1: (a h^2/3)(3 t (t-h) + h^2) + (b h^2/2)(h - 2 (t-u))
///   series 2: the same with t-u in the a-term and t in the b-term.
[[nodiscard]] double benchmark_rhs(double a, double b, double h, double t, double upsilon,
                                   Series series) noexcept;

/// Integral of s^d over the pulse window [x - h, x]:
/// (x^(d+1) - (x-h)^(d+1)) / (d+1).  Building block of the closed-form
/// responses of monomial kernels.  Throws std::invalid_argument for d < 0.
[[nodiscard]] double pulse_moment(double x, int d, double h);

/// d/dx of pulse_moment: x^d - (x-h)^d.
[[nodiscard]] double pulse_moment_d1(double x, int d, double h);

/// d^2/dx^2 of pulse_moment: d * (x^(d-1) - (x-h)^(d-1)); 0 for d == 0.
[[nodiscard]] double pulse_moment_d2(double x, int d, double h);

/// Closed-form response for benchmark/polynomial sources: per monomial
/// c * s1^d1 * s2^d2 the response is the separable product of pulse moments,
///   series 1: c * pulse_moment(t, d1, h) * pulse_moment(t-u, d2, h),
///   series 2: c * pulse_moment(t-u, d1, h) * pulse_moment(t, d2, h).
/// Throws std::invalid_argument for grid/custom sources (no monomial form).
[[nodiscard]] double polynomial_rhs(const KernelSource& src, double h, double t, double upsilon,
                                    Series series);

/// Samples of f(t, upsilon) for one series on the triangular lattice
///   t = it * delta (it = m..nt),  upsilon = iu * delta (iu = 0..it-m),
/// where h = m * delta and T = nt * delta.  Storage is a packed triangle;
/// immutable geometry, values written once by the sampler or a CSV loader.
class ResponseSurface {
public:
    /// Validates h = m*delta, T = N*h (integer m >= 1, N >= 1).  Throws
    /// std::invalid_argument on misalignment.
    ResponseSurface(Series series, double h, double T, double delta, std::string generator);

    [[nodiscard]] Series series() const noexcept { return series_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double T() const noexcept { return T_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] int m() const noexcept { return m_; }   ///< h / delta
    [[nodiscard]] int nt() const noexcept { return nt_; } ///< T / delta

    [[nodiscard]] bool in_lattice(int it, int iu) const noexcept {
        return it >= m_ && it <= nt_ && iu >= 0 && iu <= it - m_;
    }
    [[nodiscard]] std::size_t sample_count() const noexcept;

    [[nodiscard]] double t_of(int it) const noexcept { return it * delta_; }
    [[nodiscard]] double u_of(int iu) const noexcept { return iu * delta_; }

    /// Stored value; throws std::domain_error off-lattice or when unset.
    [[nodiscard]] double at(int it, int iu) const;
    [[nodiscard]] bool is_set(int it, int iu) const noexcept;
    void set(int it, int iu, double value);

    /// True when every lattice point holds a value.
    [[nodiscard]] bool complete() const noexcept;

    /// How the samples were produced (recorded metadata).
    [[nodiscard]] const std::string& generator() const noexcept { return generator_; }

private:
    [[nodiscard]] std::size_t offset(int it, int iu) const noexcept;

    Series series_;
    double h_;
    double T_;
    double delta_;
    int m_;
    int nt_;
    std::string generator_;
    std::vector<double> values_;
    std::vector<bool> set_;
};

/// Sample producer: either a kernel source integrated by a quadrature rule,
/// or the benchmark closed form.
class SurfaceGenerator {
public:
    [[nodiscard]] static SurfaceGenerator quadrature(KernelSource src, QuadratureRule rule);
    [[nodiscard]] static SurfaceGenerator closed_form(double a, double b);

    [[nodiscard]] double operator()(Series series, double t, double upsilon, double h) const;
    [[nodiscard]] std::string describe() const;

private:
    SurfaceGenerator() = default;

    bool closed_form_ = false;
    double a_ = 0.0;
    double b_ = 0.0;
    std::optional<KernelSource> src_;
    QuadratureRule rule_{};
};

/// Fill the full triangular lattice for one series; the generator choice is
/// recorded in the surface metadata.
[[nodiscard]] ResponseSurface sample_response_surface(const SurfaceGenerator& gen, Series series,
                                                      double h, double T, double delta);

} // namespace volterra
