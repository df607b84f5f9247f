#pragma once

// ============================================================================
// Layered (method-of-steps) kernel recovery from response surfaces.
//
// With D2 f = -(f_tu + f_uu) applied to the series-1 response, the four-corner
// identity holds at every layer point:
//   D2 f1(t, u) = K(t, t-u) - K(t, t-u-h) - K(t-h, t-u) + K(t-h, t-u-h).
// Substituting the kernel coordinates (p, q) = (t, t-u) turns it into a
// recurrence that walks back toward the prehistory band in steps of exactly h:
//   K(p, q) = D2 f1(p, p-q) + K(p, q-h) + K(p-h, q) - K(p-h, q-h)   (p >= q)
// and symmetrically with D2 f2(q, q-p) for p < q.  Every lattice point of
// [0, T]^2 is reached after at most N = T/h steps, terminating in the band.
//
// D2 data comes either from closed-form second derivatives or from
// second-order finite differences on a sampled surface (central stencils in
// the interior; one-sided second-order stencils and a local cubic fit near
// the triangle boundary).
// ============================================================================

#include "volterra/forward.hpp"
#include "volterra/kernels.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/signals.hpp"

#include <functional>
#include <map>
#include <memory>
#include <utility>

namespace volterra {

// ============================================================================
// Domain classification
// ============================================================================

/// Region of the (t, upsilon) plane relative to the layered recursion.
enum class DomainTag { Outside, Prehistory, Layer };

/// Classification result; `layer` is meaningful only when tag == Layer.
struct DomainClass {
    DomainTag tag = DomainTag::Outside;
    int layer = 0; ///< 1..N

    [[nodiscard]] bool operator==(const DomainClass&) const = default;
};

/// Classify (t, upsilon) for a recursion of step h over [0, T]:
///   - Outside     when t < 0, upsilon < 0, or t > T;
///   - Prehistory  when upsilon > t - h (the band under the change of
///                 variables);
///   - Layer(k)    when upsilon + h <= t, with k = floor(t/h); t = T belongs
///                 to layer N (layers are half-open, the final edge closes
///                 the last one).
/// Near-integer values of t/h snap to the integer before flooring, so lattice
/// coordinates produced as index*spacing products classify stably.
/// Throws std::invalid_argument for h <= 0 or T not a positive multiple of h.
[[nodiscard]] DomainClass classify_domain(double t, double upsilon, double h, double T);

// ============================================================================
// D2 sources
// ============================================================================

/// Source of response curvature data D2 f = -(f_tu + f_uu) for one series.
class D2Source {
public:
    /// Exact closed-form second derivatives f_tu(t, u) and f_uu(t, u).
    [[nodiscard]] static D2Source analytic(std::function<double(double, double)> f_tu,
                                           std::function<double(double, double)> f_uu);

    /// Second-order finite differences on a sampled surface.
    [[nodiscard]] static D2Source finite_difference(std::shared_ptr<const ResponseSurface> surface);

    /// Exact second derivatives of the response of a benchmark/polynomial
    /// kernel: per monomial c * s1^d1 * s2^d2 the response factorizes into
    /// pulse moments, so the derivatives are products of pulse-moment
    /// derivatives.  Throws std::invalid_argument for grid/custom sources.
    [[nodiscard]] static D2Source from_kernel(const KernelSource& src, Series series, double h);

    /// D2 f at (t, upsilon).  The finite-difference variant throws
    /// std::domain_error off the surface lattice or outside its triangle.
    [[nodiscard]] double operator()(double t, double upsilon) const;

    [[nodiscard]] bool is_finite_difference() const noexcept { return surface_ != nullptr; }
    [[nodiscard]] const ResponseSurface* surface() const noexcept { return surface_.get(); }

private:
    D2Source() = default;

    std::function<double(double, double)> f_tu_;
    std::function<double(double, double)> f_uu_;
    std::shared_ptr<const ResponseSurface> surface_;
};

/// Free-function form of D2Source::operator().
[[nodiscard]] double d2_response(const D2Source& srcs, double t, double upsilon);

/// Finite-difference D2 at surface lattice point (it, iu).  Interior points
/// use central stencils; boundary points fall back to one-sided second-order
/// stencils, then to a 10-node cubic least-squares-free fit (unisolvent
/// principal lattice) when no one-sided tensor stencil fits.  Throws
/// std::domain_error off the lattice, std::invalid_argument when the surface
/// is too small for any stencil (fewer than 4 sample rows).
[[nodiscard]] double d2_on_lattice(const ResponseSurface& surface, int it, int iu);

// ============================================================================
// KernelField and recovery
// ============================================================================

/// Recovered kernel values on the delta-lattice of [0, T]^2 together with the
/// prehistory band that seeds the recursion.  Lattice point (ip, iq) holds
/// K(ip * delta, iq * delta); the memo records every point the recursion has
/// produced (band base cases included).
class KernelField {
public:
    /// Validates h = m*delta and T = N*h.  Throws std::invalid_argument on
    /// misalignment or when the band disagrees with (h, T).
    KernelField(PrehistoryBand prehistory, double h, double T, double delta);

    [[nodiscard]] const PrehistoryBand& prehistory() const noexcept { return prehistory_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double T() const noexcept { return T_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] int m() const noexcept { return m_; }   ///< h / delta
    [[nodiscard]] int nt() const noexcept { return nt_; } ///< T / delta

    [[nodiscard]] double coord(int i) const noexcept { return i * delta_; }

    /// Lattice index of coordinate x; throws std::domain_error off-lattice
    /// or outside [0, T].
    [[nodiscard]] int index_of(double x) const;

    /// Memoized value if present.
    [[nodiscard]] const double* lookup(int ip, int iq) const noexcept;

    /// Value at a lattice point: memo first, then the prehistory band for
    /// band points; throws std::domain_error for unrecovered layer points.
    [[nodiscard]] double at(int ip, int iq) const;

    /// at() addressed by coordinates (snapped to the lattice).
    [[nodiscard]] double at_coords(double p, double q) const;

    /// Record a recovered value (recursion hook; later writes must not
    /// change an existing entry and throw std::logic_error if they would).
    void store(int ip, int iq, double value);

    /// All memoized points, ordered by (ip, iq).
    [[nodiscard]] const std::map<std::pair<int, int>, double>& memo() const noexcept {
        return memo_;
    }

private:
    PrehistoryBand prehistory_;
    double h_;
    double T_;
    double delta_;
    int m_;
    int nt_;
    std::map<std::pair<int, int>, double> memo_;
};

/// Kernel value at lattice point (p, q), computed by the memoized recurrence:
/// prehistory band points evaluate directly; layer points combine the D2 term
/// of the matching series with three already-recovered corners.  Results are
/// memoized into `field`.  Throws std::domain_error for off-lattice or
/// outside points and propagates D2 evaluation errors.
[[nodiscard]] double recover_point(double p, double q, const D2Source& d2_1, const D2Source& d2_2,
                                   KernelField& field);

/// Evaluation order of recover_field; both orders produce bitwise-identical
/// memo tables (the per-point arithmetic is order-independent).
enum class EvalOrder { Recursive, LayerIterative };

/// Recover the whole lattice square [h, T]^2 (indices [m..nt]^2); the memo
/// additionally holds every band point the recursion touched.
[[nodiscard]] KernelField recover_field(const D2Source& d2_1, const D2Source& d2_2,
                                        const PrehistoryBand& prehistory, double h, double T,
                                        double delta,
                                        EvalOrder order = EvalOrder::LayerIterative);

// ============================================================================
// Diagnostics
// ============================================================================

/// Continuity (matching) residual at layer point (t, upsilon):
///   D2 f(t, u) - [K(t,t-u) - K(t,t-u-h) - K(t-h,t-u) + K(t-h,t-u-h)]
/// for series 1, with transposed kernel arguments for series 2.  The new
/// corner (t, t-u) always reads the recovered field; an old corner reads the
/// prehistory band when it lies strictly inside it, the band source when it
/// sits on the closing edge (continuity closure at coordinate h), and the
/// recovered field otherwise.  Zero (up to data error) exactly when the
/// recovered kernel continues the prehistory smoothly at (t, upsilon).
/// Throws std::domain_error when (t, upsilon) is not a layer point or a
/// needed corner is unavailable.
[[nodiscard]] double matching_residual(const KernelField& field, const D2Source& d2, Series series,
                                       double t, double upsilon);

/// Data-consistency residual of the layer-k solvability condition, k in {1,2}:
///   k = 1:  f(h, 0)  - integral of the band over [0, h]^2
///   k = 2:  f(2h, 0) - integral of the first-layer kernel over [h, 2h]^2,
/// where the first-layer kernel combines the D2 term with three band corners
/// (one recursion step).  `f_at` evaluates t -> f(t, 0).  k = 2 needs the two
/// analytic D2 sources; throws std::invalid_argument when they are missing,
/// k is outside {1, 2}, or the band is shorter than k*h.
[[nodiscard]] double solvability_residual(const std::function<double(double)>& f_at,
                                          const PrehistoryBand& prehistory, int k, double h,
                                          const QuadratureRule& rule,
                                          const D2Source* d2_1 = nullptr,
                                          const D2Source* d2_2 = nullptr);

} // namespace volterra
