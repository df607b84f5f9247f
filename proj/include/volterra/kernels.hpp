#pragma once

// ============================================================================
// Kernel sources and the prehistory band.
//
// A KernelSource answers point queries K(s1, s2).  Variants:
//   - benchmark(a, b):    K = a*s1^2 - b*s2, the closed-form test kernel
//   - polynomial(coeffs): K = sum of c[(d1,d2)] * s1^d1 * s2^d2
//   - grid(data, rule):   values recovered on a half-integer node grid
//   - custom(fn, label):  arbitrary callable (wrappers, perturbations)
//
// The prehistory band holds the values that seed the layered inversion: the
// kernel is assumed known wherever either argument is smaller than the pulse
// width h.  The band is half-open in each argument (s < h strictly); values
// on the closing edge s = h are supplied by continuity of the source, which
// callers obtain by evaluating source() directly.
// ============================================================================

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace volterra {

class KernelGrid;

/// How a grid-backed kernel source answers point queries.
enum class GridEval {
    ExactNode, ///< stored nodes only (snap tolerance 1e-9); no interpolation
    Bilinear   ///< bilinear interpolation between stored nodes, diagnostics only
};

/// Monomial exponent pair (degree in s1, degree in s2).
using MonomialKey = std::pair<int, int>;

/// Evaluatable kernel K(s1, s2).  Immutable after construction.
class KernelSource {
public:
    /// K = a*s1^2 - b*s2.
    [[nodiscard]] static KernelSource benchmark(double a, double b);

    /// K = sum of coeffs[(d1,d2)] * s1^d1 * s2^d2.  Degrees must be >= 0.
    [[nodiscard]] static KernelSource polynomial(std::map<MonomialKey, double> coeffs);

    /// Values stored on a half-integer node grid, answered per `rule`.
    [[nodiscard]] static KernelSource grid(std::shared_ptr<const KernelGrid> data,
                                           GridEval rule = GridEval::ExactNode);

    /// Arbitrary callable; `label` is used in metadata only.
    [[nodiscard]] static KernelSource custom(std::function<double(double, double)> fn,
                                             std::string label = "custom");

    /// K(s1, s2).  The grid variant throws std::domain_error when queried
    /// away from a covered node (ExactNode) or outside the node hull
    /// (Bilinear); analytic variants are total.
    [[nodiscard]] double operator()(double s1, double s2) const;

    /// Human-readable description recorded in output metadata.
    [[nodiscard]] std::string describe() const;

    /// Monomial map of the benchmark/polynomial variants; empty for grid and
    /// custom variants.  The benchmark form is reported as {(2,0): a, (0,1): -b}.
    [[nodiscard]] std::optional<std::map<MonomialKey, double>> monomials() const;

private:
    struct Benchmark {
        double a;
        double b;
    };
    struct Polynomial {
        std::map<MonomialKey, double> coeffs;
    };
    struct GridData {
        std::shared_ptr<const KernelGrid> data;
        GridEval rule;
    };
    struct Custom {
        std::function<double(double, double)> fn;
        std::string label;
    };
    using Impl = std::variant<Benchmark, Polynomial, GridData, Custom>;

    explicit KernelSource(Impl impl) : impl_(std::move(impl)) {}

    Impl impl_;
};

/// Free-function form of KernelSource::operator().
[[nodiscard]] double eval_kernel(const KernelSource& src, double s1, double s2);

/// Known kernel values on the bands s1 in [0, h) or s2 in [0, h) of [0, T]^2.
///
/// Membership is strict on the h side: a point with both arguments >= h is
/// outside the band even when one equals h exactly.  The outer edges carry an
/// alignment slack so coordinates produced as index*spacing products are not
/// rejected for one-ulp excursions past 0 or T.
class PrehistoryBand {
public:
    /// Throws std::invalid_argument for h <= 0 or T < h.
    PrehistoryBand(KernelSource source, double h, double T);

    [[nodiscard]] bool contains(double p, double q) const noexcept;

    /// Band value at (p, q); throws std::domain_error outside the band,
    /// signalling that the caller must recover the point instead.
    [[nodiscard]] double operator()(double p, double q) const;

    [[nodiscard]] const KernelSource& source() const noexcept { return source_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double T() const noexcept { return T_; }

private:
    KernelSource source_;
    double h_;
    double T_;
};

/// Free-function form of PrehistoryBand::operator().
[[nodiscard]] double prehistory_eval(const PrehistoryBand& band, double p, double q);

} // namespace volterra
