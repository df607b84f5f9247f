#pragma once

// ============================================================================
// Error norms and the step-halving convergence experiment for the discrete
// inversion, plus small spec-string parsers shared with the CLI.
//
// On the quadratic benchmark kernel a*s1^2 - b*s2 the midpoint-rule recovery
// error is the same at every cell, |a| h^2 / 12: the linear term is captured
// exactly and the quadratic term contributes its constant midpoint defect.
// Halving h therefore divides the error by exactly 4 (observed order 2).
// ============================================================================

#include "volterra/kernel_grid.hpp"
#include "volterra/kernels.hpp"
#include "volterra/quadrature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace volterra {

// ============================================================================
// Error norms
// ============================================================================

/// Max-abs recovery errors, split by the series that filled each cell.
struct ErrorNorms {
    double eps1 = 0.0; ///< over cells with column <= row (series-1 fills)
    double eps2 = 0.0; ///< over cells with column > row (series-2 fills)
    double eps = 0.0;  ///< max(eps1, eps2)
};

/// Compare every Recovered cell of `grid` against `exact` at the cell's node
/// pair.  Prehistory and empty cells are excluded; a side with no recovered
/// cells contributes 0.  Throws std::invalid_argument when the grid has no
/// recovered cells at all.
[[nodiscard]] ErrorNorms error_norms(const KernelGrid& grid, const KernelSource& exact);

// ============================================================================
// Convergence study
// ============================================================================

/// One row of the step-halving experiment.
struct ConvergenceRow {
    double h = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps = 0.0;
    /// log2(eps_prev / eps), present when the previous row's h is exactly
    /// twice this one and both errors are nonzero.
    std::optional<double> observed_order;
};

/// Full experiment result with provenance strings for reports.
struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::string kernel; ///< description of the exact kernel
    std::string method; ///< "closed-form" or the quadrature rule used
};

/// Run the inversion on the benchmark kernel a*s1^2 - b*s2 for each step in
/// `h_list` (strictly decreasing, each dividing T) and collect error norms.
/// Samples come from the closed-form right-hand sides by default; with
/// `via_quadrature` they are integrated numerically with `rule` as a
/// cross-check.  Throws std::invalid_argument on an empty or non-decreasing
/// step list or a step that does not divide T.
[[nodiscard]] ConvergenceReport convergence_study(
    double a, double b, double T, const std::vector<double>& h_list, bool via_quadrature = false,
    const QuadratureRule& rule = QuadratureRule::defaults());

// ============================================================================
// Spec-string parsers
// ============================================================================

/// Parse a kernel description:
///   "benchmark:<a>,<b>"                  -> a*s1^2 - b*s2
///   "poly:<d1>,<d2>,<c>[;<d1>,<d2>,<c>]" -> sum of c * s1^d1 * s2^d2
/// Throws std::invalid_argument on malformed input.
[[nodiscard]] KernelSource parse_kernel_spec(const std::string& spec);

/// Parse a quadrature description: "gauss:<points>,<subdivisions>" or
/// "midpoint:<subdivisions>".  Throws std::invalid_argument on malformed
/// input or non-positive counts.
[[nodiscard]] QuadratureRule parse_quad_spec(const std::string& spec);

} // namespace volterra
