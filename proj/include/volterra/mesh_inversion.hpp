#pragma once

// ============================================================================
// Discrete kernel identification on the half-integer mesh.
//
// With responses sampled at integer multiples of the pulse width h, each
// sample is h^2 times one kernel value at a cell midpoint:
//
//     f1(i*h, j*h) = h^2 * K((i - 1/2) h, (i - j - 1/2) h)
//     f2(i*h, j*h) = h^2 * K((i - j - 1/2) h, (i - 1/2) h)
//
// up to the midpoint-rule error.  Series 1 fills the lower triangle (column
// index <= row index) of the node table, series 2 the strict upper triangle,
// and the two agree on the diagonal through their j = 0 samples.  The first
// row and column of the table sit under the prehistory band and are never
// written by the inversion.
// ============================================================================

#include "volterra/forward.hpp"
#include "volterra/kernel_grid.hpp"
#include "volterra/signals.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace volterra {

// ============================================================================
// Sampled responses on the coarse integer lattice
// ============================================================================

/// Response samples f(i*h, j*h) for one series, keyed by the integer pair
/// (i, j).  `origin` records where the numbers came from (closed form,
/// quadrature, a CSV file, ...).
struct MeshSamples {
    Series series = Series::One;
    double h = 0.0;
    std::map<std::pair<int, int>, double> values;
    std::string origin;

    [[nodiscard]] bool has(int i, int j) const noexcept {
        return values.find({i, j}) != values.end();
    }

    /// Sample at (i, j); throws std::invalid_argument when absent.
    [[nodiscard]] double at(int i, int j) const;
};

/// Exact benchmark samples K = a*s1^2 - b*s2 on i = 1..T/h, j = 0..i-1.
/// Throws std::invalid_argument for h <= 0 or T not a positive multiple of h.
[[nodiscard]] MeshSamples closed_form_mesh_samples(double a, double b, Series series, double h,
                                                   double T);

/// Extract the coarse-lattice samples (t, upsilon) = (i*h, j*h) from a dense
/// response surface; requires those lattice points to be filled.
[[nodiscard]] MeshSamples mesh_samples_from_surface(const ResponseSurface& surface);

// ============================================================================
// Inversion
// ============================================================================

/// Empty node table for a mesh of step h over [0, T].  Throws
/// std::invalid_argument when T is not a positive integer multiple of h.
[[nodiscard]] KernelGrid build_mesh(double h, double T);

/// Recover the kernel table from one series-1 and one series-2 sample set.
///
/// The table size N is the largest sample row in `f1`.  Series 1 must cover
/// i = 2..N, j = 0..i-2 and series 2 must cover i = 3..N, j = 1..i-2; a
/// missing required sample throws std::invalid_argument naming it.  Samples
/// outside those ranges (the first response row, band-touching columns, or
/// extra series-2 rows) are ignored.  First-row/first-column cells are marked
/// Prehistory; every other cell is Recovered, so the table is complete.
/// Throws std::invalid_argument on series/step mismatches.
[[nodiscard]] KernelGrid invert_mesh(const MeshSamples& f1, const MeshSamples& f2, double h);

// ============================================================================
// Pair consistency
// ============================================================================

/// One disagreement between the two series at a shared zero-offset sample.
struct PairViolation {
    int i = 0;       ///< sample row
    double f1 = 0.0; ///< series-1 value
    double f2 = 0.0; ///< series-2 value
    double diff = 0.0; ///< f1 - f2
};

/// The two series must agree at upsilon = 0: compare f1(i, 0) with f2(i, 0)
/// for every i sampled by both and report rows where |f1 - f2| > tol.
/// Rows missing from either set are skipped.  Throws std::invalid_argument
/// on series/step mismatches or tol < 0.
[[nodiscard]] std::vector<PairViolation> check_pair_consistency(const MeshSamples& f1,
                                                                const MeshSamples& f2, double tol);

} // namespace volterra
