#pragma once

// ============================================================================
// CSV serialization for response surfaces, recovered fields, node tables and
// convergence reports.
//
// All numbers are written with printf "%.17g" in the C locale, so files are
// byte-identical across runs and round-trip doubles exactly.  Readers parse
// with std::from_chars and report malformed input as IoError with the file
// name and line number.
// ============================================================================

#include "volterra/bench.hpp"
#include "volterra/forward.hpp"
#include "volterra/kernel_grid.hpp"
#include "volterra/steps_inversion.hpp"

#include <stdexcept>
#include <string>

namespace volterra {

/// File-level failure: unreadable/unwritable path or malformed content.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest exact decimal form of v ("%.17g", C locale).
[[nodiscard]] std::string fmt_g17(double v);

/// Write a response surface as `series,it,iu,t,upsilon,value` rows in
/// row-major lattice order; only filled points are written.
void write_surface_csv(const std::string& path, const ResponseSurface& surface);

/// Read a surface written by write_surface_csv.  The sample spacing is
/// inferred from the first row with it > 0 and every row is checked against
/// it; the triangle must come back complete for the given pulse width h.
[[nodiscard]] ResponseSurface read_surface_csv(const std::string& path, double h);

/// Write a recovered field's memoized entries as `ip,iq,p,q,value` rows in
/// ascending (ip, iq) order.
void write_field_csv(const std::string& path, const KernelField& field);

/// Write a node table as `l,m,s1,s2,state,value` rows for every cell in
/// ascending (l, m) order; `state` is recovered/prehistory/empty and the
/// value column is blank for cells without one.
void write_grid_csv(const std::string& path, const KernelGrid& grid);

/// Write a convergence report as `h,eps1,eps2,eps,observed_order` rows; the
/// order column is blank on rows without one.
void write_convergence_csv(const std::string& path, const ConvergenceReport& report);

} // namespace volterra
