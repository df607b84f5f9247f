#pragma once

// ============================================================================
// Kernel values on the half-integer node lattice of the discrete method.
//
// For a mesh of step h over [0, T] with N = T/h cells per axis, kernel values
// live at the cell centers s = (k - 1/2) * h, k = 1..N.  Each cell carries a
// fill state:
//   - Recovered:  written by the discrete inversion,
//   - Prehistory: first row/column (l == 1 or m == 1), which the inversion
//                 never writes; values may be filled from a prehistory band,
//   - Empty:      no value yet.
// Duplicate writes must agree: a conflicting duplicate write is an error,
// never a silent overwrite, and prehistory cells are never overwritten by
// the inversion.
// ============================================================================

#include <string>
#include <vector>

namespace volterra {

class PrehistoryBand;

/// Fill state of one grid cell.
enum class NodeState { Empty, Prehistory, Recovered };

/// N x N table of kernel values at half-integer nodes, 1-based indices.
class KernelGrid {
public:
    /// Grid of n x n cells, all Empty.  Throws std::invalid_argument for
    /// h <= 0 or n < 1.
    KernelGrid(double h, int n);

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] double T() const noexcept { return h_ * n_; }

    /// Node coordinate (k - 1/2) * h; k in 1..N.  Throws std::out_of_range
    /// for indices outside the lattice.
    [[nodiscard]] double node(int k) const;

    [[nodiscard]] NodeState state(int l, int m) const;
    [[nodiscard]] bool has_value(int l, int m) const;

    /// Stored value at (l, m); throws std::domain_error when the cell has no
    /// value.
    [[nodiscard]] double value(int l, int m) const;

    /// Write a value with its fill state.  Idempotent for equal rewrites;
    /// throws std::invalid_argument when the new value conflicts with a
    /// stored one (relative tolerance 1e-12), when the states disagree, or
    /// when a Recovered write targets a Prehistory cell.
    void set(int l, int m, double v, NodeState st);

    /// Mark a cell Prehistory without assigning a value.  Throws
    /// std::invalid_argument when the cell is already Recovered.
    void mark_prehistory(int l, int m);

    /// Fill every first-row/first-column cell (l == 1 or m == 1) with the
    /// band value at its node and state Prehistory.
    void fill_prehistory(const PrehistoryBand& band);

    /// Free-form description of where the values came from; carried into
    /// reports and CSV metadata consumers.
    [[nodiscard]] const std::string& provenance() const noexcept { return provenance_; }
    void set_provenance(std::string text) { provenance_ = std::move(text); }

private:
    [[nodiscard]] int index(int l, int m) const;

    double h_;
    int n_;
    std::vector<double> values_;
    std::vector<NodeState> states_;
    std::vector<bool> filled_;
    std::string provenance_;
};

} // namespace volterra
