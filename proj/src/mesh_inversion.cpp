#include "volterra/mesh_inversion.hpp"

#include "volterra/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace volterra {

namespace {

[[nodiscard]] int layer_count(double h, double T, const char* who) {
    if (!(h > 0.0)) throw std::invalid_argument(std::string(who) + ": h must be > 0");
    const auto n = nearly_integer(T / h);
    if (!n || *n < 1) {
        throw std::invalid_argument(std::string(who) + ": T must be a positive integer multiple of h");
    }
    return static_cast<int>(*n);
}

} // namespace

// ============================================================================
// MeshSamples
// ============================================================================

double MeshSamples::at(int i, int j) const {
    const auto it = values.find({i, j});
    if (it == values.end()) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "MeshSamples::at: no sample at (i=%d, j=%d)", i, j);
        throw std::invalid_argument(buf);
    }
    return it->second;
}

MeshSamples closed_form_mesh_samples(double a, double b, Series series, double h, double T) {
    const int n = layer_count(h, T, "closed_form_mesh_samples");
    MeshSamples out;
    out.series = series;
    out.h = h;
    for (int i = 1; i <= n; ++i) {
        for (int j = 0; j <= i - 1; ++j) {
            out.values[{i, j}] = benchmark_rhs(a, b, h, i * h, j * h, series);
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "closed-form(a=%g,b=%g)", a, b);
    out.origin = buf;
    return out;
}

MeshSamples mesh_samples_from_surface(const ResponseSurface& surface) {
    const int m = surface.m();
    const int n = surface.nt() / m;
    MeshSamples out;
    out.series = surface.series();
    out.h = surface.h();
    for (int i = 1; i <= n; ++i) {
        for (int j = 0; j <= i - 1; ++j) {
            out.values[{i, j}] = surface.at(i * m, j * m);
        }
    }
    out.origin = surface.generator();
    return out;
}

// ============================================================================
// Inversion
// ============================================================================

KernelGrid build_mesh(double h, double T) {
    return KernelGrid(h, layer_count(h, T, "build_mesh"));
}

KernelGrid invert_mesh(const MeshSamples& f1, const MeshSamples& f2, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("invert_mesh: h must be > 0");
    if (f1.series != Series::One) {
        throw std::invalid_argument("invert_mesh: first sample set must be series 1");
    }
    if (f2.series != Series::Two) {
        throw std::invalid_argument("invert_mesh: second sample set must be series 2");
    }
    if (!nearly_equal(f1.h, h) || !nearly_equal(f2.h, h)) {
        throw std::invalid_argument("invert_mesh: sample step differs from h");
    }

    int n = 0;
    for (const auto& [key, value] : f1.values) {
        (void)value;
        n = std::max(n, key.first);
    }
    if (n < 2) {
        throw std::invalid_argument("invert_mesh: no recoverable samples (need series-1 rows with i >= 2)");
    }

    auto require = [](const MeshSamples& s, int i, int j, const char* name) {
        if (!s.has(i, j)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "invert_mesh: missing %s sample (i=%d, j=%d)", name, i, j);
            throw std::invalid_argument(buf);
        }
    };

    for (int i = 2; i <= n; ++i) {
        for (int j = 0; j <= i - 2; ++j) {
            require(f1, i, j, "series-1");
        }
    }
    for (int i = 3; i <= n; ++i) {
        for (int j = 1; j <= i - 2; ++j) {
            require(f2, i, j, "series-2");
        }
    }

    KernelGrid grid(h, n);
    const double h2 = h * h;
    // Series 1 fills column <= row; j = 0 writes the diagonal.
    for (int i = 2; i <= n; ++i) {
        for (int j = 0; j <= i - 2; ++j) {
            grid.set(i, i - j, f1.at(i, j) / h2, NodeState::Recovered);
        }
    }
    // Series 2 fills the strict upper triangle.
    for (int i = 3; i <= n; ++i) {
        for (int j = 1; j <= i - 2; ++j) {
            grid.set(i - j, i, f2.at(i, j) / h2, NodeState::Recovered);
        }
    }
    for (int k = 1; k <= n; ++k) {
        grid.mark_prehistory(1, k);
        grid.mark_prehistory(k, 1);
    }
    grid.set_provenance("f1: " + f1.origin + "; f2: " + f2.origin);
    return grid;
}

// ============================================================================
// Pair consistency
// ============================================================================

std::vector<PairViolation> check_pair_consistency(const MeshSamples& f1, const MeshSamples& f2,
                                                  double tol) {
    if (f1.series != Series::One || f2.series != Series::Two) {
        throw std::invalid_argument("check_pair_consistency: expects a (series-1, series-2) pair");
    }
    if (!nearly_equal(f1.h, f2.h)) {
        throw std::invalid_argument("check_pair_consistency: sample steps differ");
    }
    if (!(tol >= 0.0)) throw std::invalid_argument("check_pair_consistency: tol must be >= 0");

    std::vector<PairViolation> out;
    for (const auto& [key, v1] : f1.values) {
        if (key.second != 0) continue;
        const auto it2 = f2.values.find(key);
        if (it2 == f2.values.end()) continue;
        const double diff = v1 - it2->second;
        if (std::fabs(diff) > tol) {
            out.push_back(PairViolation{key.first, v1, it2->second, diff});
        }
    }
    return out;
}

} // namespace volterra
