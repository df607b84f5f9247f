#include "volterra/bench.hpp"

#include "volterra/forward.hpp"
#include "volterra/mesh_inversion.hpp"
#include "volterra/numeric.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace volterra {

// ============================================================================
// Error norms
// ============================================================================

ErrorNorms error_norms(const KernelGrid& grid, const KernelSource& exact) {
    ErrorNorms norms;
    bool any = false;
    const int n = grid.size();
    for (int l = 1; l <= n; ++l) {
        for (int m = 1; m <= n; ++m) {
            if (grid.state(l, m) != NodeState::Recovered || !grid.has_value(l, m)) continue;
            any = true;
            const double err = std::fabs(grid.value(l, m) - exact(grid.node(l), grid.node(m)));
            if (m <= l) {
                norms.eps1 = std::max(norms.eps1, err);
            } else {
                norms.eps2 = std::max(norms.eps2, err);
            }
        }
    }
    if (!any) throw std::invalid_argument("error_norms: grid has no recovered cells");
    norms.eps = std::max(norms.eps1, norms.eps2);
    return norms;
}

// ============================================================================
// Convergence study
// ============================================================================

ConvergenceReport convergence_study(double a, double b, double T,
                                    const std::vector<double>& h_list, bool via_quadrature,
                                    const QuadratureRule& rule) {
    if (h_list.empty()) throw std::invalid_argument("convergence_study: empty step list");
    for (std::size_t i = 1; i < h_list.size(); ++i) {
        if (!(h_list[i] < h_list[i - 1])) {
            throw std::invalid_argument("convergence_study: step list must be strictly decreasing");
        }
    }

    const KernelSource exact = KernelSource::benchmark(a, b);
    ConvergenceReport report;
    report.kernel = exact.describe();
    report.method = via_quadrature ? "quadrature(" + rule.describe() + ")" : "closed-form";

    for (std::size_t i = 0; i < h_list.size(); ++i) {
        const double h = h_list[i];
        MeshSamples f1;
        MeshSamples f2;
        if (via_quadrature) {
            const SurfaceGenerator gen = SurfaceGenerator::quadrature(exact, rule);
            f1 = mesh_samples_from_surface(sample_response_surface(gen, Series::One, h, T, h));
            f2 = mesh_samples_from_surface(sample_response_surface(gen, Series::Two, h, T, h));
        } else {
            f1 = closed_form_mesh_samples(a, b, Series::One, h, T);
            f2 = closed_form_mesh_samples(a, b, Series::Two, h, T);
        }
        const KernelGrid grid = invert_mesh(f1, f2, h);
        const ErrorNorms norms = error_norms(grid, exact);

        ConvergenceRow row;
        row.h = h;
        row.eps1 = norms.eps1;
        row.eps2 = norms.eps2;
        row.eps = norms.eps;
        if (i > 0 && nearly_equal(h_list[i - 1], 2.0 * h) && report.rows[i - 1].eps > 0.0 &&
            norms.eps > 0.0) {
            row.observed_order = std::log2(report.rows[i - 1].eps / norms.eps);
        }
        report.rows.push_back(row);
    }
    return report;
}

// ============================================================================
// Spec-string parsers
// ============================================================================

namespace {

[[nodiscard]] std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

[[nodiscard]] double parse_real(std::string_view s, const std::string& what) {
    double v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument(what + ": not a number: \"" + std::string(s) + "\"");
    }
    return v;
}

[[nodiscard]] int parse_count(std::string_view s, const std::string& what) {
    int v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument(what + ": not an integer: \"" + std::string(s) + "\"");
    }
    return v;
}

} // namespace

KernelSource parse_kernel_spec(const std::string& spec) {
    static const char* kGrammar =
        "parse_kernel_spec: expected benchmark:<a>,<b> or poly:<d1>,<d2>,<c>[;...]";
    const std::string_view sv(spec);
    const std::size_t colon = sv.find(':');
    const std::string_view head = sv.substr(0, colon);
    if (colon == std::string_view::npos || colon + 1 >= sv.size()) {
        throw std::invalid_argument(std::string(kGrammar) + "; got \"" + spec + "\"");
    }
    const std::string_view rest = sv.substr(colon + 1);

    if (head == "benchmark") {
        const auto parts = split(rest, ',');
        if (parts.size() != 2) {
            throw std::invalid_argument(std::string(kGrammar) + "; got \"" + spec + "\"");
        }
        return KernelSource::benchmark(parse_real(parts[0], "parse_kernel_spec"),
                                       parse_real(parts[1], "parse_kernel_spec"));
    }
    if (head == "poly") {
        std::map<MonomialKey, double> coeffs;
        for (const std::string_view term : split(rest, ';')) {
            const auto parts = split(term, ',');
            if (parts.size() != 3) {
                throw std::invalid_argument(std::string(kGrammar) + "; bad term \"" +
                                            std::string(term) + "\"");
            }
            const int d1 = parse_count(parts[0], "parse_kernel_spec");
            const int d2 = parse_count(parts[1], "parse_kernel_spec");
            coeffs[{d1, d2}] += parse_real(parts[2], "parse_kernel_spec");
        }
        return KernelSource::polynomial(coeffs);
    }
    throw std::invalid_argument(std::string(kGrammar) + "; got \"" + spec + "\"");
}

QuadratureRule parse_quad_spec(const std::string& spec) {
    static const char* kGrammar =
        "parse_quad_spec: expected gauss:<points>,<subdivisions> or midpoint:<subdivisions>";
    const std::string_view sv(spec);
    const std::size_t colon = sv.find(':');
    if (colon == std::string_view::npos || colon + 1 >= sv.size()) {
        throw std::invalid_argument(std::string(kGrammar) + "; got \"" + spec + "\"");
    }
    const std::string_view head = sv.substr(0, colon);
    const std::string_view rest = sv.substr(colon + 1);

    if (head == "gauss") {
        const auto parts = split(rest, ',');
        if (parts.size() != 2) {
            throw std::invalid_argument(std::string(kGrammar) + "; got \"" + spec + "\"");
        }
        const int points = parse_count(parts[0], "parse_quad_spec");
        const int subdivisions = parse_count(parts[1], "parse_quad_spec");
        if (points < 1 || subdivisions < 1) {
            throw std::invalid_argument("parse_quad_spec: counts must be >= 1");
        }
        return QuadratureRule::gauss(points, subdivisions);
    }
    if (head == "midpoint") {
        const int subdivisions = parse_count(rest, "parse_quad_spec");
        if (subdivisions < 1) {
            throw std::invalid_argument("parse_quad_spec: counts must be >= 1");
        }
        return QuadratureRule::midpoint(subdivisions);
    }
    throw std::invalid_argument(std::string(kGrammar) + "; got \"" + spec + "\"");
}

} // namespace volterra
