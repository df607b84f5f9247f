#include "volterra/kernels.hpp"

#include "volterra/kernel_grid.hpp"
#include "volterra/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace volterra {

namespace {

[[nodiscard]] std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// Nearest half-integer node index for coordinate s on a grid of step h:
/// k with (k - 1/2) * h == s, snapped within the alignment slack.
[[nodiscard]] std::optional<int> snap_node(double s, double h, int n) {
    const double r = std::nearbyint(s / h + 0.5);
    const int k = static_cast<int>(r);
    if (k < 1 || k > n) return std::nullopt;
    if (std::fabs(s - (k - 0.5) * h) > kAlignTol * std::fmax(1.0, std::fabs(s))) {
        return std::nullopt;
    }
    return k;
}

[[nodiscard]] double eval_grid(const KernelGrid& g, GridEval rule, double s1, double s2) {
    const double T = g.T();
    const double slack = kAlignTol * std::fmax(1.0, T);
    if (s1 < -slack || s2 < -slack || s1 > T + slack || s2 > T + slack) {
        throw std::domain_error("KernelSource(grid): query outside [0, T]^2");
    }
    if (rule == GridEval::ExactNode) {
        const auto l = snap_node(s1, g.h(), g.size());
        const auto m = snap_node(s2, g.h(), g.size());
        if (!l || !m) {
            throw std::domain_error("KernelSource(grid): query is not a stored node (exact-node rule)");
        }
        if (!g.has_value(*l, *m)) {
            throw std::domain_error("KernelSource(grid): node has no stored value");
        }
        return g.value(*l, *m);
    }
    // Bilinear diagnostics: interpolate within the cell of the node lattice
    // that contains the query, clamping to the hull so edge queries use the
    // outermost cell.
    const auto cell_low = [&](double s) {
        int k = static_cast<int>(std::floor(s / g.h() + 0.5));
        return std::clamp(k, 1, g.size() - 1);
    };
    if (g.size() < 2) {
        throw std::domain_error("KernelSource(grid): bilinear rule needs at least a 2x2 grid");
    }
    const int l0 = cell_low(s1);
    const int m0 = cell_low(s2);
    for (int dl = 0; dl <= 1; ++dl) {
        for (int dm = 0; dm <= 1; ++dm) {
            if (!g.has_value(l0 + dl, m0 + dm)) {
                throw std::domain_error("KernelSource(grid): bilinear rule over a cell with an unset node");
            }
        }
    }
    const double w1 = (s1 - g.node(l0)) / g.h();
    const double w2 = (s2 - g.node(m0)) / g.h();
    return (1.0 - w1) * (1.0 - w2) * g.value(l0, m0) + (1.0 - w1) * w2 * g.value(l0, m0 + 1) +
           w1 * (1.0 - w2) * g.value(l0 + 1, m0) + w1 * w2 * g.value(l0 + 1, m0 + 1);
}

} // namespace

KernelSource KernelSource::benchmark(double a, double b) {
    return KernelSource(Impl(Benchmark{a, b}));
}

KernelSource KernelSource::polynomial(std::map<MonomialKey, double> coeffs) {
    for (const auto& [key, c] : coeffs) {
        (void)c;
        if (key.first < 0 || key.second < 0) {
            throw std::invalid_argument("KernelSource::polynomial: degrees must be >= 0");
        }
    }
    return KernelSource(Impl(Polynomial{std::move(coeffs)}));
}

KernelSource KernelSource::grid(std::shared_ptr<const KernelGrid> data, GridEval rule) {
    if (!data) throw std::invalid_argument("KernelSource::grid: null grid");
    return KernelSource(Impl(GridData{std::move(data), rule}));
}

KernelSource KernelSource::custom(std::function<double(double, double)> fn, std::string label) {
    if (!fn) throw std::invalid_argument("KernelSource::custom: null callable");
    return KernelSource(Impl(Custom{std::move(fn), std::move(label)}));
}

double KernelSource::operator()(double s1, double s2) const {
    return std::visit(
        [&](const auto& impl) -> double {
            using I = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<I, Benchmark>) {
                return impl.a * s1 * s1 - impl.b * s2;
            } else if constexpr (std::is_same_v<I, Polynomial>) {
                double sum = 0.0;
                for (const auto& [key, c] : impl.coeffs) {
                    sum += c * ipow(s1, key.first) * ipow(s2, key.second);
                }
                return sum;
            } else if constexpr (std::is_same_v<I, GridData>) {
                return eval_grid(*impl.data, impl.rule, s1, s2);
            } else {
                return impl.fn(s1, s2);
            }
        },
        impl_);
}

std::string KernelSource::describe() const {
    return std::visit(
        [](const auto& impl) -> std::string {
            using I = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<I, Benchmark>) {
                return "benchmark(a=" + fmt_num(impl.a) + ",b=" + fmt_num(impl.b) + ")";
            } else if constexpr (std::is_same_v<I, Polynomial>) {
                std::ostringstream out;
                out << "poly(";
                bool first = true;
                for (const auto& [key, c] : impl.coeffs) {
                    if (!first) out << ";";
                    out << key.first << "," << key.second << ":" << fmt_num(c);
                    first = false;
                }
                out << ")";
                return out.str();
            } else if constexpr (std::is_same_v<I, GridData>) {
                std::string rule = impl.rule == GridEval::ExactNode ? "exact-node" : "bilinear";
                return "grid(N=" + std::to_string(impl.data->size()) +
                       ",h=" + fmt_num(impl.data->h()) + "," + rule + ")";
            } else {
                return "custom(" + impl.label + ")";
            }
        },
        impl_);
}

std::optional<std::map<MonomialKey, double>> KernelSource::monomials() const {
    if (const auto* b = std::get_if<Benchmark>(&impl_)) {
        return std::map<MonomialKey, double>{{{2, 0}, b->a}, {{0, 1}, -b->b}};
    }
    if (const auto* p = std::get_if<Polynomial>(&impl_)) {
        return p->coeffs;
    }
    return std::nullopt;
}

double eval_kernel(const KernelSource& src, double s1, double s2) {
    return src(s1, s2);
}

PrehistoryBand::PrehistoryBand(KernelSource source, double h, double T)
    : source_(std::move(source)), h_(h), T_(T) {
    if (!(h > 0.0)) throw std::invalid_argument("PrehistoryBand: h must be > 0");
    if (!(T >= h)) throw std::invalid_argument("PrehistoryBand: T must be >= h");
}

bool PrehistoryBand::contains(double p, double q) const noexcept {
    const double lo = -1e-12;
    const double hi = T_ + kAlignTol * std::fmax(1.0, T_);
    const bool p_ok = p >= lo && p <= hi;
    const bool q_ok = q >= lo && q <= hi;
    // Strict on the h side: the band is half-open, [0, h) in the thin
    // coordinate.  Points with both coordinates >= h belong to the layers.
    return (p_ok && q_ok) && (p < h_ || q < h_);
}

double PrehistoryBand::operator()(double p, double q) const {
    if (!contains(p, q)) {
        throw std::domain_error("PrehistoryBand: point outside the band; recover it instead");
    }
    return source_(p, q);
}

double prehistory_eval(const PrehistoryBand& band, double p, double q) {
    return band(p, q);
}

} // namespace volterra
