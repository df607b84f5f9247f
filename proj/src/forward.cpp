#include "volterra/forward.hpp"

#include "volterra/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace volterra {

double cell_integral(const KernelSource& src, double s1_lo, double s2_lo, double h,
                     const QuadratureRule& rule) {
    if (!(h > 0.0)) throw std::invalid_argument("cell_integral: h must be > 0");
    if (s1_lo < -1e-12 || s2_lo < -1e-12) {
        throw std::domain_error("cell_integral: cell extends below the kernel domain");
    }
    const std::vector<GaussNode> unit = unit_edge_nodes(rule); // validates the rule
    double total = 0.0;
    for (const GaussNode& n1 : unit) {
        const double s1 = s1_lo + n1.x * h;
        const double w1 = n1.w * h;
        for (const GaussNode& n2 : unit) {
            total += w1 * (n2.w * h) * src(s1, s2_lo + n2.x * h);
        }
    }
    return total;
}

double response_series(const KernelSource& src, Series series, double t, double upsilon, double h,
                       const QuadratureRule& rule) {
    if (!(h > 0.0)) throw std::invalid_argument("response_series: h must be > 0");
    const double slack = kAlignTol * std::fmax(1.0, std::fabs(t));
    if (upsilon < -slack || upsilon + h > t + slack) {
        throw std::domain_error("response_series: (t, upsilon) outside the admissible triangle");
    }
    if (series == Series::One) {
        return cell_integral(src, t - h, t - upsilon - h, h, rule);
    }
    return cell_integral(src, t - upsilon - h, t - h, h, rule);
}

double benchmark_rhs(double a, double b, double h, double t, double upsilon,
                     Series series) noexcept {
    const double lead = series == Series::One ? t : t - upsilon;   // argument of the a-term
    const double trail = series == Series::One ? t - upsilon : t;  // argument of the b-term
    return (a * h * h / 3.0) * (3.0 * lead * (lead - h) + h * h) +
           (b * h * h / 2.0) * (h - 2.0 * trail);
}

double pulse_moment(double x, int d, double h) {
    if (d < 0) throw std::invalid_argument("pulse_moment: degree must be >= 0");
    return (ipow(x, d + 1) - ipow(x - h, d + 1)) / (d + 1);
}

double pulse_moment_d1(double x, int d, double h) {
    if (d < 0) throw std::invalid_argument("pulse_moment_d1: degree must be >= 0");
    return ipow(x, d) - ipow(x - h, d);
}

double pulse_moment_d2(double x, int d, double h) {
    if (d < 0) throw std::invalid_argument("pulse_moment_d2: degree must be >= 0");
    if (d == 0) return 0.0;
    return d * (ipow(x, d - 1) - ipow(x - h, d - 1));
}

double polynomial_rhs(const KernelSource& src, double h, double t, double upsilon, Series series) {
    const auto coeffs = src.monomials();
    if (!coeffs) {
        throw std::invalid_argument("polynomial_rhs: source has no monomial form");
    }
    const double lead = series == Series::One ? t : t - upsilon;  // window of the s1 factor
    const double trail = series == Series::One ? t - upsilon : t; // window of the s2 factor
    double sum = 0.0;
    for (const auto& [key, c] : *coeffs) {
        sum += c * pulse_moment(lead, key.first, h) * pulse_moment(trail, key.second, h);
    }
    return sum;
}

// ============================================================================
// ResponseSurface
// ============================================================================

ResponseSurface::ResponseSurface(Series series, double h, double T, double delta,
                                 std::string generator)
    : series_(series), h_(h), T_(T), delta_(delta), generator_(std::move(generator)) {
    if (!(h > 0.0)) throw std::invalid_argument("ResponseSurface: h must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("ResponseSurface: delta must be > 0");
    const auto m = nearly_integer(h / delta);
    if (!m || *m < 1) {
        throw std::invalid_argument("ResponseSurface: h must be an integer multiple of delta");
    }
    const auto layers = nearly_integer(T / h);
    if (!layers || *layers < 1) {
        throw std::invalid_argument("ResponseSurface: T must be a positive integer multiple of h");
    }
    m_ = static_cast<int>(*m);
    nt_ = static_cast<int>(*layers) * m_;
    const std::size_t rows = static_cast<std::size_t>(nt_ - m_ + 1);
    const std::size_t count = rows * (rows + 1) / 2;
    values_.assign(count, 0.0);
    set_.assign(count, false);
}

std::size_t ResponseSurface::sample_count() const noexcept {
    return values_.size();
}

std::size_t ResponseSurface::offset(int it, int iu) const noexcept {
    const std::size_t row = static_cast<std::size_t>(it - m_);
    return row * (row + 1) / 2 + static_cast<std::size_t>(iu);
}

double ResponseSurface::at(int it, int iu) const {
    if (!in_lattice(it, iu)) {
        throw std::domain_error("ResponseSurface::at: point outside the sampled triangle");
    }
    const std::size_t i = offset(it, iu);
    if (!set_[i]) {
        throw std::domain_error("ResponseSurface::at: sample not set");
    }
    return values_[i];
}

bool ResponseSurface::is_set(int it, int iu) const noexcept {
    return in_lattice(it, iu) && set_[offset(it, iu)];
}

void ResponseSurface::set(int it, int iu, double value) {
    if (!in_lattice(it, iu)) {
        throw std::domain_error("ResponseSurface::set: point outside the sampled triangle");
    }
    const std::size_t i = offset(it, iu);
    values_[i] = value;
    set_[i] = true;
}

bool ResponseSurface::complete() const noexcept {
    for (const bool s : set_) {
        if (!s) return false;
    }
    return true;
}

// ============================================================================
// SurfaceGenerator / sample_response_surface
// ============================================================================

SurfaceGenerator SurfaceGenerator::quadrature(KernelSource src, QuadratureRule rule) {
    (void)unit_edge_nodes(rule); // validate early
    SurfaceGenerator g;
    g.closed_form_ = false;
    g.src_ = std::move(src);
    g.rule_ = rule;
    return g;
}

SurfaceGenerator SurfaceGenerator::closed_form(double a, double b) {
    SurfaceGenerator g;
    g.closed_form_ = true;
    g.a_ = a;
    g.b_ = b;
    return g;
}

double SurfaceGenerator::operator()(Series series, double t, double upsilon, double h) const {
    if (closed_form_) {
        return benchmark_rhs(a_, b_, h, t, upsilon, series);
    }
    return response_series(*src_, series, t, upsilon, h, rule_);
}

std::string SurfaceGenerator::describe() const {
    if (closed_form_) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "closed-form(a=%g,b=%g)", a_, b_);
        return buf;
    }
    return "quadrature(" + rule_.describe() + "; " + src_->describe() + ")";
}

ResponseSurface sample_response_surface(const SurfaceGenerator& gen, Series series, double h,
                                        double T, double delta) {
    ResponseSurface surface(series, h, T, delta, gen.describe());
    for (int it = surface.m(); it <= surface.nt(); ++it) {
        for (int iu = 0; iu <= it - surface.m(); ++iu) {
            surface.set(it, iu, gen(series, surface.t_of(it), surface.u_of(iu), h));
        }
    }
    return surface;
}

} // namespace volterra
