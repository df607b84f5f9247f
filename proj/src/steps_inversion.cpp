#include "volterra/steps_inversion.hpp"

#include "volterra/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace volterra {

// ============================================================================
// Domain classification
// ============================================================================

DomainClass classify_domain(double t, double upsilon, double h, double T) {
    if (!(h > 0.0)) throw std::invalid_argument("classify_domain: h must be > 0");
    const auto layers = nearly_integer(T / h);
    if (!layers || *layers < 1) {
        throw std::invalid_argument("classify_domain: T must be a positive integer multiple of h");
    }
    const int N = static_cast<int>(*layers);

    const double edge_slack = 1e-12;
    const double T_hi = T + kAlignTol * std::fmax(1.0, T);
    if (t < -edge_slack || upsilon < -edge_slack || t > T_hi) {
        return DomainClass{DomainTag::Outside, 0};
    }
    // Band: upsilon > t - h, i.e. the pulse separation t - upsilon is below h.
    if (t - upsilon < h - kAlignTol * std::fmax(1.0, h)) {
        return DomainClass{DomainTag::Prehistory, 0};
    }
    // Layer index floor(t/h), with near-integer ratios snapped up so lattice
    // coordinates classify stably; layers are half-open and t = T closes the
    // last one.
    const double r = t / h;
    int k = static_cast<int>(std::floor(r + kAlignTol * std::fmax(1.0, r)));
    k = std::clamp(k, 1, N);
    return DomainClass{DomainTag::Layer, k};
}

// ============================================================================
// D2 sources
// ============================================================================

D2Source D2Source::analytic(std::function<double(double, double)> f_tu,
                            std::function<double(double, double)> f_uu) {
    if (!f_tu || !f_uu) throw std::invalid_argument("D2Source::analytic: null derivative callable");
    D2Source d;
    d.f_tu_ = std::move(f_tu);
    d.f_uu_ = std::move(f_uu);
    return d;
}

D2Source D2Source::finite_difference(std::shared_ptr<const ResponseSurface> surface) {
    if (!surface) throw std::invalid_argument("D2Source::finite_difference: null surface");
    D2Source d;
    d.surface_ = std::move(surface);
    return d;
}

D2Source D2Source::from_kernel(const KernelSource& src, Series series, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("D2Source::from_kernel: h must be > 0");
    const auto coeffs = src.monomials();
    if (!coeffs) {
        throw std::invalid_argument("D2Source::from_kernel: source has no monomial form");
    }
    // Per monomial c * s1^d1 * s2^d2 the response factorizes into pulse
    // moments P(x, d) over the two pulse windows; differentiate the factors.
    auto terms = std::make_shared<std::map<MonomialKey, double>>(*coeffs);
    if (series == Series::One) {
        // f(t, u) = sum c * P(t, d1) * P(t - u, d2)
        auto f_tu = [terms, h](double t, double u) {
            double sum = 0.0;
            for (const auto& [key, c] : *terms) {
                sum -= c * (pulse_moment_d1(t, key.first, h) * pulse_moment_d1(t - u, key.second, h) +
                            pulse_moment(t, key.first, h) * pulse_moment_d2(t - u, key.second, h));
            }
            return sum;
        };
        auto f_uu = [terms, h](double t, double u) {
            double sum = 0.0;
            for (const auto& [key, c] : *terms) {
                sum += c * pulse_moment(t, key.first, h) * pulse_moment_d2(t - u, key.second, h);
            }
            return sum;
        };
        return analytic(std::move(f_tu), std::move(f_uu));
    }
    // f(t, u) = sum c * P(t - u, d1) * P(t, d2)
    auto f_tu = [terms, h](double t, double u) {
        double sum = 0.0;
        for (const auto& [key, c] : *terms) {
            sum -= c * (pulse_moment_d2(t - u, key.first, h) * pulse_moment(t, key.second, h) +
                        pulse_moment_d1(t - u, key.first, h) * pulse_moment_d1(t, key.second, h));
        }
        return sum;
    };
    auto f_uu = [terms, h](double t, double u) {
        double sum = 0.0;
        for (const auto& [key, c] : *terms) {
            sum += c * pulse_moment_d2(t - u, key.first, h) * pulse_moment(t, key.second, h);
        }
        return sum;
    };
    return analytic(std::move(f_tu), std::move(f_uu));
}

double D2Source::operator()(double t, double upsilon) const {
    if (surface_) {
        const auto it = snap_index(t, surface_->delta());
        const auto iu = snap_index(upsilon, surface_->delta());
        if (!it || !iu) {
            throw std::domain_error("D2Source: (t, upsilon) is not on the surface lattice");
        }
        return d2_on_lattice(*surface_, *it, *iu);
    }
    return -(f_tu_(t, upsilon) + f_uu_(t, upsilon));
}

double d2_response(const D2Source& srcs, double t, double upsilon) {
    return srcs(t, upsilon);
}

// ============================================================================
// Finite-difference stencils
// ============================================================================

namespace {

struct StencilTerm {
    int off;
    double c;
};
using Stencil = std::vector<StencilTerm>;

// Second-order stencils on a unit-spaced line.  First derivative:
const Stencil kD1Central = {{-1, -0.5}, {1, 0.5}};
const Stencil kD1Forward = {{0, -1.5}, {1, 2.0}, {2, -0.5}};
const Stencil kD1Backward = {{0, 1.5}, {-1, -2.0}, {-2, 0.5}};
// Second derivative:
const Stencil kD2Central = {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
const Stencil kD2Forward = {{0, 2.0}, {1, -5.0}, {2, 4.0}, {3, -1.0}};
const Stencil kD2Backward = {{0, 2.0}, {-1, -5.0}, {-2, 4.0}, {-3, -1.0}};

[[nodiscard]] std::optional<double> stencil_uu(const ResponseSurface& s, int it, int iu,
                                               const Stencil& st) {
    for (const StencilTerm& term : st) {
        if (!s.in_lattice(it, iu + term.off)) return std::nullopt;
    }
    double sum = 0.0;
    for (const StencilTerm& term : st) {
        sum += term.c * s.at(it, iu + term.off);
    }
    return sum;
}

[[nodiscard]] std::optional<double> stencil_tu(const ResponseSurface& s, int it, int iu,
                                               const Stencil& st_t, const Stencil& st_u) {
    for (const StencilTerm& a : st_t) {
        for (const StencilTerm& b : st_u) {
            if (!s.in_lattice(it + a.off, iu + b.off)) return std::nullopt;
        }
    }
    double sum = 0.0;
    for (const StencilTerm& a : st_t) {
        for (const StencilTerm& b : st_u) {
            sum += a.c * b.c * s.at(it + a.off, iu + b.off);
        }
    }
    return sum;
}

/// Cubic-fit fallback for corners where no one-sided tensor stencil fits:
/// fit the unique cubic through the 10-node principal lattice anchored at
/// (jt0, ju0) and differentiate it at the evaluation point.  Exact on cubic
/// data, O(delta^2)-accurate on smooth data.
[[nodiscard]] double patch_d2(const ResponseSurface& s, int it, int iu) {
    const int m = s.m();
    const int nt = s.nt();
    if (nt < m + 3) {
        throw std::invalid_argument(
            "d2_on_lattice: missing stencil samples (surface needs at least four sample rows)");
    }
    const int jt0 = std::clamp(it - 1, m, nt - 3);
    const int ju0 = std::clamp(iu - 1, 0, jt0 - m);

    constexpr int kNodes = 10;
    constexpr std::array<std::pair<int, int>, kNodes> basis = {
        {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}}};

    // Vandermonde system in unit offsets; the triangular node set follows the
    // domain diagonal, so every node is a stored sample.
    std::array<std::array<double, kNodes + 1>, kNodes> aug{};
    int row = 0;
    for (int r = 0; r <= 3; ++r) {
        for (int si = 0; si <= r; ++si) {
            for (int b = 0; b < kNodes; ++b) {
                aug[row][b] = ipow(static_cast<double>(r), basis[b].first) *
                              ipow(static_cast<double>(si), basis[b].second);
            }
            aug[row][kNodes] = s.at(jt0 + r, ju0 + si);
            ++row;
        }
    }

    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < kNodes; ++col) {
        int pivot = col;
        for (int r2 = col + 1; r2 < kNodes; ++r2) {
            if (std::fabs(aug[r2][col]) > std::fabs(aug[pivot][col])) pivot = r2;
        }
        if (std::fabs(aug[pivot][col]) < 1e-12) {
            throw std::logic_error("d2_on_lattice: degenerate cubic-fit system");
        }
        std::swap(aug[col], aug[pivot]);
        for (int r2 = col + 1; r2 < kNodes; ++r2) {
            const double f = aug[r2][col] / aug[col][col];
            if (f == 0.0) continue;
            for (int c2 = col; c2 <= kNodes; ++c2) {
                aug[r2][c2] -= f * aug[col][c2];
            }
        }
    }
    std::array<double, kNodes> coef{};
    for (int r2 = kNodes - 1; r2 >= 0; --r2) {
        double v = aug[r2][kNodes];
        for (int c2 = r2 + 1; c2 < kNodes; ++c2) {
            v -= aug[r2][c2] * coef[c2];
        }
        coef[r2] = v / aug[r2][r2];
    }

    const double x = it - jt0;
    const double y = iu - ju0;
    double pxy = 0.0;
    double pyy = 0.0;
    for (int b = 0; b < kNodes; ++b) {
        const int i = basis[b].first;
        const int j = basis[b].second;
        if (i >= 1 && j >= 1) {
            pxy += coef[b] * i * j * ipow(x, i - 1) * ipow(y, j - 1);
        }
        if (j >= 2) {
            pyy += coef[b] * j * (j - 1) * ipow(x, i) * ipow(y, j - 2);
        }
    }
    const double inv = 1.0 / (s.delta() * s.delta());
    return -(pxy + pyy) * inv;
}

} // namespace

double d2_on_lattice(const ResponseSurface& surface, int it, int iu) {
    if (!surface.in_lattice(it, iu)) {
        throw std::domain_error("d2_on_lattice: point outside the sampled triangle");
    }
    std::optional<double> fuu;
    for (const Stencil* st : {&kD2Central, &kD2Forward, &kD2Backward}) {
        fuu = stencil_uu(surface, it, iu, *st);
        if (fuu) break;
    }
    std::optional<double> ftu;
    if (fuu) {
        const std::array<std::pair<const Stencil*, const Stencil*>, 9> combos = {{
            {&kD1Central, &kD1Central},
            {&kD1Central, &kD1Forward},
            {&kD1Central, &kD1Backward},
            {&kD1Forward, &kD1Central},
            {&kD1Backward, &kD1Central},
            {&kD1Forward, &kD1Forward},
            {&kD1Forward, &kD1Backward},
            {&kD1Backward, &kD1Forward},
            {&kD1Backward, &kD1Backward},
        }};
        for (const auto& [st_t, st_u] : combos) {
            ftu = stencil_tu(surface, it, iu, *st_t, *st_u);
            if (ftu) break;
        }
    }
    if (fuu && ftu) {
        const double inv = 1.0 / (surface.delta() * surface.delta());
        return -(*ftu + *fuu) * inv;
    }
    return patch_d2(surface, it, iu);
}

// ============================================================================
// KernelField
// ============================================================================

KernelField::KernelField(PrehistoryBand prehistory, double h, double T, double delta)
    : prehistory_(std::move(prehistory)), h_(h), T_(T), delta_(delta) {
    if (!(h > 0.0)) throw std::invalid_argument("KernelField: h must be > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("KernelField: delta must be > 0");
    const auto m = nearly_integer(h / delta);
    if (!m || *m < 1) {
        throw std::invalid_argument("KernelField: h must be an integer multiple of delta");
    }
    const auto layers = nearly_integer(T / h);
    if (!layers || *layers < 1) {
        throw std::invalid_argument("KernelField: T must be a positive integer multiple of h");
    }
    if (!nearly_equal(prehistory_.h(), h) || prehistory_.T() < T - kAlignTol * std::fmax(1.0, T)) {
        throw std::invalid_argument("KernelField: prehistory band does not match (h, T)");
    }
    m_ = static_cast<int>(*m);
    nt_ = static_cast<int>(*layers) * m_;
}

int KernelField::index_of(double x) const {
    const auto i = snap_index(x, delta_);
    if (!i) {
        throw std::domain_error("KernelField: coordinate is not on the delta-lattice");
    }
    if (*i < 0 || *i > nt_) {
        throw std::domain_error("KernelField: coordinate outside [0, T]");
    }
    return *i;
}

const double* KernelField::lookup(int ip, int iq) const noexcept {
    const auto it = memo_.find({ip, iq});
    return it == memo_.end() ? nullptr : &it->second;
}

double KernelField::at(int ip, int iq) const {
    if (ip < 0 || iq < 0 || ip > nt_ || iq > nt_) {
        throw std::domain_error("KernelField::at: lattice point outside [0, T]^2");
    }
    if (const double* v = lookup(ip, iq)) return *v;
    if (ip < m_ || iq < m_) {
        return prehistory_eval(prehistory_, coord(ip), coord(iq));
    }
    throw std::domain_error("KernelField::at: layer point not recovered yet");
}

double KernelField::at_coords(double p, double q) const {
    return at(index_of(p), index_of(q));
}

void KernelField::store(int ip, int iq, double value) {
    const auto [it, inserted] = memo_.try_emplace({ip, iq}, value);
    if (!inserted && it->second != value) {
        throw std::logic_error("KernelField::store: conflicting rewrite of a memoized point");
    }
}

// ============================================================================
// Recovery
// ============================================================================

namespace {

double recover_index(int ip, int iq, const D2Source& d2_1, const D2Source& d2_2,
                     KernelField& field) {
    if (const double* hit = field.lookup(ip, iq)) return *hit;
    const int m = field.m();
    double v = 0.0;
    if (ip < m || iq < m) {
        v = prehistory_eval(field.prehistory(), field.coord(ip), field.coord(iq));
    } else {
        const double back_q = recover_index(ip, iq - m, d2_1, d2_2, field);
        const double back_p = recover_index(ip - m, iq, d2_1, d2_2, field);
        const double back_pq = recover_index(ip - m, iq - m, d2_1, d2_2, field);
        const double d2v = ip >= iq ? d2_1(field.coord(ip), field.coord(ip - iq))
                                    : d2_2(field.coord(iq), field.coord(iq - ip));
        v = d2v + back_q + back_p - back_pq;
    }
    field.store(ip, iq, v);
    return v;
}

} // namespace

double recover_point(double p, double q, const D2Source& d2_1, const D2Source& d2_2,
                     KernelField& field) {
    const int ip = field.index_of(p);
    const int iq = field.index_of(q);
    return recover_index(ip, iq, d2_1, d2_2, field);
}

KernelField recover_field(const D2Source& d2_1, const D2Source& d2_2,
                          const PrehistoryBand& prehistory, double h, double T, double delta,
                          EvalOrder order) {
    KernelField field(prehistory, h, T, delta);
    const int m = field.m();
    const int nt = field.nt();
    if (order == EvalOrder::LayerIterative) {
        // Points grouped by layer index floor(max(p, q)/h); within one layer
        // all three back-corners live in earlier layers or the band, so each
        // call resolves without deep recursion.
        const int layers = nt / m;
        for (int k = 1; k <= layers; ++k) {
            for (int ip = m; ip <= nt; ++ip) {
                for (int iq = m; iq <= nt; ++iq) {
                    if (std::max(ip, iq) / m == k) {
                        (void)recover_index(ip, iq, d2_1, d2_2, field);
                    }
                }
            }
        }
    } else {
        // Start from the far corner so the memoized recursion unwinds the
        // full dependency chain itself.
        for (int ip = nt; ip >= m; --ip) {
            for (int iq = nt; iq >= m; --iq) {
                (void)recover_index(ip, iq, d2_1, d2_2, field);
            }
        }
    }
    return field;
}

// ============================================================================
// Diagnostics
// ============================================================================

namespace {

/// Old-corner evaluation for the matching residual: strict band interior
/// reads the (possibly perturbed) band, the closing edge s = h reads the band
/// source by continuity, interior layer points read the recovered field.
double matching_corner_old(const KernelField& field, int ix, int iy) {
    const int m = field.m();
    const double x = field.coord(ix);
    const double y = field.coord(iy);
    if (ix < m || iy < m) {
        return prehistory_eval(field.prehistory(), x, y);
    }
    if (ix == m || iy == m) {
        return eval_kernel(field.prehistory().source(), x, y);
    }
    return field.at(ix, iy);
}

} // namespace

double matching_residual(const KernelField& field, const D2Source& d2, Series series, double t,
                         double upsilon) {
    const DomainClass dc = classify_domain(t, upsilon, field.h(), field.T());
    if (dc.tag != DomainTag::Layer) {
        throw std::domain_error("matching_residual: (t, upsilon) is not a layer point");
    }
    const int it = field.index_of(t);
    const int iu = field.index_of(upsilon);
    const int m = field.m();

    // Kernel-coordinate corners in series-1 orientation; series 2 transposes
    // every argument pair.
    std::pair<int, int> ca{it, it - iu};          // new corner
    std::pair<int, int> cb{it, it - iu - m};      // old
    std::pair<int, int> cc{it - m, it - iu};      // old
    std::pair<int, int> cd{it - m, it - iu - m};  // old
    if (series == Series::Two) {
        std::swap(ca.first, ca.second);
        std::swap(cb.first, cb.second);
        std::swap(cc.first, cc.second);
        std::swap(cd.first, cd.second);
    }

    const double bracket = field.at(ca.first, ca.second) -
                           matching_corner_old(field, cb.first, cb.second) -
                           matching_corner_old(field, cc.first, cc.second) +
                           matching_corner_old(field, cd.first, cd.second);
    return d2(t, upsilon) - bracket;
}

double solvability_residual(const std::function<double(double)>& f_at,
                            const PrehistoryBand& prehistory, int k, double h,
                            const QuadratureRule& rule, const D2Source* d2_1,
                            const D2Source* d2_2) {
    if (!f_at) throw std::invalid_argument("solvability_residual: null response callable");
    if (!(h > 0.0)) throw std::invalid_argument("solvability_residual: h must be > 0");
    if (!nearly_equal(prehistory.h(), h)) {
        throw std::invalid_argument("solvability_residual: band pulse width differs from h");
    }
    if (k == 1) {
        const KernelSource band_source = KernelSource::custom(
            [&prehistory](double s1, double s2) { return prehistory_eval(prehistory, s1, s2); },
            "prehistory band");
        return f_at(h) - cell_integral(band_source, 0.0, 0.0, h, rule);
    }
    if (k == 2) {
        if (d2_1 == nullptr || d2_2 == nullptr) {
            throw std::invalid_argument("solvability_residual: k = 2 needs both analytic D2 sources");
        }
        if (prehistory.T() < 2.0 * h - 1e-12) {
            throw std::invalid_argument("solvability_residual: band must cover [0, 2h]");
        }
        // One recursion step: on (h, 2h)^2 all three back-corners lie strictly
        // inside the band, so the first-layer kernel needs no recovered data.
        const KernelSource layer1 = KernelSource::custom(
            [&prehistory, d2_1, d2_2, h](double p, double q) {
                const double d2v = p >= q ? (*d2_1)(p, p - q) : (*d2_2)(q, q - p);
                return d2v + prehistory_eval(prehistory, p, q - h) +
                       prehistory_eval(prehistory, p - h, q) -
                       prehistory_eval(prehistory, p - h, q - h);
            },
            "first-layer kernel");
        return f_at(2.0 * h) - cell_integral(layer1, h, h, h, rule);
    }
    throw std::invalid_argument("solvability_residual: k must be 1 or 2");
}

} // namespace volterra
