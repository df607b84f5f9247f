// ============================================================================
// Unit tests for domain classification, response curvature (analytic and
// finite-difference), the layered kernel recovery, and its diagnostics.
// ============================================================================

#include "doctest.h"

#include "volterra/forward.hpp"
#include "volterra/kernel_grid.hpp"
#include "volterra/kernels.hpp"
#include "volterra/steps_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

using namespace volterra;

namespace {

/// Response surface of an arbitrary kernel source, sampled by quadrature.
ResponseSurface quad_surface(const KernelSource& k, Series s, double h, double T, double delta,
                             const QuadratureRule& rule = QuadratureRule::defaults()) {
    return sample_response_surface(SurfaceGenerator::quadrature(k, rule), s, h, T, delta);
}

/// Four-corner kernel bracket that the response curvature must equal.
double corner_bracket(const std::function<double(double, double)>& K, Series s, double t, double u,
                      double h) {
    if (s == Series::One)
        return K(t, t - u) - K(t, t - u - h) - K(t - h, t - u) + K(t - h, t - u - h);
    return K(t - u, t) - K(t - u - h, t) - K(t - u, t - h) + K(t - u - h, t - h);
}

} // namespace

// ---------------------------------------------------------------------------
// Domain classification
// ---------------------------------------------------------------------------

TEST_CASE("classify_domain splits the plane into outside, band, and layers") {
    const double h = 0.25;
    const double T = 1.0;
    CHECK(classify_domain(-0.1, 0.0, h, T).tag == DomainTag::Outside);
    CHECK(classify_domain(0.5, -0.01, h, T).tag == DomainTag::Outside);
    CHECK(classify_domain(1.1, 0.0, h, T).tag == DomainTag::Outside);

    CHECK(classify_domain(0.2, 0.0, h, T).tag == DomainTag::Prehistory);
    CHECK(classify_domain(0.5, 0.3, h, T).tag == DomainTag::Prehistory);
    CHECK(classify_domain(0.5, 0.26, h, T).tag == DomainTag::Prehistory);

    CHECK(classify_domain(0.5, 0.1, h, T) == DomainClass{DomainTag::Layer, 2});
    CHECK(classify_domain(0.5, 0.25, h, T) == DomainClass{DomainTag::Layer, 2});
    CHECK(classify_domain(0.25, 0.0, h, T) == DomainClass{DomainTag::Layer, 1});
    CHECK(classify_domain(0.75, 0.5, h, T) == DomainClass{DomainTag::Layer, 3});
    // The closing edge t = T belongs to the last layer.
    CHECK(classify_domain(1.0, 0.0, h, T) == DomainClass{DomainTag::Layer, 4});

    // Near-integer t/h snaps before flooring (0.7 / 0.1 is 6.999... in binary).
    CHECK(classify_domain(0.7, 0.0, 0.1, 1.0) == DomainClass{DomainTag::Layer, 7});

    CHECK_THROWS_AS((void)classify_domain(0.5, 0.1, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)classify_domain(0.5, 0.1, 0.25, 0.9), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Curvature sources
// ---------------------------------------------------------------------------

TEST_CASE("analytic curvature combines the two second derivatives") {
    const D2Source d2 = D2Source::analytic([](double, double) { return 2.0; },
                                           [](double, double) { return -5.0; });
    CHECK(d2(0.5, 0.1) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(d2_response(d2, 0.7, 0.2) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_FALSE(d2.is_finite_difference());
    CHECK(d2.surface() == nullptr);

    CHECK_THROWS_AS((void)D2Source::analytic(nullptr, [](double, double) { return 0.0; }),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)D2Source::analytic([](double, double) { return 0.0; }, nullptr),
                    std::invalid_argument);
}

TEST_CASE("from_kernel curvature matches the four-corner bracket") {
    const double h = 0.25;

    // The benchmark kernel is affine in s2 and depends on s1 only through a
    // term the bracket cancels: its curvature vanishes identically.
    for (Series s : {Series::One, Series::Two}) {
        const D2Source d2 = D2Source::from_kernel(KernelSource::benchmark(4.0, -1.0), s, h);
        for (double t : {0.5, 0.75, 1.0})
            for (double u : {0.0, 0.1, 0.25})
                CHECK(std::fabs(d2(t, u)) <= 1e-12);
    }

    // K = s1*s2 has constant curvature h^2.
    const KernelSource cross = KernelSource::polynomial({{{1, 1}, 1.0}});
    for (Series s : {Series::One, Series::Two}) {
        const D2Source d2 = D2Source::from_kernel(cross, s, h);
        CHECK(d2(0.5, 0.1) == doctest::Approx(h * h).epsilon(1e-13));
        CHECK(d2(0.9, 0.45) == doctest::Approx(h * h).epsilon(1e-13));
    }

    // A mixed cubic checked against the bracket form at scattered points.
    const KernelSource cubic =
        KernelSource::polynomial({{{3, 0}, 0.5}, {{2, 1}, 1.0}, {{1, 1}, -2.0}, {{0, 2}, 0.75}});
    const auto K = [&](double s1, double s2) { return cubic(s1, s2); };
    for (Series s : {Series::One, Series::Two}) {
        const D2Source d2 = D2Source::from_kernel(cubic, s, h);
        for (double t : {0.3, 0.6, 0.95})
            for (double u : {0.0, 0.05, 0.3}) {
                CHECK(d2(t, u) ==
                      doctest::Approx(corner_bracket(K, s, t, u, h)).epsilon(1e-12));
            }
    }

    // Sources without a monomial form cannot provide analytic curvature.
    CHECK_THROWS_AS(
        (void)D2Source::from_kernel(KernelSource::custom([](double a, double b) { return a + b; }),
                                    Series::One, h),
        std::invalid_argument);
    auto grid = std::make_shared<const KernelGrid>(0.25, 4);
    CHECK_THROWS_AS((void)D2Source::from_kernel(KernelSource::grid(grid), Series::One, h),
                    std::invalid_argument);
}

TEST_CASE("finite differences are exact on a quadratic response surface") {
    const double h = 0.25;
    const double T = 0.75;
    const double delta = 0.0625;
    const KernelSource cross = KernelSource::polynomial({{{1, 1}, 1.0}});
    auto surf =
        std::make_shared<const ResponseSurface>(quad_surface(cross, Series::One, h, T, delta));

    // Every lattice point, including the boundary rows handled by one-sided
    // stencils and the corner patch, reproduces the constant curvature h^2.
    for (int it = surf->m(); it <= surf->nt(); ++it)
        for (int iu = 0; iu <= it - surf->m(); ++iu)
            CHECK(d2_on_lattice(*surf, it, iu) == doctest::Approx(h * h).epsilon(1e-9));

    const D2Source fd = D2Source::finite_difference(surf);
    CHECK(fd.is_finite_difference());
    CHECK(fd.surface() == surf.get());
    CHECK(fd(0.5, 0.125) == doctest::Approx(h * h).epsilon(1e-9));

    CHECK_THROWS_AS((void)fd(0.51, 0.125), std::domain_error);
    CHECK_THROWS_AS((void)d2_on_lattice(*surf, 3, 0), std::domain_error);
    CHECK_THROWS_AS((void)d2_on_lattice(*surf, 5, 2), std::domain_error);
    CHECK_THROWS_AS((void)D2Source::finite_difference(nullptr), std::invalid_argument);
}

TEST_CASE("finite differences match analytic curvature on cubic responses") {
    const double h = 0.25;
    const double T = 0.75;
    const double delta = 0.0625;
    const KernelSource k = KernelSource::polynomial({{{2, 1}, 1.0}});
    for (Series s : {Series::One, Series::Two}) {
        auto surf = std::make_shared<const ResponseSurface>(quad_surface(k, s, h, T, delta));
        const D2Source fd = D2Source::finite_difference(surf);
        const D2Source exact = D2Source::from_kernel(k, s, h);
        for (int it = surf->m(); it <= surf->nt(); ++it)
            for (int iu = 0; iu <= it - surf->m(); ++iu) {
                const double t = surf->t_of(it);
                const double u = surf->u_of(iu);
                CHECK(fd(t, u) == doctest::Approx(exact(t, u)).epsilon(1e-9));
            }
    }
}

TEST_CASE("finite-difference curvature converges at second order") {
    const double h = 0.25;
    const double T = 0.75;
    const auto K = [](double s1, double s2) {
        return std::exp(s1) * std::cos(2.0 * s2) + s1 * s2;
    };
    const KernelSource k = KernelSource::custom(K, "smooth");
    std::vector<double> errs;
    for (double delta : {0.0625, 0.03125}) {
        const ResponseSurface surf = quad_surface(k, Series::One, h, T, delta);
        double emax = 0.0;
        for (int it = surf.m(); it <= surf.nt(); ++it)
            for (int iu = 0; iu <= it - surf.m(); ++iu) {
                const double ref =
                    corner_bracket(K, Series::One, surf.t_of(it), surf.u_of(iu), h);
                emax = std::max(emax, std::fabs(d2_on_lattice(surf, it, iu) - ref));
            }
        errs.push_back(emax);
    }
    CHECK(errs[0] / errs[1] > 3.4);
    CHECK(errs[0] / errs[1] < 4.6);
}

TEST_CASE("surfaces with fewer than four sample rows host no stencil") {
    const auto gen = SurfaceGenerator::closed_form(4.0, -1.0);
    const ResponseSurface tiny = sample_response_surface(gen, Series::One, 0.25, 0.75, 0.25);
    CHECK_THROWS_AS((void)d2_on_lattice(tiny, 1, 0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Kernel field
// ---------------------------------------------------------------------------

TEST_CASE("kernel field validates geometry and guards its memo") {
    const KernelSource k = KernelSource::benchmark(4.0, -1.0);
    const PrehistoryBand band(k, 0.25, 1.0);

    CHECK_THROWS_AS((void)KernelField(band, 0.25, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)KernelField(band, 0.25, 0.9, 0.25), std::invalid_argument);
    CHECK_THROWS_AS((void)KernelField(PrehistoryBand(k, 0.25, 0.5), 0.25, 1.0, 0.25),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)KernelField(PrehistoryBand(k, 0.125, 1.0), 0.25, 1.0, 0.25),
                    std::invalid_argument);

    KernelField field(band, 0.25, 1.0, 0.125);
    CHECK(field.m() == 2);
    CHECK(field.nt() == 8);
    CHECK(field.coord(3) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(field.index_of(0.5) == 4);
    CHECK_THROWS_AS((void)field.index_of(0.3), std::domain_error);
    CHECK_THROWS_AS((void)field.index_of(-0.125), std::domain_error);
    CHECK_THROWS_AS((void)field.index_of(1.125), std::domain_error);

    CHECK(field.memo().empty());
    CHECK(field.lookup(4, 4) == nullptr);
    // Band columns answer through the prehistory data before any recovery.
    CHECK(field.at(1, 6) == doctest::Approx(band(0.125, 0.75)).epsilon(1e-15));
    CHECK_THROWS_AS((void)field.at(4, 4), std::domain_error);

    field.store(4, 4, 2.0);
    CHECK(field.at(4, 4) == 2.0);
    CHECK(field.at_coords(0.5, 0.5) == 2.0);
    CHECK(field.lookup(4, 4) != nullptr);
    CHECK_NOTHROW(field.store(4, 4, 2.0));
    CHECK_THROWS_AS(field.store(4, 4, 2.1), std::logic_error);
}

// ---------------------------------------------------------------------------
// Recovery
// ---------------------------------------------------------------------------

TEST_CASE("recover_point walks the recurrence back into the band") {
    const KernelSource k = KernelSource::benchmark(4.0, -1.0);
    const PrehistoryBand band(k, 0.25, 1.0);
    const D2Source d2_1 = D2Source::from_kernel(k, Series::One, 0.25);
    const D2Source d2_2 = D2Source::from_kernel(k, Series::Two, 0.25);

    // A band point is answered by the prehistory data directly.
    KernelField fine(band, 0.25, 1.0, 0.05);
    CHECK(recover_point(0.1, 0.8, d2_1, d2_2, fine) == doctest::Approx(0.84).epsilon(1e-13));

    // One recursion step on the diagonal.
    KernelField mid(band, 0.25, 1.0, 0.125);
    CHECK(recover_point(0.375, 0.375, d2_1, d2_2, mid) == doctest::Approx(0.9375).epsilon(1e-12));
    CHECK(mid.lookup(3, 3) != nullptr);
    CHECK(recover_point(0.375, 0.375, d2_1, d2_2, mid) == doctest::Approx(0.9375).epsilon(1e-12));

    // Full-depth points on both sides of the diagonal.
    KernelField coarse(band, 0.25, 1.0, 0.25);
    CHECK(recover_point(1.0, 1.0, d2_1, d2_2, coarse) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(recover_point(1.0, 0.25, d2_1, d2_2, coarse) == doctest::Approx(4.25).epsilon(1e-12));
    CHECK(recover_point(0.25, 1.0, d2_1, d2_2, coarse) == doctest::Approx(1.25).epsilon(1e-12));

    CHECK_THROWS_AS((void)recover_point(0.3, 0.3, d2_1, d2_2, coarse), std::domain_error);
    CHECK_THROWS_AS((void)recover_point(1.25, 0.5, d2_1, d2_2, coarse), std::domain_error);
}

TEST_CASE("recover_field reproduces the benchmark kernel exactly") {
    const KernelSource k = KernelSource::benchmark(4.0, -1.0);
    const PrehistoryBand band(k, 0.25, 1.0);
    const D2Source d2_1 = D2Source::from_kernel(k, Series::One, 0.25);
    const D2Source d2_2 = D2Source::from_kernel(k, Series::Two, 0.25);

    const KernelField field = recover_field(d2_1, d2_2, band, 0.25, 1.0, 0.25);
    REQUIRE(field.m() == 1);
    REQUIRE(field.nt() == 4);
    for (int ip = 1; ip <= 4; ++ip)
        for (int iq = 1; iq <= 4; ++iq)
            CHECK(std::fabs(field.at(ip, iq) - k(field.coord(ip), field.coord(iq))) <= 1e-12);

    // Finer evaluation lattice, same exactness.
    const KernelField dense = recover_field(d2_1, d2_2, band, 0.25, 1.0, 0.0625);
    REQUIRE(dense.m() == 4);
    REQUIRE(dense.nt() == 16);
    for (int ip = dense.m(); ip <= dense.nt(); ++ip)
        for (int iq = dense.m(); iq <= dense.nt(); ++iq)
            CHECK(std::fabs(dense.at(ip, iq) - k(dense.coord(ip), dense.coord(iq))) <= 1e-12);
}

TEST_CASE("both evaluation orders produce identical memo tables") {
    const KernelSource k = KernelSource::benchmark(4.0, -1.0);
    const PrehistoryBand band(k, 0.25, 1.0);
    const D2Source d2_1 = D2Source::from_kernel(k, Series::One, 0.25);
    const D2Source d2_2 = D2Source::from_kernel(k, Series::Two, 0.25);

    const KernelField a = recover_field(d2_1, d2_2, band, 0.25, 1.0, 0.0625,
                                        EvalOrder::LayerIterative);
    const KernelField b = recover_field(d2_1, d2_2, band, 0.25, 1.0, 0.0625, EvalOrder::Recursive);
    CHECK(a.memo() == b.memo());
}

TEST_CASE("recover_field maps the zero kernel to the zero field") {
    const KernelSource zero = KernelSource::polynomial({});
    const PrehistoryBand band(zero, 0.25, 1.0);
    const D2Source d2_1 = D2Source::from_kernel(zero, Series::One, 0.25);
    const D2Source d2_2 = D2Source::from_kernel(zero, Series::Two, 0.25);
    const KernelField field = recover_field(d2_1, d2_2, band, 0.25, 1.0, 0.125);
    for (int ip = field.m(); ip <= field.nt(); ++ip)
        for (int iq = field.m(); iq <= field.nt(); ++iq)
            CHECK(field.at(ip, iq) == 0.0);
}

TEST_CASE("the finite-difference recovery pipeline converges at second order") {
    const double h = 0.25;
    const double T = 0.75;
    const KernelSource k = KernelSource::polynomial({{{3, 1}, 1.0}});
    const PrehistoryBand band(k, h, T);
    std::vector<double> errs;
    for (double delta : {0.0625, 0.03125}) {
        auto s1 = std::make_shared<const ResponseSurface>(quad_surface(k, Series::One, h, T, delta));
        auto s2 = std::make_shared<const ResponseSurface>(quad_surface(k, Series::Two, h, T, delta));
        const KernelField field = recover_field(D2Source::finite_difference(s1),
                                                D2Source::finite_difference(s2), band, h, T, delta);
        double emax = 0.0;
        for (int ip = field.m(); ip <= field.nt(); ++ip)
            for (int iq = field.m(); iq <= field.nt(); ++iq)
                emax = std::max(emax,
                                std::fabs(field.at(ip, iq) - k(field.coord(ip), field.coord(iq))));
        errs.push_back(emax);
    }
    CHECK(errs[0] == doctest::Approx(1.074e-2).epsilon(0.05));
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.1));
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

TEST_CASE("matching_residual vanishes on consistent data") {
    const double h = 0.25;
    const KernelSource k = KernelSource::benchmark(4.0, -1.0);
    const PrehistoryBand band(k, h, 1.0);
    const D2Source d2_1 = D2Source::from_kernel(k, Series::One, h);
    const D2Source d2_2 = D2Source::from_kernel(k, Series::Two, h);
    const KernelField field = recover_field(d2_1, d2_2, band, h, 1.0, h);

    for (double t : {0.5, 0.75, 1.0})
        for (double u : {0.0, 0.25}) {
            CHECK(std::fabs(matching_residual(field, d2_1, Series::One, t, u)) <= 1e-12);
            CHECK(std::fabs(matching_residual(field, d2_2, Series::Two, t, u)) <= 1e-12);
        }

    // Same story for a kernel with nonzero curvature.
    const KernelSource cross = KernelSource::polynomial({{{1, 1}, 1.0}});
    const PrehistoryBand cband(cross, h, 1.0);
    const D2Source c1 = D2Source::from_kernel(cross, Series::One, h);
    const D2Source c2 = D2Source::from_kernel(cross, Series::Two, h);
    const KernelField cfield = recover_field(c1, c2, cband, h, 1.0, h);
    CHECK(std::fabs(matching_residual(cfield, c1, Series::One, 0.5, 0.25)) <= 1e-12);
    CHECK(std::fabs(matching_residual(cfield, c2, Series::Two, 0.75, 0.25)) <= 1e-12);

    // Only layer points carry a matching condition.
    CHECK_THROWS_AS((void)matching_residual(field, d2_1, Series::One, 0.2, 0.1),
                    std::domain_error);
    CHECK_THROWS_AS((void)matching_residual(field, d2_1, Series::One, 1.25, 0.0),
                    std::domain_error);
}

TEST_CASE("matching_residual exposes inconsistent prehistory data") {
    const double h = 0.25;
    const double eps = 1e-3;
    const KernelSource true_k = KernelSource::benchmark(4.0, -1.0);
    // Perturb the data strictly inside the band; the closing edge (supplied
    // by continuity at coordinate h) still reports the unperturbed values,
    // so no kernel consistent with the curvature data continues the band.
    const KernelSource tainted = KernelSource::custom(
        [eps](double s1, double s2) {
            const double base = 4.0 * s1 * s1 + s2;
            return (s1 < 0.25 || s2 < 0.25) ? base + eps * s2 : base;
        },
        "tainted-band");
    const PrehistoryBand band(tainted, h, 1.0);
    const D2Source d2_1 = D2Source::from_kernel(true_k, Series::One, h);
    const D2Source d2_2 = D2Source::from_kernel(true_k, Series::Two, h);
    const KernelField field = recover_field(d2_1, d2_2, band, h, 1.0, h);

    // The defect shows up with magnitude eps*h where the bracket straddles
    // the band boundary.
    CHECK(matching_residual(field, d2_1, Series::One, 0.5, 0.25) ==
          doctest::Approx(-eps * h).epsilon(0.02));
    CHECK(matching_residual(field, d2_1, Series::One, 0.75, 0.5) ==
          doctest::Approx(-eps * h).epsilon(0.02));
}

TEST_CASE("solvability_residual checks the first two layer conditions") {
    const double h = 0.25;
    const KernelSource k = KernelSource::benchmark(4.0, -1.0);
    const PrehistoryBand band(k, h, 1.0);
    const auto rule = QuadratureRule::defaults();
    const D2Source d2_1 = D2Source::from_kernel(k, Series::One, h);
    const D2Source d2_2 = D2Source::from_kernel(k, Series::Two, h);
    const auto f_at = [&](double t) { return benchmark_rhs(4.0, -1.0, h, t, 0.0, Series::One); };

    CHECK(std::fabs(solvability_residual(f_at, band, 1, h, rule)) <= 1e-12);
    CHECK(std::fabs(solvability_residual(f_at, band, 2, h, rule, &d2_1, &d2_2)) <= 1e-12);

    // A constant offset in the data shows up as exactly that offset.
    const auto bumped = [&](double t) { return f_at(t) + 1e-3; };
    CHECK(solvability_residual(bumped, band, 1, h, rule) == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(solvability_residual(bumped, band, 2, h, rule, &d2_1, &d2_2) ==
          doctest::Approx(1e-3).epsilon(1e-9));

    // Zero data against the zero kernel.
    const KernelSource zero = KernelSource::polynomial({});
    const PrehistoryBand zband(zero, h, 1.0);
    CHECK(solvability_residual([](double) { return 0.0; }, zband, 1, h, rule) == 0.0);

    CHECK_THROWS_AS((void)solvability_residual(nullptr, band, 1, h, rule), std::invalid_argument);
    CHECK_THROWS_AS((void)solvability_residual(f_at, band, 0, h, rule), std::invalid_argument);
    CHECK_THROWS_AS((void)solvability_residual(f_at, band, 3, h, rule), std::invalid_argument);
    // k = 2 needs the analytic curvature pair and a band of depth 2h.
    CHECK_THROWS_AS((void)solvability_residual(f_at, band, 2, h, rule), std::invalid_argument);
    const PrehistoryBand stub(k, h, h);
    CHECK_THROWS_AS((void)solvability_residual(f_at, stub, 2, h, rule, &d2_1, &d2_2),
                    std::invalid_argument);
    // The band step must match the requested step.
    CHECK_THROWS_AS((void)solvability_residual(f_at, band, 1, 0.125, rule),
                    std::invalid_argument);
}
