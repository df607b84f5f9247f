#include "volterra/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace volterra {

QuadratureRule QuadratureRule::gauss(int points, int subdivisions) {
    if (points < 1) throw std::invalid_argument("QuadratureRule::gauss: points must be >= 1");
    if (subdivisions < 1) throw std::invalid_argument("QuadratureRule::gauss: subdivisions must be >= 1");
    return QuadratureRule{QuadKind::GaussLegendre, subdivisions, points};
}

QuadratureRule QuadratureRule::midpoint(int subdivisions) {
    if (subdivisions < 1) throw std::invalid_argument("QuadratureRule::midpoint: subdivisions must be >= 1");
    return QuadratureRule{QuadKind::Midpoint, subdivisions, 1};
}

std::string QuadratureRule::describe() const {
    if (kind == QuadKind::Midpoint) {
        return "midpoint:" + std::to_string(subdivisions);
    }
    return "gauss:" + std::to_string(points) + "," + std::to_string(subdivisions);
}

std::vector<GaussNode> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: node count must be >= 1");
    std::vector<GaussNode> nodes(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess for the i-th largest root, then Newton.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            deriv = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / deriv;
            x -= dx;
            if (std::fabs(dx) <= 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[static_cast<std::size_t>(i)] = GaussNode{-x, w};
        nodes[static_cast<std::size_t>(n - 1 - i)] = GaussNode{x, w};
    }
    if (n % 2 == 1) {
        nodes[static_cast<std::size_t>(n / 2)].x = 0.0; // enforce exact symmetry
    }
    return nodes;
}

std::vector<GaussNode> unit_edge_nodes(const QuadratureRule& rule) {
    if (rule.subdivisions < 1) {
        throw std::invalid_argument("quadrature rule: subdivisions must be >= 1");
    }
    std::vector<GaussNode> base;
    if (rule.kind == QuadKind::Midpoint) {
        base.push_back(GaussNode{0.5, 1.0});
    } else {
        if (rule.points < 1) {
            throw std::invalid_argument("quadrature rule: points must be >= 1");
        }
        base.reserve(static_cast<std::size_t>(rule.points));
        for (const GaussNode& g : gauss_legendre(rule.points)) {
            base.push_back(GaussNode{0.5 * (g.x + 1.0), 0.5 * g.w});
        }
    }
    const int sub = rule.subdivisions;
    const double step = 1.0 / sub;
    std::vector<GaussNode> unit;
    unit.reserve(base.size() * static_cast<std::size_t>(sub));
    for (int c = 0; c < sub; ++c) {
        for (const GaussNode& b : base) {
            unit.push_back(GaussNode{(c + b.x) * step, b.w * step});
        }
    }
    return unit;
}

} // namespace volterra
