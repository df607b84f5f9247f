#include "volterra/csv_io.hpp"

#include "volterra/numeric.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>
#include <vector>

namespace volterra {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ============================================================================
// Helpers
// ============================================================================

namespace {

[[nodiscard]] std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

[[nodiscard]] std::vector<std::string_view> split_fields(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(',', start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

struct LineRef {
    const std::string& path;
    int lineno;

    [[nodiscard]] IoError fail(const std::string& msg) const {
        return IoError(path + ":" + std::to_string(lineno) + ": " + msg);
    }
};

[[nodiscard]] int parse_int_field(std::string_view s, const LineRef& where, const char* col) {
    int v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
        throw where.fail(std::string("column ") + col + " is not an integer: \"" + std::string(s) +
                         "\"");
    }
    return v;
}

[[nodiscard]] double parse_real_field(std::string_view s, const LineRef& where, const char* col) {
    double v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
        throw where.fail(std::string("column ") + col + " is not a number: \"" + std::string(s) +
                         "\"");
    }
    return v;
}

} // namespace

// ============================================================================
// Response surfaces
// ============================================================================

void write_surface_csv(const std::string& path, const ResponseSurface& surface) {
    std::ofstream out = open_out(path);
    out << "series,it,iu,t,upsilon,value\n";
    const int series = surface.series() == Series::One ? 1 : 2;
    for (int it = surface.m(); it <= surface.nt(); ++it) {
        for (int iu = 0; iu <= it - surface.m(); ++iu) {
            if (!surface.is_set(it, iu)) continue;
            out << series << ',' << it << ',' << iu << ',' << fmt_g17(surface.t_of(it)) << ','
                << fmt_g17(surface.u_of(iu)) << ',' << fmt_g17(surface.at(it, iu)) << '\n';
        }
    }
    finish(out, path);
}

ResponseSurface read_surface_csv(const std::string& path, double h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);

    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    ++lineno;
    strip_cr(line);
    if (line != "series,it,iu,t,upsilon,value") {
        throw IoError(path + ":1: unexpected header \"" + line + "\"");
    }

    struct Row {
        int series;
        int it;
        int iu;
        double t;
        double u;
        double value;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const LineRef where{path, lineno};
        const auto fields = split_fields(line);
        if (fields.size() != 6) throw where.fail("expected 6 columns");
        Row r{};
        r.series = parse_int_field(fields[0], where, "series");
        r.it = parse_int_field(fields[1], where, "it");
        r.iu = parse_int_field(fields[2], where, "iu");
        r.t = parse_real_field(fields[3], where, "t");
        r.u = parse_real_field(fields[4], where, "upsilon");
        r.value = parse_real_field(fields[5], where, "value");
        if (r.series != 1 && r.series != 2) throw where.fail("series must be 1 or 2");
        if (!rows.empty() && r.series != rows.front().series) {
            throw where.fail("mixed series in one file");
        }
        if (r.it < 0 || r.iu < 0) throw where.fail("negative lattice index");
        rows.push_back(r);
    }
    if (rows.empty()) throw IoError(path + ": no data rows");

    // Infer the sample spacing from the first off-origin row, then hold every
    // row to it.
    double delta = 0.0;
    for (const Row& r : rows) {
        if (r.it > 0) {
            delta = r.t / r.it;
            break;
        }
    }
    if (!(delta > 0.0)) throw IoError(path + ": cannot infer sample spacing");
    int nt = 0;
    for (const Row& r : rows) {
        nt = std::max(nt, r.it);
        const bool t_ok = std::fabs(r.t - r.it * delta) <= kAlignTol * std::fmax(1.0, std::fabs(r.t));
        const bool u_ok = std::fabs(r.u - r.iu * delta) <= kAlignTol * std::fmax(1.0, std::fabs(r.u));
        if (!t_ok || !u_ok) {
            throw IoError(path + ": sample coordinates are off the inferred lattice");
        }
    }

    try {
        ResponseSurface surface(rows.front().series == 1 ? Series::One : Series::Two, h,
                                nt * delta, delta, "csv:" + path);
        for (const Row& r : rows) {
            if (!surface.in_lattice(r.it, r.iu)) {
                throw IoError(path + ": sample outside the triangular lattice (it=" +
                              std::to_string(r.it) + ", iu=" + std::to_string(r.iu) + ")");
            }
            if (surface.is_set(r.it, r.iu) && surface.at(r.it, r.iu) != r.value) {
                throw IoError(path + ": conflicting duplicate sample (it=" + std::to_string(r.it) +
                              ", iu=" + std::to_string(r.iu) + ")");
            }
            surface.set(r.it, r.iu, r.value);
        }
        if (!surface.complete()) throw IoError(path + ": incomplete sample triangle");
        return surface;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

// ============================================================================
// Recovered fields and node tables
// ============================================================================

void write_field_csv(const std::string& path, const KernelField& field) {
    std::ofstream out = open_out(path);
    out << "ip,iq,p,q,value\n";
    for (const auto& [key, value] : field.memo()) {
        out << key.first << ',' << key.second << ',' << fmt_g17(field.coord(key.first)) << ','
            << fmt_g17(field.coord(key.second)) << ',' << fmt_g17(value) << '\n';
    }
    finish(out, path);
}

void write_grid_csv(const std::string& path, const KernelGrid& grid) {
    std::ofstream out = open_out(path);
    out << "l,m,s1,s2,state,value\n";
    const int n = grid.size();
    for (int l = 1; l <= n; ++l) {
        for (int m = 1; m <= n; ++m) {
            const char* state = "empty";
            switch (grid.state(l, m)) {
                case NodeState::Recovered: state = "recovered"; break;
                case NodeState::Prehistory: state = "prehistory"; break;
                case NodeState::Empty: break;
            }
            out << l << ',' << m << ',' << fmt_g17(grid.node(l)) << ',' << fmt_g17(grid.node(m))
                << ',' << state << ',';
            if (grid.has_value(l, m)) out << fmt_g17(grid.value(l, m));
            out << '\n';
        }
    }
    finish(out, path);
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& report) {
    std::ofstream out = open_out(path);
    out << "h,eps1,eps2,eps,observed_order\n";
    for (const ConvergenceRow& row : report.rows) {
        out << fmt_g17(row.h) << ',' << fmt_g17(row.eps1) << ',' << fmt_g17(row.eps2) << ','
            << fmt_g17(row.eps) << ',';
        if (row.observed_order) out << fmt_g17(*row.observed_order);
        out << '\n';
    }
    finish(out, path);
}

} // namespace volterra
