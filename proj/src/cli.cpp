#include "volterra/cli.hpp"

#include "volterra/bench.hpp"
#include "volterra/csv_io.hpp"
#include "volterra/forward.hpp"
#include "volterra/mesh_inversion.hpp"
#include "volterra/numeric.hpp"
#include "volterra/steps_inversion.hpp"

#include "CLI11.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace volterra {

namespace {

// ============================================================================
// Flat key=value config files: one `key=value` per line, with `#` comment
// lines and blank lines allowed, keys mirroring the long flags.  CLI11 only
// applies config files attached to the root command, so each subcommand loads
// its own file here; a key never overrides a flag given on the command line.
// ============================================================================

/// Applies the raw text of one config value to its target.
using ConfigSetter = std::function<void(const std::string&)>;

[[nodiscard]] std::string trim_copy(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])) != 0) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])) != 0) --e;
    return s.substr(b, e - b);
}

[[nodiscard]] double config_real(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("config: key '" + key + "' needs a real number, got '" +
                                    value + "'");
    }
    return out;
}

[[nodiscard]] int config_int(const std::string& key, const std::string& value) {
    int out = 0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (value.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("config: key '" + key + "' needs an integer, got '" + value +
                                    "'");
    }
    return out;
}

[[nodiscard]] bool config_flag(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw std::invalid_argument("config: key '" + key + "' needs true or false, got '" + value +
                                "'");
}

[[nodiscard]] std::vector<double> config_real_list(const std::string& key,
                                                   const std::string& value) {
    std::vector<double> out;
    std::stringstream parts(value);
    std::string part;
    while (std::getline(parts, part, ',')) {
        out.push_back(config_real(key, trim_copy(part)));
    }
    if (out.empty()) {
        throw std::invalid_argument("config: key '" + key + "' needs at least one number");
    }
    return out;
}

void apply_flat_config(const CLI::App& cmd, const std::string& path,
                       const std::map<std::string, ConfigSetter>& keys) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = trim_copy(line);
        if (text.empty() || text.front() == '#') continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: " + where + ": expected key=value");
        }
        const std::string key = trim_copy(text.substr(0, eq));
        const std::string value = trim_copy(text.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) {
            throw std::invalid_argument("config: " + where + ": unknown key '" + key + "'");
        }
        if (cmd.count("--" + key) > 0) continue; // the command line wins
        it->second(value);
    }
}

// ============================================================================
// forward: sample one response surface by quadrature and write it as CSV
// ============================================================================

struct ForwardOpts {
    std::string kernel = "benchmark:4,-1";
    std::string quad = "gauss:3,4";
    std::string out = "surface.csv";
    std::string config;
    double h = 0.25;
    double T = 1.0;
    double delta = 0.0; // 0 means "use h"
    int series = 1;
};

void run_forward(const ForwardOpts& o) {
    if (o.series != 1 && o.series != 2) {
        throw std::invalid_argument("forward: --series must be 1 or 2");
    }
    const KernelSource src = parse_kernel_spec(o.kernel);
    const QuadratureRule rule = parse_quad_spec(o.quad);
    const double delta = o.delta > 0.0 ? o.delta : o.h;
    const Series series = o.series == 1 ? Series::One : Series::Two;
    const SurfaceGenerator gen = SurfaceGenerator::quadrature(src, rule);
    const ResponseSurface surface = sample_response_surface(gen, series, o.h, o.T, delta);
    write_surface_csv(o.out, surface);
    std::printf("wrote %s (%zu samples, series %d, h=%g, T=%g, delta=%g)\n", o.out.c_str(),
                surface.sample_count(), o.series, o.h, o.T, delta);
}

// ============================================================================
// invert-mesh: coarse-lattice inversion of two surface CSVs
// ============================================================================

struct InvertMeshOpts {
    std::string f1;
    std::string f2;
    std::string exact;
    std::string out = "grid.csv";
    std::string config;
    double h = 0.25;
    double tol = 1e-9;
};

void run_invert_mesh(const InvertMeshOpts& o) {
    if (o.f1.empty() || o.f2.empty()) {
        throw std::invalid_argument("invert-mesh: --f1 and --f2 are required");
    }
    const MeshSamples m1 = mesh_samples_from_surface(read_surface_csv(o.f1, o.h));
    const MeshSamples m2 = mesh_samples_from_surface(read_surface_csv(o.f2, o.h));
    for (const PairViolation& v : check_pair_consistency(m1, m2, o.tol)) {
        std::fprintf(stderr,
                     "warning: series disagree at upsilon = 0 (i=%d): f1=%.17g f2=%.17g diff=%.17g\n",
                     v.i, v.f1, v.f2, v.diff);
    }
    const KernelGrid grid = invert_mesh(m1, m2, o.h);

    int recovered = 0;
    int prehistory = 0;
    for (int l = 1; l <= grid.size(); ++l) {
        for (int m = 1; m <= grid.size(); ++m) {
            if (grid.state(l, m) == NodeState::Recovered) ++recovered;
            if (grid.state(l, m) == NodeState::Prehistory) ++prehistory;
        }
    }
    std::printf("table %dx%d: %d recovered, %d prehistory\n", grid.size(), grid.size(), recovered,
                prehistory);
    if (!o.exact.empty()) {
        const ErrorNorms norms = error_norms(grid, parse_kernel_spec(o.exact));
        std::printf("eps1 = %s\n", fmt_g17(norms.eps1).c_str());
        std::printf("eps2 = %s\n", fmt_g17(norms.eps2).c_str());
        std::printf("eps  = %s\n", fmt_g17(norms.eps).c_str());
    }
    write_grid_csv(o.out, grid);
    std::printf("wrote %s\n", o.out.c_str());
}

// ============================================================================
// invert-steps: dense-lattice recovery by the layer recurrence
// ============================================================================

struct InvertStepsOpts {
    std::string kernel = "benchmark:4,-1";
    std::string d2 = "analytic"; // or "fd"
    std::string f1;
    std::string f2;
    std::string out = "field.csv";
    std::string order = "layer"; // or "recursive"
    std::string config;
    double h = 0.25;
    double T = 1.0;
    double delta = 0.0; // 0 means "use h"
};

void run_invert_steps(const InvertStepsOpts& o) {
    const KernelSource src = parse_kernel_spec(o.kernel);
    const double delta = o.delta > 0.0 ? o.delta : o.h;
    const PrehistoryBand band(src, o.h, o.T);

    std::optional<D2Source> d2_1;
    std::optional<D2Source> d2_2;
    if (o.d2 == "analytic") {
        d2_1 = D2Source::from_kernel(src, Series::One, o.h);
        d2_2 = D2Source::from_kernel(src, Series::Two, o.h);
    } else if (o.d2 == "fd") {
        if (o.f1.empty() || o.f2.empty()) {
            throw std::invalid_argument("invert-steps: --d2 fd needs --f1 and --f2 surface CSVs");
        }
        auto s1 = std::make_shared<ResponseSurface>(read_surface_csv(o.f1, o.h));
        auto s2 = std::make_shared<ResponseSurface>(read_surface_csv(o.f2, o.h));
        if (s1->series() != Series::One || s2->series() != Series::Two) {
            throw std::invalid_argument("invert-steps: --f1 must hold series 1 and --f2 series 2");
        }
        for (const ResponseSurface* s : {s1.get(), s2.get()}) {
            if (!nearly_equal(s->delta(), delta)) {
                throw std::invalid_argument("invert-steps: surface spacing differs from --delta");
            }
            if (s->T() < o.T - kAlignTol * std::fmax(1.0, o.T)) {
                throw std::invalid_argument("invert-steps: surface does not cover [0, T]");
            }
        }
        d2_1 = D2Source::finite_difference(std::move(s1));
        d2_2 = D2Source::finite_difference(std::move(s2));
    } else {
        throw std::invalid_argument("invert-steps: --d2 must be analytic or fd");
    }

    EvalOrder order = EvalOrder::LayerIterative;
    if (o.order == "recursive") {
        order = EvalOrder::Recursive;
    } else if (o.order != "layer") {
        throw std::invalid_argument("invert-steps: --order must be layer or recursive");
    }

    const KernelField field = recover_field(*d2_1, *d2_2, band, o.h, o.T, delta, order);

    double max_err = 0.0;
    for (int ip = field.m(); ip <= field.nt(); ++ip) {
        for (int iq = field.m(); iq <= field.nt(); ++iq) {
            const double exact = eval_kernel(src, field.coord(ip), field.coord(iq));
            max_err = std::fmax(max_err, std::fabs(field.at(ip, iq) - exact));
        }
    }
    const int side = field.nt() - field.m() + 1;
    const char* d2_label = o.d2 == "fd" ? "finite-difference" : "analytic";
    std::printf("recovered %d lattice points on [%g, %g]^2 (delta = %g, %s D2)\n", side * side,
                o.h, o.T, delta, d2_label);
    std::printf("max error vs --kernel: %s\n", fmt_g17(max_err).c_str());
    write_field_csv(o.out, field);
    std::printf("wrote %s\n", o.out.c_str());
}

// ============================================================================
// convergence: the step-halving error experiment
// ============================================================================

struct ConvergenceOpts {
    std::vector<double> h_list = {0.25, 0.125, 0.0625};
    std::string quad = "gauss:3,4";
    std::string out = "convergence.csv";
    std::string config;
    double a = 4.0;
    double b = -1.0;
    double T = 1.0;
    bool via_quadrature = false;
};

void run_convergence(const ConvergenceOpts& o) {
    const QuadratureRule rule = parse_quad_spec(o.quad);
    const ConvergenceReport report =
        convergence_study(o.a, o.b, o.T, o.h_list, o.via_quadrature, rule);

    std::printf("kernel: %s\n", report.kernel.c_str());
    std::printf("samples: %s\n", report.method.c_str());
    std::printf("%8s  %9s  %9s  %9s  %7s  %9s\n", "h", "eps1", "eps2", "eps", "order", "law(h/2)");
    for (const ConvergenceRow& row : report.rows) {
        const double law_half = std::fabs(o.a) * (row.h / 2.0) * (row.h / 2.0) / 12.0;
        std::printf("%8.4f  %9.5f  %9.5f  %9.5f  ", row.h, row.eps1, row.eps2, row.eps);
        if (row.observed_order) {
            std::printf("%7.3f", *row.observed_order);
        } else {
            std::printf("%7s", "-");
        }
        std::printf("  %9.5f\n", law_half);
    }
    std::printf("note: eps follows the quadratic law |a|*h^2/12 exactly; the law(h/2) column\n"
                "      shows the same law at half the step, matching error tables whose rows\n"
                "      are indexed by the half step.\n");
    write_convergence_csv(o.out, report);
    std::printf("wrote %s\n", o.out.c_str());
}

} // namespace

// ============================================================================
// Argument wiring
// ============================================================================

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Volterra kernel identification from step-response surfaces"};
    app.require_subcommand(1);

    ForwardOpts fo;
    CLI::App* fwd = app.add_subcommand("forward", "Sample a response surface and write it as CSV");
    fwd->set_help_flag("--help", "Print this help message and exit"); // frees -h for --h
    fwd->add_option("--kernel", fo.kernel,
                    "Kernel: benchmark:<a>,<b> or poly:<d1>,<d2>,<c>[;...]")
        ->capture_default_str();
    fwd->add_option("--h", fo.h, "Test-signal pulse width")->capture_default_str();
    fwd->add_option("--T", fo.T, "Horizon (multiple of h)")->capture_default_str();
    fwd->add_option("--delta", fo.delta, "Sample spacing (default: h)");
    fwd->add_option("--series", fo.series, "Signal family, 1 or 2")
        ->check(CLI::Range(1, 2))
        ->capture_default_str();
    fwd->add_option("--quad", fo.quad, "Quadrature: gauss:<points>,<subdiv> or midpoint:<subdiv>")
        ->capture_default_str();
    fwd->add_option("--out", fo.out, "Output CSV path")->capture_default_str();
    fwd->add_option("--config", fo.config, "Flat key=value file mirroring the flags; flags override");
    fwd->callback([&fo, fwd] {
        apply_flat_config(
            *fwd, fo.config,
            {{"kernel", [&fo](const std::string& v) { fo.kernel = v; }},
             {"quad", [&fo](const std::string& v) { fo.quad = v; }},
             {"out", [&fo](const std::string& v) { fo.out = v; }},
             {"h", [&fo](const std::string& v) { fo.h = config_real("h", v); }},
             {"T", [&fo](const std::string& v) { fo.T = config_real("T", v); }},
             {"delta", [&fo](const std::string& v) { fo.delta = config_real("delta", v); }},
             {"series", [&fo](const std::string& v) { fo.series = config_int("series", v); }}});
        run_forward(fo);
    });

    InvertMeshOpts mo;
    CLI::App* inv_mesh =
        app.add_subcommand("invert-mesh", "Recover the kernel node table from two surface CSVs");
    inv_mesh->set_help_flag("--help", "Print this help message and exit"); // frees -h for --h
    inv_mesh->add_option("--f1", mo.f1, "Series-1 surface CSV");
    inv_mesh->add_option("--f2", mo.f2, "Series-2 surface CSV");
    inv_mesh->add_option("--h", mo.h, "Test-signal pulse width")->capture_default_str();
    inv_mesh->add_option("--exact", mo.exact, "Kernel spec to compare against (prints error norms)");
    inv_mesh->add_option("--tol", mo.tol, "Pair-consistency warning tolerance")
        ->capture_default_str();
    inv_mesh->add_option("--out", mo.out, "Output CSV path")->capture_default_str();
    inv_mesh->add_option("--config", mo.config,
                         "Flat key=value file mirroring the flags; flags override");
    inv_mesh->callback([&mo, inv_mesh] {
        apply_flat_config(
            *inv_mesh, mo.config,
            {{"f1", [&mo](const std::string& v) { mo.f1 = v; }},
             {"f2", [&mo](const std::string& v) { mo.f2 = v; }},
             {"exact", [&mo](const std::string& v) { mo.exact = v; }},
             {"out", [&mo](const std::string& v) { mo.out = v; }},
             {"h", [&mo](const std::string& v) { mo.h = config_real("h", v); }},
             {"tol", [&mo](const std::string& v) { mo.tol = config_real("tol", v); }}});
        run_invert_mesh(mo);
    });

    InvertStepsOpts so;
    CLI::App* inv_steps =
        app.add_subcommand("invert-steps", "Recover the kernel field by the layer recurrence");
    inv_steps->set_help_flag("--help", "Print this help message and exit"); // frees -h for --h
    inv_steps->add_option("--kernel", so.kernel, "Prehistory kernel and error reference")
        ->capture_default_str();
    inv_steps->add_option("--d2", so.d2, "Mixed-derivative source: analytic or fd")
        ->capture_default_str();
    inv_steps->add_option("--f1", so.f1, "Series-1 surface CSV (required for --d2 fd)");
    inv_steps->add_option("--f2", so.f2, "Series-2 surface CSV (required for --d2 fd)");
    inv_steps->add_option("--h", so.h, "Test-signal pulse width")->capture_default_str();
    inv_steps->add_option("--T", so.T, "Horizon (multiple of h)")->capture_default_str();
    inv_steps->add_option("--delta", so.delta, "Recovery lattice spacing (default: h)");
    inv_steps->add_option("--order", so.order, "Evaluation order: layer or recursive")
        ->capture_default_str();
    inv_steps->add_option("--out", so.out, "Output CSV path")->capture_default_str();
    inv_steps->add_option("--config", so.config,
                          "Flat key=value file mirroring the flags; flags override");
    inv_steps->callback([&so, inv_steps] {
        apply_flat_config(
            *inv_steps, so.config,
            {{"kernel", [&so](const std::string& v) { so.kernel = v; }},
             {"d2", [&so](const std::string& v) { so.d2 = v; }},
             {"f1", [&so](const std::string& v) { so.f1 = v; }},
             {"f2", [&so](const std::string& v) { so.f2 = v; }},
             {"order", [&so](const std::string& v) { so.order = v; }},
             {"out", [&so](const std::string& v) { so.out = v; }},
             {"h", [&so](const std::string& v) { so.h = config_real("h", v); }},
             {"T", [&so](const std::string& v) { so.T = config_real("T", v); }},
             {"delta", [&so](const std::string& v) { so.delta = config_real("delta", v); }}});
        run_invert_steps(so);
    });

    ConvergenceOpts co;
    CLI::App* conv =
        app.add_subcommand("convergence", "Step-halving error experiment on the benchmark kernel");
    conv->set_help_flag("--help", "Print this help message and exit"); // frees -h for --h
    conv->add_option("--a", co.a, "Quadratic coefficient of the benchmark kernel")
        ->capture_default_str();
    conv->add_option("--b", co.b, "Linear coefficient of the benchmark kernel")
        ->capture_default_str();
    conv->add_option("--T", co.T, "Horizon (multiple of every step)")->capture_default_str();
    conv->add_option("--h", co.h_list, "Comma-separated decreasing steps")
        ->delimiter(',')
        ->capture_default_str();
    conv->add_flag("--via-quadrature", co.via_quadrature,
                   "Integrate samples numerically instead of using closed forms");
    conv->add_option("--quad", co.quad, "Quadrature for --via-quadrature")->capture_default_str();
    conv->add_option("--out", co.out, "Output CSV path")->capture_default_str();
    conv->add_option("--config", co.config,
                     "Flat key=value file mirroring the flags; flags override");
    conv->callback([&co, conv] {
        apply_flat_config(
            *conv, co.config,
            {{"a", [&co](const std::string& v) { co.a = config_real("a", v); }},
             {"b", [&co](const std::string& v) { co.b = config_real("b", v); }},
             {"T", [&co](const std::string& v) { co.T = config_real("T", v); }},
             {"h", [&co](const std::string& v) { co.h_list = config_real_list("h", v); }},
             {"quad", [&co](const std::string& v) { co.quad = v; }},
             {"out", [&co](const std::string& v) { co.out = v; }},
             {"via-quadrature",
              [&co](const std::string& v) { co.via_quadrature = config_flag("via-quadrature", v); }}});
        run_convergence(co);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

} // namespace volterra
