// ============================================================================
// Unit tests for the CSV writers and the surface reader.
// ============================================================================

#include "doctest.h"

#include "volterra/bench.hpp"
#include "volterra/csv_io.hpp"
#include "volterra/forward.hpp"
#include "volterra/kernels.hpp"
#include "volterra/mesh_inversion.hpp"
#include "volterra/steps_inversion.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace volterra;

namespace {

namespace fs = std::filesystem;

/// Per-process scratch directory; removed leftovers do not matter in CI.
fs::path scratch_dir() {
    const fs::path dir =
        fs::temp_directory_path() / ("volterra-csv-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

} // namespace

TEST_CASE("fmt_g17 round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 0.013020833333333334, -2.5e-4, 0.0, 1e300}) {
        const std::string s = fmt_g17(v);
        double back{};
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(ec == std::errc{});
        REQUIRE(p == s.data() + s.size());
        CHECK(back == v);
    }
    CHECK(fmt_g17(0.25) == "0.25");
}

TEST_CASE("surface CSV round-trips bitwise") {
    const fs::path dir = scratch_dir();
    const fs::path path = dir / "surface.csv";

    const auto gen = SurfaceGenerator::closed_form(4.0, -1.0);
    const ResponseSurface original = sample_response_surface(gen, Series::Two, 0.25, 1.0, 0.125);
    write_surface_csv(path.string(), original);

    const std::string text = slurp(path);
    const auto lines = lines_of(text);
    REQUIRE(lines.size() == original.sample_count() + 1);
    CHECK(lines[0] == "series,it,iu,t,upsilon,value");

    const ResponseSurface loaded = read_surface_csv(path.string(), 0.25);
    CHECK(loaded.series() == original.series());
    CHECK(loaded.h() == original.h());
    CHECK(loaded.delta() == original.delta());
    CHECK(loaded.nt() == original.nt());
    CHECK(loaded.complete());
    CHECK(loaded.generator() == "csv:" + path.string());
    for (int it = original.m(); it <= original.nt(); ++it)
        for (int iu = 0; iu <= it - original.m(); ++iu)
            CHECK(loaded.at(it, iu) == original.at(it, iu)); // bitwise

    // Writing the same surface again produces a byte-identical file.
    const fs::path again = dir / "surface-again.csv";
    write_surface_csv(again.string(), original);
    CHECK(slurp(again) == text);
}

TEST_CASE("the surface reader rejects malformed files") {
    const fs::path dir = scratch_dir();

    CHECK_THROWS_AS((void)read_surface_csv((dir / "absent.csv").string(), 0.25), IoError);

    const fs::path bad_header = dir / "bad-header.csv";
    spit(bad_header, "series;it;iu;t;upsilon;value\n");
    CHECK_THROWS_AS((void)read_surface_csv(bad_header.string(), 0.25), IoError);

    const fs::path bad_columns = dir / "bad-columns.csv";
    spit(bad_columns, "series,it,iu,t,upsilon,value\n1,1,0,0.25,0\n");
    CHECK_THROWS_AS((void)read_surface_csv(bad_columns.string(), 0.25), IoError);

    const fs::path bad_series = dir / "bad-series.csv";
    spit(bad_series, "series,it,iu,t,upsilon,value\n3,1,0,0.25,0,1\n");
    CHECK_THROWS_AS((void)read_surface_csv(bad_series.string(), 0.25), IoError);

    const fs::path mixed = dir / "mixed.csv";
    spit(mixed, "series,it,iu,t,upsilon,value\n"
                "1,1,0,0.25,0,1\n"
                "2,2,0,0.5,0,1\n");
    CHECK_THROWS_AS((void)read_surface_csv(mixed.string(), 0.25), IoError);

    const fs::path negative = dir / "negative.csv";
    spit(negative, "series,it,iu,t,upsilon,value\n1,-1,0,-0.25,0,1\n");
    CHECK_THROWS_AS((void)read_surface_csv(negative.string(), 0.25), IoError);

    const fs::path misaligned = dir / "misaligned.csv";
    spit(misaligned, "series,it,iu,t,upsilon,value\n"
                     "1,1,0,0.25,0,1\n"
                     "1,2,0,0.7,0,1\n");
    CHECK_THROWS_AS((void)read_surface_csv(misaligned.string(), 0.25), IoError);

    const fs::path garbage = dir / "garbage.csv";
    spit(garbage, "series,it,iu,t,upsilon,value\n1,1,0,0.25,0,abc\n");
    CHECK_THROWS_AS((void)read_surface_csv(garbage.string(), 0.25), IoError);

    // A full triangle with one row removed does not come back complete.
    const fs::path incomplete = dir / "incomplete.csv";
    const auto gen = SurfaceGenerator::closed_form(4.0, -1.0);
    const ResponseSurface surface = sample_response_surface(gen, Series::One, 0.25, 1.0, 0.25);
    const fs::path full = dir / "full.csv";
    write_surface_csv(full.string(), surface);
    const auto lines = lines_of(slurp(full));
    std::string trimmed;
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) trimmed += lines[i] + "\n";
    spit(incomplete, trimmed);
    CHECK_THROWS_AS((void)read_surface_csv(incomplete.string(), 0.25), IoError);

    // Pulse width inconsistent with the sampled lattice.
    CHECK_THROWS_AS((void)read_surface_csv(full.string(), 0.3), IoError);
}

TEST_CASE("the surface reader accepts CRLF files") {
    const fs::path dir = scratch_dir();
    const fs::path path = dir / "crlf.csv";
    spit(path, "series,it,iu,t,upsilon,value\r\n"
               "1,1,0,0.25,0,0.5\r\n"
               "1,2,0,0.5,0,0.75\r\n"
               "1,2,1,0.5,0.25,0.25\r\n");
    const ResponseSurface s = read_surface_csv(path.string(), 0.25);
    CHECK(s.nt() == 2);
    CHECK(s.at(2, 1) == 0.25);
}

TEST_CASE("grid CSV covers every cell with lowercase states") {
    const fs::path dir = scratch_dir();
    const fs::path path = dir / "grid.csv";

    const MeshSamples f1 = closed_form_mesh_samples(4.0, -1.0, Series::One, 0.25, 1.0);
    const MeshSamples f2 = closed_form_mesh_samples(4.0, -1.0, Series::Two, 0.25, 1.0);
    const KernelGrid grid = invert_mesh(f1, f2, 0.25);
    write_grid_csv(path.string(), grid);

    const auto lines = lines_of(slurp(path));
    REQUIRE(lines.size() == 17); // header + 4x4 cells
    CHECK(lines[0] == "l,m,s1,s2,state,value");
    // The top-left cell is prehistory with a blank value column.
    CHECK(lines[1] == "1,1,0.125,0.125,prehistory,");
    // A recovered cell carries its value.
    bool found_recovered = false;
    for (const auto& line : lines)
        if (line.find(",recovered,") != std::string::npos) found_recovered = true;
    CHECK(found_recovered);

    // Empty cells serialize with the "empty" state.
    const KernelGrid blank(0.5, 1);
    const fs::path path2 = dir / "blank.csv";
    write_grid_csv(path2.string(), blank);
    const auto blank_lines = lines_of(slurp(path2));
    REQUIRE(blank_lines.size() == 2);
    CHECK(blank_lines[1] == "1,1,0.25,0.25,empty,");
}

TEST_CASE("field CSV lists the memoized lattice points in order") {
    const fs::path dir = scratch_dir();
    const fs::path path = dir / "field.csv";

    const KernelSource k = KernelSource::benchmark(4.0, -1.0);
    const PrehistoryBand band(k, 0.25, 1.0);
    const D2Source d2_1 = D2Source::from_kernel(k, Series::One, 0.25);
    const D2Source d2_2 = D2Source::from_kernel(k, Series::Two, 0.25);
    const KernelField field = recover_field(d2_1, d2_2, band, 0.25, 1.0, 0.25);
    write_field_csv(path.string(), field);

    const auto lines = lines_of(slurp(path));
    REQUIRE(lines.size() == field.memo().size() + 1);
    CHECK(lines[0] == "ip,iq,p,q,value");
    // Rows ascend lexicographically in (ip, iq): first column never decreases.
    int prev_ip = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int ip = std::stoi(lines[i]);
        CHECK(ip >= prev_ip);
        prev_ip = ip;
    }
}

TEST_CASE("convergence CSV blanks the absent order column") {
    const fs::path dir = scratch_dir();
    const fs::path path = dir / "convergence.csv";

    const ConvergenceReport report = convergence_study(4.0, -1.0, 1.0, {0.25, 0.125});
    write_convergence_csv(path.string(), report);

    const auto lines = lines_of(slurp(path));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "h,eps1,eps2,eps,observed_order");
    CHECK(lines[1].back() == ',');  // no order on the first row
    CHECK(lines[2].back() != ','); // order 2 present on the second
    CHECK(lines[2].find("0.125,") == 0);
}

TEST_CASE("writers report unwritable paths as IoError") {
    const ConvergenceReport report = convergence_study(4.0, -1.0, 1.0, {0.25});
    CHECK_THROWS_AS(write_convergence_csv("/nonexistent-dir/x.csv", report), IoError);
}
