#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "qheat/cli.hpp"
#include "qheat/config.hpp"
#include "qheat/errors.hpp"
#include "qheat/sweep.hpp"

using namespace qheat;
using namespace qheat::test;

namespace {

const char* kSmall = R"(
[qubit]
omega0_GHz = 6
g_GHz = 1
[drive]
kind = tanh
a = 8
[sweep]
variable = f_L
start = 2.9
stop = 3.3
points = 17
[bath.1]
kappa = 0.01
T_mK = 70
[integrator]
steps_per_cycle = 1024
)";

std::string with(const std::string& extra) { return std::string(kSmall) + extra; }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli_dispatch(args, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

}  // namespace

TEST_CASE("fig1c preset") {
    const auto cfg = load_config("fig1c");
    CHECK(cfg.qubit.omega0_GHz == 6.0);
    CHECK(cfg.qubit.g_GHz == 1.0);
    CHECK(cfg.drive.a == 8.0);
    REQUIRE(cfg.baths.size() == 1);
    CHECK(cfg.baths[0].T_mK == 70.0);
    CHECK(cfg.baths[0].kappa == 0.01);
    CHECK(cfg.sweep.start == 0.8);
    CHECK(cfg.sweep.stop == 6.6);
    CHECK(cfg.sweep.points == 400);
}

TEST_CASE("fig3 preset") {
    const auto cfg = load_config("fig3");
    CHECK(cfg.drive.kind == DriveKind::AsymmetricSquare);
    CHECK(cfg.drive.dt2_ns == doctest::Approx(kPi / units::ghz_to_angular(6.0)));
    REQUIRE(cfg.baths.size() == 2);
    CHECK(cfg.baths[0].T_mK == 210.0);
    CHECK(cfg.baths[1].T_mK == 210.0);
    CHECK(cfg.baths[0].active_branch == ActiveBranch::OnlyHighGap);
    CHECK(cfg.baths[1].active_branch == ActiveBranch::OnlyLowGap);
    CHECK(*cfg.baths[0].filter_f_GHz == doctest::Approx(std::sqrt(40.0)));
    CHECK(*cfg.baths[1].filter_f_GHz == doctest::Approx(6.0));
}

TEST_CASE("every preset parses") {
    const auto names = preset_names();
    CHECK(names.size() == 4);
    for (const auto& n : names) CHECK_NOTHROW(load_config(n));
    CHECK(load_config("fig1d").study->gap_ratio);
    CHECK_FALSE(load_config("fig1e").study->gap_ratio);
}

TEST_CASE("validation aggregates every violation") {
    std::string text = kSmall;
    text.replace(text.find("kappa = 0.01"), 12, "kappa = -0.1");
    text.replace(text.find("T_mK = 70"), 9, "T_mK = -70");
    try {
        parse_config(text);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.violations.size() == 2);
        CHECK(std::string(e.what()).find("kappa") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("[qubit]\nomega0_GHz = 6\n"), ValidationError);
}

TEST_CASE("parse errors carry the line") {
    try {
        parse_config(with("[output]\nbogus = 1\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.key == "bogus");
        CHECK(e.line == 19);  // kSmall spans 17 lines, then [output]
    }
    CHECK_THROWS_AS(parse_config(with("[output]\nsample_stride = two\n")), ParseError);
    CHECK_THROWS_AS(parse_config(with("[nonsense]\n")), ParseError);
    CHECK_THROWS_AS(parse_config("omega0_GHz = 6\n"), ParseError);
    std::string dup = kSmall;
    dup += "[bath.1]\nkappa = 0.01\n";
    CHECK_THROWS_AS(parse_config(dup), ParseError);
}

TEST_CASE("numeric expressions") {
    const auto cfg = parse_config(with("[output]\ncsv = x.csv\n"));
    CHECK(cfg.output.csv == "x.csv");
    const auto fig3 = load_config("fig3");
    const double w1 = units::ghz_to_angular(std::sqrt(40.0));
    CHECK(*fig3.drive.dt1_ns == doctest::Approx(2.0 * kPi / w1));
}

TEST_CASE("sweep grid") {
    auto cfg = parse_config(kSmall);
    auto grid = sweep_grid(cfg);
    REQUIRE(grid.size() == 17);
    CHECK(grid.front() == 2.9);
    CHECK(grid.back() == 3.3);

    cfg.sweep.refine_peaks = true;
    grid = sweep_grid(cfg);
    CHECK(grid.size() > 17);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    const double f2 = 6.16228 / 2.0;
    const auto dense = std::count_if(grid.begin(), grid.end(), [&](double f) { return std::abs(f - f2) < 0.05 * f2; });
    CHECK(dense >= 8 * 5);
}

TEST_CASE("one-point sweep equals a direct call") {
    auto cfg = parse_config(kSmall);
    cfg.sweep.points = 1;
    cfg.sweep.stop = cfg.sweep.start;
    const auto res = run_sweep(cfg, 1);
    REQUIRE(res.rows.size() == 1);
    const auto cycle = find_steady_cycle(build_model(cfg, 2.9), build_baths(cfg), cfg.integrator);
    CHECK(*res.rows[0].P_total == units::power_to_watt(cycle.total_power));
    CHECK(res.provenance.config_hash == config_hash(cfg.source));
}

TEST_CASE("sweep output is independent of the worker count") {
    const auto cfg = parse_config(kSmall);
    const auto a = format_csv(run_sweep(cfg, 1).rows);
    const auto b = format_csv(run_sweep(cfg, 4).rows);
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) == kCsvHeader);
    CHECK(a.find('\r') == std::string::npos);
}

TEST_CASE("unconverged rows have empty power fields") {
    auto cfg = parse_config(kSmall);
    cfg.integrator.max_cycles = 1;
    cfg.sweep.points = 2;
    cfg.sweep.stop = 3.0;
    const auto res = run_sweep(cfg, 1);
    const auto csv = format_csv(res.rows);
    CHECK(csv.find("nan") == std::string::npos);
    for (const auto& r : res.rows) {
        CHECK_FALSE(r.converged);
        CHECK_FALSE(r.P_total.has_value());
    }
    const auto parsed = parse_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK_FALSE(parsed[0].P_total_fW.has_value());
}

TEST_CASE("csv round trip reproduces every float") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<PowerSpectrumPoint> rows;
    for (int i = 0; i < 200; ++i) {
        PowerSpectrumPoint p;
        p.f_L = std::abs(u(rng)) * 7.0;
        if (i % 3 == 0) p.dt1 = std::abs(u(rng));
        p.P_total = u(rng) * 1e-15;
        p.P1 = u(rng) * 1e-16;
        if (i % 2) p.P2 = u(rng) * 1e-17;
        p.P_dimensionless = u(rng) * 1e-4;
        p.rho_ee_p = std::abs(u(rng));
        if (i % 5) p.winding = i % 7;
        p.purity_min = 0.5 + std::abs(u(rng)) / 2.0;
        p.converged = i % 11 != 0;
        p.cycles = i;
        rows.push_back(p);
    }
    const auto parsed = parse_csv(format_csv(rows));
    REQUIRE(parsed.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto& q = parsed[i];
        CHECK(q.f_L_GHz == r.f_L);
        CHECK(q.dt1_ns == r.dt1);
        CHECK(*q.P_total_fW == *r.P_total * 1e15);
        CHECK(*q.P1_fW == *r.P1 * 1e15);
        CHECK(q.P2_fW.has_value() == r.P2.has_value());
        if (r.P2) CHECK(*q.P2_fW == *r.P2 * 1e15);
        CHECK(q.P_dimensionless == r.P_dimensionless);
        CHECK(q.rho_ee_p == r.rho_ee_p);
        CHECK(q.winding == r.winding);
        CHECK(q.purity_min == r.purity_min);
        CHECK(q.converged == r.converged);
        CHECK(q.cycles == r.cycles);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("write_csv reports the path on failure") {
    SweepResultSet res;
    res.rows.resize(1);
    try {
        write_csv(res, "/nonexistent-dir/out.csv");
        FAIL("expected failure");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
    }
}

TEST_CASE("cli predict") {
    std::string out;
    CHECK(run_cli({"predict", "fig1c"}, &out) == kExitOk);
    for (const char* f : {"6.162", "3.081", "2.054", "6.158"}) CHECK(out.find(f) != std::string::npos);
}

TEST_CASE("cli usage errors") {
    std::string out;
    CHECK(run_cli({"predict", "fig1c", "--bogus"}, &out) == kExitValidation);
    CHECK(out.find("Usage") != std::string::npos);
    CHECK(run_cli({}) == kExitValidation);
    CHECK(run_cli({"predict", "/no/such/file.ini"}) == kExitValidation);
    CHECK(run_cli({"trajectory", "fig3", "--f-ghz", "3"}) == kExitValidation);
    CHECK(run_cli({"--help"}) == kExitOk);
}

TEST_CASE("cli trajectory at the third resonance winds three times") {
    const auto path = std::filesystem::temp_directory_path() / "qheat_traj_test.csv";
    CHECK(run_cli({"trajectory", "fig1c", "--f-ghz", "2.05409", "-o", path.string()}) == kExitOk);
    const auto text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_ns,drive,x,y,z,R2,I2,D2,purity,winding");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.substr(line.rfind(',') + 1) == "3");
        ++rows;
    }
    CHECK(rows > 100);
    std::filesystem::remove(path);
}

TEST_CASE("cli sweep writes csv and provenance") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto ini = dir / "qheat_small.ini";
    std::ofstream(ini) << kSmall;
    const auto csv = dir / "qheat_small.csv";
    CHECK(run_cli({"sweep", ini.string(), "-o", csv.string(), "-j", "2"}) == kExitOk);
    const auto text = read_file(csv);
    CHECK(text == format_csv(run_sweep(parse_config(kSmall), 1).rows));
    CHECK(std::filesystem::exists(csv.string() + ".provenance.json"));
    std::filesystem::remove(ini);
    std::filesystem::remove(csv);
    std::filesystem::remove(csv.string() + ".provenance.json");
}

TEST_CASE("cli analytic-compare exit codes") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto ini = dir / "qheat_sharp.ini";
    std::string text = kSmall;
    text.replace(text.find("a = 8"), 5, "a = 30");
    std::ofstream(ini) << text;
    std::string out;
    CHECK(run_cli({"analytic-compare", ini.string(), "--f-ghz", "6.16228"}, &out) == kExitOk);
    CHECK(out.find("within tolerance") != std::string::npos);
    // At a = 8 the ramps are not sudden and the corner states drift past 2%.
    CHECK(run_cli({"analytic-compare", "fig1c"}) == kExitTolerance);
    std::filesystem::remove(ini);
}
