#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "meanper/config.hpp"
#include "meanper/runner.hpp"

namespace fs = std::filesystem;
using namespace meanper;

namespace {

const char* kFourierConfig = R"({
  "phi": {"kind": "expsum", "terms": [[{"re": 1, "im": 0}, {"re": 1, "im": 0}],
                                       [{"re": -1, "im": 0}, {"re": 0, "im": 0}]]},
  "f": {"kind": "expsum", "terms": [[{"re": 0, "im": -0.5}, {"re": 0, "im": 6.283185307179586}],
                                     [{"re": 0, "im": 0.5}, {"re": 0, "im": -6.283185307179586}]]},
  "theta": {"kind": "linear"},
  "radius": 20.0,
  "grid": {"kind": "real_interval", "min": -1.0, "max": 1.0, "count": 41},
  "m_grid": [1.0, 2.0],
  "norm_p": [1.0],
  "tolerances": {"residual": 1e-8, "identity": 1e-9}
})";

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("meanper_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path file = dir / "config.json";
    std::ofstream out(file);
    out << text;
    return file;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string{MEANPER_CLI_PATH} + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("config parsing accepts the documented schema") {
    const auto cfg = parse_config(kFourierConfig);
    CHECK(cfg.phi.is<ExpSumSpec>());
    REQUIRE(cfg.f.has_value());
    CHECK(cfg.radius == doctest::Approx(20.0));
    CHECK(cfg.grid.count == 41);
    CHECK(cfg.tolerance("residual", 0.0) == doctest::Approx(1e-8));
    CHECK(cfg.tolerance("missing", 42.0) == doctest::Approx(42.0));

    const auto tab = parse_config(R"({
      "phi": {"kind": "segment_average", "t": 2.0},
      "f": {"kind": "polyexpsum",
            "terms": [{"poly": [{"re": 0, "im": 0}, {"re": 1, "im": 0}], "lambda": {"re": 0, "im": 1}}]},
      "theta": {"kind": "table", "points": [[0, 0], [1, 1], [2, 4], [3, 9]]},
      "grid": {"kind": "circle", "radius": 0.5, "count": 8}
    })");
    CHECK(tab.phi.is<SegmentAverageSpec>());
    CHECK(tab.f->is<PolyExpSumSpec>());
    CHECK(tab.theta.kind() == YoungSpec::Kind::Tabulated);
    CHECK(eval_theta(tab.theta, 2.0) == doctest::Approx(4.0));
    CHECK(tab.grid.materialize().size() == 8);

    const auto pw = parse_config(R"({
      "phi": {"kind": "polynomial", "coeffs": [{"re": -1, "im": 0}, {"re": 0, "im": 0}, {"re": 1, "im": 0}]},
      "theta": {"kind": "power", "p": 2.0},
      "grid": {"kind": "points", "points": [{"re": 0.5, "im": -0.5}]}
    })");
    CHECK(pw.theta.kind() == YoungSpec::Kind::Power);
    REQUIRE(pw.grid.materialize().size() == 1);
    CHECK(pw.grid.materialize()[0] == cplx{0.5, -0.5});
}

TEST_CASE("config parsing rejects malformed documents") {
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[]"), ConfigError);
    CHECK_THROWS_AS(parse_config("{}"), ConfigError); // no phi
    CHECK_THROWS_AS(parse_config(R"({"phi": {"kind": "nope"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"phi": {"kind": "expsum", "terms": [[1, 2]]}})"), ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"phi": {"kind": "polynomial", "coeffs": [{"re":1,"im":0}]}, "radius": -1})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"phi": {"kind": "polynomial", "coeffs": [{"re":1,"im":0}]}, "flavor": "odd"})"),
        ConfigError);
}

TEST_CASE("analyze writes zeros, counting and verdict files") {
    const auto dir = temp_dir("analyze");
    const auto cfg_path = write_config(dir, kFourierConfig);
    const int rc = run_cli("analyze --config " + cfg_path.string() + " --out " + dir.string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "zeros.csv"));
    CHECK(fs::exists(dir / "counting.csv"));
    CHECK(fs::exists(dir / "verdict.json"));

    const auto zeros = slurp(dir / "zeros.csv");
    CHECK(zeros.rfind("k,re_alpha,im_alpha,m\n", 0) == 0);
    // radius 20 covers k in -3..3: seven zeros
    CHECK(std::count(zeros.begin(), zeros.end(), '\n') == 8);
    const auto verdict = slurp(dir / "verdict.json");
    CHECK(verdict.find("\"verdict\":\"pass\"") != std::string::npos);

    // the report is well-formed JSON with one entry per fitted criterion
    const auto parsed = nlohmann::json::parse(verdict);
    REQUIRE(parsed.contains("criteria"));
    CHECK(parsed["criteria"].size() == 4);
    for (const auto& entry : parsed["criteria"]) {
        CHECK(entry.contains("criterion"));
        CHECK(entry.contains("fitted_m"));
        CHECK(entry.contains("fitted_A_or_eps"));
        CHECK(entry.contains("samples"));
    }
}

TEST_CASE("analyze output is byte-identical across runs") {
    const auto dir_a = temp_dir("det_a");
    const auto dir_b = temp_dir("det_b");
    const auto cfg_a = write_config(dir_a, kFourierConfig);
    const auto cfg_b = write_config(dir_b, kFourierConfig);
    REQUIRE(run_cli("analyze --config " + cfg_a.string() + " --out " + dir_a.string()) == 0);
    REQUIRE(run_cli("analyze --config " + cfg_b.string() + " --out " + dir_b.string()) == 0);
    for (const char* name : {"zeros.csv", "counting.csv", "verdict.json"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
}

TEST_CASE("decompose and reconstruct write coefficient and grid files") {
    const auto dir = temp_dir("reconstruct");
    const auto cfg_path = write_config(dir, kFourierConfig);
    const int rc = run_cli("reconstruct --config " + cfg_path.string() + " --out " + dir.string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "coeffs_general.csv"));
    CHECK(fs::exists(dir / "coeffs_interpolating.csv"));
    CHECK(fs::exists(dir / "norms.csv"));
    CHECK(fs::exists(dir / "reconstruction.csv"));
    CHECK(fs::exists(dir / "convergence.json"));
    const auto conv = nlohmann::json::parse(slurp(dir / "convergence.json"));
    CHECK(conv.contains("packet_partials"));
    CHECK(conv.contains("fitted_log_decay"));

    // reconstruction error column stays tiny on the sampled interval
    std::ifstream in(dir / "reconstruction.csv");
    std::string line;
    std::getline(in, line); // header
    CHECK(line == "re_z,im_z,re_f,im_f,re_fhat,im_fhat,abs_error");
    double worst = 0.0;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        worst = std::max(worst, std::stod(line.substr(pos + 1)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("reconstruct with the general flavor on the second-order operator") {
    const auto dir = temp_dir("general");
    const auto cfg_path = write_config(dir, R"({
      "phi": {"kind": "polynomial", "coeffs": [{"re":-1,"im":0},{"re":0,"im":0},{"re":1,"im":0}]},
      "f": {"kind": "expsum", "terms": [[{"re": 3, "im": 0}, {"re": 1, "im": 0}],
                                         [{"re": 2, "im": 0}, {"re": -1, "im": 0}]]},
      "theta": {"kind": "linear"},
      "radius": 2.0,
      "flavor": "general",
      "grid": {"kind": "real_interval", "min": -2.0, "max": 2.0, "count": 41}
    })");
    REQUIRE(run_cli("reconstruct --config " + cfg_path.string() + " --out " + dir.string()) == 0);
    std::ifstream in(dir / "reconstruction.csv");
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    while (std::getline(in, line)) {
        worst = std::max(worst, std::stod(line.substr(line.rfind(',') + 1)));
    }
    CHECK(worst < 1e-11);
    const auto conv = nlohmann::json::parse(slurp(dir / "convergence.json"));
    CHECK(conv["packet_partials"].size() == 2);
}

TEST_CASE("verify succeeds on the Fourier configuration") {
    const auto dir = temp_dir("verify");
    const auto cfg_path = write_config(dir, kFourierConfig);
    const int rc = run_cli("verify --config " + cfg_path.string() + " --out " + dir.string());
    CHECK(rc == 0);
    const auto report = slurp(dir / "verify.json");
    CHECK(report.find("\"ok\":true") != std::string::npos);
}

TEST_CASE("analyze reports a double zero for the squared monomial") {
    const auto dir = temp_dir("square");
    const auto cfg_path = write_config(dir, R"({
      "phi": {"kind": "polynomial", "coeffs": [{"re":0,"im":0},{"re":0,"im":0},{"re":1,"im":0}]},
      "radius": 1.0
    })");
    REQUIRE(run_cli("analyze --config " + cfg_path.string() + " --out " + dir.string()) == 0);
    const auto zeros = slurp(dir / "zeros.csv");
    CHECK(zeros == "k,re_alpha,im_alpha,m\n0,0,0,2\n");
}

TEST_CASE("verify passes for the zero-mean segment operator") {
    // mean over a unit segment annihilates sin(2 pi z)
    const auto dir = temp_dir("segment");
    const auto cfg_path = write_config(dir, R"({
      "phi": {"kind": "segment_average", "t": 1.0},
      "f": {"kind": "expsum", "terms": [[{"re": 0, "im": -0.5}, {"re": 0, "im": 6.283185307179586}],
                                         [{"re": 0, "im": 0.5}, {"re": 0, "im": -6.283185307179586}]]},
      "theta": {"kind": "linear"},
      "radius": 20.0,
      "grid": {"kind": "real_interval", "min": -1.0, "max": 1.0, "count": 21}
    })");
    CHECK(run_cli("verify --config " + cfg_path.string() + " --out " + dir.string()) == 0);
    const auto report = slurp(dir / "verify.json");
    CHECK(report.find("\"ok\":true") != std::string::npos);
}

TEST_CASE("structural failure exits with code 2") {
    const auto dir = temp_dir("nozeros");
    const auto cfg_path = write_config(dir, R"({
      "phi": {"kind": "expsum", "terms": [[{"re": 1, "im": 0}, {"re": 0, "im": 0}]]},
      "radius": 5.0
    })");
    CHECK(run_cli("analyze --config " + cfg_path.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("config failure exits with code 4") {
    const auto dir = temp_dir("badconfig");
    const auto cfg_path = write_config(dir, "{ this is not json");
    CHECK(run_cli("analyze --config " + cfg_path.string() + " --out " + dir.string()) == 4);
    CHECK(run_cli("analyze --config " + (dir / "missing.json").string() + " --out " +
                  dir.string()) == 4);
    // decompose without f in the config
    const auto cfg2 = dir / "no_f.json";
    {
        std::ofstream out(cfg2);
        out << R"({"phi": {"kind": "polynomial",
                   "coeffs": [{"re":-1,"im":0},{"re":0,"im":0},{"re":1,"im":0}]}})";
    }
    CHECK(run_cli("decompose --config " + cfg2.string() + " --out " + dir.string()) == 4);
}

TEST_CASE("tolerance breach exits with code 3") {
    const auto dir = temp_dir("breach");
    // absurdly tight residual tolerance cannot hold
    std::string cfg = kFourierConfig;
    const auto pos = cfg.find("1e-8");
    cfg.replace(pos, 4, "1e-30");
    const auto cfg_path = write_config(dir, cfg);
    CHECK(run_cli("verify --config " + cfg_path.string() + " --out " + dir.string()) == 3);
}

TEST_CASE("radius override changes the zero count") {
    const auto dir = temp_dir("override");
    const auto cfg_path = write_config(dir, kFourierConfig);
    REQUIRE(run_cli("analyze --config " + cfg_path.string() + " --out " + dir.string() +
                    " --radius 7") == 0);
    const auto zeros = slurp(dir / "zeros.csv");
    CHECK(std::count(zeros.begin(), zeros.end(), '\n') == 4); // header + 3 zeros
}

TEST_CASE("MEANPER_THREADS is honored") {
    const auto dir = temp_dir("threads");
    const auto cfg_path = write_config(dir, kFourierConfig);
    const std::string cmd = std::string{"MEANPER_THREADS=1 "} + MEANPER_CLI_PATH +
                            " reconstruct --config " + cfg_path.string() + " --out " +
                            dir.string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "reconstruction.csv"));
}
