#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bulge/io.hpp"
#include "bulge/version.hpp"

// BULGE_CLI_PATH and TEST_GOLDEN_DIR come from the build system.

using namespace bulge;

namespace {

const std::string& work_dir() {
  static const std::string dir = [] {
    auto d = std::filesystem::temp_directory_path() / "bulge_cli_tests";
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  static int counter = 0;
  const std::string tag = std::to_string(counter++);
  const std::string out_path = work_dir() + "/stdout_" + tag;
  const std::string err_path = work_dir() + "/stderr_" + tag;
  std::string cmd = std::string("'") + BULGE_CLI_PATH + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >'" + out_path + "' 2>'" + err_path + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// Compares against tests/golden/<name>; BULGEKIT_REGOLD=1 rewrites instead.
void check_golden(const std::string& actual, const char* name) {
  const std::string path = std::string(TEST_GOLDEN_DIR) + "/" + name;
  if (std::getenv("BULGEKIT_REGOLD")) {
    spit(path, actual);
    MESSAGE("regenerated ", path);
    return;
  }
  REQUIRE_MESSAGE(std::filesystem::exists(path),
                  "missing golden file ", path,
                  " (run with BULGEKIT_REGOLD=1 to create it)");
  CHECK_MESSAGE(actual == slurp(path), "output differs from ", path);
}

// 1M-like square membrane with a material block so `simulate` works
const char* kSquareConfig = R"({
  "label": "sq",
  "geometry": {
    "width_2a": "3.104 mm", "length_2b": "3.104 mm", "thickness_t": "104 nm"
  },
  "material": {
    "youngs_modulus_E": "210 GPa",
    "poisson_nu": 0.3,
    "residual_stress_sigma0": "439 MPa"
  },
  "uncertainty": {"n_samples": 200, "seed": 11}
})";

std::string cfg_path(const char* name, const char* text) {
  const std::string path = work_dir() + "/" + name;
  spit(path, text);
  return path;
}

}  // namespace

TEST_SUITE("cli basics") {
  TEST_CASE("--version names the tool and its version") {
    const auto r = run_cli({"--version"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("bulgekit") != std::string::npos);
    CHECK(r.out.find(kVersion) != std::string::npos);
  }

  TEST_CASE("--help lists every subcommand") {
    const auto r = run_cli({"--help"});
    CHECK(r.exit_code == 0);
    for (const char* sub :
         {"simulate", "fit", "poisson", "mixture", "coeffs", "table"})
      CHECK_MESSAGE(r.out.find(sub) != std::string::npos, "missing ", sub);
  }

  TEST_CASE("a subcommand is required") {
    CHECK(run_cli({}).exit_code != 0);
  }

  TEST_CASE("missing required options are CLI errors") {
    const auto r = run_cli({"fit", "--curve", "x.csv", "--config", "y.json"});
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("--out") != std::string::npos);
  }

  TEST_CASE("library errors map to exit 1 with a coded message") {
    const std::string cfg = cfg_path("err_cfg.json", kSquareConfig);
    const auto r = run_cli({"fit", "--curve", work_dir() + "/no_such_curve.csv",
                            "--config", cfg, "--out", work_dir() + "/nope.json"});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("error[IoError]") != std::string::npos);

    const auto r2 = run_cli({"coeffs", "--ratio", "0.5", "--nu", "0.3"});
    CHECK(r2.exit_code == 1);
    CHECK(r2.err.find("error[InvalidArgument]") != std::string::npos);
  }
}

TEST_SUITE("cli workflows") {
  TEST_CASE("simulate then fit recovers the generating material") {
    const std::string cfg = cfg_path("roundtrip_cfg.json", kSquareConfig);
    const std::string curve = work_dir() + "/roundtrip_curve.csv";
    const std::string report_path = work_dir() + "/roundtrip_fit.json";

    const auto sim = run_cli(
        {"simulate", "--config", cfg, "--pressures", "1kPa:20kPa:12", "--out", curve});
    REQUIRE(sim.exit_code == 0);
    CHECK(sim.out.find("wrote 12 samples") != std::string::npos);

    const auto fit = run_cli(
        {"fit", "--curve", curve, "--config", cfg, "--out", report_path});
    REQUIRE_MESSAGE(fit.exit_code == 0, fit.err);
    CHECK(fit.out.find("sigma0") != std::string::npos);

    const io::Report rep = io::read_report(report_path);
    REQUIRE(rep.fits.size() == 1);
    CHECK(rep.fits[0].label == "sq");
    CHECK(rep.fits[0].sigma0 ==
          doctest::Approx(439e6).epsilon(1e-6));
    CHECK(rep.fits[0].youngs_modulus_E ==
          doctest::Approx(210e9).epsilon(1e-6));
    CHECK(rep.fits[0].r_squared > 1.0 - 1e-9);
    CHECK(rep.seed == 11);
    CHECK(rep.fits[0].u_sigma0 > 0.0);  // defaulted lateral uncertainty propagates

    // the default-uncertainty disclosure must reach the report
    bool noted = false;
    for (const auto& a : rep.assumptions)
      if (a.find("tool default") != std::string::npos) noted = true;
    CHECK(noted);
  }

  TEST_CASE("--nu overrides the configured assumption") {
    const std::string cfg = cfg_path("nuo_cfg.json", kSquareConfig);
    const std::string curve = work_dir() + "/nuo_curve.csv";
    REQUIRE(run_cli({"simulate", "--config", cfg, "--pressures", "1kPa,5kPa,9kPa,15kPa",
                     "--out", curve})
                .exit_code == 0);

    const std::string rep_a = work_dir() + "/nuo_a.json";
    const std::string rep_b = work_dir() + "/nuo_b.json";
    REQUIRE(run_cli({"fit", "--curve", curve, "--config", cfg, "--out", rep_a})
                .exit_code == 0);
    REQUIRE(run_cli({"fit", "--curve", curve, "--config", cfg, "--nu", "0.25",
                     "--out", rep_b})
                .exit_code == 0);

    const auto a = io::read_report(rep_a);
    const auto b = io::read_report(rep_b);
    CHECK(a.fits[0].nu_assumed == 0.3);
    CHECK(b.fits[0].nu_assumed == 0.25);
    // same data, same intercept/slope; only the nu-dependent unfolding moves
    CHECK(b.fits[0].slope_B == doctest::Approx(a.fits[0].slope_B).epsilon(1e-12));
    CHECK(b.fits[0].youngs_modulus_E != a.fits[0].youngs_modulus_E);
  }

  TEST_CASE("fit reports are byte-identical across runs at a fixed seed") {
    const std::string cfg = cfg_path("det_cfg.json", kSquareConfig);
    const std::string curve = work_dir() + "/det_curve.csv";
    REQUIRE(run_cli({"simulate", "--config", cfg, "--pressures", "1kPa:20kPa:8",
                     "--out", curve})
                .exit_code == 0);
    const std::string rep_a = work_dir() + "/det_a.json";
    const std::string rep_b = work_dir() + "/det_b.json";
    REQUIRE(run_cli({"fit", "--curve", curve, "--config", cfg, "--out", rep_a})
                .exit_code == 0);
    REQUIRE(run_cli({"fit", "--curve", curve, "--config", cfg, "--out", rep_b})
                .exit_code == 0);
    const std::string bytes_a = slurp(rep_a);
    CHECK(!bytes_a.empty());
    CHECK(bytes_a == slurp(rep_b));
  }

  TEST_CASE("report format follows the output extension") {
    const std::string cfg = cfg_path("fmt_cfg.json", kSquareConfig);
    const std::string curve = work_dir() + "/fmt_curve.csv";
    REQUIRE(run_cli({"simulate", "--config", cfg, "--pressures", "1kPa,4kPa,9kPa",
                     "--out", curve})
                .exit_code == 0);
    const std::string rep_txt = work_dir() + "/fmt_report.txt";
    REQUIRE(run_cli({"fit", "--curve", curve, "--config", cfg, "--out", rep_txt})
                .exit_code == 0);
    const std::string text = slurp(rep_txt);
    CHECK(text.rfind("bulgekit ", 0) == 0);  // text report, not JSON
    CHECK(text.find("sigma0 (Pa) = ") != std::string::npos);
  }

  TEST_CASE("square plus strip fits recover the generating Poisson ratio") {
    const char* square_cfg = R"({
      "label": "psq",
      "geometry": {"width_2a": "1 mm", "length_2b": "1 mm", "thickness_t": "100 nm"},
      "material": {"youngs_modulus_E": "150 GPa", "poisson_nu": 0.25,
                   "residual_stress_sigma0": "100 MPa"},
      "uncertainty": {"n_samples": 200, "seed": 3}
    })";
    const char* rect_cfg = R"({
      "label": "pstrip",
      "geometry": {"width_2a": "1 mm", "length_2b": "12 mm", "thickness_t": "100 nm"},
      "material": {"youngs_modulus_E": "150 GPa", "poisson_nu": 0.25,
                   "residual_stress_sigma0": "100 MPa"},
      "uncertainty": {"n_samples": 200, "seed": 3}
    })";
    const std::string cfg_sq = cfg_path("poi_sq.json", square_cfg);
    const std::string cfg_re = cfg_path("poi_re.json", rect_cfg);
    const std::string curve_sq = work_dir() + "/poi_sq.csv";
    const std::string curve_re = work_dir() + "/poi_re.csv";
    const std::string rep_sq = work_dir() + "/poi_sq_fit.json";
    const std::string rep_re = work_dir() + "/poi_re_fit.json";
    const std::string rep_nu = work_dir() + "/poi_nu.json";

    REQUIRE(run_cli({"simulate", "--config", cfg_sq, "--pressures", "0.5kPa:8kPa:10",
                     "--out", curve_sq})
                .exit_code == 0);
    REQUIRE(run_cli({"simulate", "--config", cfg_re, "--pressures", "0.5kPa:8kPa:10",
                     "--out", curve_re})
                .exit_code == 0);
    REQUIRE(run_cli({"fit", "--curve", curve_sq, "--config", cfg_sq, "--out", rep_sq})
                .exit_code == 0);
    REQUIRE(run_cli({"fit", "--curve", curve_re, "--config", cfg_re, "--out", rep_re})
                .exit_code == 0);

    const auto poi = run_cli(
        {"poisson", "--square", rep_sq, "--rect", rep_re, "--out", rep_nu});
    REQUIRE_MESSAGE(poi.exit_code == 0, poi.err);
    CHECK(poi.out.find("nu = ") != std::string::npos);

    const io::Report rep = io::read_report(rep_nu);
    REQUIRE(rep.poisson_results.size() == 1);
    CHECK(rep.poisson_results[0].nu == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(rep.poisson_results[0].delta_nu > 0.0);
    CHECK(rep.poisson_results[0].label_square == "psq");
    CHECK(rep.poisson_results[0].label_rect == "pstrip");
  }

  TEST_CASE("mixture subcommand solves the bilayer for the unknown film") {
    const std::string out = work_dir() + "/mix.json";
    const auto r = run_cli({"mixture", "--mode", "biaxial_modulus",
                            "--composite", "147GPa",
                            "--layer", "nitride:90nm:212GPa",
                            "--unknown", "oxide:98nm",
                            "--out", out});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("oxide biaxial_modulus = ") != std::string::npos);

    const io::Report rep = io::read_report(out);
    REQUIRE(rep.mixture_results.size() == 1);
    // (188*147 - 90*212) / 98 GPa
    CHECK(rep.mixture_results[0].result.value ==
          doctest::Approx(87.30612245e9).epsilon(1e-8));

    const auto r2 = run_cli({"mixture", "--mode", "poisson_ratio",
                             "--composite", "0.23",
                             "--layer", "nitride:90nm:0.29",
                             "--unknown", "oxide:98nm",
                             "--out", out});
    REQUIRE_MESSAGE(r2.exit_code == 0, r2.err);
    const io::Report rep2 = io::read_report(out);
    CHECK(rep2.mixture_results[0].result.value ==
          doctest::Approx(0.1748979592).epsilon(1e-8));
  }

  TEST_CASE("coeffs prints closed-form values") {
    const auto r = run_cli({"coeffs", "--ratio", "1", "--nu", "0.3"});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("c1 = 3.39\n") != std::string::npos);
    CHECK(r.out.find("f = 1.82299207\n") != std::string::npos);
    CHECK(r.out.find("alpha = 0.00126\n") != std::string::npos);
    CHECK(r.out.find("source = vlassak_nix\n") != std::string::npos);

    const auto r2 = run_cli(
        {"coeffs", "--ratio", "2", "--nu", "0.25", "--source", "bonnotte"});
    REQUIRE(r2.exit_code == 0);
    CHECK(r2.out.find("c1 = 2.19\n") != std::string::npos);
    CHECK(r2.out.find("f = 1.03113\n") != std::string::npos);
  }

  TEST_CASE("coeffs --compute reproduces the square coefficients on a coarse grid") {
    const auto r = run_cli({"coeffs", "--ratio", "1", "--nu", "0.3", "--compute",
                            "--grid", "17"});
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find("source = solver_derived") != std::string::npos);
    CHECK(r.out.find("grid = 17x17") != std::string::npos);
    CHECK(r.out.find("rel_residual = ") != std::string::npos);
    // parse the c1 line; a 17x17 grid is coarse, so the band is generous
    const auto pos = r.out.find("c1 = ");
    REQUIRE(pos != std::string::npos);
    const double c1 = std::stod(r.out.substr(pos + 5));
    CHECK(c1 > 3.2);
    CHECK(c1 < 3.6);
  }
}

TEST_SUITE("cli golden files") {
  TEST_CASE("every subcommand's output is byte-stable at a fixed seed") {
    const std::string cfg_sq = cfg_path("gold_sq.json", R"({
      "label": "gold-square",
      "geometry": {"width_2a": "1 mm", "length_2b": "1 mm", "thickness_t": "100 nm"},
      "material": {"youngs_modulus_E": "150 GPa", "poisson_nu": 0.25,
                   "residual_stress_sigma0": "100 MPa"},
      "uncertainty": {"n_samples": 200, "seed": 3}
    })");
    const std::string cfg_re = cfg_path("gold_re.json", R"({
      "label": "gold-strip",
      "geometry": {"width_2a": "1 mm", "length_2b": "12 mm", "thickness_t": "100 nm"},
      "material": {"youngs_modulus_E": "150 GPa", "poisson_nu": 0.25,
                   "residual_stress_sigma0": "100 MPa"},
      "uncertainty": {"n_samples": 200, "seed": 3}
    })");

    const std::string curve_sq = work_dir() + "/gold_sq.csv";
    const std::string curve_re = work_dir() + "/gold_re.csv";
    REQUIRE(run_cli({"simulate", "--config", cfg_sq, "--pressures", "0.5kPa:8kPa:10",
                     "--out", curve_sq})
                .exit_code == 0);
    REQUIRE(run_cli({"simulate", "--config", cfg_re, "--pressures", "0.5kPa:8kPa:10",
                     "--out", curve_re})
                .exit_code == 0);
    check_golden(slurp(curve_sq), "simulate_curve.csv");

    const std::string rep_sq = work_dir() + "/gold_sq_fit.json";
    const std::string rep_re = work_dir() + "/gold_re_fit.json";
    REQUIRE(run_cli({"fit", "--curve", curve_sq, "--config", cfg_sq, "--out", rep_sq})
                .exit_code == 0);
    REQUIRE(run_cli({"fit", "--curve", curve_re, "--config", cfg_re, "--out", rep_re})
                .exit_code == 0);
    check_golden(slurp(rep_sq), "fit_report.json");

    const std::string rep_nu = work_dir() + "/gold_nu.json";
    REQUIRE(run_cli({"poisson", "--square", rep_sq, "--rect", rep_re,
                     "--out", rep_nu})
                .exit_code == 0);
    check_golden(slurp(rep_nu), "poisson_report.json");

    const std::string rep_mix = work_dir() + "/gold_mix.json";
    REQUIRE(run_cli({"mixture", "--mode", "biaxial_modulus",
                     "--composite", "147GPa:2GPa",
                     "--layer", "nitride:90nm:212GPa:5GPa",
                     "--unknown", "oxide:98nm",
                     "--out", rep_mix})
                .exit_code == 0);
    check_golden(slurp(rep_mix), "mixture_report.json");

    const auto coeffs = run_cli({"coeffs", "--ratio", "4", "--nu", "0.25"});
    REQUIRE(coeffs.exit_code == 0);
    check_golden(coeffs.out, "coeffs_stdout.txt");
  }
}
