#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qprobe/io.hpp"
#include "qprobe/runner.hpp"
#include "qprobe/version.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kBinary = QPROBE_CLI_PATH;

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "qprobe_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return buffer.str();
}

int run(const std::string& args) {
  const std::string command = kBinary + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("quasi command writes deterministic grids") {
  const fs::path dir = work_dir();
  write_file(dir / "quasi.json", R"({
    "state": {"family": "cat", "alpha": [0.0, 3.0]},
    "s": 0.0,
    "grid": {"type": "cartesian", "re_min": -1.0, "re_max": 1.0, "re_step": 0.25,
             "im_min": -3.5, "im_max": 3.5, "im_step": 0.25},
    "format": "csv"
  })");
  const std::string base = "quasi --config " + (dir / "quasi.json").string();
  REQUIRE(run(base + " --out " + (dir / "a.csv").string()) == 0);
  REQUIRE(run(base + " --out " + (dir / "b.csv").string()) == 0);
  const std::string a = read_file(dir / "a.csv");
  CHECK(a == read_file(dir / "b.csv"));
  CHECK(a.find("re,im,value") != std::string::npos);
  CHECK(a.find("# version=") != std::string::npos);
  CHECK(a.find("# config=") != std::string::npos);
}

TEST_CASE("simulate command is seed-deterministic and seed-sensitive") {
  const fs::path dir = work_dir();
  write_file(dir / "sim.json", R"({
    "state": {"family": "fock", "n": 1},
    "detector": {"eta": 1.0, "T": 0.999},
    "s": 0.0,
    "grid": {"type": "polar", "radius_count": 3, "radius_max": 1.5, "phase_count": 8},
    "runs": 500,
    "seed": 99,
    "format": "csv"
  })");
  const std::string base = "simulate --config " + (dir / "sim.json").string();
  REQUIRE(run(base + " --out " + (dir / "s1.csv").string()) == 0);
  REQUIRE(run(base + " --out " + (dir / "s2.csv").string()) == 0);
  REQUIRE(run(base + " --seed 100 --out " + (dir / "s3.csv").string()) == 0);
  CHECK(read_file(dir / "s1.csv") == read_file(dir / "s2.csv"));
  CHECK(read_file(dir / "s1.csv") != read_file(dir / "s3.csv"));
  CHECK(read_file(dir / "s1.csv").find("pcgf_sampled") != std::string::npos);
}

TEST_CASE("json output carries the meta block") {
  const fs::path dir = work_dir();
  write_file(dir / "counts.json", R"({
    "state": {"family": "coherent", "alpha": [1.0, 0.0]},
    "detector": {"eta": 0.8, "T": 0.99},
    "beta": [0.5, 0.0],
    "format": "json"
  })");
  REQUIRE(run("counts --config " + (dir / "counts.json").string() + " --out " +
              (dir / "counts_out.json").string()) == 0);
  const nlohmann::json parsed = nlohmann::json::parse(read_file(dir / "counts_out.json"));
  CHECK(parsed.at("meta").at("version").get<std::string>() == qprobe::kVersion);
  CHECK(parsed.at("meta").at("config").at("command").get<std::string>() == "counts");
  CHECK(parsed.at("data").at("p").is_array());
  const auto p = parsed.at("data").at("p").get<std::vector<double>>();
  CHECK(p.at(0) > 0.0);
}

TEST_CASE("config errors exit with code 2") {
  const fs::path dir = work_dir();
  write_file(dir / "broken.json", "{ not json");
  CHECK(run("quasi --config " + (dir / "broken.json").string()) == 2);

  write_file(dir / "unknown.json", R"({"state": {"family": "vacuum"}, "surprise": 1})");
  CHECK(run("quasi --config " + (dir / "unknown.json").string()) == 2);

  write_file(dir / "baddet.json", R"({"detector": {"eta": 1.4, "T": 0.9}})");
  CHECK(run("counts --config " + (dir / "baddet.json").string()) == 2);

  write_file(dir / "bothxi.json", R"({"detector": {"eta": 0.9, "T": 0.9, "xi": 1.0,
                                       "visibility": 0.9}})");
  CHECK(run("counts --config " + (dir / "bothxi.json").string()) == 2);

  CHECK(run("quasi --config " + (dir / "missing_file.json").string()) == 2);

  write_file(dir / "polar_quasi.json",
             R"({"grid": {"type": "polar", "radius_count": 2, "radius_max": 1.0,
                 "phase_count": 4}})");
  CHECK(run("quasi --config " + (dir / "polar_quasi.json").string()) == 2);
}

TEST_CASE("strict mode exits with code 3 on flagged divergence") {
  const fs::path dir = work_dir();
  write_file(dir / "diverge.json", R"({
    "state": {"family": "thermal", "nbar": 2.0},
    "detector": {"eta": 0.9, "T": 0.9},
    "s": 0.5,
    "grid": {"type": "cartesian", "re_min": 0.0, "re_max": 0.0, "re_step": 1.0,
             "im_min": 0.0, "im_max": 0.0, "im_step": 1.0},
    "runs": 100,
    "seed": 5
  })");
  const std::string base = "simulate --config " + (dir / "diverge.json").string();
  CHECK(run(base + " --out " + (dir / "lax.csv").string()) == 0);
  CHECK(run(base + " --strict --out " + (dir / "strict.csv").string()) == 3);
  // output is still written before the strict failure is raised
  CHECK(read_file(dir / "strict.csv").find(",1\n") != std::string::npos);
}

TEST_CASE("stats sweeps report the pathology thresholds") {
  const fs::path dir = work_dir();
  write_file(dir / "stats.json", R"({
    "state": {"family": "vacuum"},
    "detector": {"eta": 0.8, "T": 0.99},
    "runs": 4000,
    "stats": {"sweep": "thermal", "from": 0.0, "to": 3.0, "steps": 31}
  })");
  REQUIRE(run("stats --config " + (dir / "stats.json").string() + " --out " +
              (dir / "thermal.csv").string()) == 0);
  const std::string table = read_file(dir / "thermal.csv");
  CHECK(table.find("nbar,mean_exists,mean,variance_exists,variance") != std::string::npos);
  CHECK(table.find("\n0.9,1,") != std::string::npos);   // variance still finite
  CHECK(table.find("\n1.1,1,") != std::string::npos);   // mean finite, variance gone
  std::istringstream lines(table);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("1.1,", 0) == 0) CHECK(line.find(",0,") != std::string::npos);
    if (line.rfind("2.6,", 0) == 0) CHECK(line.rfind("2.6,0,") == 0);
  }

  write_file(dir / "recon.json", R"({
    "detector": {"eta": 0.8, "T": 0.99},
    "runs": 4000,
    "seed": 7,
    "stats": {"sweep": "reconstruction", "nbar": 2.0, "levels": 10}
  })");
  REQUIRE(run("stats --config " + (dir / "recon.json").string() + " --out " +
              (dir / "recon.csv").string()) == 0);
  CHECK(read_file(dir / "recon.csv").find("nu,true,reconstructed,stddev,corr_next") !=
        std::string::npos);
}

TEST_CASE("homodyne subcommand produces marginals and reconstructions") {
  const fs::path dir = work_dir();
  write_file(dir / "homo.json", R"({
    "state": {"family": "fock", "n": 1},
    "homodyne": {"mode": "randomphase", "x_min": -4.0, "x_max": 4.0, "x_step": 0.1}
  })");
  REQUIRE(run("homodyne --config " + (dir / "homo.json").string() + " --out " +
              (dir / "random.csv").string()) == 0);
  CHECK(read_file(dir / "random.csv").find("x,density") != std::string::npos);

  write_file(dir / "marg.json", R"({
    "state": {"family": "vacuum"},
    "homodyne": {"mode": "marginals", "phases": 4, "x_min": -4.0, "x_max": 4.0, "x_step": 0.1}
  })");
  REQUIRE(run("homodyne --config " + (dir / "marg.json").string() + " --out " +
              (dir / "marg.csv").string()) == 0);
  CHECK(read_file(dir / "marg.csv").find("theta,x,density") != std::string::npos);
}

TEST_CASE("cat interference survives s = -0.1 and washes out at s = -1") {
  const fs::path dir = work_dir();
  const qprobe::Complex alpha0(0.0, 3.0);
  for (double s : {0.0, -0.1, -1.0}) {
    std::ostringstream cfg;
    cfg << R"({"state": {"family": "cat", "alpha": [0.0, 3.0]}, "s": )" << s
        << R"(, "grid": {"type": "cartesian", "re_min": 0.0, "re_max": 0.25, "re_step": 0.25,
            "im_min": 0.0, "im_max": 0.0, "im_step": 0.25}})";
    write_file(dir / "cat_s.json", cfg.str());
    REQUIRE(run("quasi --config " + (dir / "cat_s.json").string() + " --out " +
                (dir / "cat_s.csv").string()) == 0);
    std::istringstream lines(read_file(dir / "cat_s.csv"));
    std::string line;
    double origin = 0.0;
    while (std::getline(lines, line)) {
      if (line.rfind("0,0,", 0) == 0) origin = std::stod(line.substr(4));
    }
    CHECK(origin ==
          doctest::Approx(qprobe::cat_quasi_closed_form(alpha0, 0.0, s)).epsilon(1e-9));
  }
  // fringe visibility at the origin decays with decreasing ordering
  const double w0 = qprobe::cat_quasi_closed_form(alpha0, 0.0, 0.0);
  const double w01 = qprobe::cat_quasi_closed_form(alpha0, 0.0, -0.1);
  const double w1 = qprobe::cat_quasi_closed_form(alpha0, 0.0, -1.0);
  CHECK(w0 > 2.0 * w01);
  CHECK(w01 > 2.0 * w1);
}

TEST_CASE("simulate resolves the single-photon dip at the origin") {
  const fs::path dir = work_dir();
  write_file(dir / "dip.json", R"({
    "state": {"family": "fock", "n": 1},
    "detector": {"eta": 1.0, "T": 0.999},
    "s": 0.0,
    "grid": {"type": "cartesian", "re_min": 0.0, "re_max": 0.0, "re_step": 0.5,
             "im_min": 0.0, "im_max": 0.0, "im_step": 0.5},
    "runs": 1000,
    "seed": 21
  })");
  REQUIRE(run("simulate --config " + (dir / "dip.json").string() + " --out " +
              (dir / "dip.csv").string()) == 0);
  std::istringstream lines(read_file(dir / "dip.csv"));
  std::string line;
  std::vector<double> row;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'r') continue;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
  }
  REQUIRE(row.size() == 9);
  const double pcgf_error = row[3];
  const double quasi_mean = row[5];
  const double quasi_sampled = row[6];
  CHECK(pcgf_error <= 1.0 / std::sqrt(1000.0));
  CHECK(std::abs(quasi_mean - (-2.0 / qprobe::kPi)) < 0.01);
  CHECK(std::abs(quasi_sampled - quasi_mean) <= 4.0 * (2.0 / qprobe::kPi) * pcgf_error);
}

TEST_CASE("quasi grids expose the known peak values") {
  const fs::path dir = work_dir();
  write_file(dir / "vac.json", R"({
    "state": {"family": "vacuum"},
    "grid": {"type": "cartesian", "re_min": -1.0, "re_max": 1.0, "re_step": 0.5,
             "im_min": -1.0, "im_max": 1.0, "im_step": 0.5}
  })");
  REQUIRE(run("quasi --config " + (dir / "vac.json").string() + " --out " +
              (dir / "vac.csv").string()) == 0);
  // W_vacuum(0; 0) = 2/pi
  CHECK(read_file(dir / "vac.csv").find("\n0,0,0.636619772368\n") != std::string::npos);

  write_file(dir / "coh.json", R"({
    "state": {"family": "coherent", "alpha": [1.0, 0.0]},
    "grid": {"type": "cartesian", "re_min": 0.0, "re_max": 1.0, "re_step": 0.5,
             "im_min": 0.0, "im_max": 0.0, "im_step": 0.5}
  })");
  REQUIRE(run("quasi --config " + (dir / "coh.json").string() + " --out " +
              (dir / "coh.csv").string()) == 0);
  CHECK(read_file(dir / "coh.csv").find("\n1,0,0.636619772368\n") != std::string::npos);
}

TEST_CASE("simulate error band explodes under loss compensation") {
  const fs::path dir = work_dir();
  write_file(dir / "comp.json", R"({
    "state": {"family": "coherent", "alpha": [1.0, 0.0]},
    "detector": {"eta": 0.888888888888888888, "T": 0.9, "cutoff": 90},
    "s": 0.2,
    "grid": {"type": "cartesian", "re_min": -3.0, "re_max": 3.0, "re_step": 0.5,
             "im_min": 0.0, "im_max": 0.0, "im_step": 0.5},
    "runs": 1000,
    "seed": 11
  })");
  REQUIRE(run("simulate --config " + (dir / "comp.json").string() + " --out " +
              (dir / "comp.csv").string()) == 0);
  std::map<double, double> error_by_re;
  std::istringstream lines(read_file(dir / "comp.csv"));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'r') continue;
    std::istringstream fields(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    error_by_re[row[0]] = row[3];  // pcgf_error column
  }
  REQUIRE(error_by_re.size() == 13);
  // monotone growth away from the state beyond |beta| ~ 2
  for (double re = -2.0; re - 0.5 >= -3.0; re -= 0.5)
    CHECK(error_by_re[re - 0.5] > error_by_re[re]);
  for (double re = 2.0; re + 0.5 <= 3.0; re += 0.5)
    CHECK(error_by_re[re + 0.5] > error_by_re[re]);
  CHECK(error_by_re[-3.0] / error_by_re[0.0] > 50.0);
}

TEST_CASE("experiment designs round-trip through JSON") {
  qprobe::ExperimentDesign design;
  design.probabilities.resize(2, 3);
  design.probabilities << 0.2, 0.3, 0.5, 0.6, 0.3, 0.1;
  design.runs = 750;
  design.settings = qprobe::VectorXd::LinSpaced(2, 0.0, 1.0);
  const std::string text = qprobe::io::design_json(design);
  const qprobe::ExperimentDesign back = qprobe::io::design_from_json(text);
  CHECK(back.runs == design.runs);
  CHECK((back.probabilities - design.probabilities).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.settings - design.settings).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(qprobe::io::design_from_json("{\"runs\": 5}"));
}

TEST_CASE("histogram files carry run and seed metadata") {
  qprobe::Histogram h;
  h.counts = {5, 3, 2};
  h.runs = 10;
  std::ostringstream os;
  qprobe::io::write_histogram_csv(os, h, 4242, qprobe::io::Meta{"{}"});
  const std::string text = os.str();
  CHECK(text.find("# N=10\n") != std::string::npos);
  CHECK(text.find("# seed=4242\n") != std::string::npos);
  CHECK(text.find("n,k_n\n0,5\n1,3\n2,2\n") != std::string::npos);
}

TEST_CASE("config round trip through the library API") {
  const qprobe::RunConfig config = qprobe::RunConfig::from_json(R"({
    "state": {"family": "mixture", "components": [
      {"weight": 0.5, "state": {"family": "vacuum"}},
      {"weight": 0.5, "state": {"family": "fock", "n": 1}}]},
    "detector": {"eta": 0.75, "T": 0.95, "visibility": 0.985},
    "s": -0.1,
    "runs": 2000,
    "seed": 31,
    "format": "json"
  })");
  CHECK(config.detector.overlap == doctest::Approx(0.985 / 1.015).epsilon(1e-12));
  CHECK(config.state.family() == qprobe::StateSpec::Family::Mixture);
  const std::string resolved = config.resolved_json("quasi");
  const nlohmann::json parsed = nlohmann::json::parse(resolved);
  CHECK(parsed.at("s").get<double>() == -0.1);
  CHECK(parsed.at("state").at("components").size() == 2);
  CHECK_THROWS_AS(qprobe::RunConfig::from_json("[1,2]"), qprobe::ConfigError);
  CHECK_THROWS_AS(qprobe::RunConfig::from_json(R"({"format": "yaml"})"), qprobe::ConfigError);
  CHECK_THROWS_AS(qprobe::RunConfig::from_json(R"({"runs": 0})"), qprobe::ConfigError);
}
