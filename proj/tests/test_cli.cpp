#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kr/cli.hpp"
#include "kr/error.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;

  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run krnorm(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kr::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(KR_DATA_DIR) + "/" + name; }

// Writes `text` to a fresh file under the temp directory.
std::string temp_file(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "krnorm_tests";
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("connect on the unit dipole") {
  const auto r = krnorm({"connect", data("unit_dipole.json")});
  REQUIRE(r.code == kr::cli::kOk);
  const auto j = r.json();
  CHECK(j["command"] == "connect");
  CHECK(j["values"]["value"].get<double>() == 1.0);
  CHECK(j["certificates"]["edges"].size() == 1);
  CHECK(j["residuals"]["duality_gap"].get<double>() <= 1e-12);
  CHECK(j["input"]["digest"].get<std::string>().size() == 16);
  for (const char* key : {"command", "input", "settings", "values", "certificates", "residuals", "warnings"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("dual and flat norm") {
  CHECK(krnorm({"dual", data("unit_dipole.json")}).json()["values"]["value"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  const auto mx = krnorm({"flatnorm", data("unit_dipole.json")});
  REQUIRE(mx.code == 0);
  CHECK(mx.json()["values"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  const auto sm = krnorm({"flatnorm", "--convention", "sum", data("unit_dipole.json")});
  REQUIRE(sm.code == 0);
  CHECK(sm.json()["values"]["value"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(krnorm({"flatnorm", "--convention", "min", data("unit_dipole.json")}).code == kr::cli::kValidation);
}

TEST_CASE("beckmann on grids") {
  const auto path = krnorm({"beckmann", "--grid", "3x1", data("path.json")});
  REQUIRE(path.code == 0);
  CHECK(path.json()["values"]["cost"].get<double>() == 1.0);

  const auto diag = krnorm({"beckmann", "--grid", "2x2", data("diagonal_dipole.json")});
  REQUIRE(diag.code == 0);
  const auto j = diag.json();
  CHECK(j["values"]["cost"].get<double>() == 1.0);
  CHECK(j["values"]["ratio"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(j["residuals"]["balance"].get<double>() <= 1e-12);

  const auto complete = krnorm({"beckmann", data("diagonal_dipole.json")});
  REQUIRE(complete.code == 0);
  CHECK(complete.json()["values"]["ratio"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(krnorm({"beckmann", "--grid", "1x1", data("path.json")}).code == kr::cli::kValidation);
  CHECK(krnorm({"beckmann", "--grid", "3y1", data("path.json")}).code == kr::cli::kValidation);
}

TEST_CASE("grid specs") {
  int dim = 0;
  CHECK(kr::cli::parse_grid_spec("4x3", dim) == std::array<int, 3>{4, 3, 1});
  CHECK(dim == 2);
  CHECK(kr::cli::parse_grid_spec("2x3x5", dim) == std::array<int, 3>{2, 3, 5});
  CHECK(dim == 3);
  CHECK_THROWS_AS(kr::cli::parse_grid_spec("4", dim), kr::ValidationError);
  CHECK_THROWS_AS(kr::cli::parse_grid_spec("0x3", dim), kr::ValidationError);
  CHECK_THROWS_AS(kr::cli::parse_grid_spec("4x-1", dim), kr::ValidationError);
}

TEST_CASE("plan-check exit codes") {
  const auto ok = krnorm({"plan-check", data("plan_exact.json")});
  CHECK(ok.code == kr::cli::kOk);
  CHECK(ok.json()["values"]["pass"] == true);
  const auto bad = krnorm({"plan-check", data("plan_perturbed.json")});
  CHECK(bad.code == kr::cli::kVerification);
  CHECK(bad.json()["values"]["max_residual"].get<double>() == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("density output") {
  const auto j = krnorm({"density", "--grid", "4x4", data("diagonal_dipole.json")});
  REQUIRE(j.code == 0);
  const auto v = j.json()["values"];
  CHECK(v["total"].get<double>() == doctest::Approx(v["reference"].get<double>()).epsilon(1e-12));

  const std::string doc =
      R"({"version": 1, "domain": {"lower": [0, 0], "upper": [1, 1]},
          "atoms": [{"point": [0, 0.25], "mass": 2}, {"point": [1, 0.25], "mass": -2}]})";
  const auto csv = krnorm({"density", "--grid", "2x2", "--format", "csv", temp_file("edge.json", doc)});
  REQUIRE(csv.code == 0);
  CHECK(csv.out == "0,0,1\n1,0,1\n0,1,0\n1,1,0\n");
  CHECK(krnorm({"density", data("unit_dipole.json")}).code == kr::cli::kValidation);
}

TEST_CASE("parallel rasterisation gives the same report") {
  const auto a = krnorm({"density", "--grid", "16x16", data("diagonal_dipole.json")});
  const auto b = krnorm({"--parallel", "density", "--grid", "16x16", data("diagonal_dipole.json")});
  CHECK(a.out == b.out);
}

TEST_CASE("decompose") {
  const auto r = krnorm({"decompose", data("sharp.json")});
  REQUIRE(r.code == 0);
  const auto v = r.json()["values"];
  CHECK(v["certified"] == true);
  CHECK(v["normal_mass"].get<double>() == 0.5);
  CHECK(v["w1_total"].get<double>() == 1.5);
}

TEST_CASE("modulus") {
  const auto r = krnorm({"modulus", data("chain.json")});
  REQUIRE(r.code == 0);
  const auto table = r.json()["values"]["table"];
  REQUIRE(table.size() == 4);
  const double want[] = {2.0, 4.0, 6.0, 8.0};
  for (int k = 0; k < 4; ++k) CHECK(table[k]["c_eps"].get<double>() == want[k]);
  CHECK(r.json()["residuals"]["min_slack"].get<double>() >= 0.0);

  const auto csv = krnorm({"modulus", "--format", "csv", data("chain.json")});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("eps,c_eps,k,certified_tail\n", 0) == 0);

  const std::string floor =
      R"({"version": 1, "dipoles": {"pairs": [{"p": [0, 0], "n": [1, 0]}],
          "tail": {"ratio": 0.5, "first_term": 1}}, "options": {"epsilons": [0.01]}})";
  CHECK(krnorm({"modulus", temp_file("floor.json", floor)}).code == kr::cli::kInfeasible);
}

TEST_CASE("validation failures exit with 2") {
  const auto malformed = krnorm({"connect", temp_file("bad.json", "{\n  \"version\": 1,\n  \"atoms\": [\n}")});
  CHECK(malformed.code == kr::cli::kValidation);
  CHECK(malformed.err.find("line 4") != std::string::npos);
  CHECK(malformed.err.find("column") != std::string::npos);

  CHECK(krnorm({"connect", temp_file("key.json", R"({"version": 1, "atomz": []})")}).code ==
        kr::cli::kValidation);
  CHECK(krnorm({"connect", "--frobnicate", data("unit_dipole.json")}).code == kr::cli::kValidation);
  CHECK(krnorm({"connect", data("missing.json")}).code == kr::cli::kValidation);
  CHECK(krnorm({"connect", temp_file("unbalanced.json",
                                      R"({"version": 1, "atoms": [{"point": [0, 0], "mass": 1}]})")})
            .code == kr::cli::kValidation);
  CHECK(krnorm({"connect", temp_file("opt.json", R"({"version": 1, "atoms": [], "options": {"x": 1}})")})
            .code == kr::cli::kValidation);
  CHECK(krnorm({"nonsense"}).code == kr::cli::kValidation);
  CHECK(krnorm({"--help"}).code == kr::cli::kOk);
}

TEST_CASE("reports are byte-identical across runs and --out writes the file") {
  const auto a = krnorm({"connect", data("diagonal_dipole.json")});
  const auto b = krnorm({"connect", data("diagonal_dipole.json")});
  CHECK(a.out == b.out);
  const auto path = (fs::temp_directory_path() / "krnorm_tests" / "report.json").string();
  fs::create_directories(fs::path(path).parent_path());
  const auto c = krnorm({"--out", path, "connect", data("diagonal_dipole.json")});
  CHECK(c.code == 0);
  CHECK(slurp(path) == a.out);
}

TEST_CASE("selftest") {
  const auto all = krnorm({"selftest"});
  CHECK(all.code == kr::cli::kOk);
  CHECK(all.json()["suites"].size() == 5);

  const auto one = krnorm({"selftest", "--filter", "duality"});
  CHECK(one.code == kr::cli::kOk);
  REQUIRE(one.json()["suites"].size() == 1);
  CHECK(one.json()["suites"][0]["suite"] == "duality");

  CHECK(krnorm({"selftest", "--filter", "modulus", "--inject-fault"}).code == kr::cli::kVerification);
  CHECK(krnorm({"selftest", "--filter", "nope"}).code == kr::cli::kValidation);
}
