#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cmath>
#include <string>
#include <vector>

#include "paulisim/cli_app.hpp"

using namespace paulisim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempTree {
  fs::path root;
  TempTree() {
    root = fs::temp_directory_path() /
           ("paulisim_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(root);
  }
  ~TempTree() { fs::remove_all(root); }

  std::string file(const std::string& name, const std::string& content) const {
    fs::path p = root / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  std::string path(const std::string& name) const {
    return (root / name).string();
  }
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

}  // namespace

TEST_CASE("expand resolves order and segments automatically") {
  TempTree tmp;
  std::string h = tmp.file("heis.txt",
                           "1 XXII\n1 YYII\n1 ZZII\n"
                           "1 IXXI\n1 IYYI\n1 IZZI\n"
                           "1 IIXX\n1 IIYY\n1 IIZZ\n");
  std::string obs = tmp.file("stag.txt",
                             "1 ZIII\n-1 IZII\n1 IIZI\n-1 IIIZ\n");
  std::string out = tmp.path("report.json");
  int code = run_cli({"expand", "-H", h, "-O", obs, "--time", "0.1",
                      "--eps", "0.001", "-o", out});
  CHECK(code == 0);
  json report = read_json(out);
  CHECK(report["schema_version"] == 1);
  CHECK(report["subcommand"] == "expand");
  // lambda t = 0.9: one segment, then the smallest K with tail <= 1e-3 is 5.
  CHECK(report["config"]["segments"] == 1);
  CHECK(report["config"]["order"] == 5);
  CHECK(report["config"]["mode"] == "concat");
  CHECK(report["config"]["lambda"] == doctest::Approx(9.0));
  // (2u + u^2) * ||O||_1 with u = 0.9^6/6! from the auto-selected order.
  double tail = std::pow(0.9, 6.0) / 720.0;
  CHECK(report["bounds"]["total_systematic"] ==
        doctest::Approx((2.0 * tail + tail * tail) * 4.0));
  CHECK(report["expansion"]["m_tot"].get<std::uint64_t>() > 0);
  CHECK(report.contains("wall_time_ms"));
}

TEST_CASE("explicit order and segments are honored") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");
  std::string out = tmp.path("report.json");
  int code = run_cli({"expand", "-H", h, "-O", obs, "--time", "0.1",
                      "-K", "2", "--mode", "concat", "-o", out});
  CHECK(code == 0);
  json report = read_json(out);
  CHECK(report["config"]["order"] == 2);
  CHECK(report["expansion"]["gamma_l1"] == doctest::Approx(1.179025));
}

TEST_CASE("reports are identical modulo wall time") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");
  std::string out1 = tmp.path("a.json");
  std::string out2 = tmp.path("b.json");
  std::vector<std::string> base = {"estimate", "-H", h, "-O", obs,
                                   "--time", "0.1", "-K", "2",
                                   "-s", "basis:0", "-b", "importance",
                                   "-N", "2000", "--seed", "7"};
  std::vector<std::string> run1 = base;
  run1.push_back("-o");
  run1.push_back(out1);
  std::vector<std::string> run2 = base;
  run2.push_back("-o");
  run2.push_back(out2);
  REQUIRE(run_cli(run1) == 0);
  REQUIRE(run_cli(run2) == 0);
  json a = read_json(out1);
  json b = read_json(out2);
  a.erase("wall_time_ms");
  b.erase("wall_time_ms");
  CHECK(a == b);
}

TEST_CASE("exact estimate reproduces the expansion expectation") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");
  std::string out = tmp.path("report.json");
  REQUIRE(run_cli({"estimate", "-H", h, "-O", obs, "--time", "0.1",
                   "-K", "2", "-s", "basis:0", "-o", out}) == 0);
  json report = read_json(out);
  CHECK(report["estimate"]["value"][0] == doctest::Approx(0.980025));
  CHECK(report["estimate"]["value"][1] == doctest::Approx(0.0));
  CHECK(report["estimate"]["radius"] == 0.0);
  CHECK(report["estimate"]["method"] == "exact");
}

TEST_CASE("bounds subcommand reports shot budgets without expanding") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");
  std::string out = tmp.path("report.json");
  REQUIRE(run_cli({"bounds", "-H", h, "-O", obs, "--time", "0.1",
                   "-K", "1", "--eps", "0.1", "--delta", "0.05",
                   "-o", out}) == 0);
  json report = read_json(out);
  CHECK(report["subcommand"] == "bounds");
  // gamma bound (1 + 0.1)^2 = 1.21; shots = ceil(2*1.21^2*ln 40/0.01).
  CHECK(report["bounds"]["gamma_l1_bound"] == doctest::Approx(1.21));
  CHECK(report["bounds"]["hoeffding_shots"] == 1081);
  CHECK(report["bounds"].contains("shadow_shots"));
  CHECK(report["bounds"].contains("w_cap"));
  CHECK_FALSE(report.contains("expansion"));
}

TEST_CASE("workflow subcommands succeed end to end") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");

  std::string verify_out = tmp.path("verify.json");
  REQUIRE(run_cli({"verify", "-H", h, "--claimed", h, "-O", obs,
                   "--time", "0.05", "-s", "basis:0",
                   "-o", verify_out}) == 0);
  json verify_report = read_json(verify_out);
  CHECK(verify_report["workflow"]["consistent"] == true);
  CHECK(verify_report["workflow"]["residual"].get<double>() <=
        verify_report["workflow"]["threshold"].get<double>());

  std::string energy_out = tmp.path("energy.json");
  REQUIRE(run_cli({"imag-energy", "-H", h, "--tau", "0.1",
                   "-s", "basis:0", "-K", "5", "-o", energy_out}) == 0);
  json energy_report = read_json(energy_out);
  double value = energy_report["workflow"]["value"].get<double>();
  CHECK(value == doctest::Approx(-0.197375).epsilon(1e-4));
  CHECK(energy_report["workflow"]["lower"].get<double>() <= value);

  std::string trace_out = tmp.path("trace.json");
  REQUIRE(run_cli({"trace-z", "-H", h, "--tau", "0.1",
                   "-o", trace_out}) == 0);
  json trace_report = read_json(trace_out);
  CHECK(trace_report["workflow"]["value"].get<double>() ==
        doctest::Approx(2.0401).epsilon(1e-3));

  std::string loschmidt_out = tmp.path("loschmidt.json");
  REQUIRE(run_cli({"loschmidt", "-H", h, "--time", "0.1", "-K", "2",
                   "-s", "basis:0", "-o", loschmidt_out}) == 0);
  json loschmidt_report = read_json(loschmidt_out);
  CHECK(loschmidt_report["estimate"]["value"][0] == doctest::Approx(0.995));
  CHECK(loschmidt_report["estimate"]["method"] == "loschmidt-exact");
}

TEST_CASE("recorded snapshots feed the estimate subcommand") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");
  // All-Z-basis snapshots of |0>: outcome bit 0, so Z estimates +3 each.
  std::string lines;
  for (int i = 0; i < 200; ++i) {
    lines += "{\"bases\": \"Z\", \"bits\": \"0\"}\n";
  }
  std::string shadows = tmp.file("snaps.jsonl", lines);
  std::string out = tmp.path("report.json");
  REQUIRE(run_cli({"estimate", "-H", h, "-O", obs, "--time", "0.1", "-K", "2",
                   "--shadows", shadows, "-o", out}) == 0);
  json report = read_json(out);
  CHECK(report["config"]["backend"] == "shadows-file");
  CHECK(report["estimate"]["shots"] == 200);
  // The expansion is 0.980025 Z + 0.199 Y; these snapshots estimate Z as 3
  // and Y as 0, giving 2.940075.
  CHECK(report["estimate"]["value"][0] == doctest::Approx(2.940075));
}

TEST_CASE("input errors exit with code 2") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");
  // Missing required option.
  CHECK(run_cli({"expand", "--time", "0.1"}) == 2);
  // Unknown subcommand.
  CHECK(run_cli({"explode"}) == 2);
  // Unreadable Hamiltonian.
  CHECK(run_cli({"expand", "-H", tmp.path("nope.txt"), "--time", "0.1"}) == 2);
  // Bad state spec.
  CHECK(run_cli({"estimate", "-H", h, "-O", obs, "--time", "0.1",
                 "-s", "basis:2"}) == 2);
  // Missing state for a sampling backend.
  CHECK(run_cli({"estimate", "-H", h, "-O", obs, "--time", "0.1"}) == 2);
  // Both --time and --tau.
  CHECK(run_cli({"expand", "-H", h, "-O", obs, "--time", "0.1",
                 "--tau", "0.1"}) == 2);
  // Neither.
  CHECK(run_cli({"expand", "-H", h, "-O", obs}) == 2);
  // Segments on a non-segmented mode.
  CHECK(run_cli({"expand", "-H", h, "-O", obs, "--time", "0.1",
                 "--mode", "direct", "-r", "2"}) == 2);
  // Observable-free run in a conjugating mode.
  CHECK(run_cli({"expand", "-H", h, "--time", "0.1", "--mode", "concat"}) == 2);
}

TEST_CASE("guard violations exit with code 3") {
  TempTree tmp;
  std::string h = tmp.file("hx.txt", "1.0 X\n");
  std::string obs = tmp.file("oz.txt", "1.0 Z\n");
  CHECK(run_cli({"expand", "-H", h, "-O", obs, "--time", "0.1", "-K", "2",
                 "--term-cap", "1"}) == 3);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli(std::vector<std::string>{}) == 2);
}
