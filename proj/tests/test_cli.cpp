#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PERSUADE_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) {
  return std::string(PERSUADE_CONFIG_DIR) + "/" + name;
}

// Writes a config to the temp directory and returns its path.
std::string temp_config(const std::string& name, const json& doc) {
  const auto path = fs::temp_directory_path() / ("persuade_test_" + name + ".json");
  std::ofstream(path) << doc.dump(2);
  return path.string();
}

json baseline_doc() {
  std::ifstream in(config("baseline.json"));
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve reports the warning in the fear case") {
  auto r = run("solve --config " + config("fear_warning.json"));
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["policy"]["regime"]["label"] == "PreemptiveWarning");
  CHECK(doc["policy"]["ex_ante"].size() == 2);
  CHECK(doc["policy"]["ex_ante"][1]["posterior"].get<double>() == 1.0);
}

TEST_CASE("low priors need no disclosure") {
  auto doc = baseline_doc();
  doc["model"]["mu0"] = 0.3;
  auto r = run("solve --config " + temp_config("low_prior", doc));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["policy"]["regime"]["label"] == "NoDisclosureNeeded");
}

TEST_CASE("every shipped config solves, sweeps and verifies") {
  for (const auto* name :
       {"baseline.json", "fear_warning.json", "no_persuasion.json", "pc.json", "unconditional.json",
        "physical_cost.json", "test_design.json", "cost_example.json", "general_inverse_s.json"}) {
    CAPTURE(name);
    auto r = run(std::string("solve --config ") + config(name));
    CHECK(r.code == 0);
    CHECK(json::accept(r.out));
    CHECK(run(std::string("sweep --config ") + config(name)).code == 0);
    CHECK(run(std::string("verify --config ") + config(name)).code == 0);
  }
}

TEST_CASE("thresholds subcommand") {
  auto r = run("thresholds --config " + config("physical_cost.json"));
  REQUIRE(r.code == 0);
  auto t = json::parse(r.out)["thresholds"];
  CHECK(t["mu_F"].get<double>() == doctest::Approx(0.6));
  CHECK(t["mu_M"].get<double>() == doctest::Approx(0.3 / 0.35));
}

TEST_CASE("same config and seed give identical bytes") {
  const auto dir = fs::temp_directory_path();
  const auto a = dir / "persuade_test_a.json";
  const auto b = dir / "persuade_test_b.json";
  REQUIRE(run("solve --config " + config("baseline.json") + " --seed 7 --out " + a.string()).code ==
          0);
  REQUIRE(run("solve --config " + config("baseline.json") + " --seed 7 --out " + b.string()).code ==
          0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());

  auto s1 = run("sweep --config " + config("baseline.json") + " --seed 3");
  auto s2 = run("sweep --config " + config("baseline.json") + " --seed 3");
  CHECK(s1.out == s2.out);
}

TEST_CASE("sweep writes a header and one row per step") {
  auto r = run("sweep --config " + config("baseline.json"));
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 19);

  auto doc = baseline_doc();
  doc["sweep"]["steps"] = 0;
  auto empty = run("sweep --config " + temp_config("steps0", doc));
  REQUIRE(empty.code == 0);
  CHECK(empty.out.rfind("mu,", 0) == 0);
  CHECK(std::count(empty.out.begin(), empty.out.end(), '\n') == 1);
}

TEST_CASE("verify passes at the baseline and catches a perturbed solver") {
  CHECK(run("verify --config " + config("baseline.json")).code == 0);

  auto doc = baseline_doc();
  doc["test_hooks"]["l_offset"] = 0.05;
  auto r = run("verify --config " + temp_config("perturbed", doc));
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("configuration errors exit with code 2") {
  auto bad = run("solve --config " + config("bad_knots.json"));
  CHECK(bad.code == 2);
  CHECK(bad.out.find("phi.knots[1]") != std::string::npos);

  auto doc = baseline_doc();
  doc["model"]["colour"] = "blue";
  auto unknown = run("solve --config " + temp_config("unknown_key", doc));
  CHECK(unknown.code == 2);
  CHECK(unknown.out.find("model") != std::string::npos);

  CHECK(run("solve --config " + config("baseline.json") + " --variant nonsense").code == 2);
  CHECK(run("solve --config /nonexistent/persuade.json").code == 2);

  doc = baseline_doc();
  doc["model"]["c"] = 0.1;
  CHECK(run("solve --config " + temp_config("bad_c", doc)).code == 2);
}

TEST_CASE("unwritable output path exits with code 3") {
  CHECK(run("solve --config " + config("baseline.json") + " --out /nonexistent/dir/out.json").code ==
        3);
}
