#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("attrition_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

Result run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string(ATTRITION_LAB) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

const char* kP0 = R"({"schema":"attrition-lab/v1","a1":0.6,"a2":0.6,"z1":0.1,"z2":0.1,"r1":1,"r2":1,)"
                  R"("gamma1":0.5,"c1":0.5,"k2":0.3,"w1":0.2})";

std::string p0_file() { return write("p0.json", kP0).string(); }

}  // namespace

TEST_CASE("limit prints the winner and payoffs") {
  const Result r = run("limit " + p0_file());
  CHECK(r.code == 0);
  CHECK(r.out == std::string(R"({"winner":2,"payoffs":[0.4,0.6]})") + "\n");
}

TEST_CASE("solve writes the profile, curves, hazards and manifest") {
  const fs::path dir = scratch() / "solve";
  const Result r = run("solve " + p0_file() + " --out " + dir.string());
  REQUIRE(r.code == 0);
  const Json profile = Json::parse(slurp(dir / "profile.json"));
  for (const char* key : {"kind", "T", "T1", "Q1", "Q2", "u1", "u2", "loser", "derived", "game"}) {
    CHECK(profile.contains(key));
  }
  CHECK(profile["u1"] == 0.4);
  CHECK(fs::exists(dir / "curves.csv"));
  const std::string hazard = slurp(dir / "hazard.csv");
  CHECK(hazard.find("challenge_end_1") != std::string::npos);
  const Json manifest = Json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "solve");
  CHECK(manifest["input"]["sha256"].get<std::string>().size() == 64);
}

TEST_CASE("exit codes") {
  Json bad = Json::parse(kP0);
  bad["a2"] = 0.3;
  Result r = run("solve " + write("bad.json", bad.dump()).string());
  CHECK(r.code == 2);
  CHECK(r.err.find("D = a1 + a2 - 1 > 0") != std::string::npos);
  bad = Json::parse(kP0);
  bad["zeta"] = 1;
  CHECK(run("solve " + write("unknown.json", bad.dump()).string()).code == 2);
  CHECK(run("simulate " + p0_file()).code == 2);
  CHECK(run("nonsense").code == 2);
  CHECK(run("solve --help").code == 0);

  // Both arrival rates above the concession rates, priors in the type-1 cell.
  const Json fast = {{"schema", "attrition-lab/v1"}, {"a1", 0.6}, {"a2", 0.6}, {"z1", 0.01}, {"z2", 0.02},
                     {"r1", 1},  {"r2", 1},   {"gamma1", 4}, {"gamma2", 4},  {"c1", 0.55}, {"c2", 0.55},
                     {"k1", 0.2}, {"k2", 0.2}, {"w1", 0.1},  {"w2", 0.1}};
  const std::string fast_file = write("fast.json", fast.dump()).string();
  r = run("twosided " + fast_file + " --solve");
  CHECK(r.code == 3);
  CHECK(r.err.find("regime") != std::string::npos);
  r = run("twosided " + fast_file + " --classify");
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["regime"] == "type1_only");
  CHECK(run("twosided " + fast_file + " --solve --kind type1 --atom 1:0").code == 0);
}

TEST_CASE("simulation is reproducible from its seed and its manifest") {
  const fs::path a = scratch() / "sim_a", b = scratch() / "sim_b", c = scratch() / "sim_c";
  const std::string args = " --seed 11 --replications 2000 --bin-width 0.1";
  REQUIRE(run("simulate " + p0_file() + args + " --out " + a.string()).code == 0);
  REQUIRE(run("simulate " + p0_file() + args + " --out " + b.string()).code == 0);
  CHECK(slurp(a / "sim.json") == slurp(b / "sim.json"));
  CHECK(slurp(a / "hazard.csv") == slurp(b / "hazard.csv"));
  REQUIRE(run("replay " + (a / "manifest.json").string() + " --out " + c.string()).code == 0);
  CHECK(slurp(a / "sim.json") == slurp(c / "sim.json"));
  CHECK(Json::parse(slurp(a / "manifest.json"))["seed"] == 11);
}

TEST_CASE("config file supplies option values") {
  const fs::path cfg = write("sim.toml", "[simulate]\nseed = 11\nreplications = 2000\nbin-width = 0.1\n");
  const fs::path a = scratch() / "cfg_a", b = scratch() / "cfg_b";
  REQUIRE(run("--config " + cfg.string() + " simulate " + p0_file() + " --out " + a.string()).code == 0);
  REQUIRE(run("simulate " + p0_file() + " --seed 11 --replications 2000 --bin-width 0.1 --out " + b.string()).code == 0);
  CHECK(slurp(a / "sim.json") == slurp(b / "sim.json"));
}
