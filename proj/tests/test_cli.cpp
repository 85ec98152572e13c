// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "matchlab/cli.hpp"

using namespace matchlab;

namespace {

const std::string kRoot = MATCHLAB_SOURCE_DIR;

std::string data(const std::string& name) { return kRoot + "/data/" + name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// MATCHLAB_UPDATE_GOLDEN=1 rewrites the snapshots instead of comparing.
void golden(const std::string& name, const std::vector<std::string>& args, int exit_code) {
  const auto r = run_command(args);
  INFO(name << "\n" << r.err);
  CHECK(r.exit_code == exit_code);
  const auto path = std::filesystem::path(kRoot) / "tests" / "golden" / (name + ".json");
  if (std::getenv("MATCHLAB_UPDATE_GOLDEN")) {
    std::ofstream(path) << r.out;
    return;
  }
  REQUIRE(std::filesystem::exists(path));
  CHECK(r.out == slurp(path));
}

struct ScopedEnv {
  std::string name;
  ScopedEnv(std::string n, const char* value) : name(std::move(n)) { ::setenv(name.c_str(), value, 1); }
  ~ScopedEnv() { ::unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("json snapshots") {
  golden("fixtures", {"fixtures", "ps13-counterexample", "boston-equilibrium", "thm1-strict-env", "thm2-strict-env",
                      "tier-sd", "--format", "json"},
         kExitOk);
  golden("match_fpf", {"match", data("ps13_counterexample.json"), "--mech", "fpf:k=3:fpf=s5", "--format", "json"},
         kExitOk);
  golden("match_boston",
         {"match", data("boston_equilibrium.json"), "--mech", "boston", "--format", "json"}, kExitOk);
  golden("compare_immunity",
         {"compare", data("tiny_env.json"), "--a", "gs:k=2", "--b", "gs:k=1", "--criterion", "both", "--format",
          "json"},
         kExitOk);
  golden("audit_tiny", {"audit", data("tiny_env.json"), "--mech", "chinese:e=2", "--format", "json"}, kExitOk);
  golden("audit_admission",
         {"audit", data("tiny_env.json"), "--mech", "gs:k=1", "--admission", "2:s1", "--format", "json"},
         kExitNegative);
  golden("equilibrium_reported", {"equilibrium", data("boston_equilibrium.json"), "--mech", "boston", "--reported",
                                  data("boston_equilibrium.json"), "--format", "json"},
         kExitNegative);
}

TEST_CASE("human output") {
  const auto r = run_command({"match", data("ps13_counterexample.json"), "--mech", "gs:k=3"});
  CHECK(r.exit_code == kExitOk);
  CHECK(r.out.find("{1:∅") != std::string::npos);
  const auto fx = run_command({"fixtures", "thm1-strict-env"});
  CHECK(fx.exit_code == kExitOk);
  CHECK(fx.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verdict exit codes") {
  const auto tiny = data("tiny_env.json");
  CHECK(run_command({"compare", tiny, "--a", "gs:k=2", "--b", "gs:k=1"}).exit_code == kExitOk);
  CHECK(run_command({"compare", tiny, "--a", "gs:k=1", "--b", "gs:k=2"}).exit_code == kExitNegative);
  CHECK(run_command({"audit", tiny, "--mech", "gs:k=2", "--admission", "2:s1"}).exit_code == kExitOk);
  CHECK(run_command({"audit", tiny, "--mech", "gs", "--admission", "4:s3"}).exit_code == kExitOk);
  const auto chinese = data("chinese_example.json");
  CHECK(run_command({"equilibrium", chinese, "--mech", "chinese:e=2"}).exit_code == kExitNegative);
  const auto tmp = std::filesystem::temp_directory_path() / "matchlab_reported.json";
  std::ofstream(tmp) << R"({"preferences": {"i": ["s1", "s2"], "j": ["s3", "s2"], "k": ["s2", "s1"],
                           "m": ["s2", "s3", "s1"], "t": ["s4"]}})";
  const auto eq = run_command({"equilibrium", chinese, "--mech", "chinese:e=2", "--reported", tmp.string()});
  CHECK(eq.exit_code == kExitOk);
  CHECK(eq.out.find("{i:s1, j:s3, k:s2, m:∅, t:s4}") != std::string::npos);
  std::filesystem::remove(tmp);
}

TEST_CASE("usage errors") {
  CHECK(run_command({}).exit_code == kExitUsage);
  CHECK(run_command({"frobnicate"}).exit_code == kExitUsage);
  CHECK(run_command({"match", data("tiny_env.json")}).exit_code == kExitUsage);
  CHECK(run_command({"match", data("ps13_counterexample.json"), "--mech", "gs:k=0"}).exit_code == kExitUsage);
  CHECK(run_command({"match", "/nonexistent.json", "--mech", "gs"}).exit_code == kExitUsage);
  CHECK(run_command({"fixtures", "nope"}).exit_code == kExitUsage);
  CHECK(run_command({"audit", data("tiny_env.json"), "--mech", "gs", "--domain", "weird"}).exit_code == kExitUsage);
  CHECK(run_command({"match", data("ps13_counterexample.json"), "--mech", "gs", "--format", "xml"}).exit_code ==
        kExitUsage);
  CHECK(run_command({"--help"}).exit_code == kExitOk);

  const auto tmp = std::filesystem::temp_directory_path() / "matchlab_bad.json";
  std::ofstream(tmp) << "{\n  \"students\": [\"a\"],\n  \"schools\": [{\"name\": \"x\", \"capacity\": \"one\"}]\n}\n";
  const auto r = run_command({"match", tmp.string(), "--mech", "gs"});
  CHECK(r.exit_code == kExitUsage);
  CHECK(r.err.find("capacity") != std::string::npos);
  CHECK(r.err.find("line 3") != std::string::npos);
  std::filesystem::remove(tmp);
}

TEST_CASE("evaluation cap") {
  const auto ps13 = data("ps13_counterexample.json");
  const auto r = run_command({"audit", ps13, "--mech", "gs"});
  CHECK(r.exit_code == kExitCap);
  CHECK(r.err.find("--cap") != std::string::npos);
  CHECK(run_command({"audit", data("tiny_env.json"), "--mech", "gs", "--cap", "10"}).exit_code == kExitCap);
  {
    ScopedEnv env("MATCHLAB_CAP", "10");
    CHECK(run_command({"audit", data("tiny_env.json"), "--mech", "gs"}).exit_code == kExitCap);
    // the flag wins over the variable
    CHECK(run_command({"audit", data("tiny_env.json"), "--mech", "gs", "--cap", "100000000"}).exit_code == kExitOk);
  }
}
