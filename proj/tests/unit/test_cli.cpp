// Runs the rcm binary and checks exit codes, error records and artifacts.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rcm_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(RCM_BINARY) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

}  // namespace

TEST(Cli, PowerAuditSucceeds) {
  const fs::path dir = scratch("power");
  const Outcome o = run("verify --check power --samples 100000 -o " + (dir / "out").string(), dir);
  EXPECT_EQ(o.code, 0) << o.err;
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "verify.json"));
  for (const auto& a : summary["audits"]) EXPECT_EQ(a["violations"], 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(Cli, ConstantCorrectorIsTwiceIdentity) {
  const fs::path dir = scratch("corrector");
  const Outcome o = run("corrector --law constant -o " + (dir / "out").string(), dir);
  ASSERT_EQ(o.code, 0) << o.err;
  const auto summary = nlohmann::json::parse(slurp(dir / "out" / "corrector.json"));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(summary["sigma2"][i][j].get<double>(), i == j ? 2.0 : 0.0, 1e-9);
    }
  }
}

TEST(Cli, InadmissibleMomentsExitOneWithRecord) {
  const fs::path dir = scratch("moments");
  const Outcome o = run("env --p 2 --q 2 -o " + (dir / "out").string(), dir);
  EXPECT_EQ(o.code, 1);
  const auto rec = nlohmann::json::parse(o.err);
  EXPECT_EQ(rec["error"], "validation");
  EXPECT_EQ(rec["exit_code"], 1);
  EXPECT_NE(rec["message"].get<std::string>().find("1/p + 1/q < 2/(d-1)"), std::string::npos);
}

TEST(Cli, UnknownKeyAndMissingSubcommandExitOne) {
  const fs::path dir = scratch("unknown");
  EXPECT_EQ(run("env --colour blue", dir).code, 1);
  EXPECT_EQ(run("", dir).code, 1);
  EXPECT_EQ(run("env --config " + (dir / "missing.ini").string(), dir).code, 1);
}

TEST(Cli, NonconvergenceExitsTwo) {
  const fs::path dir = scratch("nonconv");
  const Outcome o = run("corrector --law lognormal --sigma 1 --max_iterations 2 -o " + (dir / "out").string(), dir);
  EXPECT_EQ(o.code, 2);
  const auto rec = nlohmann::json::parse(o.err);
  EXPECT_EQ(rec["error"], "nonconvergence");
  EXPECT_EQ(rec["details"]["iterations"], 2);
}

TEST(Cli, FailedCheckExitsThree) {
  // A very coarse invariance-principle test: n = 1 on a rough medium cannot
  // match the diffusive covariance within 10%.
  const fs::path dir = scratch("check");
  const Outcome o = run("qfclt --law lognormal --sigma 1.5 --side 8 --walk.n 1 --horizon 0.05 --replicas 2000 -o " +
                            (dir / "out").string(),
                        dir);
  EXPECT_EQ(o.code, 3) << o.out << o.err;
  const auto rec = nlohmann::json::parse(o.err);
  EXPECT_EQ(rec["error"], "check_failure");
}

TEST(Cli, ManifestReproducesArtifacts) {
  const fs::path dir = scratch("manifest");
  const std::string first = (dir / "a").string();
  ASSERT_EQ(run("walk --law pareto --p_bar 3 --q_bar 3 --replicas 300 --walk.n 4 --seed 17 -o " + first, dir).code, 0);
  const std::string second = (dir / "b").string();
  ASSERT_EQ(run("walk --config " + first + "/manifest.json -o " + second, dir).code, 0);
  for (const char* name : {"endpoints.csv", "path.csv", "walk.json", "manifest.json"}) {
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
  }
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path dir = scratch("envdir");
  const std::string cmd = "RCM_OUTPUT_DIR=" + (dir / "base").string() + " " + std::string(RCM_BINARY) +
                          " env --side 4 >/dev/null 2>&1";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_TRUE(fs::exists(dir / "base" / "env" / "environment.csv"));
}

TEST(Cli, IniConfigFile) {
  const fs::path dir = scratch("ini");
  std::ofstream(dir / "exp.ini") << "[environment]\ndimension = 2\nlaw = uniform\nlambda = 0.25\nside = 6\n";
  const Outcome o = run("corrector --config " + (dir / "exp.ini").string() + " -o " + (dir / "out").string(), dir);
  ASSERT_EQ(o.code, 0) << o.err;
  const std::string csv = slurp(dir / "out" / "corrector.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x_1,x_2,chi_1,chi_2");
}
