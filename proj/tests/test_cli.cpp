#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "cqbound/io.hpp"
#include "cqbound/states.hpp"

namespace {

std::string& cli_binary() {
  static std::string path;
  return path;
}

std::string& work_dir() {
  static std::string dir;
  return dir;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path = work_dir() + "/stdout.txt";
  const std::string err_path = work_dir() + "/stderr.txt";
  const std::string cmd = cli_binary() + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = cqbound::read_text_file(out_path);
  result.err = cqbound::read_text_file(err_path);
  return result;
}

TEST(Cli, VersionFlag) {
  const RunResult r = run_cli("--version");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, MissingRequiredFlagFails) {
  EXPECT_EQ(run_cli("certify --rho nowhere.json").exit_code, 1);
}

TEST(Cli, SaturateThenCertifyRoundTrip) {
  const std::string prefix = work_dir() + "/sat";
  const RunResult sat = run_cli("saturate --dim-b 3 --eps 0.2 --out " + prefix);
  ASSERT_EQ(sat.exit_code, 0) << sat.err;
  for (const char* suffix : {".rho.json", ".sigma.json", ".report.json", ".report.json.manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(prefix + suffix)) << suffix;

  const cqbound::Json report = cqbound::parse_json_text(cqbound::read_text_file(prefix + ".report.json"));
  EXPECT_TRUE(report["satisfied"].get<bool>());
  EXPECT_NEAR(report["margin"].get<double>(), 0.0, 1e-8);
  EXPECT_NEAR(report["epsilon"].get<double>(), 0.2, 1e-12);

  const cqbound::Json manifest =
      cqbound::parse_json_text(cqbound::read_text_file(prefix + ".report.json.manifest.json"));
  EXPECT_EQ(manifest["command"], "saturate");
  EXPECT_TRUE(manifest.contains("version"));

  const RunResult cert =
      run_cli("certify --rho " + prefix + ".rho.json --sigma " + prefix + ".sigma.json");
  EXPECT_EQ(cert.exit_code, 0) << cert.err;
  const cqbound::Json direct = cqbound::parse_json_text(cert.out);
  EXPECT_NEAR(direct["margin"].get<double>(), 0.0, 1e-8);
}

TEST(Cli, CertifyIdenticalStatesClamps) {
  const std::string path = work_dir() + "/self.json";
  cqbound::write_text_file(path, cqbound::to_json(cqbound::sample_cq(2, 3, 5)).dump());
  const RunResult r = run_cli("certify --rho " + path + " --sigma " + path);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const cqbound::Json report = cqbound::parse_json_text(r.out);
  EXPECT_FALSE(report["epsilon_valid"].get<bool>());
  EXPECT_EQ(report["lhs"].get<double>(), 0.0);
  EXPECT_TRUE(report["satisfied"].get<bool>());
}

TEST(Cli, MalformedInputFailsCleanly) {
  const std::string path = work_dir() + "/broken.json";
  cqbound::write_text_file(path, "{\"kind\": \"cq\", ");
  const RunResult r = run_cli("certify --rho " + path + " --sigma " + path);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, WrongStateKindFailsCleanly) {
  const std::string path = work_dir() + "/density.json";
  cqbound::write_text_file(path, cqbound::to_json(cqbound::sample_density(2, 1)).dump());
  const RunResult r = run_cli("certify --rho " + path + " --sigma " + path);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("expected a cq state"), std::string::npos);
}

TEST(Cli, SweepWritesCsvGrid) {
  const std::string out = work_dir() + "/sweep.csv";
  const RunResult r =
      run_cli("sweep --dim-b 2 3 --eps 0.1 0.2 --trials 10 --alphabet 2 --seed 3 --out " + out);
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const std::string csv = cqbound::read_text_file(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "d,epsilon,lhs,rhs,margin,satisfied");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);  // header + 4 cells
  EXPECT_TRUE(std::filesystem::exists(out + ".manifest.json"));
}

TEST(Cli, ExploreIsByteReproducible) {
  const std::string args =
      "explore --conjecture qc --alphabet 2 --dim-b 2 --eps 0.2 0.35 --trials 15 "
      "--refine-steps 8 --seed 4 --out ";
  const RunResult a = run_cli(args + work_dir() + "/search_a.csv");
  const RunResult b = run_cli(args + work_dir() + "/search_b.csv");
  EXPECT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(b.exit_code, 0) << b.err;
  const std::string csv_a = cqbound::read_text_file(work_dir() + "/search_a.csv");
  const std::string csv_b = cqbound::read_text_file(work_dir() + "/search_b.csv");
  EXPECT_EQ(csv_a, csv_b);
  EXPECT_EQ(csv_a.substr(0, csv_a.find('\n')), "conjecture,d1,d2,epsilon,best_margin,trials,seed");
}

TEST(Cli, ExploreJsonFormatParses) {
  const RunResult r = run_cli(
      "explore --conjecture fq --dim-a 2 --dim-b 2 --eps 0.3 --trials 10 --refine-steps 4 "
      "--seed 2 --format json");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const cqbound::Json record = cqbound::parse_json_text(r.out);
  EXPECT_EQ(record["config"]["conjecture"], "fq");
  ASSERT_EQ(record["cells"].size(), 1u);
  EXPECT_FALSE(record["cells"][0]["violation_candidate"].get<bool>());
}

TEST(Cli, TruncateDefaultProfile) {
  const RunResult r =
      run_cli("truncate --alphabet 12 --dim-b 2 --eps 0.15 --levels 3 6 12 --seed 2");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const cqbound::Json body = cqbound::parse_json_text(r.out);
  ASSERT_EQ(body["steps"].size(), 3u);
  EXPECT_TRUE(body.contains("epsilon_full"));
  EXPECT_TRUE(body["steps"][2]["report"]["satisfied"].get<bool>());
}

TEST(Cli, EofEstimateOnBellState) {
  cqbound::ComplexMatrix bell(4, 4);
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  const std::string path = work_dir() + "/bell.json";
  cqbound::write_text_file(path, cqbound::to_json(cqbound::make_density(std::move(bell))).dump());
  const RunResult r = run_cli("eof --rho " + path + " --dim-a 2 --dim-b 2 --starts 8 --seed 1");
  EXPECT_EQ(r.exit_code, 0) << r.err;
  const cqbound::Json result = cqbound::parse_json_text(r.out);
  EXPECT_NEAR(result["value"].get<double>(), 1.0, 1e-9);
  EXPECT_TRUE(result["converged"].get<bool>());
}

}  // namespace

int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  if (argc < 2) {
    std::cerr << "usage: test_cli <path-to-cqbound-binary>\n";
    return 1;
  }
  cli_binary() = argv[1];
  work_dir() = testing::TempDir() + "cqbound_cli_tests";
  std::filesystem::create_directories(work_dir());
  return RUN_ALL_TESTS();
}
