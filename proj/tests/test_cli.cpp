#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qfock_cli/cli.hpp"

using qfock::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Cli, DensityCsv) {
  const Result r = invoke({"density", "--q", "0.5", "--points", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 12u);
  EXPECT_EQ(ls[0], "x,pdf");
  EXPECT_EQ(ls[1], "-2.8284271247461898,0");
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
}

TEST(Cli, OutputIsByteIdenticalAcrossRuns) {
  for (const char* cmd : {"density", "gamma"}) {
    const Result a = invoke({cmd, "--q", "0.37", "--points", "33"});
    const Result b = invoke({cmd, "--q", "0.37", "--points", "33"});
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, GammaCsvFollowsTheInvolution) {
  const Result r = invoke({"gamma", "--q", "0.5", "--points", "5"});
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  EXPECT_EQ(ls[0], "x,gamma");
  EXPECT_EQ(ls[1], "-2.8284271247461898,0");
  EXPECT_EQ(ls[3], "0,0");
  EXPECT_EQ(ls[5], "2.8284271247461898,0");
}

TEST(Cli, WcoeffColumn) {
  const Result r = invoke({"wcoeff", "--q", "0.5", "--kmax", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 10u);
  EXPECT_EQ(ls[0], "k,w_k1,contrib");
  double k, w, c;
  char comma;
  std::istringstream(ls[2]) >> k >> comma >> w >> comma >> c;
  EXPECT_EQ(k, 1.0);
  EXPECT_NEAR(w, 0.364458974501736, 1e-12);
  EXPECT_NEAR(c, w * w, 1e-15);
}

TEST(Cli, KmaxFromEnvironment) {
  ::setenv("QFOCK_KMAX", "6", 1);
  const Result r = invoke({"wcoeff", "--q", "0.5"});
  ::unsetenv("QFOCK_KMAX");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 8u);
}

TEST(Cli, Moment4Json) {
  const Result r = invoke({"moment4", "--q", "0.5", "--operator-level", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["m4_sum"].get<double>(), 10.0);
  EXPECT_NEAR(j["m4_gamma"].get<double>(), 9.18, 0.1);
  for (const char* key : {"q", "s_of_q", "tail_bound", "margin", "method", "verdict"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["verdict"], "strict");
  EXPECT_EQ(j["diagnostics"]["operator"]["level"], 6);
}

TEST(Cli, InconclusiveVerdictExitsOne) {
  const Result r = invoke({"moment4", "--q", "0.9", "--tol-quad", "0.1", "--operator-level", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("inconclusive"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], "inconclusive");
}

TEST(Cli, SweepCsvAndJson) {
  const Result r = invoke({"sweep", "--qmin", "0.1", "--qmax", "0.9", "--steps", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0], "q,m4_sum,m4_gamma,s,margin,tail");
  const Result j = invoke({"sweep", "--qmin", "0.1", "--qmax", "0.9", "--steps", "3", "--format", "json"});
  const auto arr = nlohmann::json::parse(j.out);
  ASSERT_EQ(arr.size(), 3u);
  for (const auto& row : arr) EXPECT_GT(row["margin"].get<double>(), 0.0);
}

TEST(Cli, VerifyPassesAtHalf) {
  const Result r = invoke({"verify", "--q", "0.5", "--level", "6"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const auto& it : j["items"]) {
    for (const char* key : {"name", "residual", "tolerance", "pass"}) EXPECT_TRUE(it.contains(key));
  }
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(invoke({"density", "--q", "1.5"}).code, 2);
  EXPECT_EQ(invoke({"density", "--q", "0.0000001"}).code, 2);
  EXPECT_EQ(invoke({"density", "--q", "0.5", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"density"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--qmin", "0.8", "--qmax", "0.2"}).code, 2);
  EXPECT_EQ(invoke({"density", "--q", "0.5", "-o", "/nonexistent-dir/x.csv"}).code, 2);
  EXPECT_EQ(invoke({"verify", "--q", "0.5", "--level", "12"}).code, 2);
}

TEST(Cli, HelpListsDefaults) {
  const Result r = invoke({"sweep", "--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* s : {"--qmin", "0.02", "--qmax", "0.98", "--steps", "50", "--tol-quad"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST(Cli, WritesOutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "qfock_cli_density.csv";
  const Result r = invoke({"density", "--q", "0.5", "--points", "3", "-o", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "x,pdf");
  std::filesystem::remove(path);
}

TEST(Cli, BinaryExitCodes) {
  const std::string tool = QFOCK_TOOL_PATH;
  const auto status = [&](const std::string& args) {
    const int s = std::system((tool + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status("density --q 0.5 --points 3"), 0);
  EXPECT_EQ(status("density --q 2"), 2);
}
