#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "rdc/error.hpp"

namespace rdc::cli {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run rdc(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

bool single_error_line(const std::string& err) {
  return err.rfind("error: ", 0) == 0 && err.find('\n') == err.size() - 1;
}

TEST(Cli, SolveZeroRate) {
  auto r = rdc({"solve", "dsbs:p=0.2", "--d2", "0.4", "--gamma", "0"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("rate 0.000000\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("feasible yes"), std::string::npos);
}

TEST(Cli, SolveInfeasibleExitsTwo) {
  auto r = rdc({"solve", "dsbs:p=0.2", "--d2", "0.05", "--gamma", "0",
                "--restarts", "1"});
  EXPECT_EQ(r.code, kInfeasible);
  EXPECT_NE(r.out.find("feasible no"), std::string::npos);
}

TEST(Cli, SolveEmitsStrategy) {
  auto path = temp_path("rdc_cli_strategy.json");
  auto r = rdc({"solve", "wz:p=0.2", "--d2", "0.1", "--gamma", "0", "--restarts",
                "1", "--emit-strategy", path});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_NE(text.find("\"decoder2\""), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, InputErrors) {
  auto r = rdc({"solve", "/nonexistent/s.json", "--d2", "0.1", "--gamma", "0"});
  EXPECT_EQ(r.code, kInputError);
  EXPECT_TRUE(single_error_line(r.err)) << r.err;

  auto bad = temp_path("rdc_cli_bad.json");
  std::ofstream(bad) << "{\n  \"sizes\": [1,\n}\n";
  r = rdc({"solve", bad, "--d2", "0.1", "--gamma", "0"});
  EXPECT_EQ(r.code, kInputError);
  EXPECT_NE(r.err.find(bad + ":3:"), std::string::npos) << r.err;
  std::filesystem::remove(bad);

  r = rdc({"solve", "dsbs:p=0.2", "--gamma", "0"});
  EXPECT_EQ(r.code, kInputError);
  EXPECT_TRUE(single_error_line(r.err)) << r.err;

  r = rdc({"solve", "dsbs:p=0.2", "--d2", "0.1", "--gamma", "0", "--mode", "x"});
  EXPECT_EQ(r.code, kInputError);

  r = rdc({"frobnicate"});
  EXPECT_EQ(r.code, kInputError);

  r = rdc({"sweep", "dsbs:p=0.2", "--d2", "0.4", "--gamma", "0", "--out",
           "/nonexistent/dir/x.csv"});
  EXPECT_EQ(r.code, kInputError);
  EXPECT_TRUE(single_error_line(r.err)) << r.err;
}

TEST(Cli, Help) {
  EXPECT_EQ(rdc({"--help"}).code, kOk);
  EXPECT_EQ(rdc({"solve", "--help"}).code, kOk);
}

TEST(Cli, Threshold) {
  auto r = rdc({"threshold", "dsbs:p=0.2", "--d2", "0.15"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "0.833333\n");
  r = rdc({"threshold", "dsbs:p=0.2", "--d2", "0.45"});
  EXPECT_EQ(r.out, "0.000000\n");
  r = rdc({"threshold", "dsbs:p=0.2", "--d2", "0.05"});
  EXPECT_EQ(r.code, kInfeasible);
  EXPECT_EQ(r.out, "infeasible\n");
}

TEST(Cli, SweepCsv) {
  auto path = temp_path("rdc_cli_sweep.csv");
  auto args = std::vector<std::string>{
      "sweep", "dsbs:p=0.2", "--d2", "0.15,0.4", "--gamma", "0.8:1:0.1",
      "--mode", "noncausal,causal", "--restarts", "1", "--out", path};
  auto r = rdc(args);
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "gamma,d1,d2,mode,greedy,rate,cost,dist1,dist2,feasible,restart_spread");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2u * 2u * 3u);
  std::filesystem::remove(path);

  // Without --out the CSV goes to standard output.
  args.resize(args.size() - 2);
  r = rdc(args);
  EXPECT_EQ(r.out.substr(0, header.size()), header);
}

TEST(Cli, Grids) {
  EXPECT_EQ(parse_grid("0.1,0.2"), (std::vector<double>{0.1, 0.2}));
  auto g = parse_grid("0:1:0.25");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[4], 1.0);
  EXPECT_EQ(parse_grid("0:1:0.05").size(), 21u);
  EXPECT_THROW(parse_grid("0:1:0"), InputError);
  EXPECT_THROW(parse_grid("a,b"), InputError);
}

TEST(Cli, ValidatePropertiesOnly) {
  auto path = temp_path("rdc_cli_validate.json");
  auto r = rdc({"validate", "--properties-only", "--trials", "20", "--json", path});
  EXPECT_EQ(r.code, kOk) << r.out << r.err;
  EXPECT_TRUE(std::filesystem::exists(path));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace rdc::cli
