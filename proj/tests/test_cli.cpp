#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "prs/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = prs::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("prs_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string tok;
  while (std::getline(s, tok, sep)) out.push_back(tok);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  auto out = split(text, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

double noflow_error(const std::string& method, const fs::path& dir) {
  const Result r = run({"noflow", "--method", method, "--nu", "1e-2", "-o", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(dir / "noflow.csv"));
  return std::stod(split(rows.at(1), ',').at(4));
}

}  // namespace

TEST(Cli, ConfigErrorsExitWithOne) {
  EXPECT_EQ(run({}).code, prs::cli::kConfigError);
  EXPECT_EQ(run({"frobnicate"}).code, prs::cli::kConfigError);
  EXPECT_EQ(run({"profile", "--method", "rt"}).code, prs::cli::kConfigError);
  EXPECT_EQ(run({"profile", "--nu", "abc"}).code, prs::cli::kConfigError);
  const fs::path dir = scratch("bad");
  const Result neg = run({"profile", "--nu", "-1", "-o", dir.string()});
  EXPECT_EQ(neg.code, prs::cli::kConfigError);
  EXPECT_NE(neg.err.find("nu"), std::string::npos);
  EXPECT_EQ(run({"mesh", "--mesh", "shishkin", "--ny0", "5", "-o", dir.string()}).code, prs::cli::kConfigError);
  EXPECT_EQ(run({"profile", "--eta-max", "4", "-o", dir.string()}).code, prs::cli::kConfigError);
  EXPECT_EQ(run({"convergence", "--levels", "1", "-o", dir.string()}).code, prs::cli::kConfigError);
  EXPECT_EQ(run({"profile", "--config", (dir / "missing.toml").string()}).code, prs::cli::kConfigError);
}

TEST(Cli, HelpSucceeds) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("convergence"), std::string::npos);
}

TEST(Cli, ProfileFirstRow) {
  const fs::path dir = scratch("profile");
  const Result r = run({"profile", "--eta-max", "10", "--tol", "1e-10", "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(dir / "profile.csv"));
  EXPECT_EQ(rows.at(0), "eta,f,fp,fpp");
  const auto first = split(rows.at(1), ',');
  ASSERT_EQ(first.size(), 4u);
  EXPECT_EQ(first[0], "0");
  EXPECT_EQ(first[1], "0");
  EXPECT_EQ(first[2], "0");
  EXPECT_NEAR(std::stod(first[3]), 1.2325876568, 1e-9);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
}

TEST(Cli, MeshOutputs) {
  const fs::path dir = scratch("mesh");
  const Result r = run({"mesh", "--mesh", "shishkin", "--ny0", "16", "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "mesh.vtk"));
  const auto rows = lines(slurp(dir / "mesh_quality.csv"));
  const auto q = split(rows.at(1), ',');
  EXPECT_EQ(q.at(0), "1024");
  EXPECT_NEAR(std::stod(q.at(3)), M_PI / 2, 1e-12);
  const double aspect = std::stod(q.at(4));
  EXPECT_GE(aspect, 15.0);
  EXPECT_LE(aspect, 45.0);
}

TEST(Cli, NoflowContrast) {
  const double cr = noflow_error("cr", scratch("noflow_cr"));
  const double rt = noflow_error("cr-rt", scratch("noflow_rt"));
  EXPECT_GE(cr, 1e4 * rt);
}

TEST(Cli, SolveOutputs) {
  const fs::path dir = scratch("solve");
  const Result r = run({"solve", "--method", "cr-bdm", "--ny0", "8", "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(dir / "solve.csv"));
  EXPECT_EQ(rows.size(), 2u);
  const std::string vtk = slurp(dir / "solution.vtk");
  EXPECT_NE(vtk.find("SCALARS err_h1"), std::string::npos);
  EXPECT_NE(vtk.find("SCALARS pressure"), std::string::npos);
  EXPECT_NE(vtk.find("SCALARS divergence"), std::string::npos);
}

TEST(Cli, ConvergenceShishkinDecreases) {
  const fs::path dir = scratch("conv");
  const Result r = run({"convergence", "--nu", "1e-4", "--method", "cr-rt", "--mesh", "shishkin", "--ny0", "8",
                        "--levels", "4", "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(slurp(dir / "convergence.csv"));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "level,method,mesh,h_max,n_dofs,vel_h1,press_l2,rate_v,rate_p,layer_fraction");
  double prev = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = split(rows[i], ',');
    EXPECT_EQ(c.at(1), "cr-rt");
    EXPECT_EQ(c.at(2), "shishkin");
    const double v = std::stod(c.at(5));
    EXPECT_LT(v, prev);
    prev = v;
    EXPECT_TRUE(fs::exists(dir / ("error_cr-rt_shishkin_L" + std::to_string(i - 1) + ".vtk")));
  }
  // one summary line per level
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST(Cli, DeterministicOutputs) {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const std::vector<std::string> base{"convergence", "--method", "cr", "--ny0", "4", "--levels", "2"};
  auto args_a = base;
  args_a.insert(args_a.end(), {"-o", a.string()});
  auto args_b = base;
  args_b.insert(args_b.end(), {"-o", b.string(), "--threads", "3", "--parallel-levels"});
  ASSERT_EQ(run(args_a).code, 0);
  ASSERT_EQ(run(args_b).code, 0);
  EXPECT_EQ(slurp(a / "convergence.csv"), slurp(b / "convergence.csv"));
  EXPECT_EQ(slurp(a / "error_cr_uniform_L1.vtk"), slurp(b / "error_cr_uniform_L1.vtk"));
}

TEST(Cli, DumpConfigRoundTrip) {
  const fs::path a = scratch("dump_a");
  const fs::path b = scratch("dump_b");
  fs::create_directories(a);
  const fs::path cfg = a / "run.toml";
  ASSERT_EQ(run({"convergence", "--nu", "2e-3", "--method", "cr-bdm", "--mesh", "shishkin", "--ny0", "4", "--levels",
                 "2", "--tau", "0.1", "-o", a.string(), "--dump-config", cfg.string()})
                .code,
            0);
  ASSERT_TRUE(fs::exists(cfg));
  // -o overrides the output directory stored in the file
  ASSERT_EQ(run({"convergence", "--config", cfg.string(), "-o", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "convergence.csv"), slurp(b / "convergence.csv"));
  const std::string csv = slurp(b / "convergence.csv");
  EXPECT_NE(csv.find("cr-bdm,shishkin"), std::string::npos);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path dir = scratch("override");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "c.toml");
    f << "method = \"cr\"\nny0 = 4\n";
  }
  ASSERT_EQ(run({"noflow", "--config", (dir / "c.toml").string(), "--method", "cr-rt", "-o", dir.string()}).code, 0);
  const auto rows = lines(slurp(dir / "noflow.csv"));
  EXPECT_EQ(split(rows.at(1), ',').at(0), "cr-rt");
  EXPECT_EQ(split(rows.at(1), ',').at(3), "4");
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = PRS_CLI_PATH;
  const fs::path dir = scratch("binary");
  const int ok = std::system((bin + " profile -o " + dir.string() + " > /dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const int bad = std::system((bin + " mesh --levels 0 -o " + dir.string() + " > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(bad), 1);
  EXPECT_TRUE(fs::exists(dir / "profile.csv"));
}
