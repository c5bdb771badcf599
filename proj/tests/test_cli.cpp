#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(LPINIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("lpinit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenWritesHeaderAndSamples) {
  ASSERT_EQ(run("gen --t-end 1 --dt 0.01 -o " + path("s.csv")), 0);
  EXPECT_EQ(line_count(path("s.csv")), 102u);
  EXPECT_EQ(slurp(path("s.csv")).rfind("t,x\n0,1\n", 0), 0u);
}

TEST_F(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("train --init magic"), 1);
  EXPECT_EQ(run("gen --dt -1 -o " + path("x.csv")), 1);
  EXPECT_EQ(run("table --config " + path("missing.json")), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, NumericFailureExitsWithTwo) {
  // A huge initial state overflows the integrator.
  std::ofstream(path("c.json")) << R"({"lorenz": {"s0": [1e200, 1e200, -1e200]}})";
  EXPECT_EQ(run("gen --config " + path("c.json") + " --t-end 1 -o " + path("s.csv")), 2);
}

TEST_F(Cli, FitLpcOnSuppliedSeries) {
  ASSERT_EQ(run("gen --t-end 30 --t-skip 5 -o " + path("s.csv")), 0);
  std::ofstream(path("c.json")) << R"({"n_train": 1500, "n_test": 500})";
  ASSERT_EQ(run("fit-lpc --series " + path("s.csv") + " --horizon 2 --config " + path("c.json") + " -o " +
                path("a.csv")),
            0);
  const std::string line = slurp(path("a.csv"));
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
}

TEST_F(Cli, TrainEmitsTraceAndModel) {
  std::ofstream(path("c.json")) << R"({"lorenz": {"t_end": 20, "t_skip": 2}, "n_train": 1000, "n_test": 300})";
  ASSERT_EQ(run("train --config " + path("c.json") + " --init lpc --horizon 5 --epochs 5 --out-dir " + path("run")),
            0);
  EXPECT_EQ(slurp(path("run/trace.csv")).rfind("epoch,sse,lambda,accepted\n", 0), 0u);
  const auto model = nlohmann::json::parse(slurp(path("run/model.json")));
  EXPECT_EQ(model.at("layers").size(), 3u);
  EXPECT_FALSE(fs::exists(path("run/rotation.csv")));

  ASSERT_EQ(run("train --config " + path("c.json") +
                " --init lpc-improved --objective first-epoch --ortho cayley --iters 1 --horizon 2 --epochs 2"
                " --out-dir " +
                path("imp")),
            0);
  const std::string rot = slurp(path("imp/rotation.csv"));
  EXPECT_EQ(std::count(rot.begin(), rot.end(), ','), 19);
}

TEST_F(Cli, TableTwiceIsByteIdentical) {
  std::ofstream(path("c.json")) << R"({
    "lorenz": {"t_end": 15, "t_skip": 2}, "n_train": 800, "n_test": 200,
    "horizons": [1, 5], "seeds": [1, 2], "train": {"max_epochs": 3}, "init": {"iters": 1},
    "cache_dir": ")" + path("cache") + R"("})";
  ASSERT_EQ(run("table --config " + path("c.json") + " --out-dir " + path("a")), 0);
  ASSERT_EQ(run("table --config " + path("c.json") + " --out-dir " + path("b")), 0);
  const std::string a = slurp(path("a/report.csv"));
  EXPECT_EQ(a, slurp(path("b/report.csv")));
  EXPECT_EQ(line_count(path("a/report.csv")), 1u + 2u + 3u * 2u * 2u);
  EXPECT_TRUE(fs::exists(path("a/table.txt")));
}

TEST_F(Cli, TableWithNoMethods) {
  std::ofstream(path("c.json")) << R"({"methods": [], "lorenz": {"t_end": 5, "t_skip": 1}, "n_train": 100})";
  ASSERT_EQ(run("table --config " + path("c.json") + " --out-dir " + path("t")), 0);
  EXPECT_EQ(line_count(path("t/report.csv")), 1u);
}

TEST_F(Cli, PlotWritesSvg) {
  std::ofstream(path("c.json")) << R"({"lorenz": {"t_end": 20, "t_skip": 2}, "n_train": 1000, "n_test": 300,
    "train": {"max_epochs": 2}})";
  ASSERT_EQ(run("plot --config " + path("c.json") + " --horizon 5 --methods linear,nn-lpc -o " + path("f.svg")), 0);
  const std::string svg = slurp(path("f.svg"));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("</svg>") + 7, svg.size());
}
