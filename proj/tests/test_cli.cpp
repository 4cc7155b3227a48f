#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("drlaed_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  static std::string data(const char *name) { return std::string(DRLAED_DATA_DIR) + "/" + name; }

  Result run(const std::string &args) {
    Result r;
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        std::string("\"") + DRLAED_CLI_PATH + "\" " + args + " 2>\"" + err.string() + "\"";
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe)
      return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
      r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }
};

} // namespace

TEST_F(Cli, SolveToyIsOptimal) {
  const auto r = run("solve --network " + data("toy.json") + " --train " + data("toy_train.csv") +
                     " --method drcvp --theta 0.05 --alpha 0.05");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"status\": \"optimal\""), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"meta\""), std::string::npos);
}

TEST_F(Cli, SweepWritesOneRowPerTheta) {
  const auto r = run("sweep --network " + data("toy.json") + " --train " + data("toy_train.csv") +
                     " --valid " + data("toy_valid.csv") + " --method drccp-robust --thetas 0,0.01,0.02");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# drlaed ", 0), 0u) << line;
  std::getline(in, line);
  EXPECT_EQ(line, "theta,method,status,cost,violation_freq,n_valid");
  int rows = 0;
  while (std::getline(in, line))
    rows += !line.empty();
  EXPECT_EQ(rows, 3);
}

TEST_F(Cli, PtdfTriangleEntry) {
  const auto r = run("ptdf --network " + data("triangle.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n1->2,0,-0.666666666667,-0.333333333333\n"), std::string::npos) << r.out;
}

TEST_F(Cli, MalformedJsonExitsTwoWithPosition) {
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{\n  \"buses\": [1,\n  2\n";
  const auto r = run("ptdf --network " + bad.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("column"), std::string::npos) << r.err;
}

TEST_F(Cli, BadInputsExitTwo) {
  EXPECT_EQ(run("solve --network " + dir.string() + "/missing.json --train x.csv").code, 2);
  EXPECT_EQ(run("sweep --network " + data("toy.json") + " --train " + data("toy_train.csv") +
                " --valid " + data("toy_valid.csv") + " --thetas 0.2,0.1")
                .code,
            2);
  EXPECT_EQ(run("solve --network " + data("toy.json") + " --train " + data("toy_train.csv") +
                " --method nope")
                .code,
            2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, InfeasibleMasterStillExitsZero) {
  const auto r = run("solve --network " + data("toy.json") + " --train " + data("toy_train.csv") +
                     " --method drcvp --theta 1000");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"objective\": null"), std::string::npos) << r.out;
}

TEST_F(Cli, CsvOutputsAreByteIdentical) {
  const std::string gen = "gen-data --network " + data("triangle.json") + " --samples 30 --seed 5";
  const auto a = run(gen + " --out " + (dir / "a.csv").string());
  const auto b = run(gen + " --out " + (dir / "b.csv").string());
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));

  const std::string sw = "sweep --network " + data("triangle.json") + " --train " +
                         data("triangle_train.csv") + " --valid " + data("triangle_valid.csv") +
                         " --thetas 0,0.05";
  EXPECT_EQ(run(sw).out, run(sw).out);
  const auto c = run("gen-data --network " + data("triangle.json") + " --samples 30 --seed 6");
  EXPECT_NE(slurp(dir / "a.csv"), c.out);
}

TEST_F(Cli, FlagsOverrideConfig) {
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"samples": 3, "seed": 11, "capacity": 10})";
  const auto from_file = run("gen-data --res 1 --horizon 2 --config " + cfg.string());
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_NE(from_file.out.find("seed=11"), std::string::npos);
  std::istringstream in(from_file.out);
  std::string line;
  int rows = -2; // header comment + labels
  while (std::getline(in, line))
    ++rows;
  EXPECT_EQ(rows, 3);

  const auto flag = run("gen-data --res 1 --horizon 2 --seed 12 --config " + cfg.string());
  EXPECT_NE(flag.out.find("seed=12"), std::string::npos) << flag.out;
  EXPECT_NE(from_file.out.substr(0, from_file.out.find('\n')),
            flag.out.substr(0, flag.out.find('\n'))); // config hash differs too
}

TEST_F(Cli, BoundsAndEvalPipeline) {
  const fs::path sol = dir / "sol.json";
  auto r = run("solve --network " + data("triangle.json") + " --train " +
               data("triangle_train.csv") + " --method drccp-robust --theta 0.01 --out " +
               sol.string());
  ASSERT_EQ(r.code, 0) << r.err;
  r = run("eval --network " + data("triangle.json") + " --solution " + sol.string() + " --valid " +
          data("triangle_valid.csv") + " --histogram " + (dir / "h.csv").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(",drccp-robust,optimal,"), std::string::npos) << r.out;
  const std::string hist = slurp(dir / "h.csv");
  EXPECT_NE(hist.find("line,bin_lo,bin_hi,count"), std::string::npos);

  r = run("bounds --train " + data("triangle_train.csv") + " --theta 0.01");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("component,lo,hi,achieved_wc_prob,budget"), std::string::npos);
  EXPECT_NE(r.out.find("\nres0_t2,"), std::string::npos);
}
