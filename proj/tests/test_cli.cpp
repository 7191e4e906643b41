#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "kcoreset/io.hpp"

using namespace kcoreset;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kcoreset-cli-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& f) const { return (dir_ / f).string(); }

  void write(const std::string& f, const std::string& text) const { std::ofstream(path(f)) << text; }

  std::string read(const std::string& f) const {
    std::ifstream in(path(f));
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  /// Runs the CLI; stdout goes to out.json, stderr to err.txt. Returns the exit code.
  int run(const std::string& args) const {
    const std::string cmd = std::string("\"") + KCORESET_CLI + "\" " + args + " > \"" + path("out.json") + "\" 2> \"" +
                            path("err.txt") + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  nlohmann::json stats() const { return nlohmann::json::parse(read("out.json")); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, OfflineSinglePoint) {
  write("p.txt", "3,4\n");
  ASSERT_EQ(run("offline --points " + path("p.txt") + " --k 1 --z 0 --eps 0.5 --out " + path("c.txt")), 0);
  EXPECT_EQ(read_points_file(path("c.txt")), (PointSet{{{3, 4}, 1}}));
  EXPECT_EQ(stats()["coreset_size"], 1);
}

TEST_F(Cli, OfflineOnLineInstanceRespectsSizeBound) {
  ASSERT_EQ(run("gen --family one-dim-lb --k 2 --z 1 --out " + path("p.txt")), 0);
  ASSERT_EQ(run("offline --points " + path("p.txt") + " --k 2 --z 1 --eps 1 --out " + path("c.txt")), 0);
  EXPECT_LE(stats()["coreset_size"].get<int>(), 25);
  EXPECT_EQ(stats()["size_bound"].get<double>(), 25.0);
}

TEST_F(Cli, MalformedLineIsReportedWithItsNumber) {
  write("p.txt", "1,2\n# comment\n3,oops\n");
  EXPECT_EQ(run("offline --points " + path("p.txt") + " --k 1 --z 0 --eps 0.5 --out " + path("c.txt")), 3);
  EXPECT_NE(read("err.txt").find("line 3"), std::string::npos) << read("err.txt");
}

TEST_F(Cli, ValidateExitCodes) {
  write("p.txt", "1\n2\n3\n4\n");
  write("bad.txt", "1,w=4\n");
  EXPECT_EQ(run("validate --points " + path("p.txt") + " --coreset " + path("p.txt") + " --k 2 --z 1 --eps 0.5"), 0);
  EXPECT_EQ(stats()["passed"], true);
  EXPECT_EQ(run("validate --points " + path("p.txt") + " --coreset " + path("bad.txt") + " --k 1 --z 0 --eps 0.1"), 2);
  EXPECT_EQ(stats()["passed"], false);
  EXPECT_FALSE(stats()["violated_condition"].is_null());
}

TEST_F(Cli, StreamOnShuffledLowerBoundInstance) {
  ASSERT_EQ(run("gen --family insertion-lb --k 4 --z 2 --eps 0.0625 --d 2 --probe-cluster 1 --probe-point 4 --out " +
                path("g.txt")),
            0);
  auto pts = read_points_file(path("g.txt"));
  std::mt19937_64 rng(5);
  std::shuffle(pts.begin(), pts.end(), rng);
  {
    std::ofstream out(path("s.txt"));
    write_points(out, pts);
  }
  ASSERT_EQ(run("stream --points " + path("s.txt") + " --k 4 --z 2 --eps 0.0625 --d 2 --out " + path("c.txt")), 0);
  EXPECT_LT(stats()["coreset_size"].get<double>(), 4 * std::pow(16 / 0.0625, 2) + 2);
  EXPECT_EQ(stats()["arrivals"], pts.size());
  EXPECT_EQ(total_weight(read_points_file(path("c.txt"))), static_cast<Weight>(pts.size()));
}

TEST_F(Cli, DynamicOnLowerBoundScenario) {
  ASSERT_EQ(run("gen --family dynamic-lb --k 2 --z 1 --eps 0.125 --d 1 --delta 4096 --probe-cluster 1 --probe-group 2 "
                "--out " + path("u.txt")),
            0);
  ASSERT_EQ(run("dynamic --updates " + path("u.txt") + " --k 2 --z 1 --eps 0.125 --exact-shadow --out " + path("c.txt")), 0);
  const auto s = stats();
  EXPECT_EQ(total_weight(read_points_file(path("c.txt"))), s["live_count"].get<Weight>());
  EXPECT_GE(s["level"].get<int>(), 0);
  write("bad.txt", "delta=4 d=1\n+ 1\n- 2\n");
  EXPECT_EQ(run("dynamic --updates " + path("bad.txt") + " --k 1 --z 0 --eps 1 --mode exact --out " + path("c.txt")), 3);
}

TEST_F(Cli, MpcAlgorithmsAndDistributions) {
  ASSERT_EQ(run("gen --family insertion-lb --k 4 --z 2 --eps 0.0625 --d 2 --out " + path("g.txt")), 0);
  std::string assign;
  for (int i = 0; i < 11; ++i) assign += "2\n";
  write("assign.txt", assign);
  ASSERT_EQ(run("mpc --points " + path("g.txt") + " --k 4 --z 2 --eps 0.5 --machines 2 --dist adversarial:" +
                path("assign.txt") + " --out " + path("c.txt")),
            0);
  EXPECT_EQ(stats()["rounds"], 2);
  ASSERT_EQ(run("mpc --points " + path("g.txt") + " --k 4 --z 2 --eps 0.5 --machines 4 --algo one-round --dist random:7 "
                "--out " + path("c.txt")),
            0);
  EXPECT_EQ(stats()["rounds"], 1);
  EXPECT_EQ(stats()["seed"], 7);
  EXPECT_EQ(run("mpc --points " + path("g.txt") + " --k 4 --z 2 --eps 0.5 --machines 4 --algo one-round --out " +
                path("c.txt")),
            3);
  ASSERT_EQ(run("mpc --points " + path("g.txt") + " --k 4 --z 2 --eps 0.5 --machines 8 --rounds 3 --algo r-round --out " +
                path("c.txt")),
            0);
  EXPECT_EQ(stats()["rounds"], 3);
}

TEST_F(Cli, CoresetFilesRoundTrip) {
  write("p.txt", "0.1,0.2\n1e-3,5,w=3\n-7.25,1\n");
  ASSERT_EQ(run("offline --points " + path("p.txt") + " --k 3 --z 0 --eps 0.5 --out " + path("c.txt")), 0);
  const auto first = read_points_file(path("c.txt"));
  std::ofstream(path("again.txt")) << [&] {
    std::ostringstream s;
    write_points(s, first);
    return s.str();
  }();
  EXPECT_EQ(read("again.txt"), read("c.txt"));
}

TEST_F(Cli, UsageErrorsAreInputErrors) {
  EXPECT_EQ(run("offline --k 1"), 3);
  EXPECT_EQ(run("gen --family nope --k 1 --z 0 --out " + path("x.txt")), 3);
  EXPECT_EQ(run("--help"), 0);
}
