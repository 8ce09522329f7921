#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ends_lab_cli_" + name);
  fs::remove_all(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(ENDS_LAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST(Cli, GeometryVolumeWritesCsvAndManifest) {
  const auto out = scratch("volume");
  ASSERT_EQ(run("geometry volume --center endN:4,core --r 1,8 --out " + out.string()), 0);
  EXPECT_EQ(first_line(out / "volume.csv"), "region,s,r,V,V2,ratio");
  const auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(man["subcommand"], "geometry volume");
  EXPECT_EQ(man["params"]["n"], 3);
  EXPECT_EQ(man["params"]["m"], 5);
  EXPECT_TRUE(man.contains("seed"));
  EXPECT_TRUE(man.contains("wall_time_s"));
  EXPECT_TRUE(man.contains("artifacts"));
}

TEST(Cli, OverridesAndJsonFormat) {
  const auto out = scratch("json");
  ASSERT_EQ(run("geometry volume --center endM:3 --r 2 --m 6 --format json --out " + out.string()), 0);
  const auto j = nlohmann::json::parse(slurp(out / "volume.json"));
  const auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(man["params"]["m"], 6);
  EXPECT_FALSE(j.empty());
}

TEST(Cli, ConfigFile) {
  const auto out = scratch("config");
  fs::create_directories(out);
  {
    std::ofstream cfg(out / "model.cfg");
    cfg << "n = 4\nm = 7\nseed = 17\n";
  }
  ASSERT_EQ(run("--config " + (out / "model.cfg").string() + " geometry volume --center core --r 1 --out " +
                out.string()),
            0);
  const auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(man["params"]["n"], 4);
  EXPECT_EQ(man["params"]["m"], 7);
  EXPECT_EQ(man["seed"], 17);
}

TEST(Cli, CounterexampleColumns) {
  const auto out = scratch("counter");
  ASSERT_EQ(run("maximal counterexample --s 10,20 --out " + out.string()), 0);
  const auto csv = slurp(out / "counterexample.csv");
  EXPECT_EQ(first_line(out / "counterexample.csv"), "s,uncentered,centered,ratio,r_star,r_predicted");
  EXPECT_NE(csv.find(",25\n"), std::string::npos);
}

TEST(Cli, KernelRow) {
  const auto out = scratch("kernel");
  ASSERT_EQ(run("heat kernel --C 1 --x core --y core --t 4 --d 1 --out " + out.string()), 0);
  const auto csv = slurp(out / "kernel.csv");
  EXPECT_EQ(first_line(out / "kernel.csv"), "t,regime,d,kernel,mass,tail_bound");
  EXPECT_NE(csv.find("core_core"), std::string::npos);
  EXPECT_NE(csv.find("0.1174266"), std::string::npos);
}

TEST(Cli, OracleRerunsAreByteIdentical) {
  const auto a = scratch("oracle_a"), b = scratch("oracle_b");
  ASSERT_EQ(run("oracle compare --trials 10 --samples 5000 --seed 4 --out " + a.string()), 0);
  ASSERT_EQ(run("oracle compare --trials 10 --samples 5000 --seed 4 --out " + b.string()), 0);
  EXPECT_EQ(slurp(a / "oracle.json"), slurp(b / "oracle.json"));
  EXPECT_EQ(slurp(a / "oracle_rows.csv"), slurp(b / "oracle_rows.csv"));
  const auto j = nlohmann::json::parse(slurp(a / "oracle.json"));
  EXPECT_EQ(j["trials"], 10);
  EXPECT_TRUE(j.contains("max_rel_dev"));
}

TEST(Cli, Errors) {
  const auto out = scratch("errors");
  EXPECT_EQ(run("--config /nonexistent/file.cfg geometry volume --out " + out.string()), 1);
  EXPECT_EQ(run("geometry volume --no-such-flag --out " + out.string()), 1);
  EXPECT_EQ(run("maximal eval --f 'endQ:[1,2):1' --out " + out.string()), 1);
  EXPECT_EQ(run("--n 6 --m 5 geometry volume --out " + out.string()), 1);
  EXPECT_EQ(run(""), 1);
}
