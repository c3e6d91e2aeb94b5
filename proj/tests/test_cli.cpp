#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "plmix/serialize.hpp"

namespace fs = std::filesystem;
using namespace plmix;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded unless redirected.
Result cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" PLMIX_CLI_PATH "' " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(PLMIX_TEST_TMP) / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
  std::string simulated() const {
    const auto r = cli("simulate --N 150 --supports '4,3,2,1;1,1,2,6' --weights 0.5,0.5 "
                       "--probcens 0.3,0.3,0.4 --seed 11 --out " + path("sim"));
    EXPECT_EQ(r.status, 0);
    return path("sim/data.csv");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ConvertOrderingsToRankings) {
  std::ostringstream csv;
  write_int_csv(csv, fixtures::dublin_west_head(), "rank");
  const auto in = write("dublin.csv", csv.str());
  const auto r = cli("convert --input " + in + " --format ordering");
  ASSERT_EQ(r.status, 0);
  std::istringstream back(r.out);
  EXPECT_EQ(read_int_csv(back), fixtures::dublin_west_head_rankings());
}

TEST_F(Cli, SimulateIsByteIdentical) {
  const std::string args = "simulate --N 200 --supports '5,3,1;1,1,1' --weights 0.3,0.7 --seed 42";
  const auto a = cli(args + " --out " + path("a"));
  const auto b = cli(args + " --out " + path("b"));
  ASSERT_EQ(a.status, 0);
  ASSERT_EQ(b.status, 0);
  EXPECT_EQ(slurp(path("a/data.csv")), slurp(path("b/data.csv")));
  EXPECT_EQ(slurp(path("a/components.csv")), slurp(path("b/components.csv")));
  EXPECT_FALSE(slurp(path("a/data.csv")).empty());
  const auto c = cli(args);
  EXPECT_EQ(c.out, slurp(path("a/data.csv")));
}

TEST_F(Cli, GibbsStartsExactlyAtMapEstimate) {
  const auto data = simulated();
  ASSERT_EQ(cli("fit-map --input " + data + " --G 2 --n-start 2 --seed 3 --out " + path("map")).status, 0);
  ASSERT_EQ(cli("fit-gibbs --input " + data + " --G 2 --n-iter 40 --n-burn 10 --seed 4 --init-from " +
                path("map/map.json") + " --out " + path("gibbs"))
                .status,
            0);
  const Json map = load_json(path("map/map.json"));
  const Json summary = load_json(path("gibbs/gibbs_G2.json"));
  const RealMatrix init = detail::real_matrix_from_json(summary.at("init").at("supports"), "init");
  EXPECT_EQ(init, map_params_from_json(map).supports);
  const auto labels = map_class_from_json(map);
  const auto z = summary.at("init").at("z");
  ASSERT_EQ(z.size(), labels.size());
  for (std::size_t s = 0; s < labels.size(); ++s) EXPECT_EQ(z[s][labels[s] - 1].get<int>(), 1);
  EXPECT_EQ(load_chain(path("gibbs/chain_G2.csv")).length(), 30u);
}

TEST_F(Cli, FullWorkflowIsReproducible) {
  const auto data = simulated();
  for (const char* run : {"r1", "r2"}) {
    const std::string out = path(run);
    ASSERT_EQ(cli("fit-map --input " + data + " --G-max 2 --seed 5 --out " + out + "/map").status, 0);
    ASSERT_EQ(cli("fit-gibbs --input " + data + " --G-max 2 --n-iter 80 --n-burn 20 --seed 6 --out " +
                  out + "/gibbs")
                  .status,
              0);
    const std::string chains =
        " --chain " + out + "/gibbs/chain_G1.csv --chain " + out + "/gibbs/chain_G2.csv";
    ASSERT_EQ(cli("select --input " + data + chains + " --map " + out + "/map/map_G1.json --map " +
                  out + "/map/map_G2.json --out " + out + "/select")
                  .status,
              0);
    ASSERT_EQ(cli("ppcheck --input " + data + chains + " --seed 7 --parallel 2 --out " + out + "/ppc")
                  .status,
              0);
    ASSERT_EQ(cli("relabel --chain " + out + "/gibbs/chain_G2.csv --map " + out +
                  "/map/map_G2.json --out " + out + "/relabel")
                  .status,
              0);
  }
  for (const char* f : {"map/map.json", "gibbs/chain_G2.csv", "select/selection.json",
                        "ppc/ppcheck.json", "relabel/chain_relabeled.csv", "relabel/permutations.csv"})
    EXPECT_EQ(slurp(path(std::string("r1/") + f)), slurp(path(std::string("r2/") + f))) << f;
  const Json sel = load_json(path("r1/select/selection.json"));
  EXPECT_FALSE(sel.dump().empty());
}

TEST_F(Cli, PreflibInput) {
  const auto in = write("votes.soi", "# NUMBER ALTERNATIVES: 3\n3: 2,1\n1: 3\n");
  const auto r = cli("convert --input " + in + " --format preflib --to csv-ordering");
  ASSERT_EQ(r.status, 0);
  std::istringstream back(r.out);
  EXPECT_EQ(read_int_csv(back), (IntMatrix{{2, 1, 3}, {2, 1, 3}, {2, 1, 3}, {3, 0, 0}}));
}

TEST_F(Cli, ExitCodes) {
  const auto data = simulated();
  // validation: missing seed, bad flag, bad data
  EXPECT_EQ(cli("fit-map --input " + data + " --G 1").status, 2);
  EXPECT_EQ(cli("fit-map --input " + data + " --G 1 --seed 1 --bogus").status, 2);
  EXPECT_EQ(cli("summarize --input " + write("bad.csv", "1,1,2\n")).status, 2);
  EXPECT_EQ(cli("").status, 2);
  // I/O
  EXPECT_EQ(cli("summarize --input " + path("missing.csv")).status, 3);
  // numerical: a chain whose deviance trace is not finite
  ASSERT_EQ(cli("fit-gibbs --input " + data + " --G 1 --n-iter 20 --n-burn 0 --seed 1 --out " +
                path("g"))
                .status,
            0);
  std::string text = slurp(path("g/chain_G1.csv"));
  const auto eol = text.find('\n', text.find('\n') + 1);
  const auto last_comma = text.rfind(',', eol);
  text.replace(last_comma + 1, eol - last_comma - 1, "nan");
  const auto chain = write("nan_chain.csv", text);
  EXPECT_EQ(cli("select --input " + data + " --chain " + chain + " --post-summary mean").status, 4);
}

TEST_F(Cli, EnvironmentSuppliesFlags) {
  const auto data = simulated();
  const auto with_env = cli("fit-map --input " + data + " --G 1", "PLMIX_SEED=9");
  const auto with_flag = cli("fit-map --input " + data + " --G 1 --seed 9");
  ASSERT_EQ(with_env.status, 0);
  EXPECT_EQ(with_env.out, with_flag.out);
}

TEST_F(Cli, ConfigFileSuppliesFlags) {
  const auto data = simulated();
  const auto cfg = write("run.toml", "[fit-map]\nseed = 9\nG = 1\n");
  const auto from_file = cli("--config " + cfg + " fit-map --input " + data);
  const auto direct = cli("fit-map --input " + data + " --G 1 --seed 9");
  ASSERT_EQ(from_file.status, 0);
  EXPECT_EQ(from_file.out, direct.out);
}
