#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "support.hpp"

namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Result cli(const std::string& args, const std::string& env = "") {
  ts::TempDir tmp;
  const auto log = tmp / "out.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + std::string(EPIHUMAT_CLI) + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = ts::read_file(log);
  return r;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, ValidatePreset) {
  const auto r = cli("validate --scenario " + quoted(ts::presets_dir() / "scenario3.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("ok"), std::string::npos);
  EXPECT_EQ(cli("validate " + quoted(ts::presets_dir() / "scenario1.json")).code, 0);
}

TEST(Cli, ValidateListsProblems) {
  ts::TempDir tmp;
  auto text = ts::read_file(ts::presets_dir() / "scenario3.json");
  text.replace(text.find("\"p_icud\": 0.31"), 14, "\"p_icud\": 1.5");
  ts::write_file(tmp / "bad.json", text);
  const auto r = cli("validate --scenario " + quoted(tmp / "bad.json"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.output.find("p_icud out of [0,1]"), std::string::npos) << r.output;

  ts::write_file(tmp / "novirus.json", R"({"schema_version": 1, "scenario_kind": "NoMeasures",
    "initial_infected_fraction": 0.01,
    "population": {"survey": "a", "census": "b", "profile_tree": "c", "tract_map": "d", "target_size": 10}})");
  const auto r2 = cli("validate --scenario " + quoted(tmp / "novirus.json"));
  EXPECT_EQ(r2.code, 3);
  EXPECT_NE(r2.output.find("missing required section 'virus'"), std::string::npos) << r2.output;

  ts::write_file(tmp / "broken.json", "{");
  EXPECT_EQ(cli("validate " + quoted(tmp / "broken.json")).code, 3);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("fly").code, 2);
  EXPECT_EQ(cli("run").code, 2);
  EXPECT_EQ(cli("run --scenario x.json --replicates 0").code, 2);
  EXPECT_EQ(cli("run --scenario x.json --replicates -3").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, MissingFile) {
  EXPECT_EQ(cli("validate --scenario /nonexistent/none.json").code, 4);
  EXPECT_EQ(cli("run --scenario /nonexistent/none.json").code, 4);
}

TEST(Cli, RunWritesFilesAndIsReproducible) {
  ts::TempDir tmp;
  ts::write_file(tmp / "mini.json", ts::mini_scenario_json("PreventiveMeasures", 300, 15));
  const auto a = tmp / "a", b = tmp / "b", c = tmp / "c";
  const auto base = "run --quiet --scenario " + quoted(tmp / "mini.json") + " --replicates 3 --seed 9 ";
  const auto r = cli(base + "--plots --dump-graph " + quoted(tmp / "graph.tsv") + " --out " + quoted(a));
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"replicate_001.csv", "replicate_002.csv", "replicate_003.csv", "mean.csv", "manifest.json",
                        "mean.svg"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  EXPECT_FALSE(fs::exists(a / "replicate_004.csv"));
  EXPECT_EQ(ts::read_file(tmp / "graph.tsv").rfind("source\ttarget\tkind\ttrust\n", 0), 0u);

  ASSERT_EQ(cli(base + "--threads 3 --out " + quoted(b)).code, 0);
  for (const char* f : {"replicate_001.csv", "replicate_002.csv", "replicate_003.csv", "mean.csv", "manifest.json"}) {
    EXPECT_EQ(ts::read_file(a / f), ts::read_file(b / f)) << f;
  }

  // a manifest reproduces the run
  ASSERT_EQ(cli("run --quiet --scenario " + quoted(a / "manifest.json") + " --out " + quoted(c)).code, 0);
  for (const char* f : {"replicate_001.csv", "replicate_003.csv", "mean.csv", "manifest.json"}) {
    EXPECT_EQ(ts::read_file(a / f), ts::read_file(c / f)) << f;
  }
  const auto manifest = ts::read_file(a / "manifest.json");
  EXPECT_NE(manifest.find("\"root_seed\": 9"), std::string::npos);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  ts::TempDir tmp;
  ts::write_file(tmp / "mini.json", ts::mini_scenario_json("NoMeasures", 300, 5));
  const auto r = cli("run --scenario " + quoted(tmp / "mini.json") + " --replicates 1",
                     "EPIHUMAT_OUT_DIR=" + quoted(tmp / "env-out"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(tmp / "env-out" / "mean.csv"));
  EXPECT_NE(r.output.find("peak prevalence"), std::string::npos);
}

TEST(Cli, Plot) {
  ts::TempDir tmp;
  ts::write_file(tmp / "mini.json", ts::mini_scenario_json("NoMeasures", 300, 10));
  ASSERT_EQ(cli("run --quiet --scenario " + quoted(tmp / "mini.json") + " --replicates 1 --out " + quoted(tmp / "o"))
                .code,
            0);
  const auto csv = quoted(tmp / "o" / "mean.csv");
  ASSERT_EQ(cli("plot --csv " + csv + " --out " + quoted(tmp / "p1.svg")).code, 0);
  ASSERT_EQ(cli("plot --csv " + csv + " --out " + quoted(tmp / "p2.svg")).code, 0);
  EXPECT_EQ(ts::read_file(tmp / "p1.svg"), ts::read_file(tmp / "p2.svg"));
  EXPECT_EQ(cli("plot --csv " + csv + " --out " + quoted(tmp / "p3.svg") + " --series infectious,dead --title x").code,
            0);
  EXPECT_EQ(cli("plot --csv " + csv + " --out " + quoted(tmp / "p4.svg") + " --series zombies").code, 3);
  EXPECT_EQ(cli("plot --csv " + csv + " --out " + quoted(tmp / "p5.svg") + " --series ''").code, 2);
  EXPECT_EQ(cli("plot --csv " + quoted(tmp / "missing.csv") + " --out " + quoted(tmp / "p6.svg")).code, 4);
  ts::write_file(tmp / "wrong.csv", "a,b\n1,2\n");
  EXPECT_EQ(cli("plot --csv " + quoted(tmp / "wrong.csv") + " --out " + quoted(tmp / "p7.svg")).code, 3);
}
