#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(GENCONC_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string sample(const std::string& name) { return std::string(GENCONC_SAMPLES) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "genconc_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(Cli, PureBell) {
  const CliResult r = run("pure -i " + sample("bell.json"));
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["d"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["E"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["C"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, PureNonTwoLevelHasNoD) {
  const fs::path f = scratch("three_level.json");
  write(f, R"({"n": 3, "a": [[0.7, 0, 0], [0, 0.5, 0], [0, 0, 0.5099019513592785]]})");
  const CliResult r = run("pure --normalize -i " + f.string());
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["d"].is_null());
  EXPECT_FALSE(j["two_level"].get<bool>());
  EXPECT_GT(j["E"].get<double>(), 0.0);
}

TEST(Cli, PmatrixPublishedList) {
  const CliResult r = run("pmatrix --k 1 --family sym --paper-explicit");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j["entries"].size(), 16u);
  EXPECT_EQ(j["entries"][0], json::array({1, 16, 1.0}));
  bool saw_negative = false;
  for (const auto& e : j["entries"]) {
    if (e[0] == 3 && e[1] == 14) {
      EXPECT_EQ(e[2].get<double>(), -1.0);
      saw_negative = true;
    }
  }
  EXPECT_TRUE(saw_negative);
  EXPECT_EQ(j["comparison_with_derived"]["mismatches_on_support"], 4);
}

TEST(Cli, PmatrixDenseAndCsv) {
  const CliResult dense = run("pmatrix --k 2 --dense");
  ASSERT_EQ(dense.status, 0);
  EXPECT_EQ(json::parse(dense.out)["p"].size(), 64u);
  const CliResult csv = run("pmatrix --k 1 --format csv");
  ASSERT_EQ(csv.status, 0);
  EXPECT_EQ(csv.out.rfind("2,15,1", 0), 0u);
}

TEST(Cli, MixedRankOne) {
  const CliResult r = run("mixed -i " + sample("sym_pure_density.json") + " --family sym");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["raw"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["eof"].get<double>(), 2.0, 1e-9);
}

TEST(Cli, MixedAllMethodsAgree) {
  const CliResult r = run("mixed -i " + sample("sym_rank2_density.json") + " --method all");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["raw"].get<double>(), 0.4, 1e-12);
  for (const auto& [name, entry] : j["method_agreement"].items()) {
    EXPECT_LE(entry["max_difference"].get<double>(), 1e-8) << name;
  }
}

TEST(Cli, EnsembleInputMatchesDensityInput) {
  const json a = json::parse(run("mixed -i " + sample("sym_rank2_ensemble.json")).out);
  const json b = json::parse(run("mixed -i " + sample("sym_rank2_density.json")).out);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(a["lambdas"][i].get<double>(), b["lambdas"][i].get<double>(), 1e-12);
  }
}

TEST(Cli, DecomposeRoundTrip) {
  const CliResult r = run("decompose -i " + sample("sym_rank2_density.json") + " --family sym");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  ASSERT_TRUE(j["equalized"].is_object());
  for (const auto& c : j["equalized_concurrences"]) EXPECT_NEAR(c.get<double>(), 0.4, 1e-6);
  for (const char* key : {"optimal", "equalized"}) {
    const fs::path f = scratch(std::string(key) + ".json");
    write(f, j[key].dump());
    const json again = json::parse(run("mixed --family sym -i " + f.string()).out);
    ASSERT_EQ(again["lambdas"].size(), j["lambdas"].size());
    for (std::size_t i = 0; i < again["lambdas"].size(); ++i) {
      EXPECT_NEAR(again["lambdas"][i].get<double>(), j["lambdas"][i].get<double>(), 1e-8) << key;
    }
  }
}

TEST(Cli, ConstructThenPure) {
  const fs::path f = scratch("state.json");
  const CliResult c = run("construct -i " + sample("recursive_k2.json") + " -o " + f.string());
  ASSERT_EQ(c.status, 0);
  const json j = json::parse(run("pure -i " + f.string()).out);
  EXPECT_EQ(j["n"], 8);
  EXPECT_EQ(j["levels"]["n"], 4);
  EXPECT_EQ(j["levels"]["m"], 4);
  const json s = json::parse(run("construct -i " + sample("sym_be.json")).out);
  EXPECT_EQ(s["n"], 4);
}

TEST(Cli, DeterministicOutput) {
  EXPECT_EQ(run("sample --k 3 --count 5 --seed 9").out, run("sample --k 3 --count 5 --seed 9").out);
  EXPECT_NE(run("sample --k 3 --count 5 --seed 9").out, run("sample --k 3 --count 5 --seed 10").out);
  EXPECT_EQ(run("verify --k-max 2 --samples 50 --seed 4").out, run("verify --k-max 2 --samples 50 --seed 4").out);
  EXPECT_EQ(run("decompose -i " + sample("sym_rank2_density.json")).out,
            run("decompose -i " + sample("sym_rank2_density.json")).out);
}

TEST(Cli, SampleOutputIsNormalizedAndConstructible) {
  const CliResult r = run("sample --family sym --count 3 --seed 2");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j["params"].size(), 3u);
  const fs::path f = scratch("sym_param.json");
  write(f, j["params"][1].dump());
  EXPECT_EQ(run("construct -i " + f.string()).status, 0);
}

TEST(Cli, VerifyReport) {
  const CliResult r = run("verify --k-min 1 --k-max 3 --samples 100 --seed 1");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j["results"].size(), 3u);
  for (const auto& row : j["results"]) {
    EXPECT_TRUE(row["passed"].get<bool>());
    EXPECT_LT(row["max_det_residual"].get<double>(), 1e-8);
  }
  const CliResult csv = run("verify --k-max 1 --samples 10 --format csv");
  EXPECT_EQ(csv.out.rfind("failures,k,", 0), 0u);
}

TEST(Cli, ExitCodes) {
  const fs::path bad = scratch("bad.json");
  write(bad, "{not json");
  EXPECT_EQ(run("pure -i " + bad.string()).status, 2);
  EXPECT_EQ(run("pure -i /nonexistent/file.json").status, 2);
  EXPECT_EQ(run("pmatrix --k 5").status, 2);
  EXPECT_EQ(run("verify --tol 0.5").status, 2);
  EXPECT_EQ(run("verify --tol 0").status, 2);
  EXPECT_EQ(run("sample --count 0").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);

  const fs::path unnorm = scratch("unnorm.json");
  write(unnorm, R"({"n": 2, "a": [[1, 0], [0, 1]]})");
  EXPECT_EQ(run("pure -i " + unnorm.string()).status, 2);

  // e_1 (x) e_1 is outside every family subspace
  json m = json::array();
  for (int r = 0; r < 16; ++r) {
    json row = json::array();
    for (int c = 0; c < 16; ++c) row.push_back(r == 0 && c == 0 ? 1.0 : 0.0);
    m.push_back(row);
  }
  const fs::path out_of_class = scratch("product.json");
  write(out_of_class, json{{"dim", 16}, {"m", m}}.dump());
  EXPECT_EQ(run("mixed -i " + out_of_class.string()).status, 4);
  EXPECT_EQ(run("mixed --family sym -i " + out_of_class.string()).status, 4);
}
