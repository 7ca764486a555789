#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "walklab/dense_oracle.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + WALKLAB_CLI + std::string(" ") + args + " 2>/dev/null";
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

fs::path golden(const std::string& name) { return fs::path(WALKLAB_GOLDEN_DIR) / name; }

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("walklab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

// Splits on commas and newlines; numeric tokens compare with a tolerance, others exactly.
::testing::AssertionResult csv_close(const std::string& a, const std::string& b, double tol) {
  auto tokens = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',' || c == '\n') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  const auto ta = tokens(a), tb = tokens(b);
  if (ta.size() != tb.size()) return ::testing::AssertionFailure() << "token count " << ta.size() << " vs " << tb.size();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    char* ea = nullptr;
    char* eb = nullptr;
    const double x = std::strtod(ta[i].c_str(), &ea), y = std::strtod(tb[i].c_str(), &eb);
    const bool numeric = !ta[i].empty() && *ea == '\0' && !tb[i].empty() && *eb == '\0';
    if (numeric ? std::abs(x - y) > tol * std::max(1.0, std::abs(y)) : ta[i] != tb[i])
      return ::testing::AssertionFailure() << "token " << i << ": " << ta[i] << " vs " << tb[i];
  }
  return ::testing::AssertionSuccess();
}

::testing::AssertionResult json_close(const json& a, const json& b, double tol, const std::string& where = "$") {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (std::abs(x - y) > tol * std::max(1.0, std::abs(y)))
      return ::testing::AssertionFailure() << where << ": " << x << " vs " << y;
    return ::testing::AssertionSuccess();
  }
  if (a.type() != b.type()) return ::testing::AssertionFailure() << where << ": type mismatch";
  if (a.is_object()) {
    if (a.size() != b.size()) return ::testing::AssertionFailure() << where << ": key count";
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) return ::testing::AssertionFailure() << where << ": missing " << it.key();
      auto r = json_close(it.value(), b[it.key()], tol, where + "." + it.key());
      if (!r) return r;
    }
    return ::testing::AssertionSuccess();
  }
  if (a.is_array()) {
    if (a.size() != b.size()) return ::testing::AssertionFailure() << where << ": length";
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto r = json_close(a[i], b[i], tol, where + "[" + std::to_string(i) + "]");
      if (!r) return r;
    }
    return ::testing::AssertionSuccess();
  }
  if (a != b) return ::testing::AssertionFailure() << where << ": " << a.dump() << " vs " << b.dump();
  return ::testing::AssertionSuccess();
}

constexpr double kGoldenTol = 1e-9;

}  // namespace

TEST(Cli, RunCsvMatchesGolden) {
  const Result r = cli("run --side 8 --marked 3,4 --t-max 40");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,p_marked,p_nbhd,norm");
  EXPECT_TRUE(csv_close(r.out, slurp(golden("run_torus8.csv")), kGoldenTol));
}

// The golden trace itself agrees with the dense oracle.
TEST(Cli, GoldenTraceAgreesWithDenseOracle) {
  using namespace walklab;
  const GraphSpec spec = GraphSpec::torus(8, 2);
  const Graph g(spec);
  const std::size_t v = g.vertex_at({3, 4});
  const RunTrace d = dense_run_walk(spec, paper_coin(g, {v}), 40, {v});
  std::istringstream is(slurp(golden("run_torus8.csv")));
  std::string line;
  std::getline(is, line);
  std::size_t t = 0;
  while (std::getline(is, line)) {
    double pm, pn, nm;
    ASSERT_EQ(std::sscanf(line.c_str(), "%*d,%lf,%lf,%lf", &pm, &pn, &nm), 3);
    EXPECT_NEAR(pm, d.p_marked[t], 1e-12);
    EXPECT_NEAR(pn, d.p_nbhd[t], 1e-12);
    EXPECT_NEAR(nm, 1.0, 1e-12);
    ++t;
  }
  EXPECT_EQ(t, 41u);
}

TEST(Cli, RunCsvIsByteIdenticalAcrossRunsAndThreadCounts) {
  const std::string args = "run --side 16 --marked 0,0 --t-max 60";
  const Result a = cli(args, "WALKLAB_THREADS=1");
  const Result b = cli(args, "WALKLAB_THREADS=4");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, PredictMatchesGolden) {
  const Result r = cli("predict --side 16");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_TRUE(json_close(j, json::parse(slurp(golden("predict_torus16.json"))), kGoldenTol));
}

TEST(Cli, SpectrumMatchesGolden) {
  const Result r = cli("spectrum --family hypercube --dims 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json_close(json::parse(r.out), json::parse(slurp(golden("spectrum_hypercube4.json"))), kGoldenTol));
}

TEST(Cli, TwoMarkedMatchesGolden) {
  const Result r = cli("two-marked --side 8 --v1 1,2 --v2 5,3 --t-max 100");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_LT(j["symmetry_residual"].get<double>(), 1e-12);
  json golden_json = json::parse(slurp(golden("two_marked_torus8.json")));
  // Residuals are rounding noise; compare them by bound only.
  json a = j, b = golden_json;
  for (const char* k : {"symmetry_residual", "trace_deviation", "state_deviation"}) {
    a.erase(k);
    b.erase(k);
  }
  EXPECT_TRUE(json_close(a, b, kGoldenTol));
}

TEST(Cli, RunJsonSummaryAndFiles) {
  TempDir dir;
  const Result r = cli("run --side 8 --t-max 20 --out " + (dir / "trace.csv").string() + " --summary " +
                       (dir / "summary.json").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(dir / "trace.csv").substr(0, 22), "t,p_marked,p_nbhd,norm");
  const json s = json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(s["schema"], 1);
  EXPECT_EQ(s["command"], "run");
  EXPECT_EQ(s["graph"]["marked"], json::array({0}));
  EXPECT_TRUE(s["prediction"].is_object());

  const Result m = cli("run --side 8 --shift moving --t-max 5 --format json");
  ASSERT_EQ(m.code, 0);
  EXPECT_TRUE(json::parse(m.out)["prediction"].is_null());
}

TEST(Cli, ConfigFileWithFlagPrecedence) {
  TempDir dir;
  {
    std::ofstream os(dir / "walk.toml");
    os << "[run]\nside = 8\nt-max = 10\nmarked = \"3,4\"\n";
  }
  const Result a = cli("--config " + (dir / "walk.toml").string() + " run");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 12);
  const Result b = cli("--config " + (dir / "walk.toml").string() + " run --t-max 3");
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 5);
  EXPECT_EQ(a.out.substr(0, b.out.size()), b.out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("").code, 2);                                   // no subcommand
  EXPECT_EQ(cli("run --side 8").code, 2);                       // missing --t-max
  EXPECT_EQ(cli("run --side 8 --t-max 5 --marked 9,0").code, 2);  // off the torus
  EXPECT_EQ(cli("run --family ring --t-max 5").code, 2);
  EXPECT_EQ(cli("run --side 8 --dims 3 --shift dirac --t-max 5").code, 2);
  EXPECT_EQ(cli("run --side 8 --t-max 5", "WALKLAB_THREADS=zero").code, 2);
  EXPECT_EQ(cli("predict --side 8 --shift moving").code, 3);
  EXPECT_EQ(cli("spectrum --side 8 --shift moving").code, 3);
  EXPECT_EQ(cli("run --side 8 --t-max 5 --out /nonexistent-walklab-dir/t.csv").code, 4);
  EXPECT_EQ(cli("--config /nonexistent-walklab-dir/c.toml run --side 8 --t-max 1").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, SweepAndAmplifyAndMoving) {
  const Result s = cli("sweep --sides 8,12,16");
  ASSERT_EQ(s.code, 0);
  const json sj = json::parse(s.out);
  EXPECT_EQ(sj["rows"].size(), 3u);
  EXPECT_GT(sj["fitted_exponent_all_sizes"].get<double>(), 0.4);

  const Result a = cli("amplify --side 16");
  ASSERT_EQ(a.code, 0);
  const json aj = json::parse(a.out);
  EXPECT_EQ(aj["rounds"], 1);
  EXPECT_GT(aj["success"].back().get<double>(), 0.9);
  EXPECT_EQ(aj["ledger"]["total"], 174);

  const Result m = cli("analyze-moving --side 4");
  ASSERT_EQ(m.code, 0);
  EXPECT_NEAR(json::parse(m.out)["stationary"]["overlap_sq"].get<double>(), 14.0 / 17.0, 1e-12);

  const Result e = cli("predict --side 32 --epsilon 0.25");
  ASSERT_EQ(e.code, 0);
  const json ej = json::parse(e.out);
  EXPECT_EQ(ej["schedule"].back(), ej["prediction"]["T_bracket"][1]);
}
