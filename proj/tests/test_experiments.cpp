#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kpzlab/cli.hpp"
#include "kpzlab/experiments.hpp"
#include "kpzlab/io.hpp"

using namespace kpzlab;
namespace fs = std::filesystem;

TEST(Stats, ZTestOracle) {
  const StatReport r = z_test_mean({1.0, 2.0, 3.0}, 0.0, 3.0, 0.01);
  EXPECT_NEAR(r.statistic, 2.0, 1e-14);
  EXPECT_NEAR(r.p_value, 0.04550026389635842, 1e-12);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(z_test_mean({1.0, 2.0, 3.0}, 0.0, 3.0, 0.05).passed);
}

TEST(Stats, ChiSquareOracle) {
  // Statistic 4 with 4 degrees of freedom: CDF = 1 - 3 e^{-2}.
  const StatReport r = chi_square_variance({1.0, -1.0, 1.0, -1.0}, 0.0, 1.0, 0.01);
  EXPECT_NEAR(r.statistic, 4.0, 1e-14);
  EXPECT_NEAR(r.p_value, 2.0 * (3.0 * std::exp(-2.0)), 1e-12);
  EXPECT_EQ(r.n1, 4);
}

TEST(Stats, KolmogorovDistribution) {
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(kolmogorov_survival(1.18), 0.1234538094297657, 1e-13);
  // The two series representations meet continuously at the branch point.
  EXPECT_NEAR(kolmogorov_survival(std::nextafter(1.18, 0.0)), kolmogorov_survival(1.18), 1e-13);
  EXPECT_NEAR(kolmogorov_survival(2.0), 0.0006709252557796953, 1e-14);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(Stats, KsTwoSample) {
  const StatReport same = ks_two_sample({1, 2, 3, 4}, {4, 3, 2, 1}, 0.01);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_NEAR(same.p_value, 1.0, 1e-12);
  std::vector<double> a(200), b(200);
  for (int i = 0; i < 200; ++i) {
    a[i] = i;
    b[i] = 1000 + i;
  }
  const StatReport apart = ks_two_sample(a, b, 0.01);
  EXPECT_EQ(apart.statistic, 1.0);
  EXPECT_FALSE(apart.passed);
  EXPECT_NEAR(ks_two_sample({0, 1, 2, 3}, {2, 3, 4, 5}, 0.01).statistic, 0.5, 1e-15);
}

TEST(Parallel, EveryIndexOnceAndExceptionsPropagate) {
  for (const char* threads : {"1", "3"}) {
    setenv("KPZLAB_THREADS", threads, 1);
    EXPECT_EQ(replica_threads(), std::atoi(threads));
    std::vector<std::atomic<int>> hits(500);
    parallel_for(500, [&](int i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(50, [](int i) {
                   if (i == 17) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
  }
  unsetenv("KPZLAB_THREADS");
  EXPECT_GE(replica_threads(), 1);
}

TEST(Invariance, RejectsSmallEnsembles) {
  InvarianceConfig c;
  c.replicas = 32;
  EXPECT_THROW(invariance_experiment(c), ConfigError);
}

TEST(Invariance, FlagsNonConservativeScheme) {
  InvarianceConfig c;
  c.n = 15;
  c.replicas = 64;
  c.t_end = 0.01;
  c.dt = 1e-3;
  const InvarianceReport ss = invariance_experiment(c);
  EXPECT_TRUE(ss.conservative);
  EXPECT_FALSE(ss.warning);
  EXPECT_EQ(ss.tests.size(), 3u);
  c.scheme = preset_standard();
  const InvarianceReport st = invariance_experiment(c);
  EXPECT_FALSE(st.conservative);
  EXPECT_TRUE(st.warning);
}

TEST(Invariance, ResultIndependentOfThreadCount) {
  InvarianceConfig c;
  c.n = 15;
  c.replicas = 64;
  c.t_end = 0.05;
  c.dt = 1e-3;
  setenv("KPZLAB_THREADS", "1", 1);
  const InvarianceReport a = invariance_experiment(c);
  setenv("KPZLAB_THREADS", "4", 1);
  const InvarianceReport b = invariance_experiment(c);
  unsetenv("KPZLAB_THREADS");
  for (std::size_t i = 0; i < a.tests.size(); ++i) EXPECT_EQ(a.tests[i].statistic, b.tests[i].statistic);
}

TEST(Io, SchemeJsonRoundTrip) {
  for (const Scheme& s : {preset_standard(), preset_sasamoto_spohn(0.2, 0.7), preset_centered(6)}) {
    const Scheme back = scheme_from_json(scheme_to_json(s));
    EXPECT_EQ(scheme_to_json(back), scheme_to_json(s));
  }
  EXPECT_EQ(scheme_to_json(scheme_from_json("sasamoto_spohn(1, 0.5)")), scheme_to_json(preset_sasamoto_spohn()));
  EXPECT_EQ(scheme_from_json("centered(4)").pi.size(), 5u);
  EXPECT_THROW(scheme_from_json("upwind"), ConfigError);
  EXPECT_THROW(scheme_from_json("sasamoto_spohn(-1, 1)"), ConfigError);
  EXPECT_THROW(scheme_from_json(json{{"pi", json::array()}, {"nu", json::array()}, {"mu", json::array()}, {"x", 1}}),
               ConfigError);
}

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kpzlab_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config(const json& j) {
    const fs::path p = dir_ / ("config" + std::to_string(count_++) + ".json");
    std::ofstream(p) << j.dump();
    return p.string();
  }

  CliRun call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
  }

  std::string read(const fs::path& p) {
    std::ifstream is(p);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
  int count_ = 0;
};

}  // namespace

TEST_F(Cli, SimulateWritesReproducibleReport) {
  const json cfg = {{"version", 1}, {"n", 15}, {"t_end", 0.01}, {"dt", 1e-3}, {"initial", "sine"}, {"snapshot_stride", 5}};
  const std::string path = config(cfg);
  const fs::path out1 = dir_ / "a", out2 = dir_ / "b";
  const CliRun a = call({"simulate", "--config", path, "--out", out1.string(), "--seed", "4"});
  ASSERT_EQ(a.code, kExitPass) << a.err;
  const CliRun b = call({"simulate", "--config", path, "--out", out2.string(), "--seed", "4"});
  ASSERT_EQ(b.code, kExitPass);
  EXPECT_EQ(read(out1 / "report.json"), read(out2 / "report.json"));
  const json report = json::parse(read(out1 / "report.json"));
  EXPECT_EQ(report["config"]["seed"], 4);
  EXPECT_EQ(report["exit_code"], 0);
  EXPECT_TRUE(fs::exists(out1 / "metadata.json"));
  EXPECT_TRUE(fs::exists(out1 / "summary.csv"));
  EXPECT_TRUE(fs::exists(out1 / "trajectory.jsonl"));
}

TEST_F(Cli, ConfigRejections) {
  const fs::path out = dir_ / "o";
  EXPECT_EQ(call({"simulate", "--config", config({{"version", 1}, {"n", 16}}), "--out", out.string()}).code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--config", config({{"version", 1}, {"bogus", 1}}), "--out", out.string()}).code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--config", config({{"version", 2}}), "--out", out.string()}).code, kExitConfig);
  EXPECT_EQ(call({"simulate", "--config", config({{"version", 1}, {"dt", 1.0}}), "--out", out.string()}).code, kExitConfig);
  EXPECT_EQ(call({"invariance", "--config", config({{"version", 1}, {"replicas", 10}}), "--out", out.string()}).code,
            kExitConfig);
  EXPECT_EQ(call({"simulate", "--config", (dir_ / "missing.json").string()}).code, kExitConfig);
  EXPECT_EQ(call({"teleport", "--config", config({{"version", 1}})}).code, kExitConfig);
  EXPECT_EQ(call({"simulate"}).code, kExitConfig);
}

TEST_F(Cli, BlowUpExitCode) {
  const json cfg = {{"version", 1}, {"n", 15},         {"t_end", 0.01},
                    {"dt", 1e-3},   {"initial", "sine"}, {"initial_amplitude", 5.0}, {"blowup_threshold", 1.0}};
  const CliRun r = call({"simulate", "--config", config(cfg), "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, kExitBlowUp);
  EXPECT_EQ(json::parse(read(dir_ / "o" / "report.json"))["exit_code"], kExitBlowUp);
}

TEST_F(Cli, FailedCheckExitCode) {
  // An impossible expected value fails the constants check.
  const json cfg = {{"version", 1}, {"expected_c", 0.3}, {"expected_tolerance", 1e-8}, {"vertex_k", json::array()},
                    {"zero_chaos_n", json::array()}, {"cancellation_k_trunc", 4}, {"cancellation_tol", 1e-5}};
  const std::string path = config(cfg);
  const CliRun checked = call({"constants", "--config", path, "--out", (dir_ / "o").string(), "--check"});
  EXPECT_EQ(checked.code, kExitInternal) << checked.err;
  const CliRun plain = call({"constants", "--config", path, "--out", (dir_ / "p").string()});
  EXPECT_EQ(plain.code, kExitPass) << plain.err;
}
