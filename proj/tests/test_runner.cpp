#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include <twistorlab/runner.hpp>

using namespace twistorlab;

namespace {

RunConfig small(int rank, int m = 1) {
  RunConfig c;
  c.rank = rank;
  c.multiplicity = m;
  c.samples = 4;
  c.grid.points_per_axis = 1;
  c.grid.pairs = 1;
  c.suites = suite_names();
  return c;
}

const SuiteReport& find(const Report& r, const std::string& name) {
  const auto it = std::find_if(r.suites.begin(), r.suites.end(), [&](const SuiteReport& s) { return s.name == name; });
  if (it == r.suites.end()) throw std::runtime_error("missing suite " + name);
  return *it;
}

} // namespace

TEST(Parsing, SuiteListAndTolerance) {
  EXPECT_EQ(parse_suite_list("all"), suite_names());
  EXPECT_EQ(parse_suite_list("lemma,,fibre"), (std::vector<std::string>{"lemma", "fibre"}));
  const auto [suite, v] = parse_tolerance("kaehler=1e-6");
  EXPECT_EQ(suite, "kaehler");
  EXPECT_DOUBLE_EQ(v, 1e-6);
  EXPECT_THROW(parse_tolerance("kaehler"), ConfigError);
  EXPECT_THROW(parse_tolerance("=1"), ConfigError);
  EXPECT_THROW(parse_tolerance("kaehler=1x"), ConfigError);
}

TEST(Parsing, ThreadsFromEnvironment) {
  ::setenv(kThreadsVariable, "3", 1);
  EXPECT_EQ(threads_from_environment(), 3);
  ::setenv(kThreadsVariable, "zero", 1);
  EXPECT_THROW(threads_from_environment(), ConfigError);
  ::unsetenv(kThreadsVariable);
  EXPECT_EQ(threads_from_environment(), 1);
}

TEST(RunConfig, ValidationErrors) {
  RunConfig c;
  c.rank = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.suites = {"nonsense"};
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.tolerances["nonsense"] = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.t_values = {0.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.grid.base_axes = 100;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.format = "xml";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, NormalizeUsesCanonicalOrder) {
  RunConfig c;
  c.suites = {"kaehler", "lemma", "kaehler"};
  c.normalize();
  EXPECT_EQ(c.suites, (std::vector<std::string>{"lemma", "kaehler"}));
}

TEST(Run, EmptySelectionEchoesConfig) {
  RunConfig c;
  const Report r = run(c);
  EXPECT_TRUE(r.suites.empty());
  EXPECT_TRUE(r.passed());
  const auto js = to_json(r);
  EXPECT_EQ(js["schema"], kReportSchema);
  EXPECT_EQ(js["config"]["rank"], 9);
  EXPECT_EQ(js["config"]["dimension"], 16);
  EXPECT_EQ(js["config"]["kappa"], "1");
}

TEST(Run, RankNinePassesEverySuite) {
  const Report r = run(small(9));
  ASSERT_EQ(r.suites.size(), suite_names().size());
  for (const auto& s : r.suites) EXPECT_EQ(s.status, SuiteStatus::Pass) << s.name << " " << to_text(r);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Run, DeterministicAcrossRepeatsAndThreads) {
  RunConfig c = small(5, 2);
  c.suites = {"lemma", "curvature", "kaehler", "nearly-kaehler"};
  const std::string a = to_json(run(c)).dump();
  EXPECT_EQ(a, to_json(run(c)).dump());
  c.threads = 4;
  EXPECT_EQ(a, to_json(run(c)).dump());
  c.seed = 2;
  EXPECT_NE(a, to_json(run(c)).dump());
}

TEST(Run, DimensionEightIsSkippedNotFailed) {
  const Report r = run(small(7));
  for (const char* name : {"curvature", "integrability", "kaehler", "nearly-kaehler"}) {
    const SuiteReport& s = find(r, name);
    EXPECT_EQ(s.status, SuiteStatus::Skipped) << name;
    EXPECT_EQ(s.reason, "hypothesis not met: n = 8 excluded");
  }
  EXPECT_EQ(find(r, "representation").status, SuiteStatus::Pass);
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Run, NonPositiveKappaSkipsOnlyTheKaehlerSuites) {
  RunConfig c = small(9);
  c.kappa = Rational(-1);
  c.suites = {"curvature", "kaehler", "nearly-kaehler"};
  const Report r = run(c);
  EXPECT_EQ(find(r, "curvature").status, SuiteStatus::Pass);
  EXPECT_EQ(find(r, "kaehler").status, SuiteStatus::Skipped);
  EXPECT_NE(find(r, "kaehler").reason.find("kappa"), std::string::npos);
  EXPECT_EQ(find(r, "nearly-kaehler").status, SuiteStatus::Skipped);
}

TEST(Run, ToleranceOverrideCanFailASuite) {
  RunConfig c = small(9);
  c.suites = {"kaehler"};
  c.tolerances["kaehler"] = 1e-30;
  const Report r = run(c);
  EXPECT_EQ(find(r, "kaehler").status, SuiteStatus::Fail);
  EXPECT_EQ(r.exit_code(), 1);
  for (const auto& row : find(r, "kaehler").rows) EXPECT_EQ(row.tolerance, 1e-30);
}

TEST(Output, CsvHasOneLinePerRowPlusSummaries) {
  RunConfig c = small(9);
  c.suites = {"lemma", "fibre", "flat-global"};
  const Report r = run(c);
  const std::string csv = to_csv(r);
  std::size_t rows = 0;
  for (const auto& s : r.suites) rows += s.rows.size();
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 1 + rows + r.suites.size());
  EXPECT_EQ(csv.rfind(kCsvHeader, 0), 0u);
  EXPECT_NE(csv.find("flat-global,summary,9,16,0,"), std::string::npos);
}

TEST(Output, TimingsOnlyWhenRequested) {
  RunConfig c = small(9);
  c.suites = {"lemma"};
  EXPECT_FALSE(to_json(run(c))["suites"][0].contains("seconds"));
  c.timings = true;
  EXPECT_TRUE(to_json(run(c))["suites"][0].contains("seconds"));
  EXPECT_THROW(emit_report(run(c), "yaml"), ConfigError);
}

TEST(Output, FormatDouble) {
  EXPECT_EQ(format_double(0.5), "5.000000e-01");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_t(0.5), "0.5");
}
