#include <gtest/gtest.h>

#include <algorithm>

#include "corpus.hpp"
#include "random_mission.hpp"
#include "skymission/analyzer.hpp"
#include "skymission/parser.hpp"
#include "skymission/simulator.hpp"

using namespace skymission;
using testing_support::corpus_dir;
using testing_support::read_file;

namespace {

std::vector<Diagnostic> check(const std::string& src, const Registry& reg = builtin_catalog()) {
  auto r = parse(src);
  if (!r.ok()) return r.diagnostics;
  return analyze(*r.mission, reg).diagnostics;
}

std::vector<std::string> codes(const std::vector<Diagnostic>& diags) {
  std::vector<std::string> out;
  for (const auto& d : diags) out.push_back(d.code);
  return out;
}

}  // namespace

TEST(Analyzer, ValidCorpusIsClean) {
  auto reg = builtin_catalog();
  for (const auto& path : testing_support::files("valid", ".msn")) {
    auto diags = check(read_file(path), reg);
    EXPECT_TRUE(diags.empty()) << path << ": " << (diags.empty() ? "" : render(diags[0], path.string()));
  }
}

TEST(Analyzer, EachFaultFileYieldsOnlyItsCode) {
  auto reg = builtin_catalog();
  int n = 0;
  for (const auto& path : testing_support::files("faults", ".msn")) {
    auto expected = path.filename().string().substr(0, 4);
    auto diags = check(read_file(path), reg);
    ASSERT_FALSE(diags.empty()) << path;
    for (const auto& d : diags) EXPECT_EQ(d.code, expected) << path << ": " << d.message;
    ++n;
  }
  EXPECT_EQ(n, 24);
}

TEST(Analyzer, SeveritiesFollowCodes) {
  auto diags = check(read_file(corpus_dir() / "faults" / "W001_unused_filter.msn"));
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Severity::Warning);
  EXPECT_FALSE(has_errors(diags));
}

TEST(Analyzer, UnusedParallelIsW001) {
  auto diags = check(
      "mission \"w\" {\n  parallel idle {\n    scan_wifi()\n  }\n  flow {\n    takeoff(altitude = 1.0)\n"
      "    touchdown()\n  }\n}\n");
  EXPECT_EQ(codes(diags), std::vector<std::string>{"W001"});
}

TEST(Analyzer, ResolvedTypesCoverEveryResult) {
  auto m = testing_support::load_mission("crop_survey.msn");
  auto report = analyze(m, builtin_catalog());
  EXPECT_TRUE(report.accepted());
  EXPECT_EQ(report.resolved_types.at("shot"), ValueType::Image);
  EXPECT_EQ(report.resolved_types.at("closeup"), ValueType::Image);
}

TEST(Analyzer, OrderingOnTextSuppressesLiteralMismatch) {
  // '>' on Text with a number literal reports T003 only.
  auto diags = check(read_file(corpus_dir() / "faults" / "T003_ordering_on_text.msn"));
  EXPECT_EQ(codes(diags), std::vector<std::string>{"T003"});
}

TEST(Analyzer, DiagnosticsAreSortedByPosition) {
  auto diags = check(
      "mission \"s\" {\n  flow {\n    takeoff(altitude = -1.0)\n    hover(duration_s = \"x\")\n"
      "    fly_to()\n    touchdown()\n  }\n}\n");
  ASSERT_EQ(codes(diags), (std::vector<std::string>{"T007", "T004", "T006"}));
  EXPECT_TRUE(std::is_sorted(diags.begin(), diags.end(),
                             [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; }));
}

TEST(ConditionType, ChainComposesLeftToRight) {
  auto reg = builtin_catalog();
  Condition c;
  c.result_ref = "cloud";
  c.processing_chain.push_back(ActionInstance{std::nullopt, "interpret_scan", {}, {}});
  c.processing_chain.push_back(ActionInstance{std::nullopt, "threshold_exceeded", {{"limit", 2.0}}, {}});
  TypedScope scope{{"cloud", ValueType::PointCloud}};
  auto t = condition_type(c, reg, scope);
  ASSERT_TRUE(std::holds_alternative<ValueType>(t));
  EXPECT_EQ(std::get<ValueType>(t), ValueType::Bool);

  c.processing_chain.clear();
  auto bare = condition_type(c, reg, scope);
  EXPECT_EQ(std::get<ValueType>(bare), ValueType::PointCloud);
}

TEST(ConditionType, MismatchNamesTheStep) {
  auto reg = builtin_catalog();
  Condition c;
  c.result_ref = "cloud";
  c.processing_chain.push_back(ActionInstance{std::nullopt, "interpret_scan", {}, {}});
  c.processing_chain.push_back(ActionInstance{std::nullopt, "recognize_image", {}, {}});
  auto t = condition_type(c, reg, {{"cloud", ValueType::PointCloud}});
  ASSERT_TRUE(std::holds_alternative<Diagnostic>(t));
  const auto& d = std::get<Diagnostic>(t);
  EXPECT_EQ(d.code, "T001");
  EXPECT_NE(d.message.find("step 2"), std::string::npos) << d.message;
  EXPECT_NE(d.message.find("Number"), std::string::npos) << d.message;
}

TEST(ConditionType, MissingResultAndWrongCategory) {
  auto reg = builtin_catalog();
  Condition c;
  c.result_ref = "ghost";
  EXPECT_EQ(std::get<Diagnostic>(condition_type(c, reg, {})).code, "R002");
  c.result_ref = "x";
  c.processing_chain.push_back(ActionInstance{std::nullopt, "take_picture", {}, {}});
  EXPECT_EQ(std::get<Diagnostic>(condition_type(c, reg, {{"x", ValueType::Image}})).code, "R007");
  c.processing_chain[0].action_name = "no_such";
  EXPECT_EQ(std::get<Diagnostic>(condition_type(c, reg, {{"x", ValueType::Image}})).code, "R001");
}

TEST(ConditionType, ExtensionActionsJoinChains) {
  auto reg = builtin_catalog();
  load_extensions(reg,
                  "[classify_cloud]\ncategory = processing\ninput = PointCloud\noutput = Image\n");
  auto diags = check(
      "mission \"x\" {\n  flow {\n    takeoff(altitude = 5.0)\n    h: hover(duration_s = 1.0) {\n"
      "      c: laser_scan()\n    }\n    if recognize_image(classify_cloud(c)) == \"tree\" -> h else -> t\n"
      "    t: touchdown()\n  }\n}\n",
      reg);
  EXPECT_TRUE(diags.empty()) << (diags.empty() ? "" : diags[0].message);
}

TEST(Scoping, BranchReadsOnlyThePrecedingRoutingElement) {
  auto m = testing_support::load_mission("crop_survey.msn");
  auto reg = builtin_catalog();
  auto scope = visible_result_types(m, "if_2", reg);
  ASSERT_EQ(scope.size(), 1u);
  EXPECT_EQ(scope[0].first, "shot");
  EXPECT_TRUE(visible_result_types(m, "home", reg).empty());
}

// Soundness: a mission the analyzer accepts never reaches a runtime type
// error, whatever the scenario scripts say within the declared types.
TEST(AnalyzerProperty, AcceptedMissionsRunWithoutTypeErrors) {
  testing_support::MissionGenerator gen(2024);
  auto reg = builtin_catalog();
  Scenario s;
  s.battery_capacity_s = 120.0;
  s.obstacles.push_back(Sphere{{5.0, 5.0, 8.0}, 2.0});
  s.script.push_back(ScriptRule{"recognize_image", 2, std::nullopt, std::string("fire")});
  s.script.push_back(ScriptRule{"read_sensor", std::nullopt, std::nullopt, 42.0});
  SimConfig cfg;
  cfg.max_time_s = 200.0;
  int accepted = 0;
  for (int i = 0; i < 300; ++i) {
    auto src = gen.next();
    auto r = parse(src);
    ASSERT_TRUE(r.ok()) << src;
    if (!analyze(*r.mission, reg).accepted()) continue;
    ++accepted;
    auto trace = run(*r.mission, s, reg, cfg);
    EXPECT_NE(trace.outcome.kind, Outcome::Kind::Error) << src << "\n" << trace.outcome.text();
  }
  EXPECT_GT(accepted, 50);
}

TEST(AnalyzerProperty, RejectionsAreDeterministic) {
  testing_support::MissionGenerator a(5), b(5);
  auto reg = builtin_catalog();
  for (int i = 0; i < 200; ++i) {
    auto sa = a.next();
    ASSERT_EQ(sa, b.next());
    EXPECT_EQ(check(sa, reg), check(sa, reg));
  }
}
