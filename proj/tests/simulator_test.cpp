#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "corpus.hpp"
#include "random_mission.hpp"
#include "skymission/analyzer.hpp"
#include "skymission/parser.hpp"
#include "skymission/simulator.hpp"

using namespace skymission;
using testing_support::load_mission;
using testing_support::load_scenario;

namespace {

constexpr double kTick = 0.1;

Mission mission_from(const std::string& src) {
  auto r = parse(src);
  if (!r.ok()) throw std::runtime_error("test mission does not parse: " + r.diagnostics[0].message);
  return std::move(*r.mission);
}

std::vector<Event> events_of(const Trace& t, EventKind kind, const std::string& key = "", const std::string& value = "") {
  std::vector<Event> out;
  for (const auto& e : t.events) {
    if (e.kind == kind && (key.empty() || e.get(key) == value)) out.push_back(e);
  }
  return out;
}

double entered_at(const Trace& t, const std::string& node) {
  auto e = events_of(t, EventKind::NodeEntered, "node", node);
  if (e.empty()) throw std::runtime_error(node + " never entered");
  return e.front().t;
}

double completed_at(const Trace& t, const std::string& node) {
  auto e = events_of(t, EventKind::NodeCompleted, "node", node);
  if (e.empty()) throw std::runtime_error(node + " never completed");
  return e.front().t;
}

// Structural invariants every trace must satisfy.
void expect_well_formed(const Trace& t, double v_max) {
  for (std::size_t i = 1; i < t.samples.size(); ++i) EXPECT_GT(t.samples[i].t, t.samples[i - 1].t);
  for (std::size_t i = 1; i < t.events.size(); ++i) EXPECT_GE(t.events[i].t, t.events[i - 1].t);
  for (const auto& s : t.samples) {
    EXPECT_LE(s.speed, v_max + 1e-9);
    EXPECT_GE(s.battery, 0.0);
    EXPECT_LE(s.battery, 1.0);
  }
  for (std::size_t i = 1; i < t.samples.size(); ++i) EXPECT_LE(t.samples[i].battery, t.samples[i - 1].battery);

  // NodeEntered/NodeCompleted alternate; parallels nest inside their node.
  std::string open;
  std::vector<std::string> pars;
  for (const auto& e : t.events) {
    switch (e.kind) {
      case EventKind::NodeEntered:
        EXPECT_TRUE(open.empty()) << "entered " << e.get("node") << " while " << open << " open";
        open = e.get("node");
        break;
      case EventKind::NodeCompleted:
        EXPECT_EQ(e.get("node"), open);
        EXPECT_TRUE(pars.empty());
        open.clear();
        break;
      case EventKind::ParallelEntered:
        EXPECT_EQ(e.get("node"), open);
        pars.push_back(e.get("parallel"));
        break;
      case EventKind::ParallelExited:
        ASSERT_FALSE(pars.empty());
        EXPECT_EQ(pars.back(), e.get("parallel"));
        pars.pop_back();
        break;
      default:
        break;
    }
  }
}

}  // namespace

TEST(Simulator, MinimalTakesOffAndLands) {
  auto t = run(load_mission("minimal.msn"), load_scenario("healthy.json"), builtin_catalog());
  EXPECT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  // 10 m up and 10 m down at the 1 m/s climb rate.
  EXPECT_NEAR(completed_at(t, "takeoff_0"), 10.0, kTick);
  EXPECT_NEAR(completed_at(t, "touchdown_1"), 20.0, kTick);
  EXPECT_NEAR(t.samples.back().position.z, 0.0, 0.05);
  expect_well_formed(t, 5.0);
}

TEST(Simulator, FlyToTakesDistanceOverCruise) {
  auto t = run(load_mission("fly_to_leg.msn"), load_scenario("healthy.json"), builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  // (0,0,10) to (30,40,10): 50 m at 2 m/s.
  EXPECT_NEAR(completed_at(t, "leg") - entered_at(t, "leg"), 25.0, kTick);
}

TEST(Simulator, SweepCoversTheSnake) {
  auto t = run(load_mission("sweep.msn"), load_scenario("healthy.json"), builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  // rows y = 0, 5, 10 of 20 m plus two 5 m shifts: 70 m at 2 m/s.
  EXPECT_NEAR(completed_at(t, "area") - entered_at(t, "area"), 35.0, kTick);
  double max_x = 0.0, max_y = 0.0;
  for (const auto& s : t.samples) {
    if (s.node != "area") continue;
    max_x = std::max(max_x, s.position.x);
    max_y = std::max(max_y, s.position.y);
    EXPECT_GE(s.position.x, -1e-9);
    EXPECT_GE(s.position.y, -1e-9);
  }
  EXPECT_NEAR(max_x, 20.0, 1e-6);
  EXPECT_NEAR(max_y, 10.0, 1e-6);
}

TEST(Simulator, HoverHoldsPositionAndZeroHoverIsInstant) {
  auto m = mission_from(
      "mission \"h\" {\n  flow {\n    takeoff(altitude = 3.0)\n    a: hover(duration_s = 0.0)\n"
      "    b: hover(duration_s = 4.0)\n    touchdown()\n  }\n}\n");
  auto t = run(m, Scenario{}, builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  EXPECT_DOUBLE_EQ(entered_at(t, "a"), completed_at(t, "a"));
  EXPECT_NEAR(completed_at(t, "b") - entered_at(t, "b"), 4.0, kTick);
  for (const auto& s : t.samples) {
    if (s.node == "b" && s.t > entered_at(t, "b") + 1e-9) {
      EXPECT_NEAR(s.position.z, 3.0, 1e-9);
      EXPECT_EQ(s.speed, 0.0);
    }
  }
}

TEST(Simulator, PeriodicBlockFiresAtActivationThenEveryPeriod) {
  auto t = run(load_mission("periodic.msn"), Scenario{}, builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  auto fired = events_of(t, EventKind::ActionFired, "source", "ticker");
  ASSERT_EQ(fired.size(), 4u);  // floor(35 / 10) + 1
  double start = entered_at(t, "watch");
  for (std::size_t k = 0; k < fired.size(); ++k) EXPECT_NEAR(fired[k].t, start + 10.0 * static_cast<double>(k), kTick);
  auto exited = events_of(t, EventKind::ParallelExited, "parallel", "ticker");
  ASSERT_EQ(exited.size(), 1u);
  EXPECT_EQ(exited[0].get("fired"), "4");
}

TEST(SimulatorProperty, FiringCountIsFloorOfDurationOverPeriodPlusOne) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> dur(0, 60), per(1, 20);
  for (int i = 0; i < 40; ++i) {
    int d = dur(rng), p = per(rng);
    auto m = mission_from("mission \"p\" {\n  parallel tick every " + std::to_string(p) +
                          ".0s {\n    scan_wifi()\n  }\n  flow {\n    takeoff(altitude = 1.0)\n"
                          "    h: hover(duration_s = " + std::to_string(d) +
                          ".0)\n       parallel tick\n    touchdown()\n  }\n}\n");
    auto t = run(m, Scenario{}, builtin_catalog());
    ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
    EXPECT_EQ(events_of(t, EventKind::ActionFired, "source", "tick").size(), static_cast<std::size_t>(d / p + 1))
        << "duration " << d << " period " << p;
  }
}

TEST(Simulator, OneShotBlockFiresOnce) {
  auto m = mission_from(
      "mission \"o\" {\n  parallel once {\n    scan_wifi()\n  }\n  flow {\n    takeoff(altitude = 1.0)\n"
      "    h: hover(duration_s = 12.0)\n       parallel once\n    touchdown()\n  }\n}\n");
  auto t = run(m, Scenario{}, builtin_catalog());
  EXPECT_EQ(events_of(t, EventKind::ActionFired, "source", "once").size(), 1u);
}

TEST(Simulator, UntilPreemptsOnlyWhenTrue) {
  auto src = [](const std::string& limit) {
    return "mission \"u\" {\n  parallel watch every 1.0s {\n    v: read_sensor(name = \"gas\")\n  } until v > " +
           limit + " -> out\n  flow {\n    takeoff(altitude = 2.0)\n    h: hover(duration_s = 5.0)\n"
                   "       parallel watch\n    out: fly_home()\n    touchdown()\n  }\n}\n";
  };
  Scenario s;
  s.script.push_back(ScriptRule{"read_sensor", 3, std::nullopt, 9.0});
  s.script.push_back(ScriptRule{"read_sensor", std::nullopt, std::nullopt, 1.0});

  auto never = run(mission_from(src("50.0")), s, builtin_catalog());
  ASSERT_EQ(never.outcome.kind, Outcome::Kind::Completed);
  EXPECT_EQ(events_of(never, EventKind::NodeCompleted, "status", "preempted").size(), 0u);
  EXPECT_NEAR(completed_at(never, "h") - entered_at(never, "h"), 5.0, kTick);

  auto third = run(mission_from(src("5.0")), s, builtin_catalog());
  ASSERT_EQ(third.outcome.kind, Outcome::Kind::Completed);
  auto pre = events_of(third, EventKind::NodeCompleted, "status", "preempted");
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_EQ(pre[0].get("node"), "h");
  EXPECT_NEAR(pre[0].t - entered_at(third, "h"), 2.0, kTick);  // third reading
  expect_well_formed(third, 5.0);
}

TEST(Simulator, CropSurveyFindsDiseaseOnThirdPicture) {
  auto t = run(load_mission("crop_survey.msn"), load_scenario("field.json"), builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  auto taken = events_of(t, EventKind::BranchTaken, "source", "survey");
  ASSERT_EQ(taken.size(), 3u);
  EXPECT_EQ(taken[0].get("result"), "false");
  EXPECT_EQ(taken[1].get("result"), "false");
  EXPECT_EQ(taken[2].get("result"), "true");
  EXPECT_NEAR(taken[2].t, 30.0, kTick);
  EXPECT_NEAR(entered_at(t, "inspect"), 30.0, kTick);
  EXPECT_EQ(events_of(t, EventKind::NodeEntered, "node", "if_2").size(), 0u);
  expect_well_formed(t, 5.0);
}

TEST(Simulator, ThresholdBranchLoopsUntilExceeded) {
  auto t = run(load_mission("sensor_threshold.msn"), load_scenario("sensors.json"), builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  auto taken = events_of(t, EventKind::BranchTaken, "source", "if_2");
  ASSERT_EQ(taken.size(), 2u);
  EXPECT_EQ(taken[0].get("result"), "false");  // 25 > 30 is false
  EXPECT_EQ(taken[1].get("result"), "true");   // 35 > 30
  EXPECT_EQ(events_of(t, EventKind::NodeEntered, "node", "probe").size(), 2u);
}

TEST(Compare, EqualityIsReflexiveAndOrderingNeedsNumbers) {
  std::vector<std::pair<Value, Literal>> same = {
      {Value{true}, Literal{true}}, {Value{2.5}, Literal{2.5}}, {Value{std::string("a")}, Literal{std::string("a")}}};
  for (const auto& [v, lit] : same) {
    EXPECT_TRUE(compare(v, Comparator::EQ, lit));
    EXPECT_FALSE(compare(v, Comparator::NE, lit));
  }
  EXPECT_TRUE(compare(Value{1.0}, Comparator::LT, Literal{2.0}));
  EXPECT_TRUE(compare(Value{2.0}, Comparator::LE, Literal{2.0}));
  EXPECT_FALSE(compare(Value{2.0}, Comparator::GT, Literal{2.0}));
  EXPECT_TRUE(compare(Value{2.0}, Comparator::GE, Literal{2.0}));
  EXPECT_THROW(compare(Value{std::string("a")}, Comparator::LT, Literal{std::string("b")}), std::exception);
  EXPECT_THROW(compare(Value{1.0}, Comparator::EQ, Literal{std::string("1")}), std::exception);
}

TEST(Filters, MaintainSpeedScalesDown) {
  auto reg = builtin_catalog();
  FilterDecl f{"f", {ActionInstance{std::nullopt, "maintain_speed", {{"limit", 2.0}}, {}}}, {}};
  auto out = apply_filters(f, Vec3{3.0, 4.0, 0.0}, Point{}, Scenario{}, reg, kTick);
  EXPECT_LE(norm(out.velocity), 2.0);
  EXPECT_NEAR(norm(out.velocity), 2.0, 1e-9);
  EXPECT_NEAR(out.velocity.x / out.velocity.y, 0.75, 1e-12);
  EXPECT_EQ(out.clamped_by, std::vector<std::string>{"maintain_speed"});

  auto slow = apply_filters(f, Vec3{1.0, 0.0, 0.0}, Point{}, Scenario{}, reg, kTick);
  EXPECT_EQ(slow.velocity, (Vec3{1.0, 0.0, 0.0}));
  EXPECT_TRUE(slow.clamped_by.empty());
}

TEST(Filters, AvoidanceRemovesTheApproachComponent) {
  auto reg = builtin_catalog();
  Scenario s;
  s.obstacles.push_back(Sphere{{15.0, 0.0, 10.0}, 2.0});
  FilterDecl f{"f", {ActionInstance{std::nullopt, "avoid_obstacles", {{"clearance", 1.0}}, {}}}, {}};
  Point at{12.0, 0.0, 10.0};
  auto head_on = apply_filters(f, Vec3{2.0, 0.0, 0.0}, at, s, reg, kTick);
  EXPECT_LE(head_on.velocity.x, 1e-12);
  EXPECT_EQ(head_on.clamped_by, std::vector<std::string>{"avoid_obstacles"});

  auto away = apply_filters(f, Vec3{-2.0, 1.0, 0.0}, at, s, reg, kTick);
  EXPECT_EQ(away.velocity, (Vec3{-2.0, 1.0, 0.0}));
  EXPECT_TRUE(away.clamped_by.empty());

  // Tangential motion survives, the radial part does not.
  auto slanted = apply_filters(f, Vec3{2.0, 2.0, 0.0}, at, s, reg, kTick);
  EXPECT_LE(slanted.velocity.x, 1e-9);
  EXPECT_GT(slanted.velocity.y, 0.0);
}

TEST(Filters, AltitudeCeilingLimitsClimb) {
  auto reg = builtin_catalog();
  FilterDecl f{"f", {ActionInstance{std::nullopt, "max_altitude", {{"limit", 10.0}}, {}}}, {}};
  auto out = apply_filters(f, Vec3{0.0, 0.0, 5.0}, Point{0.0, 0.0, 9.9}, Scenario{}, reg, kTick);
  EXPECT_NEAR(9.9 + out.velocity.z * kTick, 10.0, 1e-9);
}

// Brute-force oracle: march along the approach axis in cruise-sized steps
// and stop before the step that would breach the clearance.
TEST(Simulator, HeadOnApproachStopsAtClearance) {
  auto sc = load_scenario("obstacle.json");
  auto t = run(load_mission("obstacle_headon.msn"), sc, builtin_catalog());
  const auto& ob = sc.obstacles.at(0);
  const double clearance = 1.0, step = 2.0 * sc.tick_s;
  double x = 0.0;
  while (std::abs(ob.center.x - (x + step)) - ob.radius >= clearance - 1e-9) x += step;

  double stop = -1.0;
  for (const auto& s : t.samples) {
    if (s.node == "dash" && s.t > entered_at(t, "dash") && s.speed < 1e-9) {
      stop = s.position.x;
      break;
    }
  }
  EXPECT_GE(stop, ob.center.x - ob.radius - clearance - step);
  EXPECT_LE(stop, ob.center.x - ob.radius - clearance + 1e-9);
  EXPECT_NEAR(stop, x, 1e-6);
  for (const auto& s : t.samples) EXPECT_GE(distance(s.position, ob.center) - ob.radius, clearance - 1e-6);
  ASSERT_FALSE(events_of(t, EventKind::FilterClamped, "action", "avoid_obstacles").empty());
}

TEST(Simulator, SpeedLimitHoldsAtHighCruise) {
  SimConfig cfg;
  cfg.cruise_speed = 5.0;
  auto t = run(load_mission("obstacle_headon.msn"), load_scenario("healthy.json"), builtin_catalog(), cfg);
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Completed);
  for (const auto& s : t.samples) {
    if (s.node == "dash" || s.node == "back") {
      EXPECT_LE(s.speed, 2.0);
    }
  }
  EXPECT_FALSE(events_of(t, EventKind::FilterClamped, "action", "maintain_speed").empty());
}

// Closed form: the climb costs (0.5 + 0.25 * 1) * 10 battery-seconds, each
// sweep second at 2 m/s costs 1.0, so the reserve r is reached at
// 10 + (C - 7.5 - r C) seconds.
TEST(Simulator, BatteryAbortAtClosedFormTime) {
  auto m = load_mission("crop_survey.msn");
  auto s = load_scenario("battery.json");
  for (double c : {16.0, 20.0, 35.0, 50.0, 84.0}) {
    s.battery_capacity_s = c;
    auto t = run(m, s, builtin_catalog());
    auto aborts = events_of(t, EventKind::AbortTriggered, "reason", "battery");
    ASSERT_EQ(aborts.size(), 1u) << c;
    double expected = 10.0 + (c - 7.5 - s.reserve * c);
    EXPECT_GE(aborts[0].t, expected - 1e-9) << c;
    EXPECT_LE(aborts[0].t, expected + kTick + 1e-9) << c;
    EXPECT_EQ(aborts[0].get("node"), "scan");
  }
}

TEST(Simulator, BatteryAbortFliesHomeAndLands) {
  auto s = load_scenario("battery.json");
  auto t = run(load_mission("crop_survey.msn"), s, builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Aborted);
  EXPECT_EQ(t.outcome.detail, "battery");
  auto abort = events_of(t, EventKind::AbortTriggered);
  ASSERT_EQ(abort.size(), 1u);
  std::size_t i = 0;
  while (!(t.events[i].kind == EventKind::AbortTriggered)) ++i;
  // abort, close the interrupted node, then the return leg
  std::size_t closed = i;
  while (closed < t.events.size() && t.events[closed].kind != EventKind::NodeCompleted) ++closed;
  ASSERT_LT(closed, t.events.size());
  EXPECT_EQ(t.events[closed].get("node"), "scan");
  EXPECT_EQ(t.events[closed].get("status"), "aborted");
  bool home_entered = false;
  for (std::size_t k = i + 1; k < t.events.size(); ++k) {
    if (t.events[k].kind == EventKind::NodeEntered) {
      EXPECT_EQ(t.events[k].get("node"), home_entered ? "abort:touchdown" : "abort:fly_home");
      home_entered = true;
    }
  }
  const auto& last = t.samples.back().position;
  EXPECT_NEAR(last.x, s.home.x, 0.05);
  EXPECT_NEAR(last.y, s.home.y, 0.05);
  EXPECT_NEAR(last.z, s.home.z, 0.05);
  EXPECT_GT(t.samples.back().battery, 0.0);
  expect_well_formed(t, 5.0);
}

TEST(Simulator, TimeoutAborts) {
  SimConfig cfg;
  cfg.max_time_s = 25.0;
  auto t = run(load_mission("sweep.msn"), load_scenario("healthy.json"), builtin_catalog(), cfg);
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Aborted);
  EXPECT_EQ(t.outcome.detail, "timeout");
  EXPECT_NEAR(events_of(t, EventKind::AbortTriggered).at(0).t, 25.0, kTick);
}

TEST(Simulator, StuckReturnEndsStalled) {
  // Too little time left to get home: the return is cut off at twice the limit.
  SimConfig cfg;
  cfg.max_time_s = 15.0;
  auto t = run(load_mission("sweep.msn"), load_scenario("healthy.json"), builtin_catalog(), cfg);
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Aborted);
  EXPECT_EQ(t.outcome.detail, "stalled");
  EXPECT_NEAR(t.samples.back().t, 30.0, kTick);
}

TEST(Simulator, MissingResultIsARuntimeError) {
  // Rejected by analysis (R002) but still runnable: the branch reads a
  // result no action has produced yet.
  auto m = mission_from(
      "mission \"e\" {\n  flow {\n    takeoff(altitude = 1.0)\n    a: hover(duration_s = 1.0)\n"
      "    if later > 1.0 -> b else -> b\n    b: hover(duration_s = 1.0) {\n      later: scan_wifi()\n"
      "    }\n    touchdown()\n  }\n}\n");
  EXPECT_FALSE(analyze(m, builtin_catalog()).accepted());
  auto t = run(m, Scenario{}, builtin_catalog());
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Error);
  EXPECT_NE(t.outcome.detail.find("MissingResult"), std::string::npos) << t.outcome.detail;
}

TEST(Simulator, ScriptTypeMismatchIsARuntimeError) {
  Scenario s;
  s.script.push_back(ScriptRule{"read_sensor", std::nullopt, std::nullopt, std::string("warm")});
  auto t = run(load_mission("sensor_threshold.msn"), s, builtin_catalog());
  EXPECT_EQ(t.outcome.kind, Outcome::Kind::Error);
}

TEST(Simulator, RegionRulesMatchCapturePosition) {
  auto t = run(load_mission("pipeline.msn"), load_scenario("sensors.json"), builtin_catalog());
  EXPECT_NE(t.outcome.kind, Outcome::Kind::Error) << t.outcome.text();
}

TEST(Simulator, ZeroTimeCycleAdvancesOncePerTick) {
  auto m = mission_from(
      "mission \"z\" {\n  flow {\n    takeoff(altitude = 1.0)\n    a: hover(duration_s = 0.0) {\n"
      "      v: scan_wifi()\n    }\n    if v > 100.0 -> t else -> a\n    t: touchdown()\n  }\n}\n");
  ASSERT_TRUE(analyze(m, builtin_catalog()).accepted());
  SimConfig cfg;
  cfg.max_time_s = 5.0;
  auto t = run(m, Scenario{}, builtin_catalog(), cfg);
  ASSERT_EQ(t.outcome.kind, Outcome::Kind::Aborted) << t.outcome.text();
  EXPECT_EQ(t.outcome.detail, "timeout");
  // The loop closes once per tick: a is entered twice at each tick from the
  // end of the climb (t = 1) until the timeout.
  std::map<long, int> per_tick;
  for (const auto& e : events_of(t, EventKind::NodeEntered, "node", "a")) ++per_tick[std::lround(e.t / kTick)];
  EXPECT_EQ(per_tick.begin()->first, 10);
  EXPECT_EQ(per_tick.rbegin()->first, 49);
  EXPECT_EQ(per_tick.size(), 40u);
  for (const auto& [tick, n] : per_tick) EXPECT_EQ(n, 2) << tick;
}

TEST(SimulatorProperty, DeterministicAndWellFormed) {
  testing_support::MissionGenerator gen(77);
  auto reg = builtin_catalog();
  Scenario s;
  s.battery_capacity_s = 150.0;
  s.obstacles.push_back(Sphere{{0.0, 10.0, 10.0}, 3.0});
  SimConfig cfg;
  cfg.max_time_s = 150.0;
  int ran = 0;
  for (int i = 0; i < 150; ++i) {
    auto r = parse(gen.next());
    ASSERT_TRUE(r.ok());
    if (!analyze(*r.mission, reg).accepted()) continue;
    auto a = run(*r.mission, s, reg, cfg);
    auto b = run(*r.mission, s, reg, cfg);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      EXPECT_EQ(a.samples[k].position, b.samples[k].position);
      EXPECT_EQ(a.samples[k].battery, b.samples[k].battery);
    }
    ASSERT_EQ(a.events.size(), b.events.size());
    EXPECT_EQ(a.outcome.text(), b.outcome.text());
    expect_well_formed(a, cfg.v_max);
    EXPECT_LE(a.samples.back().t, 2.0 * cfg.max_time_s + 1e-9);
    ++ran;
  }
  EXPECT_GT(ran, 20);
}

TEST(Simulator, StepwiseEqualsRun) {
  auto m = load_mission("crop_survey.msn");
  auto s = load_scenario("field.json");
  auto reg = builtin_catalog();
  MissionFlowSource flow(m);
  Simulator sim(flow, s, reg);
  while (!sim.done()) {
    sim.step();
    EXPECT_EQ(sim.state().time_s, sim.trace().samples.back().t);
  }
  auto whole = run(m, s, reg);
  EXPECT_EQ(sim.trace().samples.size(), whole.samples.size());
  EXPECT_EQ(sim.trace().outcome.text(), whole.outcome.text());
}
