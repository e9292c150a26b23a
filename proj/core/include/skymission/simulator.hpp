#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skymission/mission.hpp"
#include "skymission/registry.hpp"
#include "skymission/scenario.hpp"
#include "skymission/value.hpp"

namespace skymission {

/// Vehicle and timing constants. Defaults are repository choices.
struct SimConfig {
  double max_time_s = 3600.0;
  double cruise_speed = 2.0;  // m/s, horizontal legs
  double climb_rate = 1.0;    // m/s, takeoff and touchdown
  double v_max = 5.0;         // m/s, hard cap after filters
  double arrival_tolerance = 0.05;
  double hover_drain = 0.5;   // battery-seconds per second
  double motion_drain = 0.25; // battery-seconds per metre
};

struct Sample {
  double t = 0.0;
  Point position;
  double speed = 0.0;
  double battery = 1.0;
  std::string node;
};

enum class EventKind {
  NodeEntered,
  NodeCompleted,
  ActionFired,
  BranchTaken,
  ParallelEntered,
  ParallelExited,
  FilterClamped,
  AbortTriggered,
};

std::string_view to_string(EventKind kind);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::NodeEntered;
  std::vector<std::pair<std::string, std::string>> payload;

  /// Payload value for `key`, or empty.
  std::string get(std::string_view key) const;
};

struct Outcome {
  enum class Kind { Completed, Aborted, Error };
  Kind kind = Kind::Error;
  std::string detail;

  /// `Completed`, `Aborted(battery)`, `Error(message)`.
  std::string text() const;
};

struct Trace {
  std::vector<Sample> samples;
  std::vector<Event> events;
  Outcome outcome;
};

enum class Phase { Running, Aborting, Done };

struct ParallelActivation {
  std::string name;
  double activated_s = 0.0;
  int fired = 0;
  double next_fire_s = 0.0;  // +inf once a one-shot block has fired
};

struct SimState {
  long tick = 0;
  double time_s = 0.0;
  Point position;
  Vec3 velocity;
  double battery = 1.0;
  std::string current_node;
  std::vector<ParallelActivation> active_parallels;
  std::map<std::string, Value> results;
  std::map<std::string, int> invocations;
  Phase phase = Phase::Running;
};

/// Internal contract violation; surfaces as an Error outcome.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A routing element as the engine sees it, independent of whether it came
/// from a mission graph or a flight script.
struct RoutingElement {
  std::string id;
  NodeKind kind = NodeKind::Hover;
  ParamMap params;
  std::vector<ActionInstance> embedded;
  std::optional<std::string> filter;
  std::vector<std::string> parallels;
};

using BranchDecider = std::function<bool(const std::string& branch_id, const Condition& condition)>;

/// Control flow the engine follows.
class FlowSource {
 public:
  virtual ~FlowSource() = default;

  virtual RoutingElement entry() const = 0;
  /// Routing element by id (until targets). Throws SimulationError.
  virtual RoutingElement element(std::string_view id) const = 0;
  /// Next routing element after `completed`, deciding branches on the way.
  /// nullopt once touchdown has completed.
  virtual std::optional<RoutingElement> after(std::string_view completed, const BranchDecider& decide) const = 0;
  virtual const FilterDecl* filter(std::string_view name) const = 0;
  virtual const ParallelDecl* parallel(std::string_view name) const = 0;
};

class MissionFlowSource : public FlowSource {
 public:
  explicit MissionFlowSource(const Mission& m) : m_(m) {}

  RoutingElement entry() const override;
  RoutingElement element(std::string_view id) const override;
  std::optional<RoutingElement> after(std::string_view completed, const BranchDecider& decide) const override;
  const FilterDecl* filter(std::string_view name) const override { return m_.find_filter(name); }
  const ParallelDecl* parallel(std::string_view name) const override { return m_.find_parallel(name); }

 private:
  const Mission& m_;
};

/// Waypoint legs (or a hover timer) for one routing element.
struct RoutePlan {
  struct Leg {
    Point target;
    double speed = 0.0;
  };
  std::vector<Leg> legs;
  std::size_t next_leg = 0;
  bool timed = false;  // hover: no legs, completes after hover_s
  double hover_s = 0.0;
  double elapsed_s = 0.0;

  /// Skips legs whose target is within `tolerance` of `position`.
  void advance(const Point& position, double tolerance);
  bool finished() const;
};

/// Plans the motion of a routing element from the current position:
/// takeoff/touchdown are vertical at the climb rate, fly_to and fly_home
/// straight at cruise speed (fly_home keeps altitude), fly_in_area a
/// boustrophedon sweep with rows `spacing` apart, hover a timer.
RoutePlan plan_route(const RoutingElement& e, const Point& position, const Scenario& s, const SimConfig& cfg);

struct Motion {
  Vec3 desired_velocity;
  bool complete = false;
};

/// Desired velocity toward the next leg target, never overshooting within
/// one tick. Advances past legs already reached.
Motion routing_motion(RoutePlan& plan, const Point& position, const SimConfig& cfg, double tick_s);

struct FilterOutput {
  Vec3 velocity;
  /// Filter actions whose transform changed the velocity.
  std::vector<std::string> clamped_by;
};

/// Runs the filter's actions from lowest to highest priority so the first
/// listed action applies last and its constraint holds exactly.
FilterOutput apply_filters(const FilterDecl& f, const Vec3& desired, const Point& position, const Scenario& s,
                           const Registry& reg, double tick_s);

/// Comparator semantics on a runtime value. Throws SimulationError when the
/// value and literal types differ or ordering is applied to non-numbers.
bool compare(const Value& value, Comparator cmp, const Literal& reference);

class Simulator {
 public:
  Simulator(const FlowSource& flow, Scenario scenario, const Registry& reg, SimConfig cfg = {});

  const SimState& state() const { return state_; }
  const Trace& trace() const { return trace_; }
  bool done() const { return state_.phase == Phase::Done; }

  /// Advances one tick: due parallel actions and their until conditions,
  /// motion through filters, battery drain, reserve/timeout abort, then
  /// completion and edge following.
  void step();

  /// Steps to the end and returns the trace.
  Trace run();

  /// Evaluates a condition against the result store, invoking processing
  /// actions (counted and logged as ActionFired from `source`).
  bool evaluate_condition(const Condition& c, const std::string& source);

 private:
  void guarded(const std::function<void()>& body);
  void enter(RoutingElement element, double t);
  void leave(double t, const char* how);
  void settle(double t);
  void complete_current(double t);
  void begin_abort(const std::string& reason, double t);
  void finish(Outcome::Kind kind, std::string detail, double t);
  std::optional<std::string> service_parallels(double t);
  Vec3 commanded_velocity();
  Value fire(const ActionInstance& inst, const std::string& source, double t);
  Value invoke(const ActionDefinition& def, const ParamMap& params, const Value* input, const Point& where);
  void emit(double t, EventKind kind, std::vector<std::pair<std::string, std::string>> payload);
  void record_sample();

  const FlowSource& flow_;
  Scenario scenario_;
  const Registry& reg_;
  SimConfig cfg_;
  SimState state_;
  Trace trace_;
  RoutingElement current_;
  RoutePlan plan_;
  std::set<std::string> clamping_;
  std::string abort_reason_;
  std::optional<std::string> abort_filter_;
};

/// Direct simulation of a mission graph.
Trace run(const Mission& m, const Scenario& s, const Registry& reg, const SimConfig& cfg = {});

}  // namespace skymission
