#include "skymission/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace skymission {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr int kSettleHops = 10000;
const char* const kAbortHome = "abort:fly_home";
const char* const kAbortTouchDown = "abort:touchdown";

double number_param(const RoutingElement& e, std::string_view name) {
  const auto* lit = e.params.find(name);
  if (!lit || !std::holds_alternative<double>(*lit))
    throw SimulationError("'" + e.id + "' lacks numeric parameter '" + std::string(name) + "'");
  return std::get<double>(*lit);
}

// Largest scale k <= limit/n with |v*k| <= limit.
Vec3 scale_to(const Vec3& v, double limit) {
  double n = norm(v);
  if (n <= limit) return v;
  double k = limit / n;
  while (norm(v * k) > limit) k = std::nextafter(k, 0.0);
  return v * k;
}

double hook_param(const ActionInstance& inst, const ActionDefinition& def, std::string_view param) {
  auto params = resolve_params(inst.params, def.params);
  const auto* lit = params.find(param);
  if (!lit || !std::holds_alternative<double>(*lit))
    throw SimulationError("filter action '" + inst.action_name + "' lacks '" + std::string(param) + "'");
  return std::get<double>(*lit);
}

double surface_clearance(const Point& p, const Sphere& o) { return distance(p, o.center) - o.radius; }

Vec3 avoid_obstacles(Vec3 v, double clearance, const Point& position, const Scenario& s, double tick_s) {
  auto violates = [&](const Vec3& vel, const Sphere& o) {
    double before = surface_clearance(position, o);
    double after = surface_clearance(position + vel * tick_s, o);
    return after < clearance && after < before;
  };
  for (int pass = 0; pass < 3; ++pass) {
    bool changed = false;
    for (const auto& o : s.obstacles) {
      if (!violates(v, o)) continue;
      Vec3 toward = o.center - position;
      double len = norm(toward);
      if (len == 0.0) continue;
      toward *= 1.0 / len;
      double along = dot(v, toward);
      if (along > 0.0) {
        v -= toward * along;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (const auto& o : s.obstacles) {
    if (violates(v, o)) return Vec3{};
  }
  return v;
}

Vec3 max_altitude(Vec3 v, double limit, const Point& position, double tick_s) {
  double allowed = (limit - position.z) / tick_s;
  if (v.z > allowed) v.z = allowed;
  return v;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::NodeEntered: return "NodeEntered";
    case EventKind::NodeCompleted: return "NodeCompleted";
    case EventKind::ActionFired: return "ActionFired";
    case EventKind::BranchTaken: return "BranchTaken";
    case EventKind::ParallelEntered: return "ParallelEntered";
    case EventKind::ParallelExited: return "ParallelExited";
    case EventKind::FilterClamped: return "FilterClamped";
    case EventKind::AbortTriggered: return "AbortTriggered";
  }
  return "?";
}

std::string Event::get(std::string_view key) const {
  for (const auto& [k, v] : payload) {
    if (k == key) return v;
  }
  return {};
}

std::string Outcome::text() const {
  switch (kind) {
    case Kind::Completed: return "Completed";
    case Kind::Aborted: return "Aborted(" + detail + ")";
    case Kind::Error: return "Error(" + detail + ")";
  }
  return "?";
}

namespace {

RoutingElement element_of(const Node& n) {
  if (!is_routing(n.kind)) throw SimulationError("'" + n.id + "' is not a routing element");
  return RoutingElement{n.id, n.kind, n.params, n.embedded_actions, n.filter_ref, n.parallel_refs};
}

}  // namespace

RoutingElement MissionFlowSource::entry() const { return element_of(m_.takeoff()); }

RoutingElement MissionFlowSource::element(std::string_view id) const {
  const Node* n = m_.find_node(id);
  if (!n) throw SimulationError("unknown node '" + std::string(id) + "'");
  return element_of(*n);
}

std::optional<RoutingElement> MissionFlowSource::after(std::string_view completed, const BranchDecider& decide) const {
  const Node* n = m_.find_node(completed);
  if (!n) throw SimulationError("unknown node '" + std::string(completed) + "'");
  if (n->kind == NodeKind::TouchDown) return std::nullopt;
  auto next = [&](const Node& from, EdgeLabel want) -> const Node& {
    for (const auto& [label, to] : successors(m_, from.id)) {
      if (label == want) return *m_.find_node(to);
    }
    throw SimulationError("'" + from.id + "' has no " + std::string(to_string(want)) + " edge");
  };
  const Node* cur = &next(*n, EdgeLabel::Next);
  for (std::size_t hops = 0; cur->kind == NodeKind::Branch; ++hops) {
    if (hops > m_.nodes().size()) throw SimulationError("branch cycle at '" + cur->id + "'");
    cur = &next(*cur, decide(cur->id, *cur->condition) ? EdgeLabel::True : EdgeLabel::False);
  }
  return element_of(*cur);
}

void RoutePlan::advance(const Point& position, double tolerance) {
  while (next_leg < legs.size() && distance(position, legs[next_leg].target) <= tolerance) ++next_leg;
}

bool RoutePlan::finished() const {
  if (timed) return elapsed_s >= hover_s - kTimeEps;
  return next_leg >= legs.size();
}

RoutePlan plan_route(const RoutingElement& e, const Point& position, const Scenario& s, const SimConfig& cfg) {
  RoutePlan plan;
  switch (e.kind) {
    case NodeKind::TakeOff:
      plan.legs.push_back({Point{position.x, position.y, s.home.z + number_param(e, "altitude")}, cfg.climb_rate});
      break;
    case NodeKind::TouchDown:
      plan.legs.push_back({Point{position.x, position.y, s.home.z}, cfg.climb_rate});
      break;
    case NodeKind::FlyTo: {
      const auto* lit = e.params.find("target");
      if (!lit || !std::holds_alternative<Point>(*lit)) throw SimulationError("'" + e.id + "' lacks a target");
      plan.legs.push_back({std::get<Point>(*lit), cfg.cruise_speed});
      break;
    }
    case NodeKind::FlyHome:
      plan.legs.push_back({Point{s.home.x, s.home.y, position.z}, cfg.cruise_speed});
      break;
    case NodeKind::FlyInArea: {
      const auto* lit = e.params.find("area");
      if (!lit || !std::holds_alternative<Rect>(*lit)) throw SimulationError("'" + e.id + "' lacks an area");
      const auto& r = std::get<Rect>(*lit);
      double spacing = number_param(e, "spacing");
      std::vector<double> rows;
      auto full = static_cast<long>(std::floor((r.y1 - r.y0) / spacing + kTimeEps));
      for (long k = 0; k <= full; ++k) rows.push_back(r.y0 + static_cast<double>(k) * spacing);
      if (rows.back() < r.y1 - kTimeEps) rows.push_back(r.y1);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        bool forward = i % 2 == 0;
        plan.legs.push_back({Point{forward ? r.x0 : r.x1, rows[i], position.z}, cfg.cruise_speed});
        plan.legs.push_back({Point{forward ? r.x1 : r.x0, rows[i], position.z}, cfg.cruise_speed});
      }
      break;
    }
    case NodeKind::Hover:
      plan.timed = true;
      plan.hover_s = number_param(e, "duration_s");
      break;
    case NodeKind::Branch:
      throw SimulationError("'" + e.id + "' is not a routing element");
  }
  return plan;
}

Motion routing_motion(RoutePlan& plan, const Point& position, const SimConfig& cfg, double tick_s) {
  plan.advance(position, cfg.arrival_tolerance);
  if (plan.finished()) return Motion{Vec3{}, true};
  if (plan.timed) return Motion{Vec3{}, false};
  const auto& leg = plan.legs[plan.next_leg];
  Vec3 d = leg.target - position;
  double dist = norm(d);
  double speed = std::min(leg.speed, dist / tick_s);
  return Motion{d * (speed / dist), false};
}

FilterOutput apply_filters(const FilterDecl& f, const Vec3& desired, const Point& position, const Scenario& s,
                           const Registry& reg, double tick_s) {
  FilterOutput out{desired, {}};
  for (auto it = f.actions.rbegin(); it != f.actions.rend(); ++it) {
    const auto* def = reg.lookup(it->action_name);
    if (!def || def->category != ActionCategory::Filter)
      throw SimulationError("'" + it->action_name + "' is not a filter action");
    const auto& hooks = motion_hooks();
    auto hook = std::find_if(hooks.begin(), hooks.end(), [&](const MotionHook& h) { return h.behavior == def->behavior; });
    if (hook == hooks.end()) throw SimulationError("no motion hook '" + def->behavior + "'");
    double value = hook_param(*it, *def, hook->param);

    Vec3 before = out.velocity;
    if (hook->behavior == "maintain_speed") {
      out.velocity = scale_to(out.velocity, value);
    } else if (hook->behavior == "avoid_obstacles") {
      out.velocity = avoid_obstacles(out.velocity, value, position, s, tick_s);
    } else if (hook->behavior == "max_altitude") {
      out.velocity = max_altitude(out.velocity, value, position, tick_s);
    }
    if (!(out.velocity == before)) out.clamped_by.push_back(it->action_name);
  }
  return out;
}

bool compare(const Value& value, Comparator cmp, const Literal& reference) {
  auto ordered = [&](auto a, auto b) {
    switch (cmp) {
      case Comparator::EQ: return a == b;
      case Comparator::NE: return a != b;
      case Comparator::LT: return a < b;
      case Comparator::LE: return a <= b;
      case Comparator::GT: return a > b;
      case Comparator::GE: return a >= b;
    }
    return false;
  };
  auto equality = [&](const auto& a, const auto& b) {
    if (cmp == Comparator::EQ) return a == b;
    if (cmp == Comparator::NE) return a != b;
    throw SimulationError("ordering comparator '" + std::string(symbol(cmp)) + "' on a non-number");
  };
  if (const auto* d = std::get_if<double>(&value)) {
    if (const auto* r = std::get_if<double>(&reference)) return ordered(*d, *r);
  } else if (const auto* b = std::get_if<bool>(&value)) {
    if (const auto* r = std::get_if<bool>(&reference)) return equality(*b, *r);
  } else if (const auto* t = std::get_if<std::string>(&value)) {
    if (const auto* r = std::get_if<std::string>(&reference)) return equality(*t, *r);
  }
  throw SimulationError("cannot compare " + std::string(to_string(type_of(value))) + " with a " +
                        std::string(to_string(kind_of(reference))) + " literal");
}

Simulator::Simulator(const FlowSource& flow, Scenario scenario, const Registry& reg, SimConfig cfg)
    : flow_(flow), scenario_(std::move(scenario)), reg_(reg), cfg_(cfg) {
  state_.position = scenario_.home;
  guarded([&] {
    enter(flow_.entry(), 0.0);
    settle(0.0);
  });
  record_sample();
}

void Simulator::guarded(const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    finish(Outcome::Kind::Error, e.what(), state_.time_s);
  }
}

void Simulator::emit(double t, EventKind kind, std::vector<std::pair<std::string, std::string>> payload) {
  trace_.events.push_back(Event{t, kind, std::move(payload)});
}

void Simulator::record_sample() {
  trace_.samples.push_back(
      Sample{state_.time_s, state_.position, norm(state_.velocity), state_.battery, state_.current_node});
}

void Simulator::enter(RoutingElement element, double t) {
  current_ = std::move(element);
  state_.current_node = current_.id;
  emit(t, EventKind::NodeEntered, {{"node", current_.id}, {"kind", std::string(keyword(current_.kind))}});
  plan_ = plan_route(current_, state_.position, scenario_, cfg_);
  clamping_.clear();
  state_.active_parallels.clear();
  for (const auto& name : current_.parallels) {
    if (!flow_.parallel(name)) throw SimulationError("unknown parallel block '" + name + "'");
    state_.active_parallels.push_back(ParallelActivation{name, t, 0, t});
    emit(t, EventKind::ParallelEntered, {{"parallel", name}, {"node", current_.id}});
  }
}

void Simulator::leave(double t, const char* how) {
  for (auto it = state_.active_parallels.rbegin(); it != state_.active_parallels.rend(); ++it) {
    emit(t, EventKind::ParallelExited,
         {{"parallel", it->name}, {"node", current_.id}, {"fired", std::to_string(it->fired)}});
  }
  state_.active_parallels.clear();
  emit(t, EventKind::NodeCompleted, {{"node", current_.id}, {"status", how}});
}

void Simulator::finish(Outcome::Kind kind, std::string detail, double) {
  trace_.outcome = Outcome{kind, std::move(detail)};
  state_.phase = Phase::Done;
  state_.velocity = Vec3{};
}

std::optional<std::string> Simulator::service_parallels(double t) {
  for (auto& a : state_.active_parallels) {
    const auto* decl = flow_.parallel(a.name);
    if (!decl) throw SimulationError("unknown parallel block '" + a.name + "'");
    while (a.next_fire_s <= t + kTimeEps) {
      for (const auto& inst : decl->actions) fire(inst, a.name, t);
      ++a.fired;
      a.next_fire_s = decl->period_s ? a.activated_s + a.fired * *decl->period_s
                                     : std::numeric_limits<double>::infinity();
      if (!decl->until) continue;
      bool taken = evaluate_condition(decl->until->condition, a.name);
      emit(t, EventKind::BranchTaken, {{"source", a.name}, {"result", taken ? "true" : "false"}});
      if (taken) return decl->until->target;
    }
  }
  return std::nullopt;
}

// Runs every transition due at time t. Entering the same node twice in one
// call means a cycle of zero-duration elements; it resumes on the next tick
// instead of spinning in place.
void Simulator::settle(double t) {
  std::set<std::string> entered;
  for (int hop = 0; hop < kSettleHops; ++hop) {
    if (state_.phase == Phase::Done) return;
    if (auto target = service_parallels(t)) {
      leave(t, "preempted");
      enter(flow_.element(*target), t);
    } else {
      plan_.advance(state_.position, cfg_.arrival_tolerance);
      if (!plan_.finished()) return;
      complete_current(t);
    }
    if (!entered.insert(current_.id).second) return;
  }
  throw SimulationError("no time passes between routing elements near '" + current_.id + "'");
}

void Simulator::complete_current(double t) {
  for (const auto& inst : current_.embedded) fire(inst, current_.id, t);
  leave(t, "completed");
  if (state_.phase == Phase::Aborting) {
    if (current_.id == kAbortHome) {
      enter(RoutingElement{kAbortTouchDown, NodeKind::TouchDown, {}, {}, std::nullopt, {}}, t);
    } else {
      finish(Outcome::Kind::Aborted, abort_reason_, t);
    }
    return;
  }
  auto decide = [&](const std::string& id, const Condition& c) {
    bool taken = evaluate_condition(c, id);
    emit(t, EventKind::BranchTaken, {{"source", id}, {"result", taken ? "true" : "false"}});
    return taken;
  };
  auto next = flow_.after(current_.id, decide);
  if (!next) {
    finish(Outcome::Kind::Completed, "", t);
    return;
  }
  enter(std::move(*next), t);
}

void Simulator::begin_abort(const std::string& reason, double t) {
  emit(t, EventKind::AbortTriggered, {{"reason", reason}, {"node", current_.id}});
  abort_reason_ = reason;
  abort_filter_ = current_.filter;
  leave(t, "aborted");
  state_.phase = Phase::Aborting;
  enter(RoutingElement{kAbortHome, NodeKind::FlyHome, {}, {}, std::nullopt, {}}, t);
}

Vec3 Simulator::commanded_velocity() {
  Motion motion = routing_motion(plan_, state_.position, cfg_, scenario_.tick_s);
  Vec3 v = motion.desired_velocity;
  const auto& filter_name = state_.phase == Phase::Aborting ? abort_filter_ : current_.filter;
  if (filter_name) {
    const auto* decl = flow_.filter(*filter_name);
    if (!decl) throw SimulationError("unknown filter '" + *filter_name + "'");
    auto out = apply_filters(*decl, v, state_.position, scenario_, reg_, scenario_.tick_s);
    v = out.velocity;
    std::set<std::string> now(out.clamped_by.begin(), out.clamped_by.end());
    for (const auto& a : out.clamped_by) {
      if (clamping_.insert(a).second) {
        emit(state_.time_s, EventKind::FilterClamped,
             {{"filter", *filter_name}, {"action", a}, {"node", current_.id}});
      }
    }
    for (auto it = clamping_.begin(); it != clamping_.end();) {
      it = now.count(*it) ? std::next(it) : clamping_.erase(it);
    }
  }
  return scale_to(v, cfg_.v_max);
}

void Simulator::step() {
  if (state_.phase == Phase::Done) return;
  guarded([&] {
    double dt = scenario_.tick_s;
    Vec3 v = commanded_velocity();
    double t1 = static_cast<double>(state_.tick + 1) * dt;
    state_.position += v * dt;
    state_.velocity = v;
    double drain = (cfg_.hover_drain + cfg_.motion_drain * norm(v)) / scenario_.battery_capacity_s * dt;
    state_.battery = std::max(0.0, state_.battery - drain);
    ++state_.tick;
    state_.time_s = t1;
    if (plan_.timed) plan_.elapsed_s += dt;

    if (state_.phase == Phase::Running && state_.battery <= scenario_.reserve) {
      begin_abort("battery", t1);
    } else if (state_.phase == Phase::Running && t1 >= cfg_.max_time_s - kTimeEps) {
      begin_abort("timeout", t1);
    } else if (state_.phase == Phase::Aborting && (state_.battery <= 0.0 || t1 >= 2.0 * cfg_.max_time_s)) {
      // The safe return is stuck (e.g. held by a filter) and cannot finish.
      const char* why = state_.battery <= 0.0 ? "depleted" : "stalled";
      emit(t1, EventKind::AbortTriggered, {{"reason", why}, {"node", current_.id}});
      leave(t1, "aborted");
      finish(Outcome::Kind::Aborted, why, t1);
      return;
    }
    settle(t1);
  });
  record_sample();
}

Trace Simulator::run() {
  while (!done()) step();
  return trace_;
}

bool Simulator::evaluate_condition(const Condition& c, const std::string& source) {
  auto it = state_.results.find(c.result_ref);
  if (it == state_.results.end()) throw SimulationError("MissingResult: '" + c.result_ref + "' has no value yet");
  Value v = it->second;
  for (const auto& step : c.processing_chain) {
    const auto* def = reg_.lookup(step.action_name);
    if (!def || def->category != ActionCategory::Processing)
      throw SimulationError("'" + step.action_name + "' is not a processing action");
    if (!def->input_type || type_of(v) != *def->input_type)
      throw SimulationError("'" + step.action_name + "' cannot process a " + std::string(to_string(type_of(v))));
    Point where = state_.position;
    if (const auto* o = std::get_if<OpaqueValue>(&v)) where = o->captured_at;
    v = invoke(*def, resolve_params(step.params, def->params), &v, where);
    emit(state_.time_s, EventKind::ActionFired,
         {{"action", step.action_name}, {"source", source}, {"value", describe(v)}});
  }
  return compare(v, c.comparator, c.reference_value);
}

Value Simulator::fire(const ActionInstance& inst, const std::string& source, double t) {
  const auto* def = reg_.lookup(inst.action_name);
  if (!def) throw SimulationError("unknown action '" + inst.action_name + "'");
  Value v = invoke(*def, resolve_params(inst.params, def->params), nullptr, state_.position);
  std::vector<std::pair<std::string, std::string>> payload{{"action", inst.action_name}, {"source", source}};
  if (inst.result_label) {
    state_.results[*inst.result_label] = v;
    payload.emplace_back("label", *inst.result_label);
  }
  payload.emplace_back("value", describe(v));
  emit(t, EventKind::ActionFired, std::move(payload));
  return v;
}

Value Simulator::invoke(const ActionDefinition& def, const ParamMap& params, const Value* input, const Point& where) {
  int n = ++state_.invocations[def.name];
  for (const auto& rule : scenario_.script) {
    if (rule.action != def.name) continue;
    if (rule.nth && *rule.nth != n) continue;
    if (rule.region && !rule.region->contains(where.x, where.y)) continue;
    Value out = std::visit([](const auto& o) -> Value { return o; }, rule.output);
    bool opaque = def.output_type == ValueType::Image || def.output_type == ValueType::PointCloud;
    if (opaque && std::holds_alternative<std::string>(out))
      return OpaqueValue{def.output_type, state_.position, n, std::get<std::string>(out)};
    if (type_of(out) != def.output_type)
      throw SimulationError("scripted output for '" + def.name + "' is a " + std::string(to_string(type_of(out))) +
                            ", expected " + std::string(to_string(def.output_type)));
    return out;
  }
  if (def.behavior == "threshold_exceeded") {
    const auto* limit = params.find("limit");
    if (!input || !std::holds_alternative<double>(*input) || !limit || !std::holds_alternative<double>(*limit))
      throw SimulationError("threshold_exceeded needs a Number input and a limit");
    return std::get<double>(*input) > std::get<double>(*limit);
  }
  switch (def.output_type) {
    case ValueType::Bool: return false;
    case ValueType::Number: return 0.0;
    case ValueType::Text: return std::string();
    case ValueType::Unit: return UnitValue{};
    case ValueType::Image:
    case ValueType::PointCloud: return OpaqueValue{def.output_type, state_.position, n, ""};
  }
  return UnitValue{};
}

Trace run(const Mission& m, const Scenario& s, const Registry& reg, const SimConfig& cfg) {
  MissionFlowSource flow(m);
  return Simulator(flow, s, reg, cfg).run();
}

}  // namespace skymission
