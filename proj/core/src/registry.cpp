#include "skymission/registry.hpp"

#include <algorithm>

namespace skymission {

std::string_view to_string(ActionCategory category) {
  switch (category) {
    case ActionCategory::Regular: return "regular";
    case ActionCategory::Processing: return "processing";
    case ActionCategory::Filter: return "filter";
  }
  return "?";
}

std::optional<ActionCategory> action_category_from(std::string_view name) {
  for (auto c : {ActionCategory::Regular, ActionCategory::Processing, ActionCategory::Filter}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

const ParamSpec* ActionDefinition::param(std::string_view key) const {
  auto it = std::find_if(params.begin(), params.end(), [&](const ParamSpec& p) { return p.name == key; });
  return it == params.end() ? nullptr : &*it;
}

const std::vector<MotionHook>& motion_hooks() {
  static const std::vector<MotionHook> kHooks = {
      {"maintain_speed", "limit"},
      {"avoid_obstacles", "clearance"},
      {"max_altitude", "limit"},
  };
  return kHooks;
}

namespace {

[[noreturn]] void invalid(const ActionDefinition& def, const std::string& why) {
  throw RegistryError(RegistryError::Kind::InvalidDefinition, "action '" + def.name + "': " + why);
}

void require_number_param(const ActionDefinition& def, std::string_view name) {
  const ParamSpec* p = def.param(name);
  if (!p || p->kind != LiteralKind::Number || (!p->required && !p->default_value))
    invalid(def, "behavior '" + def.behavior + "' needs a number parameter '" + std::string(name) +
                     "' that is required or defaulted");
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return start(c) || (c >= '0' && c <= '9'); });
}

}  // namespace

void Registry::add(ActionDefinition def) {
  if (!is_identifier(def.name)) invalid(def, "name is not an identifier");
  if (defs_.count(def.name))
    throw RegistryError(RegistryError::Kind::DuplicateName, "action '" + def.name + "' is already registered");

  switch (def.category) {
    case ActionCategory::Regular:
      if (def.input_type) invalid(def, "regular actions take no input");
      break;
    case ActionCategory::Processing:
      if (!def.input_type) invalid(def, "processing actions need an input type");
      break;
    case ActionCategory::Filter:
      if (def.input_type) invalid(def, "filter actions take no input");
      if (def.output_type != ValueType::Unit) invalid(def, "filter actions must output Unit");
      break;
  }

  std::vector<std::string> seen;
  for (const auto& p : def.params) {
    if (!is_identifier(p.name)) invalid(def, "parameter name '" + p.name + "' is not an identifier");
    if (std::find(seen.begin(), seen.end(), p.name) != seen.end())
      invalid(def, "parameter '" + p.name + "' listed twice");
    seen.push_back(p.name);
    if (p.default_value && kind_of(*p.default_value) != p.kind)
      invalid(def, "default for '" + p.name + "' is not a " + std::string(to_string(p.kind)));
  }

  auto hook = std::find_if(motion_hooks().begin(), motion_hooks().end(),
                           [&](const MotionHook& h) { return h.behavior == def.behavior; });
  if (def.category == ActionCategory::Filter) {
    if (hook == motion_hooks().end()) invalid(def, "filter actions must bind a motion hook, not '" + def.behavior + "'");
    require_number_param(def, hook->param);
  } else if (hook != motion_hooks().end()) {
    invalid(def, "motion hook '" + def.behavior + "' is only valid for filter actions");
  } else if (def.behavior == "threshold_exceeded") {
    if (def.category != ActionCategory::Processing || def.input_type != ValueType::Number ||
        def.output_type != ValueType::Bool)
      invalid(def, "behavior 'threshold_exceeded' maps Number to Bool");
    require_number_param(def, "limit");
  } else if (def.behavior != "scripted") {
    invalid(def, "unknown behavior '" + def.behavior + "'");
  }

  auto name = def.name;
  defs_.emplace(std::move(name), std::move(def));
}

const ActionDefinition* Registry::lookup(std::string_view name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

std::vector<std::string> Registry::names() const {
  std::vector<std::string> out;
  out.reserve(defs_.size());
  for (const auto& [name, def] : defs_) out.push_back(name);
  return out;
}

Registry builtin_catalog() {
  using LK = LiteralKind;
  using VT = ValueType;
  auto param = [](std::string name, LK kind, bool required, std::optional<Literal> def = std::nullopt,
                  ParamConstraint c = ParamConstraint::None) {
    return ParamSpec{std::move(name), kind, required, std::move(def), c};
  };
  auto regular = [](std::string name, VT out, std::vector<ParamSpec> params) {
    return ActionDefinition{std::move(name), ActionCategory::Regular, std::nullopt, out, std::move(params), "scripted"};
  };
  auto processing = [](std::string name, VT in, VT out, std::vector<ParamSpec> params,
                       std::string behavior = "scripted") {
    return ActionDefinition{std::move(name), ActionCategory::Processing, in, out, std::move(params),
                            std::move(behavior)};
  };
  auto filter = [&](std::string name, std::string param_name) {
    auto behavior = name;
    return ActionDefinition{std::move(name), ActionCategory::Filter, std::nullopt, VT::Unit,
                            {param(std::move(param_name), LK::Number, true, std::nullopt, ParamConstraint::Positive)},
                            std::move(behavior)};
  };

  Registry reg;
  reg.add(regular("take_picture", VT::Image,
                  {param("resolution", LK::Text, false, std::string("640x480")),
                   param("quality", LK::Number, false, 0.9, ParamConstraint::Positive)}));
  reg.add(regular("take_infrared_picture", VT::Image, {param("resolution", LK::Text, false, std::string("640x480"))}));
  reg.add(regular("laser_scan", VT::PointCloud, {param("range", LK::Number, false, 30.0, ParamConstraint::Positive)}));
  reg.add(regular("read_sensor", VT::Number, {param("name", LK::Text, true)}));
  reg.add(regular("record_video_start", VT::Unit, {param("resolution", LK::Text, false, std::string("1920x1080"))}));
  reg.add(regular("record_video_stop", VT::Unit, {}));
  reg.add(regular("scan_wifi", VT::Number, {param("ssid", LK::Text, false)}));

  reg.add(processing("recognize_image", VT::Image, VT::Text, {}));
  reg.add(processing("threshold_exceeded", VT::Number, VT::Bool, {param("limit", LK::Number, true)},
                     "threshold_exceeded"));
  reg.add(processing("interpret_scan", VT::PointCloud, VT::Number, {}));

  reg.add(filter("maintain_speed", "limit"));
  reg.add(filter("avoid_obstacles", "clearance"));
  reg.add(filter("max_altitude", "limit"));
  return reg;
}

std::vector<Diagnostic> validate_params(const ParamMap& params, const std::vector<ParamSpec>& schema,
                                        const std::string& owner, const SourceSpan& at) {
  std::vector<Diagnostic> out;
  for (const auto& [key, value] : params.entries()) {
    auto spec = std::find_if(schema.begin(), schema.end(), [&](const ParamSpec& p) { return p.name == key; });
    if (spec == schema.end()) {
      out.push_back(make_error("T005", "unknown parameter '" + key + "' for '" + owner + "'", at));
      continue;
    }
    if (kind_of(value) != spec->kind) {
      out.push_back(make_error("T004",
                               "parameter '" + key + "' of '" + owner + "' expects a " +
                                   std::string(to_string(spec->kind)) + ", got a " +
                                   std::string(to_string(kind_of(value))),
                               at));
      continue;
    }
    if (spec->constraint != ParamConstraint::None && spec->kind == LiteralKind::Number) {
      double v = std::get<double>(value);
      bool ok = spec->constraint == ParamConstraint::Positive ? v > 0.0 : v >= 0.0;
      if (!ok)
        out.push_back(make_error("T007",
                                 "parameter '" + key + "' of '" + owner + "' must be " +
                                     (spec->constraint == ParamConstraint::Positive ? "positive" : "non-negative"),
                                 at));
    }
  }
  for (const auto& spec : schema) {
    if (spec.required && !params.contains(spec.name))
      out.push_back(make_error("T006", "missing required parameter '" + spec.name + "' for '" + owner + "'", at));
  }
  return out;
}

std::vector<Diagnostic> validate_instance(const ActionInstance& inst, const ActionDefinition& def) {
  return validate_params(inst.params, def.params, def.name, inst.span);
}

ParamMap resolve_params(const ParamMap& params, const std::vector<ParamSpec>& schema) {
  ParamMap out = params;
  for (const auto& spec : schema) {
    if (spec.default_value && !out.contains(spec.name)) out.insert(spec.name, *spec.default_value);
  }
  return out;
}

}  // namespace skymission
