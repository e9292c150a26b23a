#include "skymission/trace.hpp"

#include <cmath>

#include "json.hpp"

namespace skymission {

namespace {

using nlohmann::ordered_json;

double rounded(double x) {
  double r = std::round(x * 1e9) / 1e9;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

ordered_json sample_record(const Sample& s) {
  ordered_json j;
  j["t"] = rounded(s.t);
  j["pos"] = {rounded(s.position.x), rounded(s.position.y), rounded(s.position.z)};
  j["speed"] = rounded(s.speed);
  j["battery"] = rounded(s.battery);
  j["node"] = s.node;
  return j;
}

ordered_json event_record(const Event& e) {
  ordered_json j;
  j["t"] = rounded(e.t);
  j["event"] = std::string(to_string(e.kind));
  ordered_json payload = ordered_json::object();
  for (const auto& [k, v] : e.payload) payload[k] = v;
  j["payload"] = std::move(payload);
  return j;
}

ordered_json outcome_record(const Outcome& o) {
  ordered_json j;
  switch (o.kind) {
    case Outcome::Kind::Completed: j["outcome"] = "Completed"; break;
    case Outcome::Kind::Aborted:
      j["outcome"] = "Aborted";
      j["reason"] = o.detail;
      break;
    case Outcome::Kind::Error:
      j["outcome"] = "Error";
      j["message"] = o.detail;
      break;
  }
  return j;
}

}  // namespace

std::string to_jsonl(const Trace& trace) {
  std::string out;
  std::size_t e = 0;
  for (const auto& s : trace.samples) {
    for (; e < trace.events.size() && trace.events[e].t <= s.t; ++e) out += event_record(trace.events[e]).dump() + "\n";
    out += sample_record(s).dump() + "\n";
  }
  for (; e < trace.events.size(); ++e) out += event_record(trace.events[e]).dump() + "\n";
  out += outcome_record(trace.outcome).dump() + "\n";
  return out;
}

std::string canonical_events(const Trace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    out += format_number(rounded(e.t));
    out += ' ';
    out += to_string(e.kind);
    for (const auto& [k, v] : e.payload) out += " " + k + "=" + quote(v);
    out += '\n';
  }
  out += "outcome " + trace.outcome.text() + "\n";
  return out;
}

}  // namespace skymission
