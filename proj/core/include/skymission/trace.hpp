#pragma once

#include <string>

#include "skymission/simulator.hpp"

namespace skymission {

/// JSON Lines: sample records `{"t","pos","speed","battery","node"}`
/// interleaved with event records `{"t","event","payload"}` in time order
/// (events at a sample's time precede it), then one outcome record.
/// Times and reals are rounded to 1e-9 so output is stable text.
std::string to_jsonl(const Trace& trace);

/// Canonical event sequence, one line per event:
/// `t kind key=value key=value`. Used to compare runs byte-for-byte.
std::string canonical_events(const Trace& trace);

}  // namespace skymission
