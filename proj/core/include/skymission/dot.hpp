#pragma once

#include <string>

#include "skymission/mission.hpp"

namespace skymission {

/// Graphviz digraph of the mission. Routing elements are boxes, branches
/// diamonds; True edges green, False red. Filters (notes) and parallel
/// blocks (dashed boxes) hang off the elements they attach to by dotted
/// lines, and an `until` jump is a dashed edge from the parallel block to
/// its target.
std::string gen_dot(const Mission& m);

}  // namespace skymission
