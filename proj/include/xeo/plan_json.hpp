#pragma once

#include <string>

#include "xeo/json_io.hpp"
#include "xeo/plan.hpp"

namespace xeo {

// Canonical JSON interchange form (see docs/formats.md). Serialization is a
// pure function of the plan: equal plans produce identical bytes.
std::string serialize_plan(const LogicalPlan& plan);

ordered_json plan_to_ordered_json(const LogicalPlan& plan);
LogicalPlan plan_from_ordered_json(const ordered_json& j);

// Throws IoError on malformed input; never returns a partial plan.
LogicalPlan deserialize_plan(const std::string& bytes);

void save_plan(const LogicalPlan& plan, const std::string& path);
LogicalPlan load_plan(const std::string& path);

}  // namespace xeo
