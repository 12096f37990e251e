#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "anicon/conditions.hpp"
#include "anicon/sampling.hpp"

namespace anicon {

using Json = nlohmann::ordered_json;

Json to_json(const SamplePoint& p);
Json to_json(const Side& s);
Json to_json(const ConditionReport& r);
Json to_json(const Classification& c);
Json to_json(const Audit& a);
Json to_json(const std::vector<Rejection>& rejected);

/// Per-quantity maximum relative deviation between formula and direct paths.
Json oracle_summary(const std::vector<ConformalPoint>& points);

/// Deterministic text: two-space indent, keys in insertion order, doubles
/// with 17 significant digits, non-finite numbers as strings.
std::string dump_machine(const Json& j);

/// Indented rendering for terminals; flat record arrays become tables.
std::string dump_human(const Json& j);

std::string format_double(double v, int digits = 17);

}  // namespace anicon
