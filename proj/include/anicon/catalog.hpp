#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anicon/expr.hpp"
#include "anicon/sampling.hpp"

namespace anicon {

struct CatalogEntry {
  std::string name;
  std::string expression;
  ParamList defaults;  // parameters and their default values
  SampleBox box;       // default sampling box
  std::string summary;
};

const std::vector<CatalogEntry>& catalog();

/// Looks up a built-in metric by name.
std::optional<CatalogEntry> find_metric(const std::string& name);

}  // namespace anicon
