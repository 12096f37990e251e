#include "anicon/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace anicon {

namespace {

void escape(std::ostream& os, const std::string& s) {
  os << '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"':
        os << "\\\"";
        break;
      case '\\':
        os << "\\\\";
        break;
      case '\n':
        os << "\\n";
        break;
      case '\t':
        os << "\\t";
        break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          os << buf;
        } else {
          os << c;
        }
    }
  }
  os << '"';
}

void machine(std::ostream& os, const Json& j, int indent) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << inner;
        escape(os, k);
        os << ": ";
        machine(os, v, indent + 2);
      }
      os << '\n' << pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      if (flat) {
        os << '[';
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) os << ", ";
          machine(os, j[k], indent + 2);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) os << ",\n";
        os << inner;
        machine(os, j[k], indent + 2);
      }
      os << '\n' << pad << ']';
      return;
    }
    case Json::value_t::string:
      escape(os, j.get<std::string>());
      return;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << format_double(v);
      } else {
        escape(os, std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
      }
      return;
    }
    default:
      os << j.dump();
  }
}

std::string scalar_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) return format_double(j.get<double>(), 6);
  if (j.is_null()) return "-";
  return j.dump();
}

bool is_condition(const Json& j) { return j.is_object() && j.contains("name") && j.contains("lhs"); }

bool is_record_table(const Json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const auto& e : j) {
    if (!e.is_object() || is_condition(e)) return false;
    for (const auto& [k, v] : e.items()) {
      if (v.is_object()) return false;
      if (v.is_array() && std::any_of(v.begin(), v.end(), [](const Json& x) { return x.is_structured(); })) {
        return false;
      }
    }
  }
  return true;
}

std::string cell(const Json& v) {
  if (!v.is_array()) return scalar_text(v);
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + scalar_text(v[k]);
  return s + ")";
}

void table(std::ostream& os, const Json& rows, const std::string& pad) {
  std::vector<std::string> keys;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  std::vector<std::size_t> width(keys.size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t c = 0; c < keys.size(); ++c) width[c] = keys[c].size();
  for (const auto& r : rows) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < keys.size(); ++c) {
      line.push_back(r.contains(keys[c]) ? cell(r[keys[c]]) : "");
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  auto emit = [&](const std::vector<std::string>& line) {
    os << pad;
    for (std::size_t c = 0; c < line.size(); ++c) {
      os << line[c];
      if (c + 1 < line.size()) os << std::string(width[c] - line[c].size() + 2, ' ');
    }
    os << '\n';
  };
  emit(keys);
  for (const auto& line : cells) emit(line);
}

std::string side_text(const Json& s) {
  return scalar_text(s["verdict"]) + " (max " + scalar_text(s["max"]) + ")";
}

void condition_line(std::ostream& os, const Json& r, const std::string& pad) {
  os << pad << scalar_text(r["name"]) << ": " << side_text(r["lhs"]);
  if (r.contains("rhs")) {
    os << " | " << side_text(r["rhs"]);
    if (r["rhs"].contains("branches") && !r["rhs"]["branches"].empty()) {
      os << " [";
      bool first = true;
      for (const auto& [b, n] : r["rhs"]["branches"].items()) {
        os << (first ? "" : ", ") << b << " x" << n.dump();
        first = false;
      }
      os << ']';
    }
    if (r.value("paired", false) && !r.value("agree", true)) os << "  DISAGREE";
  }
  if (r.contains("note") && !r["note"].get<std::string>().empty()) os << "  (" << r["note"].get<std::string>() << ')';
  os << '\n';
}

void human(std::ostream& os, const Json& j, int indent) {
  const std::string pad(indent, ' ');
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (!v.is_structured()) {
        os << pad << k << ": " << scalar_text(v) << '\n';
      } else if (is_condition(v)) {
        condition_line(os, v, pad);
      } else if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), is_condition)) {
        os << pad << k << ":\n";
        for (const auto& r : v) condition_line(os, r, pad + "  ");
      } else if (is_record_table(v)) {
        os << pad << k << ":\n";
        table(os, v, pad + "  ");
      } else if (v.is_array() && std::none_of(v.begin(), v.end(), [](const Json& e) { return e.is_structured(); })) {
        os << pad << k << ": " << (v.empty() ? "none" : cell(v)) << '\n';
      } else {
        os << pad << k << ":\n";
        human(os, v, indent + 2);
      }
    }
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (e.is_structured()) {
        os << pad << "-\n";
        human(os, e, indent + 2);
      } else {
        os << pad << "- " << scalar_text(e) << '\n';
      }
    }
  } else {
    os << pad << scalar_text(j) << '\n';
  }
}

}  // namespace

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  std::string s = buf;
  // Keep the value recognisably floating point.
  if (digits >= 17 && s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

Json to_json(const SamplePoint& p) { return Json{{"x", {p.x[0], p.x[1]}}, {"y", {p.y[0], p.y[1]}}}; }

Json to_json(const Side& s) {
  Json j;
  j["label"] = s.label;
  j["verdict"] = verdict_name(s.verdict);
  j["max"] = s.max_residual;
  j["points"] = s.points;
  if (s.worst) j["worst_index"] = *s.worst;
  if (!s.branches.empty()) {
    Json b = Json::object();
    for (const auto& [name, n] : s.branches) b[name] = n;
    j["branches"] = std::move(b);
  }
  return j;
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["name"] = r.name;
  j["verdict"] = verdict_name(r.verdict);
  j["lhs"] = to_json(r.lhs);
  if (r.rhs) {
    j["rhs"] = to_json(*r.rhs);
    j["paired"] = r.paired;
    if (r.paired) j["agree"] = r.agree;
  }
  if (!r.witnesses.empty()) {
    Json w = Json::array();
    for (const auto& x : r.witnesses) w.push_back(Json{{"index", x.index}, {"lhs", x.lhs}, {"rhs", x.rhs}});
    j["witnesses"] = std::move(w);
  }
  j["note"] = r.note;
  return j;
}

Json to_json(const Classification& c) {
  Json j = Json::array();
  for (const ConditionReport* r : c.all()) j.push_back(to_json(*r));
  return j;
}

Json to_json(const Audit& a) {
  Json j;
  Json rows = Json::array();
  for (const auto& r : a.table) rows.push_back(to_json(r));
  j["table"] = std::move(rows);
  j["table_agrees"] = a.table_agrees;
  Json extra = Json::array();
  for (const ConditionReport* r : {&a.condition(Condition::kVCbar), &a.condition(Condition::kVPhiTbar),
                                   &a.phiTbar_table_literal, &a.vphiT_table_literal}) {
    extra.push_back(to_json(*r));
  }
  j["additional"] = std::move(extra);
  Json ids = Json::array();
  for (const ConditionReport* r : {&a.identity_a, &a.identity_b, &a.first_integral_phi, &a.first_integral_phi_v2,
                                   &a.prop_branch_m, &a.prop_branch_l}) {
    ids.push_back(to_json(*r));
  }
  j["scalars"] = std::move(ids);
  j["theorem"] = Json{{"premise", a.theorem.premise},
                      {"berwald", verdict_name(a.theorem.berwald)},
                      {"status", a.theorem.status}};
  return j;
}

Json to_json(const std::vector<Rejection>& rejected) {
  Json j = Json::array();
  for (const auto& r : rejected) {
    j.push_back(Json{{"index", r.index},
                     {"x", {r.point.x[0], r.point.x[1]}},
                     {"y", {r.point.y[0], r.point.y[1]}},
                     {"reason", r.reason}});
  }
  return j;
}

Json oracle_summary(const std::vector<ConformalPoint>& points) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, std::size_t>> worst;
  for (const auto& p : points) {
    for (const auto& d : p.deviations) {
      auto [it, fresh] = worst.try_emplace(d.name, 0.0, 0);
      if (fresh) order.push_back(d.name);
      it->second.first = std::max(it->second.first, d.rel);
      ++it->second.second;
    }
  }
  Json j = Json::array();
  for (const auto& name : order) {
    j.push_back(Json{{"quantity", name}, {"max_rel_deviation", worst[name].first}, {"points", worst[name].second}});
  }
  return j;
}

std::string dump_machine(const Json& j) {
  std::ostringstream os;
  machine(os, j, 0);
  os << '\n';
  return os.str();
}

std::string dump_human(const Json& j) {
  std::ostringstream os;
  human(os, j, 0);
  return os.str();
}

}  // namespace anicon
