#include "anicon/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <optional>
#include <ostream>

#include "anicon/catalog.hpp"
#include "anicon/finsler_sphere.hpp"
#include "anicon/report.hpp"

namespace anicon::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string metric;
  std::string factor;
  std::vector<std::string> params;
  std::size_t samples = 64;
  std::string box;
  std::string points;
  int order = kDefaultJetOrder;
  double tol_zero = 1e-7;
  double tol_fail = 1e-3;
  bool strict = false;
  std::string format = "human";
  std::string vector;
  unsigned threads = 0;
};

/// A failure that maps onto a specific exit code.
struct Failure {
  int code;
  std::string message;
};

ParamBinding parse_param(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--param expects name=value, got '" + text + "'");
  const std::string name = text.substr(0, eq), value = text.substr(eq + 1);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw std::invalid_argument("bad value for parameter '" + name + "'");
  return {name, v};
}

/// Everything resolved from the raw flags.
struct Setup {
  RunConfig cfg;
  std::string metric_name;  // catalog name or empty
  Expr metric;
  ParamList params;
  std::optional<Factor> factor;
  SampleBox box;
  std::vector<SamplePoint> points;  // explicit points when --points was given
  Tolerances tol;
  unsigned threads = 1;
  std::vector<std::string> warnings;
};

Setup resolve(const RunConfig& cfg) {
  Setup s;
  s.cfg = cfg;
  s.tol = {cfg.tol_zero, cfg.tol_fail};
  if (!(cfg.tol_zero > 0.0 && cfg.tol_zero <= cfg.tol_fail)) {
    throw std::invalid_argument("tolerances must satisfy 0 < tol-zero <= tol-fail");
  }
  if (cfg.samples == 0) throw std::invalid_argument("--samples must be positive");
  if (cfg.order < 4 || cfg.order > kMaxJetOrder) throw std::invalid_argument("--order must be between 4 and 12");
  s.threads = cfg.threads ? cfg.threads : default_threads();

  ParamList given;
  for (const auto& p : cfg.params) given.push_back(parse_param(p));
  validate_params(given);

  std::string source = cfg.metric;
  s.box = SampleBox{};
  if (auto entry = find_metric(cfg.metric)) {
    s.metric_name = entry->name;
    source = entry->expression;
    s.box = entry->box;
    s.params = entry->defaults;
  }
  for (const auto& g : given) {
    auto it = std::find_if(s.params.begin(), s.params.end(), [&](const ParamBinding& p) { return p.name == g.name; });
    if (it != s.params.end()) {
      it->value = g.value;
    } else {
      s.params.push_back(g);
    }
  }
  if (cfg.command != "example") {
    if (source.empty()) throw std::invalid_argument("--metric is required");
    s.metric = parse(source, param_names(s.params));
    if (!cfg.factor.empty()) {
      s.factor = cfg.factor == "main-scalar" ? Factor::main_scalar()
                                             : Factor::expression(parse(cfg.factor, param_names(s.params)));
    }
  }
  if (cfg.command == "example") {
    if (!cfg.metric.empty() || !cfg.factor.empty()) s.warnings.push_back("example ignores --metric and --factor");
    if (!cfg.box.empty() || !cfg.points.empty() || !cfg.vector.empty()) {
      s.warnings.push_back("example uses its own box and vector field; --box, --points and --vector are ignored");
    }
    s.cfg.box.clear();
    s.cfg.points.clear();
    s.cfg.vector.clear();
    s.box = sphere::kBox;
    return s;
  }
  if (!cfg.box.empty()) s.box = parse_box(cfg.box);
  if (!cfg.points.empty()) s.points = read_points(cfg.points);
  return s;
}

Json config_echo(const Setup& s) {
  Json j;
  j["command"] = s.cfg.command;
  if (s.cfg.command != "example") {
    j["metric"] = s.metric_name.empty() ? print(s.metric) : s.metric_name;
    j["metric_expression"] = print(s.metric);
    j["factor"] = !s.factor ? Json(nullptr)
                            : Json(s.factor->is_main_scalar() ? "main-scalar" : print(s.factor->expr));
  }
  Json params = Json::object();
  for (const auto& p : s.params) params[p.name] = p.value;
  j["params"] = std::move(params);
  if (s.cfg.points.empty()) {
    j["samples"] = s.cfg.samples;
    j["box"] = format_box(s.box);
  } else {
    j["points_file"] = s.cfg.points;
    j["points"] = s.points.size();
  }
  j["order"] = s.cfg.order;
  j["tol_zero"] = s.tol.zero;
  j["tol_fail"] = s.tol.fail;
  j["strict"] = s.cfg.strict;
  if (!s.cfg.vector.empty()) j["vector"] = s.cfg.vector;
  return j;
}

template <class T>
Sampled<T> collect(const Setup& s, const std::function<T(const SamplePoint&)>& eval) {
  Sampled<T> out = s.cfg.points.empty() ? sample_box<T>(s.box, s.cfg.samples, eval, s.threads)
                                        : sample_list<T>(s.points, eval, s.threads);
  if (out.values.empty()) throw Failure{kDomain, "no admissible sample points"};
  return out;
}

template <class T>
Json sample_json(const Sampled<T>& smp, const Setup& s, std::vector<std::string>& warnings) {
  Json j;
  j["requested"] = s.cfg.points.empty() ? s.cfg.samples : s.points.size();
  j["accepted"] = smp.points.size();
  j["candidates"] = smp.candidates;
  j["rejected"] = to_json(smp.rejected);
  if (smp.exhausted) {
    warnings.push_back("only " + std::to_string(smp.points.size()) + " admissible points found among " +
                       std::to_string(smp.candidates) + " candidates");
  }
  return j;
}

Json point_row(const SamplePoint& p) {
  Json j;
  j["x1"] = p.x[0];
  j["x2"] = p.x[1];
  j["y1"] = p.y[0];
  j["y2"] = p.y[1];
  return j;
}

struct Outcome {
  Json report;
  bool failed_verdict = false;
};

bool any_fails(const Classification& c) {
  for (const ConditionReport* r : c.all()) {
    if (r->verdict == Verdict::kFails) return true;
  }
  return false;
}

ConformalChange make_change(const Setup& s, std::vector<std::string>& warnings) {
  ConformalChange cc(Surface(s.metric, s.params, s.cfg.order), *s.factor);
  for (const auto& w : cc.warnings()) warnings.push_back(w);
  return cc;
}

void require_factor(const Setup& s) {
  if (!s.factor) throw std::invalid_argument(s.cfg.command + " needs --factor");
}

/// The main-scalar factor of a Riemannian metric is zero: nothing to transform.
void require_nonzero_main_scalar(const Setup& s, const std::vector<PointEvaluation>& pts) {
  if (!s.factor || !s.factor->is_main_scalar()) return;
  for (const auto& p : pts) {
    if (std::abs(p.conf.I) >= s.tol.zero) return;
  }
  throw Failure{kDomain, "main scalar vanishes on the samples; the change reduces to an isotropic one"};
}

std::vector<PointEvaluation> evaluate_all(const Setup& s, const ConformalChange& cc, Json& report,
                                          std::vector<std::string>& warnings) {
  const auto smp = collect<PointEvaluation>(s, [&](const SamplePoint& p) { return evaluate_point(cc, p); });
  report["samples"] = sample_json(smp, s, warnings);
  require_nonzero_main_scalar(s, smp.values);
  return smp.values;
}

std::vector<ConformalPoint> conformal_points(const std::vector<PointEvaluation>& pts) {
  std::vector<ConformalPoint> out;
  for (const auto& p : pts) out.push_back(p.conf);
  return out;
}

Outcome cmd_analyze(const Setup& s, std::vector<std::string>& warnings) {
  Outcome o;
  Json& r = o.report;
  if (!s.factor) {
    const Surface surface(s.metric, s.params, s.cfg.order);
    struct Row {
      GeometryFlags flags;
      int eps;
    };
    const auto smp = collect<Row>(s, [&](const SamplePoint& p) {
      const Geometry g = surface.geometry(p);
      return Row{geometry_flags(g), g.eps};
    });
    r["samples"] = sample_json(smp, s, warnings);
    std::vector<GeometryFlags> flags;
    Json rows = Json::array();
    for (std::size_t k = 0; k < smp.points.size(); ++k) {
      const auto& f = smp.values[k].flags;
      flags.push_back(f);
      Json row = point_row(smp.points[k]);
      row["eps"] = smp.values[k].eps;
      row["F"] = f.F;
      row["I"] = f.I;
      row["I;2"] = f.I_v2;
      row["I,1"] = f.I_h1;
      row["I,2"] = f.I_h2;
      row["R"] = f.R;
      row["hamel"] = f.hamel;
      rows.push_back(std::move(row));
    }
    const Classification c = classify(flags, s.tol);
    r["classification"] = Json{{"F", to_json(c)}};
    r["points"] = std::move(rows);
    o.failed_verdict = any_fails(c);
    return o;
  }
  const ConformalChange cc = make_change(s, warnings);
  const auto pts = evaluate_all(s, cc, r, warnings);
  std::vector<GeometryFlags> base, target;
  Json rows = Json::array();
  for (const auto& p : pts) {
    base.push_back(p.base);
    target.push_back(p.target);
    const auto& c = p.conf;
    Json row = point_row(c.point);
    row["eps"] = c.eps;
    row["F"] = c.F;
    row["I"] = c.I;
    row["phi"] = c.phi;
    row["phi;2"] = c.phi_v2;
    row["sigma"] = c.sigma;
    row["rho"] = c.rho;
    row["Q"] = c.formula.Q;
    row["P"] = c.formula.P;
    row["I_bar"] = c.frame_applicable ? Json(c.formula.I_bar) : Json(nullptr);
    row["R_bar"] = p.target.R;
    rows.push_back(std::move(row));
  }
  const Classification cb = classify(base, s.tol), ct = classify(target, s.tol);
  r["classification"] = Json{{"F", to_json(cb)}, {"F_bar", to_json(ct)}};
  r["oracle"] = oracle_summary(conformal_points(pts));
  r["points"] = std::move(rows);
  o.failed_verdict = any_fails(cb) || any_fails(ct);
  return o;
}

Outcome cmd_transform(const Setup& s, std::vector<std::string>& warnings) {
  require_factor(s);
  Outcome o;
  Json& r = o.report;
  const ConformalChange cc = make_change(s, warnings);
  const auto pts = evaluate_all(s, cc, r, warnings);
  Json rows = Json::array();
  double rho_id = 0.0, qp = 0.0, t13 = 0.0, vb = 0.0;
  std::size_t inapplicable = 0, eps_mismatch = 0;
  for (const auto& p : pts) {
    const auto& c = p.conf;
    const auto& f = c.formula;
    rho_id = std::max(rho_id, std::abs(c.rho_identity));
    qp = std::max(qp, std::abs(c.qp_identity) / c.qp_scale);
    Json row = point_row(c.point);
    row["phi;2"] = c.phi_v2;
    row["sigma"] = c.sigma;
    row["rho"] = c.rho;
    row["Q"] = f.Q;
    row["P"] = f.P;
    row["G_bar"] = {f.G_bar[0], f.G_bar[1]};
    if (!c.frame_applicable) {
      ++inapplicable;
      row["frame"] = "inapplicable";
      rows.push_back(std::move(row));
      continue;
    }
    t13 = std::max(t13, c.t13_consistency);
    vb = std::max(vb, std::abs(c.vb_identity));
    if (f.eps_bar != c.direct.eps_bar) ++eps_mismatch;
    row["eps_bar"] = f.eps_bar;
    row["I_bar"] = f.I_bar;
    row["I_bar;2"] = f.I_v2;
    row["I_bar,1"] = f.I_h1;
    row["I_bar,2"] = f.I_h2;
    row["I_bar;b"] = f.I_vb;
    row["I_bar,a"] = f.I_ha;
    row["I_bar,b"] = f.I_hb;
    row["T_bar"] = f.T_coeff;
    rows.push_back(std::move(row));
  }
  r["identities"] = Json{{"rho_times_denominator_minus_one", rho_id},
                         {"qp_relation", qp},
                         {"t13_display_consistency", t13},
                         {"i_bar_vb_identity", vb},
                         {"frame_inapplicable_points", inapplicable},
                         {"eps_bar_mismatches", eps_mismatch}};
  if (inapplicable) warnings.push_back(std::to_string(inapplicable) + " point(s) with eps*rho <= 0: frame formula inapplicable");
  r["oracle"] = oracle_summary(conformal_points(pts));
  r["points"] = std::move(rows);
  return o;
}

Json condition_list(const Audit& a, std::initializer_list<Condition> which) {
  Json j = Json::array();
  for (Condition c : which) j.push_back(to_json(a.condition(c)));
  return j;
}

Outcome cmd_check(const Setup& s, std::vector<std::string>& warnings) {
  require_factor(s);
  Outcome o;
  Json& r = o.report;
  const ConformalChange cc = make_change(s, warnings);
  const auto pts = evaluate_all(s, cc, r, warnings);
  const Audit a = audit(pts, s.tol);
  r["c_anisotropic"] = condition_list(a, {Condition::kC, Condition::kCbar, Condition::kHC, Condition::kHCbar,
                                          Condition::kVC, Condition::kVCbar});
  r["phi_t"] = condition_list(a, {Condition::kPhiT, Condition::kPhiTbar, Condition::kHPhiT, Condition::kHPhiTbar,
                                  Condition::kVPhiT, Condition::kVPhiTbar});
  Json scalars = Json::array();
  for (const ConditionReport* x : {&a.first_integral_phi, &a.first_integral_phi_v2, &a.identity_a, &a.identity_b}) {
    scalars.push_back(to_json(*x));
  }
  r["scalars"] = std::move(scalars);
  for (const auto& c : a.conditions) o.failed_verdict = o.failed_verdict || c.verdict == Verdict::kFails;
  if (!s.cfg.vector.empty()) {
    std::vector<SamplePoint> points;
    for (const auto& p : pts) points.push_back(p.conf.point);
    const ConditionReport sc = semi_concurrent(cc.base(), parse_vector_field(s.cfg.vector, param_names(s.params)), points, s.tol);
    r["semi_concurrent"] = to_json(sc);
    o.failed_verdict = o.failed_verdict || sc.verdict == Verdict::kFails;
  }
  return o;
}

Outcome cmd_audit(const Setup& s, std::vector<std::string>& warnings) {
  require_factor(s);
  Outcome o;
  Json& r = o.report;
  const ConformalChange cc = make_change(s, warnings);
  const auto pts = evaluate_all(s, cc, r, warnings);
  try {
    require_proper(pts, s.tol);
  } catch (const ImproperFactor& e) {
    throw Failure{kDomain, std::string("audit refused: ") + e.what()};
  }
  const Audit a = audit(pts, s.tol);
  for (const auto& row : a.table) {
    o.failed_verdict = o.failed_verdict || row.verdict == Verdict::kFails || !row.agree;
  }
  if (!a.table_agrees) warnings.push_back("table columns disagree; see witnesses");
  const Json table = to_json(a);
  for (const auto& [k, v] : table.items()) r[k] = v;
  return o;
}

Outcome cmd_example(const Setup& s, std::vector<std::string>& warnings) {
  Outcome o;
  Json& r = o.report;
  double a = 0.5;
  for (const auto& p : s.params) {
    if (p.name == "a") {
      a = p.value;
    } else {
      throw std::invalid_argument("example takes only the parameter a");
    }
  }

  sphere::Example ex;
  try {
    ex = sphere::run_example(a, s.cfg.samples, s.cfg.order, s.tol, s.threads);
  } catch (const std::domain_error& e) {
    throw Failure{kDomain, e.what()};
  }
  r["example"] = "finsler-sphere";
  r["a"] = a;
  r["samples"] = sample_json(ex.samples, s, warnings);
  Json checks = Json::array();
  for (const auto& c : ex.checks) {
    checks.push_back(Json{{"id", c.id}, {"passed", c.passed}, {"claim", c.claim}, {"detail", c.detail}});
    o.failed_verdict = o.failed_verdict || !c.passed;
  }
  r["checks"] = std::move(checks);
  r["metrics"] = Json{{"max_abs_F_bar_minus_F", ex.max_F_difference},
                      {"max_abs_F_bar_at_a0_minus_F", ex.max_reduction_difference},
                      {"max_abs_exp_phi_F_minus_F_bar", ex.max_factor_error},
                      {"max_abs_R_minus_1", ex.max_base_curvature_error},
                      {"max_abs_R_bar_minus_1", ex.max_curvature_error}};
  Json nabla = Json::array();
  for (const auto& row : ex.nabla) {
    nabla.push_back(Json{{"theta", row.theta},
                         {"closed_form", row.closed_form},
                         {"jets", row.jets},
                         {"jets_with_F_bar_one_form", row.metric_form}});
  }
  r["nabla_2_b_1"] = std::move(nabla);
  r["classification"] = Json{{"F", to_json(ex.base)}, {"F_bar", to_json(ex.target)}};
  r["semi_concurrent"] = Json::array({to_json(ex.semi_concurrent_F), to_json(ex.semi_concurrent_Fbar)});
  r["semi_concurrent"][0]["name"] = "semi_concurrent(F)";
  r["semi_concurrent"][1]["name"] = "semi_concurrent(F_bar)";
  if (!ex.audited) warnings.push_back("factor is constant at a = 0; table shown for reference only");
  const Json table = to_json(ex.audit);
  for (const auto& [k, v] : table.items()) r[k] = v;
  r["oracle"] = oracle_summary(conformal_points(ex.samples.values));
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anisotropic conformal changes of Finsler surfaces, checked numerically", "anicon"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Read flags from a key = value file");
  app.require_subcommand(1, 1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--metric", cfg.metric, "Metric F(x1, x2, y1, y2) or a catalog name");
  app.add_option("--factor", cfg.factor, "Conformal factor phi, or main-scalar");
  app.add_option("--param", cfg.params, "Parameter binding name=value (repeatable)");
  app.add_option("--samples", cfg.samples, "Number of accepted sample points")->check(CLI::PositiveNumber);
  app.add_option("--box", cfg.box, "Sample box x1lo,x1hi,x2lo,x2hi[,psilo,psihi]");
  app.add_option("--points", cfg.points, "File of sample points x1 x2 y1 y2");
  app.add_option("--order", cfg.order, "Jet order")->check(CLI::Range(4, kMaxJetOrder));
  app.add_option("--tol-zero", cfg.tol_zero, "Residual below which a condition holds");
  app.add_option("--tol-fail", cfg.tol_fail, "Residual above which a condition fails");
  app.add_flag("--strict", cfg.strict, "Exit with status 3 when a verdict fails");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--vector", cfg.vector, "Vector field X1,X2 in x1, x2 for the semi-concurrency check");
  app.add_option("--threads", cfg.threads, "Worker threads (0: hardware)");
  for (const char* name : {"analyze", "transform", "check", "audit", "example"}) {
    app.add_subcommand(name, "")->callback([&cfg, name] { cfg.command = name; });
  }
  app.get_subcommand("analyze")->description("Classify F, and F-bar when a factor is given");
  app.get_subcommand("transform")->description("Barred quantities by formula and by direct recomputation");
  app.get_subcommand("check")->description("C-anisotropic and phiT condition families");
  app.get_subcommand("audit")->description("Equivalence table audit; refuses constant factors");
  app.get_subcommand("example")->description("Finsler sphere reproduction (--param a=...)");

  std::vector<const char*> argv{"anicon"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::vector<std::string> warnings;
  try {
    const Setup s = resolve(cfg);
    warnings = s.warnings;
    Outcome o;
    if (cfg.command == "analyze") {
      o = cmd_analyze(s, warnings);
    } else if (cfg.command == "transform") {
      o = cmd_transform(s, warnings);
    } else if (cfg.command == "check") {
      o = cmd_check(s, warnings);
    } else if (cfg.command == "audit") {
      o = cmd_audit(s, warnings);
    } else {
      o = cmd_example(s, warnings);
    }
    Json report;
    report["tool"] = Json{{"name", "anicon"}, {"version", kVersion}};
    report["config"] = config_echo(s);
    for (const auto& [k, v] : o.report.items()) report[k] = v;
    report["warnings"] = warnings;
    report["note"] = "verdicts are statements about the sample set only";
    out << (cfg.format == "machine" ? dump_machine(report) : dump_human(report));
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    return cfg.strict && o.failed_verdict ? kStrict : kOk;
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const ParseError& e) {
    err << "error: parse error at line " << e.line() << ", column " << e.column() << ": " << e.detail() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FactorError& e) {
    err << "error: factor: " << e.what() << '\n';
    return kDomain;
  } catch (const DomainError& e) {
    err << "error: domain: " << e.what() << '\n';
    return kDomain;
  } catch (const InadmissiblePoint& e) {
    err << "error: inadmissible: " << e.what() << '\n';
    return kDomain;
  } catch (const OrderError& e) {
    err << "error: jet order: " << e.what() << '\n';
    return kDomain;
  }
}

}  // namespace anicon::cli
