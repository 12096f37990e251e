#pragma once

#include <string>
#include <vector>

#include "anicon/conditions.hpp"
#include "anicon/sampling.hpp"

namespace anicon::sphere {

// Riemannian sphere F, the factor phi, and the resulting Randers metric
// F-bar = e^phi F = alpha + beta, all with parameter a in [0, 1).
inline constexpr const char* kMetric = "sqrt(y1^2+sin(x1)^2*y2^2)";
inline constexpr const char* kFactor =
    "ln((sqrt((1-a^2*sin(x1)^2)*y1^2+sin(x1)^2*y2^2) - a*sin(x1)^2*y2)/"
    "((1-a^2*sin(x1)^2)*sqrt(y1^2+sin(x1)^2*y2^2)))";
inline constexpr const char* kRanders =
    "sqrt((1-a^2*sin(x1)^2)*y1^2+sin(x1)^2*y2^2)/(1-a^2*sin(x1)^2) - a*sin(x1)^2*y2/(1-a^2*sin(x1)^2)";
inline constexpr const char* kAlpha = "sqrt((1-a^2*sin(x1)^2)*y1^2+sin(x1)^2*y2^2)/(1-a^2*sin(x1)^2)";
/// 1-form of F-bar itself.
inline constexpr const char* kBeta = "-a*sin(x1)^2*y2/(1-a^2*sin(x1)^2)";
/// 1-form with the coefficient b_2 = -a sin(x1)/(1 - a^2 sin(x1)^2) used by the closed form.
inline constexpr const char* kBetaClosedForm = "-a*sin(x1)*y2/(1-a^2*sin(x1)^2)";

/// x1 in [0.3, 2.8] keeps sin(x1) away from the poles.
inline const SampleBox kBox{0.3, 2.8, 0.0, 6.283185307179586};

/// a cos(x1) (1 + a^2 sin^2 x1) / (1 - a^2 sin^2 x1)^2
double nabla_closed_form(double a, double theta);

/// nabla_2 b_1 = d_2 b_1 - gamma^k_21 b_k for the Levi-Civita connection of
/// alpha, computed from jets of alpha^2 and of the 1-form `beta`.
double nabla_from_jets(double a, double theta, const char* beta);

struct NablaRow {
  double theta = 0.0;
  double closed_form = 0.0;
  double jets = 0.0;         // with kBetaClosedForm
  double metric_form = 0.0;  // with kBeta
};

struct ExampleCheck {
  std::string id;     // sphere.i, sphere.ii, ...
  std::string claim;
  bool passed = false;
  std::string detail;
};

struct Example {
  double a = 0.0;
  Sampled<PointEvaluation> samples;
  double max_F_difference = 0.0;   // max |F-bar - F|
  double max_reduction_difference = 0.0;  // max |F-bar(a = 0) - F| on the same samples
  double max_factor_error = 0.0;   // max |e^phi F - F-bar|
  double max_curvature_error = 0.0;  // max |R-bar - 1|
  double max_base_curvature_error = 0.0;
  Classification base;
  Classification target;
  bool audited = false;  // false when phi is constant (a = 0)
  Audit audit;
  ConditionReport semi_concurrent_F;
  ConditionReport semi_concurrent_Fbar;
  std::vector<NablaRow> nabla;
  std::vector<ExampleCheck> checks;
};

/// Throws std::domain_error unless 0 <= a < 1.
Example run_example(double a, std::size_t samples, int order, const Tolerances& tol,
                    unsigned threads = default_threads());

}  // namespace anicon::sphere
