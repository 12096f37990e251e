#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anicon/surface.hpp"

namespace anicon {

/// Box in (x1, x2, psi); directions are y = (cos psi, sin psi).
struct SampleBox {
  double x1_lo = 0.0;
  double x1_hi = 1.0;
  double x2_lo = 0.0;
  double x2_hi = 1.0;
  double psi_lo = 0.0;
  double psi_hi = 6.283185307179586;
};

/// "x1lo,x1hi,x2lo,x2hi[,psilo,psihi]"
SampleBox parse_box(const std::string& text);
std::string format_box(const SampleBox& box);

/// Radical inverse of `index` in `base`.
double halton(std::size_t index, unsigned base);

/// Candidate number `index` (1-based) of the Halton sequence over the box.
SamplePoint candidate(const SampleBox& box, std::size_t index);

/// Reads "x1 x2 y1 y2" rows (commas or blanks as separators, '#' comments).
std::vector<SamplePoint> read_points(const std::string& path);
std::vector<SamplePoint> parse_points(const std::string& text);

struct Rejection {
  std::size_t index = 0;  // candidate index or row number
  SamplePoint point;
  std::string reason;
};

template <class T>
struct Sampled {
  std::vector<SamplePoint> points;
  std::vector<T> values;
  std::vector<Rejection> rejected;
  std::size_t candidates = 0;
  bool exhausted = false;  // ran out of candidates before reaching the target
};

/// Evaluation result for one point: a value, or the reason it was rejected.
/// Errors other than DomainError, OrderError and InadmissiblePoint propagate.
template <class T>
struct Attempt {
  std::optional<T> value;
  std::string reason;
};

template <class T>
Attempt<T> attempt(const std::function<T(const SamplePoint&)>& eval, const SamplePoint& p) {
  try {
    return {eval(p), {}};
  } catch (const DomainError& e) {
    return {std::nullopt, std::string("domain: ") + e.what()};
  } catch (const InadmissiblePoint& e) {
    return {std::nullopt, std::string("inadmissible: ") + e.what()};
  } catch (const OrderError& e) {
    return {std::nullopt, std::string("order: ") + e.what()};
  }
}

/// Runs `work(i)` for i in [0, n) on up to `threads` workers. Exceptions
/// from workers are rethrown on the caller's thread (first by index).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& work);

unsigned default_threads();

/// Accepts the first `count` admissible Halton candidates in index order.
/// Candidates are evaluated in batches, possibly in parallel; the result
/// does not depend on the thread count.
template <class T>
Sampled<T> sample_box(const SampleBox& box, std::size_t count, const std::function<T(const SamplePoint&)>& eval,
                      unsigned threads = default_threads(), std::size_t max_candidates = 0) {
  if (max_candidates == 0) max_candidates = 50 * count + 100;
  Sampled<T> out;
  std::size_t next = 1;
  while (out.points.size() < count && next <= max_candidates) {
    const std::size_t want = count - out.points.size();
    const std::size_t batch = std::min(max_candidates - next + 1, std::max<std::size_t>(want + want / 4, 8));
    std::vector<Attempt<T>> results(batch);
    std::vector<SamplePoint> pts(batch);
    for (std::size_t k = 0; k < batch; ++k) pts[k] = candidate(box, next + k);
    parallel_for(batch, threads, [&](std::size_t k) { results[k] = attempt(eval, pts[k]); });
    for (std::size_t k = 0; k < batch && out.points.size() < count; ++k) {
      out.candidates = next + k;
      if (results[k].value) {
        out.points.push_back(pts[k]);
        out.values.push_back(std::move(*results[k].value));
      } else {
        out.rejected.push_back({next + k, pts[k], results[k].reason});
      }
    }
    next += batch;
  }
  out.exhausted = out.points.size() < count;
  return out;
}

/// Evaluates an explicit point list; inadmissible rows are recorded.
template <class T>
Sampled<T> sample_list(const std::vector<SamplePoint>& points, const std::function<T(const SamplePoint&)>& eval,
                       unsigned threads = default_threads()) {
  std::vector<Attempt<T>> results(points.size());
  parallel_for(points.size(), threads, [&](std::size_t k) { results[k] = attempt(eval, points[k]); });
  Sampled<T> out;
  out.candidates = points.size();
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (results[k].value) {
      out.points.push_back(points[k]);
      out.values.push_back(std::move(*results[k].value));
    } else {
      out.rejected.push_back({k + 1, points[k], results[k].reason});
    }
  }
  return out;
}

}  // namespace anicon
