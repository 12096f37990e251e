#include "anicon/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace anicon {

namespace {

std::vector<double> split_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cur, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cur.size() || !std::isfinite(v)) throw std::invalid_argument("bad number '" + cur + "' in " + what);
    out.push_back(v);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

}  // namespace

SampleBox parse_box(const std::string& text) {
  const auto v = split_numbers(text, "box");
  if (v.size() != 4 && v.size() != 6) {
    throw std::invalid_argument("box needs 4 or 6 numbers: x1lo,x1hi,x2lo,x2hi[,psilo,psihi]");
  }
  SampleBox b{v[0], v[1], v[2], v[3]};
  if (v.size() == 6) {
    b.psi_lo = v[4];
    b.psi_hi = v[5];
  }
  if (!(b.x1_lo <= b.x1_hi && b.x2_lo <= b.x2_hi && b.psi_lo <= b.psi_hi)) {
    throw std::invalid_argument("box bounds must satisfy lo <= hi");
  }
  return b;
}

std::string format_box(const SampleBox& b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", b.x1_lo, b.x1_hi, b.x2_lo, b.x2_hi,
                b.psi_lo, b.psi_hi);
  return buf;
}

double halton(std::size_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

SamplePoint candidate(const SampleBox& b, std::size_t index) {
  const double u = halton(index, 2), v = halton(index, 3), w = halton(index, 5);
  const double psi = b.psi_lo + w * (b.psi_hi - b.psi_lo);
  return {{b.x1_lo + u * (b.x1_hi - b.x1_lo), b.x2_lo + v * (b.x2_hi - b.x2_lo)}, {std::cos(psi), std::sin(psi)}};
}

std::vector<SamplePoint> parse_points(const std::string& text) {
  std::vector<SamplePoint> out;
  std::istringstream in(text);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto v = split_numbers(line, "points line " + std::to_string(row));
    if (v.empty()) continue;
    if (v.size() != 4) throw std::invalid_argument("points line " + std::to_string(row) + ": expected x1 x2 y1 y2");
    if (v[2] == 0.0 && v[3] == 0.0) throw std::invalid_argument("points line " + std::to_string(row) + ": y = 0");
    out.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  return out;
}

std::vector<SamplePoint> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open points file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_points(ss.str());
}

unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 16u);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& work) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          work(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace anicon
