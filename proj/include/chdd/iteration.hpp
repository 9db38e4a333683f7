#pragma once

#include <cmath>
#include <vector>

#include "chdd/subsolve.hpp"

namespace chdd {

// errors[k] is the error after k iterations; errors[0] measures the initial
// interface guess. iterations is the first k with errors[k] <= tol.
struct IterationReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> errors;
  std::vector<TraceSet> traces;  // traces[k] drives iteration k+1
  double condition_estimate = 1.0;
  bool ill_conditioned = false;
};

inline Trace trace_at(const PhaseField& f, int line) {
  return {f.u.line_copy(line), f.v.line_copy(line)};
}

inline TraceSet traces_at(const PhaseField& f, const Decomposition& d) {
  TraceSet t;
  for (int k = 1; k < d.subdomains(); ++k) t.interfaces.push_back(trace_at(f, d.node(k)));
  return t;
}

// Error of the u traces: nodal max on lines, L2 along the interface on strips.
inline double trace_error(const TraceSet& t, const TraceSet& ref, const Mesh& m) {
  double acc = 0;
  for (int i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i].g.size(); ++j) {
      const double d = t[i].g[j] - ref[i].g[j];
      acc = m.is_strip() ? acc + d * d : std::max(acc, std::abs(d));
    }
  return m.is_strip() ? std::sqrt(acc * m.hy) : acc;
}

// Largest |g| or |h| difference, used to seed theoretical envelopes.
inline double trace_max_error(const TraceSet& t, const TraceSet& ref) {
  double e = 0;
  for (int i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t[i].g.size(); ++j)
      e = std::max({e, std::abs(t[i].g[j] - ref[i].g[j]), std::abs(t[i].h[j] - ref[i].h[j])});
  return e;
}

inline void check_trace_shape(const TraceSet& t, int count, int length) {
  require(t.size() == count, "trace count must equal the number of interfaces");
  for (const auto& tr : t.interfaces)
    require(static_cast<int>(tr.g.size()) == length && static_cast<int>(tr.h.size()) == length,
            "trace length does not match the interface");
}

// Generic outer loop: sweep(traces) returns {error of this iterate, next traces}.
template <class Sweep>
IterationReport run_iterations(const TraceSet& initial, double initial_error, double tol, int max_iter,
                               Sweep&& sweep) {
  require(tol > 0 && std::isfinite(tol), "tolerance must be positive");
  require(max_iter >= 1, "max_iter must be at least 1");
  IterationReport r;
  r.errors.push_back(initial_error);
  r.traces.push_back(initial);
  if (initial_error <= tol) {
    r.converged = true;
    return r;
  }
  TraceSet t = initial;
  for (int k = 1; k <= max_iter; ++k) {
    auto [err, next] = sweep(t);
    r.errors.push_back(err);
    r.iterations = k;
    if (!std::isfinite(err)) break;
    if (err <= tol) {
      r.converged = true;
      return r;
    }
    t = std::move(next);
    r.traces.push_back(t);
  }
  return r;
}

}  // namespace chdd
