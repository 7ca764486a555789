#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace walklab {

/// Per-step success probabilities from t = 0 to t_max.
struct RunTrace {
  std::vector<double> p_marked;  // probability of the observed vertex set
  std::vector<double> p_nbhd;    // observed set plus one-step neighbours
  std::vector<double> norm;
  std::string config;  // free-form echo of the run configuration

  std::size_t steps() const { return p_marked.empty() ? 0 : p_marked.size() - 1; }
};

/// max_t of |p_fast - p_other| over both probability columns.
inline double compare_traces(const RunTrace& a, const RunTrace& b) {
  if (a.p_marked.size() != b.p_marked.size()) return HUGE_VAL;
  double worst = 0;
  for (std::size_t t = 0; t < a.p_marked.size(); ++t) {
    worst = std::max(worst, std::abs(a.p_marked[t] - b.p_marked[t]));
    worst = std::max(worst, std::abs(a.p_nbhd[t] - b.p_nbhd[t]));
  }
  return worst;
}

}  // namespace walklab
