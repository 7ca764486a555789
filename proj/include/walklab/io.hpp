#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "json.hpp"
#include "walklab/abstract_search.hpp"
#include "walklab/errors.hpp"
#include "walklab/experiment.hpp"
#include "walklab/graph.hpp"
#include "walklab/spectral.hpp"
#include "walklab/trace.hpp"

namespace walklab {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Writes to a sibling temporary file and renames it over path. "-" means stdout.
inline void write_atomically(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    if (!std::cout) throw IoError("failed to write to stdout");
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path);
  }
}

/// Round-trip exact, locale independent.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string trace_csv(const RunTrace& tr) {
  std::string out = "t,p_marked,p_nbhd,norm\n";
  for (std::size_t t = 0; t < tr.p_marked.size(); ++t) {
    out += std::to_string(t);
    out += ',' + format_double(tr.p_marked[t]);
    out += ',' + format_double(tr.p_nbhd[t]);
    out += ',' + format_double(tr.norm[t]);
    out += '\n';
  }
  return out;
}

inline json to_json(const GraphSpec& g) {
  return {{"family", to_string(g.family)}, {"dims", g.dims}, {"shift", to_string(g.shift)},
          {"coin", to_string(g.coin)}, {"coin_dim", g.coin_dim}};
}

inline json to_json(const ModeSpectrum& ms) {
  json entries = json::array();
  for (const auto& e : ms.entries) entries.push_back({{"theta", e.theta}, {"a2", e.weight}, {"multiplicity", e.multiplicity}});
  return {{"model", ms.model},
          {"N", ms.vertex_count},
          {"a0", ms.a0},
          {"theta_min", ms.theta_min},
          {"retained_dim", ms.retained_dim},
          {"stationary_weight", ms.stationary_weight},
          {"steps_per_iteration", ms.steps_per_iteration},
          {"pi_weight_flagged", ms.pi_weight_flagged},
          {"entries", entries}};
}

inline json to_json(const SpectralSums& s) { return {{"S1", s.S1}, {"S2", s.S2}, {"Scot", s.Scot}}; }

inline json to_json(const PredictionReport& r) {
  return {{"alpha", r.alpha},
          {"alpha_bounds", {r.alpha_lower, r.alpha_upper}},
          {"theta_min", r.theta_min},
          {"T_star", r.T_star},
          {"T_bracket", {r.T_min, r.T_max}},
          {"start_overlap", r.start_overlap},
          {"good_overlap", r.good_overlap},
          {"predicted_peak_probability", r.predicted_peak_probability},
          {"in_lemma_regime", r.in_lemma_regime},
          {"steps_per_iteration", r.steps_per_iteration}};
}

inline json to_json(const Peak& p) {
  return {{"t_star", p.t_star},
          {"p_star", p.p_star},
          {"t_center", p.t_center},
          {"t_marked", p.t_marked},
          {"p_marked_star", p.p_marked_star},
          {"t_center_marked", p.t_center_marked}};
}

inline json to_json(const CostLedger& l) {
  return {{"step_count", l.step_count},
          {"prep_cost", l.prep_cost},
          {"reflection_cost", l.reflection_unit},
          {"reflections", l.reflections},
          {"amplification_rounds", l.amplification_rounds},
          {"total", l.total()}};
}

inline json to_json(const MovingOverlap& m) {
  return {{"overlap_sq", m.overlap_sq},
          {"alpha00_sq", m.alpha00_sq},
          {"alpha_sq_sum", m.alpha_sq_sum},
          {"large_pairs", m.large_pairs}};
}

inline json envelope(const std::string& command) { return {{"schema", kSchemaVersion}, {"command", command}}; }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace walklab
