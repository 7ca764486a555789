#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "walklab/abstract_search.hpp"
#include "walklab/errors.hpp"
#include "walklab/graph.hpp"
#include "walklab/spectral.hpp"
#include "walklab/state.hpp"
#include "walklab/trace.hpp"

namespace walklab {

/// Worker count: WALKLAB_THREADS if set (positive integer), else the hardware concurrency.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("WALKLAB_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) throw ConfigError("WALKLAB_THREADS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to thread_budget() workers. Results must be written to disjoint slots.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_budget(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace detail {

inline std::vector<std::size_t> observed_or_marked(const Graph& g, const CoinConfig& c, std::vector<std::size_t> observed) {
  if (observed.empty()) observed = c.marked;
  if (observed.empty()) observed = {0};
  for (std::size_t v : observed) g.check_vertex(v);
  return observed;
}

inline void record(RunTrace& tr, const WalkState& s, const std::vector<std::size_t>& obs, const std::vector<std::size_t>& nbhd) {
  tr.p_marked.push_back(probability_over(s, obs));
  tr.p_nbhd.push_back(probability_over(s, nbhd));
  tr.norm.push_back(s.norm());
}

inline std::string describe(const GraphSpec& g) {
  std::string s = to_string(g.family) + " dims=";
  for (std::size_t i = 0; i < g.dims.size(); ++i) s += (i ? "x" : "") + std::to_string(g.dims[i]);
  return s + " shift=" + to_string(g.shift) + " coin=" + to_string(g.coin);
}

}  // namespace detail

/// Evolves |Phi0> for t_max steps and records the observed-set probabilities after every step.
/// observed defaults to the marked set (or vertex 0 when nothing is marked).
inline RunTrace run_walk(const Graph& g, const CoinConfig& coin, long t_max, std::vector<std::size_t> observed = {}) {
  validate(g, coin);
  if (t_max < 0) throw ConfigError("t_max must be non-negative");
  observed = detail::observed_or_marked(g, coin, std::move(observed));
  const auto nbhd = closed_neighborhood(g, observed);
  RunTrace tr;
  tr.config = detail::describe(g.spec());
  WalkState s = uniform_state(g);
  detail::record(tr, s, observed, nbhd);
  for (long t = 1; t <= t_max; ++t) {
    step(s, coin);
    detail::record(tr, s, observed, nbhd);
  }
  return tr;
}

struct Peak {
  std::size_t t_star = 0;          // argmax of p_nbhd, smallest t on ties
  double p_star = 0;
  std::size_t t_marked = 0;        // argmax of p_marked
  double p_marked_star = 0;
  double t_center = 0;             // mean t over p_nbhd >= 0.9 max
  double t_center_marked = 0;      // same for p_marked
};

/// Mean of the times where the series is within 10% of its maximum. Flat-topped
/// peaks make the plain argmax jump by several steps between neighbouring sizes.
inline double plateau_center(const std::vector<double>& p) {
  if (p.empty()) return 0;
  const double m = *std::max_element(p.begin(), p.end());
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < p.size(); ++t)
    if (p[t] >= 0.9 * m) {
      sum += static_cast<double>(t);
      ++count;
    }
  return sum / static_cast<double>(count);
}

inline Peak find_peak(const RunTrace& tr) {
  Peak pk;
  if (tr.p_nbhd.empty()) return pk;
  auto argmax = [](const std::vector<double>& p) {
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());  // first maximum
  };
  pk.t_star = argmax(tr.p_nbhd);
  pk.p_star = tr.p_nbhd[pk.t_star];
  pk.t_marked = argmax(tr.p_marked);
  pk.p_marked_star = tr.p_marked[pk.t_marked];
  pk.t_center = plateau_center(tr.p_nbhd);
  pk.t_center_marked = plateau_center(tr.p_marked);
  return pk;
}

/// Geometric ladder T_min, (1+eps) T_min, ... ending exactly at T_max.
inline std::vector<long> repetition_schedule(long t_min, long t_max, double eps) {
  if (t_min <= 0 || t_max < t_min) throw ConfigError("repetition schedule requires 0 < T_min <= T_max");
  if (!(eps > 0)) throw ConfigError("repetition schedule requires eps > 0");
  std::vector<long> out;
  double t = static_cast<double>(t_min);
  for (int k = 0; k < 10000; ++k, t *= 1.0 + eps) {
    const long r = std::lround(t);
    if (r >= t_max) break;
    if (out.empty() || r > out.back()) out.push_back(r);
  }
  out.push_back(t_max);
  return out;
}

inline long isqrt_ceil(std::size_t n) {
  long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
  while (static_cast<std::size_t>(r) * static_cast<std::size_t>(r) < n) ++r;
  while (r > 0 && static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(r - 1) >= n) --r;
  return r;
}

/// Integer cost accounting in units of local steps.
struct CostLedger {
  long step_count = 0;
  long prep_cost = 0;        // 2 sqrt N
  long reflection_unit = 0;  // 4 sqrt N per reflection
  long reflections = 0;
  long amplification_rounds = 0;

  long total() const { return prep_cost + step_count + reflections * reflection_unit; }

  static CostLedger for_vertices(std::size_t n) {
    CostLedger l;
    l.prep_cost = 2 * isqrt_ceil(n);
    l.reflection_unit = 4 * isqrt_ceil(n);
    return l;
  }
};

struct AmplifyResult {
  RunTrace inner;                // the walk run as the inner algorithm
  std::vector<double> success;   // observed-set probability after 0..rounds rounds
  CostLedger ledger;
  bool overshoot = false;        // probability fell in the last round
};

/// Amplitude amplification with A = U'^walk_length applied to |Phi0>.
/// Each round: flip the sign on the observed vertices, apply A^-1, reflect about |Phi0>, apply A.
inline AmplifyResult amplify(const Graph& g, const CoinConfig& coin, long walk_length, long rounds,
                             std::vector<std::size_t> observed = {}) {
  if (walk_length < 0 || rounds < 0) throw ConfigError("walk_length and rounds must be non-negative");
  observed = detail::observed_or_marked(g, coin, std::move(observed));
  AmplifyResult r;
  r.inner = run_walk(g, coin, walk_length, observed);
  r.ledger = CostLedger::for_vertices(g.vertex_count());
  r.ledger.step_count = walk_length;

  WalkState s = uniform_state(g);
  for (long t = 0; t < walk_length; ++t) step(s, coin);
  r.success.push_back(probability_over(s, observed));
  const int d = g.coin_dim();
  for (long k = 0; k < rounds; ++k) {
    for (std::size_t v : observed)
      for (int i = 0; i < d; ++i) s.at(v, i) = -s.at(v, i);
    for (long t = 0; t < walk_length; ++t) step_inverse(s, coin);
    reflect_about_uniform(s);
    for (long t = 0; t < walk_length; ++t) step(s, coin);
    r.ledger.step_count += 2 * walk_length;
    r.ledger.reflections += 1;
    r.ledger.amplification_rounds += 1;
    r.success.push_back(probability_over(s, observed));
  }
  r.overshoot = r.success.size() >= 2 && r.success.back() < r.success[r.success.size() - 2];
  return r;
}

/// Rounds that bring an initial success probability p0 closest to 1.
inline long optimal_rounds(double p0) {
  if (!(p0 > 0) || p0 >= 1) return 0;
  const double theta = std::asin(std::sqrt(p0));
  return std::max(0L, std::lround(kPi / (4.0 * theta) - 0.5));
}

struct TwoMarkedResult {
  RunTrace trace;                  // combined probability over {v1, v2} and their neighbourhoods
  double symmetry_residual = 0;    // max_t |T psi_t - psi_t|
  double trace_deviation = 0;      // max_t |p(U' walk) - p(U'' walk)|
  double state_deviation = 0;      // max_t |psi_t - psi''_t|
};

/// Two marked vertices with C1 = -I at each, checked against the point symmetry
/// T: x -> v1 + v2 - x (directions reversed) and against the single reflection walk
/// U'' = U (I - 2|s'><s'|), s' = (|s,v1> + |s,v2>)/sqrt 2.
inline TwoMarkedResult run_two_marked(const GraphSpec& spec, std::size_t v1, std::size_t v2, long t_max) {
  const Graph g(spec);
  if (g.family() != Family::torus || g.shift() == ShiftKind::dirac)
    throw ConfigError("two-marked runs require a torus with the flip-flop or moving shift");
  g.check_vertex(v1);
  g.check_vertex(v2);
  if (v1 == v2) throw ConfigError("two-marked runs require v1 != v2");
  if (t_max < 0) throw ConfigError("t_max must be non-negative");

  const CoinConfig marked = paper_coin(g, {v1, v2});
  const CoinConfig plain = paper_coin(g, {});
  const int d = g.coin_dim();
  const std::size_t dim = g.dimension();

  std::vector<std::size_t> tmap(dim);
  {
    const auto x1 = g.coords(v1), x2 = g.coords(v2);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      auto x = g.coords(v);
      for (std::size_t a = 0; a < x.size(); ++a) x[a] = x1[a] + x2[a] - x[a];
      const std::size_t w = g.vertex_at(x);
      for (int i = 0; i < d; ++i) tmap[g.index(v, i)] = g.index(w, i ^ 1);
    }
  }

  const std::vector<std::size_t> obs{v1, v2};
  const auto nbhd = closed_neighborhood(g, obs);
  const double inv_sqrt_2d = 1.0 / std::sqrt(2.0 * d);

  TwoMarkedResult r;
  r.trace.config = detail::describe(spec) + " two-marked";
  WalkState a = uniform_state(g), b = uniform_state(g);
  RunTrace tb;
  for (long t = 0; t <= t_max; ++t) {
    if (t > 0) {
      step(a, marked);
      cplx proj = 0;  // <s'|b>
      for (int i = 0; i < d; ++i) proj += (b.at(v1, i) + b.at(v2, i)) * inv_sqrt_2d;
      for (int i = 0; i < d; ++i) {
        b.at(v1, i) -= 2.0 * proj * inv_sqrt_2d;
        b.at(v2, i) -= 2.0 * proj * inv_sqrt_2d;
      }
      step(b, plain);
    }
    detail::record(r.trace, a, obs, nbhd);
    detail::record(tb, b, obs, nbhd);
    double sym = 0, dev = 0;
    const auto& x = a.amplitudes();
    const auto& y = b.amplitudes();
    for (std::size_t i = 0; i < dim; ++i) {
      sym += std::norm(x[tmap[i]] - x[i]);
      dev += std::norm(x[i] - y[i]);
    }
    r.symmetry_residual = std::max(r.symmetry_residual, std::sqrt(sym));
    r.state_deviation = std::max(r.state_deviation, std::sqrt(dev));
  }
  r.trace_deviation = compare_traces(r.trace, tb);
  return r;
}

/// Steps simulated per sweep point: long enough to contain the first success peak, short enough
/// to stop before the first revival.
inline long first_hump_cap(const GraphSpec& spec) {
  const Graph g(spec);
  const double n = static_cast<double>(g.vertex_count());
  if (spec.shift == ShiftKind::moving && spec.family == Family::torus)
    return static_cast<long>(std::ceil(4.0 * std::sqrt(n * std::log2(n))));
  if (spec.family == Family::torus && spec.dims.size() == 2) return static_cast<long>(std::ceil(std::sqrt(n * std::log(n))));
  if (spec.family == Family::torus && spec.dims.size() == 1) return static_cast<long>(2 * n);
  return static_cast<long>(std::ceil(2.0 * std::sqrt(n)));
}

struct SweepRow {
  int size = 0;  // torus side, hypercube dimension or complete-graph N
  std::size_t n = 0;
  long cap = 0;
  Peak peak;
  std::optional<PredictionReport> prediction;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double exponent = 0;      // slope of log2 t_center vs log2 N without the smallest size
  double exponent_all = 0;  // same over every size
};

/// Least-squares slope of log2 y against log2 x.
inline double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("exponent fit needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log2(x[i]);
    my += std::log2(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log2(x[i]) - mx;
    sxy += dx * (std::log2(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline GraphSpec sweep_spec(Family family, ShiftKind shift, int torus_rank, int size) {
  switch (family) {
    case Family::torus: return GraphSpec::torus(size, torus_rank, shift);
    case Family::hypercube: return GraphSpec::hypercube(size);
    case Family::complete: return GraphSpec::complete(size);
  }
  return {};
}

/// One run per size with the marked vertex at 0, peaks located inside first_hump_cap.
inline SweepResult scaling_sweep(Family family, ShiftKind shift, int torus_rank, const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ConfigError("a sweep needs at least two sizes");
  SweepResult res;
  res.rows.resize(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) validate(sweep_spec(family, shift, torus_rank, sizes[i]));
  parallel_for(sizes.size(), [&](std::size_t i) {
    const GraphSpec spec = sweep_spec(family, shift, torus_rank, sizes[i]);
    const Graph g(spec);
    SweepRow& row = res.rows[i];
    row.size = sizes[i];
    row.n = g.vertex_count();
    row.cap = first_hump_cap(spec);
    row.peak = find_peak(run_walk(g, paper_coin(g, {0}), row.cap));
    if (!(shift == ShiftKind::moving && family == Family::torus)) row.prediction = predict(spec);
  });
  std::sort(res.rows.begin(), res.rows.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  std::vector<double> ns, ts;
  for (const auto& r : res.rows) {
    ns.push_back(static_cast<double>(r.n));
    ts.push_back(std::max(r.peak.t_center, 0.5));
  }
  res.exponent_all = fit_exponent(ns, ts);
  if (ns.size() >= 3) {
    res.exponent = fit_exponent({ns.begin() + 1, ns.end()}, {ts.begin() + 1, ts.end()});
  } else {
    res.exponent = res.exponent_all;
  }
  return res;
}

/// Builds |Phi0> on a torus from a single basis state with local operations only:
/// amplitude is spread along axis 0 by controlled rotations and moves, then along each
/// further axis, and finally the coin is rotated to |s>. Every operation is a unitary on the
/// whole space, so the reversed sequence is the exact inverse.
class LocalPreparation {
 public:
  explicit LocalPreparation(const Graph& g) : g_(g) {
    if (g.family() != Family::torus || g.shift() == ShiftKind::dirac)
      throw ConfigError("local preparation is implemented for tori with a 2d-dimensional coin");
  }

  static constexpr int kRest = 1;

  WalkState seed() const { return basis_state(g_, 0, kRest); }

  /// Local time steps: one per spreading move plus the final coin rotation.
  long local_ops() const { return static_cast<long>(g_.rank()) * (g_.side() - 1) + 1; }

  void forward(WalkState& s) const {
    for (int a = 0; a < g_.rank(); ++a)
      for (int j = 0; j < g_.side() - 1; ++j) spread(s, a, j, false);
    rotate_to_s(s);
  }

  void inverse(WalkState& s) const {
    rotate_to_s(s);
    for (int a = g_.rank() - 1; a >= 0; --a)
      for (int j = g_.side() - 2; j >= 0; --j) spread(s, a, j, true);
  }

  /// 2|Phi0><Phi0| - I as inverse, phase flip on the seed, forward.
  long reflect(WalkState& s) const {
    inverse(s);
    for (auto& x : s.amplitudes()) x = -x;
    s.at(0, kRest) = -s.at(0, kRest);
    forward(s);
    return 2 * local_ops() + 1;
  }

 private:
  // Vertices with coordinate j on axis a.
  std::vector<std::size_t> slice(int a, int j) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < g_.vertex_count(); ++v)
      if (g_.coords(v)[static_cast<std::size_t>(a)] == j) out.push_back(v);
    return out;
  }

  void spread(WalkState& s, int a, int j, bool inverse) const {
    const int mover = 2 * a;
    const int rest = kRest;
    const double remaining = g_.side() - j;
    const double c = std::sqrt(1.0 / remaining), sn = std::sqrt((remaining - 1.0) / remaining);
    const auto here = slice(a, j);
    auto rotate = [&](std::size_t v, double sgn) {
      const cplx r = s.at(v, rest), m = s.at(v, mover);
      s.at(v, rest) = c * r - sgn * sn * m;
      s.at(v, mover) = sgn * sn * r + c * m;
    };
    auto move_and_swap = [&] {
      for (std::size_t v : here) {
        const std::size_t w = g_.offset(v, a, +1);
        std::swap(s.at(v, mover), s.at(w, mover));
      }
    };
    auto coin_swap = [&] {
      for (std::size_t v : here) {
        const std::size_t w = g_.offset(v, a, +1);
        std::swap(s.at(w, rest), s.at(w, mover));
      }
    };
    if (!inverse) {
      for (std::size_t v : here) rotate(v, +1.0);
      move_and_swap();
      coin_swap();
    } else {
      coin_swap();
      move_and_swap();
      for (std::size_t v : here) rotate(v, -1.0);
    }
  }

  // Householder reflection taking e_rest to |s>; its own inverse.
  void rotate_to_s(WalkState& s) const {
    const int d = g_.coin_dim();
    std::vector<double> u(static_cast<std::size_t>(d), -1.0 / std::sqrt(static_cast<double>(d)));
    u[kRest] += 1.0;
    double uu = 0;
    for (double x : u) uu += x * x;
    for (std::size_t v = 0; v < g_.vertex_count(); ++v) {
      cplx dot = 0;
      for (int i = 0; i < d; ++i) dot += u[static_cast<std::size_t>(i)] * s.at(v, i);
      for (int i = 0; i < d; ++i) s.at(v, i) -= 2.0 * u[static_cast<std::size_t>(i)] * dot / uu;
    }
  }

  Graph g_;
};

struct LocalPrepResult {
  WalkState state;
  CostLedger ledger;
  long local_ops = 0;
  double deviation = 0;  // max amplitude distance from the uniform state
};

inline LocalPrepResult prepare_uniform_locally(const GraphSpec& spec) {
  const Graph g(spec);
  const LocalPreparation prep(g);
  WalkState s = prep.seed();
  prep.forward(s);
  const WalkState u = uniform_state(g);
  double dev = 0;
  for (std::size_t i = 0; i < s.size(); ++i) dev = std::max(dev, std::abs(s.amplitudes()[i] - u.amplitudes()[i]));
  LocalPrepResult r{std::move(s), CostLedger::for_vertices(g.vertex_count()), prep.local_ops(), dev};
  return r;
}

}  // namespace walklab
