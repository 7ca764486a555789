#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "walklab/errors.hpp"
#include "walklab/graph.hpp"
#include "walklab/spectral.hpp"
#include "walklab/state.hpp"

namespace walklab {

namespace detail {

inline double cot(double x) {
  const double s = std::sin(x);
  if (s == 0.0) return std::copysign(std::numeric_limits<double>::infinity(), std::cos(x));
  return std::cos(x) / s;
}

}  // namespace detail

/// Entries with equal theta (within 1e-12) merged; total weight m*a^2 is preserved.
inline std::vector<SpectrumEntry> merge_degenerate(std::vector<SpectrumEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
  std::vector<SpectrumEntry> out;
  for (const auto& e : entries) {
    if (!out.empty() && std::abs(out.back().theta - e.theta) < 1e-12) {
      auto& m = out.back();
      const double total = m.weight * m.multiplicity + e.weight * e.multiplicity;
      m.multiplicity += e.multiplicity;
      m.weight = total / m.multiplicity;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

/// Left side of the eigenphase equation
///   (a0^2 + b) cot(alpha/2) + sum_j m_j a_j^2 (cot((alpha+theta_j)/2) + cot((alpha-theta_j)/2)) = 0,
/// where b is the stationary weight (zero except for the dirac walk at even L).
/// Strictly decreasing on (0, theta_min).
class AlphaEquation {
 public:
  explicit AlphaEquation(const ModeSpectrum& ms)
      : entries_(merge_degenerate(ms.entries)), head_(ms.a0 * ms.a0 + ms.stationary_weight), theta_min_(ms.theta_min) {
    if (entries_.empty()) throw NumericalError("empty spectrum");
  }

  double operator()(double alpha) const {
    terms_.clear();
    terms_.push_back(head_ * detail::cot(alpha / 2));
    for (const auto& e : entries_)
      terms_.push_back(e.multiplicity * e.weight * (detail::cot((alpha + e.theta) / 2) + detail::cot((alpha - e.theta) / 2)));
    // Largest magnitudes first to limit cancellation.
    std::sort(terms_.begin(), terms_.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    double s = 0;
    for (double t : terms_) s += t;
    return s;
  }

  double theta_min() const { return theta_min_; }

 private:
  std::vector<SpectrumEntry> entries_;
  double head_;
  double theta_min_;
  mutable std::vector<double> terms_;
};

inline double alpha_equation(const ModeSpectrum& ms, double alpha) { return AlphaEquation(ms)(alpha); }

struct AlphaBounds {
  double lower = 0;  // valid when alpha < theta_min / 2
  double upper = 0;  // always valid
};

/// Two-sided bound from a0'^2 / (4 sin^2(alpha/2)) = sum m a^2 / (cos alpha - cos theta), a0'^2 = a0^2 + b:
///   1/(2 S1') <= 4 sin^2(alpha/2) <= 1/S1',  with S1' = S1 a0^2 / a0'^2.
inline AlphaBounds alpha_bounds(const ModeSpectrum& ms) {
  const double s1 = spectral_sums(ms).S1 * ms.a0 * ms.a0 / (ms.a0 * ms.a0 + ms.stationary_weight);
  auto from_sin = [](double two_sin_half) { return 2.0 * std::asin(std::min(1.0, two_sin_half / 2.0)); };
  return {from_sin(1.0 / std::sqrt(2.0 * s1)), from_sin(1.0 / std::sqrt(s1))};
}

/// Unique root of the eigenphase equation in (0, theta_min), by bisection.
inline double solve_alpha(const ModeSpectrum& ms) {
  if (ms.entries.empty()) throw NumericalError("empty spectrum");
  if (!(ms.theta_min > 0)) throw NumericalError("theta_min must be positive");
  const AlphaEquation f(ms);
  double lo = 1e-15, hi = ms.theta_min - 1e-15;
  const double flo = f(lo), fhi = f(hi);
  if (!(flo > 0) || !(fhi < 0)) {
    std::ostringstream os;
    os << "eigenphase root not bracketed: f(" << lo << ") = " << flo << ", f(" << hi << ") = " << fhi;
    throw NumericalError(os.str());
  }
  for (int it = 0; it < 400 && hi - lo > 1e-12 * lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);

  const AlphaBounds b = alpha_bounds(ms);
  const double slack = 1e-9 * alpha;
  if (alpha > b.upper + slack) throw NumericalError("alpha exceeds its upper bound");
  if (alpha < ms.theta_min / 2 && alpha < b.lower - slack) throw NumericalError("alpha is below its lower bound");
  return alpha;
}

struct PrincipalTerm {
  double theta = 0;
  double a = 0;
  int multiplicity = 1;
  double plus = 0;   // coefficient of Phi_j^+ : a cot((alpha - theta)/2)
  double minus = 0;  // coefficient of Phi_j^- : a cot((alpha + theta)/2)
};

/// w'_alpha = a0 cot(alpha/2) |Phi0> + sqrt(b) cot(alpha/2) |Phi_b> + sum_j (plus |Phi_j^+> + minus |Phi_j^->).
/// |psi_good> + i w'_alpha is the e^{i alpha} eigenvector of U'.
struct PrincipalEigenvector {
  double alpha = 0;
  double phi0 = 0;
  double stationary = 0;
  double a0 = 0;
  double b = 0;
  std::vector<PrincipalTerm> terms;

  /// <psi_good | w'_alpha>; vanishes at the root.
  double good_inner() const {
    double s = a0 * phi0 + std::sqrt(b) * stationary;
    for (const auto& t : terms) s += t.multiplicity * t.a * (t.plus + t.minus);
    return s;
  }
  double norm_sq() const {
    double s = phi0 * phi0 + stationary * stationary;
    for (const auto& t : terms) s += t.multiplicity * (t.plus * t.plus + t.minus * t.minus);
    return s;
  }
};

inline PrincipalEigenvector build_principal_eigenvector(const ModeSpectrum& ms, double alpha) {
  PrincipalEigenvector w;
  w.alpha = alpha;
  w.a0 = ms.a0;
  w.b = ms.stationary_weight;
  const double c = detail::cot(alpha / 2);
  w.phi0 = ms.a0 * c;
  w.stationary = std::sqrt(ms.stationary_weight) * c;
  for (const auto& e : ms.entries) {
    const double a = std::sqrt(e.weight);
    w.terms.push_back({e.theta, a, e.multiplicity, a * detail::cot((alpha - e.theta) / 2), a * detail::cot((alpha + e.theta) / 2)});
  }
  return w;
}

struct Overlaps {
  double start = 0;  // norm of |Phi0> projected on the two principal eigenvectors
  double good = 0;   // norm of |psi_good> projected on the two principal eigenvectors
  bool in_lemma_regime = true;  // alpha < theta_min / 2
};

/// Exact two-eigenvector overlaps: with x = psi_good + i w' and n^2 = 1 + |w'|^2,
/// good = sqrt(2)/n and start = sqrt(2) a0 / (n sin(alpha/2)).
inline Overlaps predict_overlaps(const ModeSpectrum& ms, double alpha) {
  const PrincipalEigenvector w = build_principal_eigenvector(ms, alpha);
  const double n = std::sqrt(1.0 + w.norm_sq());
  Overlaps o;
  o.good = std::sqrt(2.0) / n;
  o.start = std::min(1.0, std::sqrt(2.0) * ms.a0 / (n * std::sin(alpha / 2)));
  o.in_lemma_regime = alpha < ms.theta_min / 2;
  return o;
}

struct Runtime {
  long T_star = 0;
  long T_min = 0;
  long T_max = 0;
};

/// Peak time of the two-eigenvector rotation: alpha (T + 1/2) = pi/2, rounded up to ceil(pi / (2 alpha)).
inline long runtime_from_alpha(double alpha, int steps_per_iteration = 1) {
  if (!(alpha > 0)) throw NumericalError("alpha must be positive");
  return steps_per_iteration * static_cast<long>(std::ceil(kPi / (2.0 * alpha) - 1e-9));
}

inline Runtime predict_runtime(const ModeSpectrum& ms, double alpha) {
  const AlphaBounds b = alpha_bounds(ms);
  Runtime r;
  r.T_star = runtime_from_alpha(alpha, ms.steps_per_iteration);
  r.T_min = runtime_from_alpha(b.upper, ms.steps_per_iteration);
  r.T_max = runtime_from_alpha(b.lower, ms.steps_per_iteration);
  return r;
}

/// Run-time bracket quoted for the 2D flip-flop grid: [sqrt(N log N)/2, pi sqrt(N log N)/(2 sqrt 2)], base-2 log.
inline std::pair<double, double> grid_runtime_bracket(std::size_t n) {
  const double r = std::sqrt(static_cast<double>(n) * std::log2(static_cast<double>(n)));
  return {r / 2.0, kPi * r / (2.0 * std::sqrt(2.0))};
}

struct PredictionReport {
  double alpha = 0;
  double alpha_lower = 0;
  double alpha_upper = 0;
  double theta_min = 0;
  long T_star = 0;
  long T_min = 0;
  long T_max = 0;
  double start_overlap = 0;
  double good_overlap = 0;
  double predicted_peak_probability = 0;
  bool in_lemma_regime = true;
  int steps_per_iteration = 1;
};

inline PredictionReport predict(const ModeSpectrum& ms) {
  PredictionReport r;
  r.alpha = solve_alpha(ms);
  const AlphaBounds b = alpha_bounds(ms);
  r.alpha_lower = b.lower;
  r.alpha_upper = b.upper;
  r.theta_min = ms.theta_min;
  const Runtime t = predict_runtime(ms, r.alpha);
  r.T_star = t.T_star;
  r.T_min = t.T_min;
  r.T_max = t.T_max;
  const Overlaps o = predict_overlaps(ms, r.alpha);
  r.start_overlap = o.start;
  r.good_overlap = o.good;
  // Amplitude on |psi_good> after T steps is start * good * sin(alpha (T + 1/2)).
  r.predicted_peak_probability = o.start * o.start * o.good * o.good;
  r.in_lemma_regime = o.in_lemma_regime;
  r.steps_per_iteration = ms.steps_per_iteration;
  return r;
}

inline PredictionReport predict(const GraphSpec& g) { return predict(mode_spectrum(g)); }

/// Full-space |psi_good> + i w'_alpha for a torus or hypercube with one marked vertex.
///
/// Each block eigenvector q of mode k lifts to q (x) chi_k, phased so that its overlap with |s,v> is
/// real and non-negative, and enters w' with weight <.|s,v> cot((alpha - phase)/2).
inline std::vector<cplx> lift_principal_eigenvector(const GraphSpec& spec, double alpha, std::size_t marked) {
  const Graph g(spec);
  if (g.family() == Family::complete) throw ConfigError("lifting needs the Fourier block structure");
  g.check_vertex(marked);
  const std::size_t n = g.vertex_count();
  const int d = g.coin_dim();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  auto chi = [&](const Mode& m, std::size_t v) -> cplx {
    if (g.family() == Family::hypercube) {
      int dot = 0;
      for (std::size_t i = 0; i < m.size(); ++i) dot += m[i] * static_cast<int>((v >> i) & 1u);
      return (dot % 2 ? -1.0 : 1.0) * inv_sqrt_n;
    }
    const auto x = g.coords(v);
    double ph = 0;
    for (std::size_t a = 0; a < m.size(); ++a) ph += 2.0 * kPi * m[a] * x[a] / g.side();
    return std::polar(inv_sqrt_n, ph);
  };

  std::vector<cplx> x(g.dimension(), 0.0);
  for (int i = 0; i < d; ++i) x[g.index(marked, i)] += inv_sqrt_d;  // psi_good
  const cplx I(0.0, 1.0);
  for (const Mode& m : all_modes(spec)) {
    const BlockEigen e = block_eigens(coin_block(spec, m));
    const cplx chi_v = chi(m, marked);
    std::vector<cplx> chi_all(n);
    for (std::size_t v = 0; v < n; ++v) chi_all[v] = chi(m, v);
    for (int j = 0; j < d; ++j) {
      const auto q = e.vectors.col(j);
      const cplx ov = std::conj(q.sum()) * inv_sqrt_d * std::conj(chi_v);  // <q (x) chi | s,v>
      const double b = std::abs(ov);
      if (b < 1e-14) continue;
      const cplx phase = ov / b;
      const double phi = e.phases[static_cast<std::size_t>(j)];
      const cplx coeff = I * b * detail::cot((alpha - phi) / 2) * phase;
      for (std::size_t v = 0; v < n; ++v)
        for (int i = 0; i < d; ++i) x[g.index(v, i)] += coeff * q(i) * chi_all[v];
    }
  }
  return x;
}

}  // namespace walklab
