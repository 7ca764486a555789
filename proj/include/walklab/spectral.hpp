#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "walklab/errors.hpp"
#include "walklab/graph.hpp"

namespace walklab {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Mode = std::vector<int>;

inline constexpr double kPi = std::numbers::pi;

/// 2|s><s| - I.
inline CMatrix grover_coin(int d) {
  CMatrix c = CMatrix::Constant(d, d, std::complex<double>(2.0 / d, 0.0));
  c.diagonal().array() -= 1.0;
  return c;
}

/// Fourier modes of the arena. Torus: (k_1..k_d) with k_1 fastest. Hypercube: the bit vector w.
inline std::vector<Mode> all_modes(const GraphSpec& g) {
  validate(g);
  std::vector<Mode> out;
  if (g.family == Family::torus) {
    const int d = static_cast<int>(g.dims.size());
    const int L = g.dims[0];
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(L);
    for (std::size_t idx = 0; idx < total; ++idx) {
      Mode m(static_cast<std::size_t>(d));
      std::size_t r = idx;
      for (int a = 0; a < d; ++a) {
        m[static_cast<std::size_t>(a)] = static_cast<int>(r % static_cast<std::size_t>(L));
        r /= static_cast<std::size_t>(L);
      }
      out.push_back(std::move(m));
    }
  } else if (g.family == Family::hypercube) {
    const int d = g.dims[0];
    for (std::size_t w = 0; w < (std::size_t{1} << d); ++w) {
      Mode m(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)] = static_cast<int>((w >> i) & 1u);
      out.push_back(std::move(m));
    }
  } else {
    throw ConfigError("the complete graph has no Fourier block structure");
  }
  return out;
}

namespace detail {

inline void check_mode(const GraphSpec& g, const Mode& m) {
  const std::size_t want = g.family == Family::torus ? g.dims.size() : static_cast<std::size_t>(g.dims[0]);
  if (m.size() != want) throw IndexError("mode has " + std::to_string(m.size()) + " indices, expected " + std::to_string(want));
  const int hi = g.family == Family::torus ? g.dims[0] : 2;
  for (int k : m)
    if (k < 0 || k >= hi) throw IndexError("mode index " + std::to_string(k) + " out of range");
}

inline double mode_angle(const GraphSpec& g, int k) { return 2.0 * kPi * k / g.dims[0]; }

}  // namespace detail

/// Restriction of the unperturbed U to coin (x) |chi_k>, where moving +e_a multiplies chi_k by omega^{-k_a}.
inline CMatrix coin_block(const GraphSpec& g, const Mode& m) {
  validate(g);
  if (g.family == Family::complete) throw ConfigError("coin_block is not defined for the complete graph");
  detail::check_mode(g, m);
  using std::polar;
  if (g.shift == ShiftKind::dirac) {
    const double pk = detail::mode_angle(g, m[0]);
    const double pl = detail::mode_angle(g, m[1]);
    const std::complex<double> wl = polar(1.0, pl);
    const std::complex<double> i(0.0, 1.0);
    CMatrix b(2, 2);
    b << std::cos(pk) * wl, i * std::sin(pk) / wl, i * std::sin(pk) * wl, std::cos(pk) / wl;
    return b;
  }
  const int d = g.coin_dim;
  CMatrix D = CMatrix::Zero(d, d);
  if (g.family == Family::hypercube) {
    for (int i = 0; i < d; ++i) D(i, i) = m[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
  } else {
    for (std::size_t a = 0; a < m.size(); ++a) {
      const auto fwd = polar(1.0, -detail::mode_angle(g, m[a]));
      const int p = 2 * static_cast<int>(a);
      if (g.shift == ShiftKind::flip_flop) {
        D(p + 1, p) = fwd;
        D(p, p + 1) = std::conj(fwd);
      } else {
        D(p, p) = fwd;
        D(p + 1, p + 1) = std::conj(fwd);
      }
    }
  }
  return D * grover_coin(d);
}

struct BlockEigen {
  std::vector<std::complex<double>> values;
  std::vector<double> phases;  // arg(values) in (-pi, pi]
  CMatrix vectors;             // orthonormal columns
};

/// Eigenpairs of a unitary block via complex Schur (the triangular factor of a normal matrix is diagonal).
inline BlockEigen block_eigens(const CMatrix& block) {
  Eigen::ComplexSchur<CMatrix> schur(block);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition did not converge");
  const CMatrix& T = schur.matrixT();
  const double off = T.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff();
  if (block.rows() > 1 && off > 1e-9) throw NumericalError("block is not normal (Schur off-diagonal " + std::to_string(off) + ")");
  BlockEigen e;
  e.vectors = schur.matrixU();
  for (Eigen::Index i = 0; i < T.rows(); ++i) {
    e.values.push_back(T(i, i));
    e.phases.push_back(std::arg(T(i, i)));
  }
  return e;
}

/// cos(theta) of the non-trivial eigenpair of the block for the given mode.
inline double closed_form_cos(const GraphSpec& g, const Mode& m) {
  validate(g);
  detail::check_mode(g, m);
  if (g.family == Family::hypercube) {
    int k = 0;
    for (int b : m) k += b;
    return 1.0 - 2.0 * k / g.dims[0];
  }
  if (g.family != Family::torus) throw ConfigError("closed-form block spectra exist only for tori and hypercubes");
  if (g.shift == ShiftKind::dirac)
    return std::cos(detail::mode_angle(g, m[0])) * std::cos(detail::mode_angle(g, m[1]));
  double s = 0;
  for (int k : m) s += std::cos(detail::mode_angle(g, k));
  if (g.shift == ShiftKind::moving) {
    if (m.size() != 2) throw UnsupportedError("closed-form moving-shift spectrum is only known in 2D");
    return -0.5 * s;
  }
  return s / static_cast<double>(m.size());
}

/// Full eigenvalue multiset of the block predicted by the closed forms.
inline std::vector<std::complex<double>> closed_form_eigenvalues(const GraphSpec& g, const Mode& m) {
  const double c = std::clamp(closed_form_cos(g, m), -1.0, 1.0);
  const double th = std::acos(c);
  std::vector<std::complex<double>> ev;
  auto add = [&](std::complex<double> z, int times) {
    for (int i = 0; i < times; ++i) ev.push_back(z);
  };
  const std::complex<double> ep = std::polar(1.0, th), em = std::polar(1.0, -th);
  if (g.shift == ShiftKind::dirac) {
    add(ep, 1);
    add(em, 1);
  } else if (g.family == Family::hypercube) {
    const int d = g.dims[0];
    int k = 0;
    for (int b : m) k += b;
    if (k == 0) {
      add(1.0, 1);
      add(-1.0, d - 1);
    } else if (k == d) {
      add(-1.0, 1);
      add(1.0, d - 1);
    } else {
      add(ep, 1);
      add(em, 1);
      add(1.0, k - 1);
      add(-1.0, d - k - 1);
    }
  } else {
    const int d = static_cast<int>(m.size());
    add(ep, 1);
    add(em, 1);
    add(1.0, d - 1);
    add(-1.0, d - 1);
  }
  return ev;
}

/// Max distance between two eigenvalue multisets after sorting by phase; -1 lands next to +pi.
inline double eigenvalue_multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  auto key = [](std::complex<double> z) {
    double p = std::arg(z);
    if (p < -kPi + 1e-7) p += 2 * kPi;
    return p;
  };
  auto by_phase = [&](auto x, auto y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), by_phase);
  std::sort(b.begin(), b.end(), by_phase);
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

struct SpectrumEntry {
  double theta = 0;   // eigenphase in (0, pi]
  double weight = 0;  // a_j^2, shared by the +theta and -theta eigenvectors
  int multiplicity = 1;
};

/// Decomposition of |psi_good> = |s,v> over the eigenvectors of the unperturbed walk.
///
/// Completeness reads a0^2 + stationary_weight + 2 sum m a^2 = 1. stationary_weight collects
/// eigenvalue-1 eigenvectors other than |Phi0> that overlap |s,v> (the dirac walk at even L has one).
struct ModeSpectrum {
  std::vector<SpectrumEntry> entries;
  double a0 = 0;
  double theta_min = 0;
  std::size_t retained_dim = 0;
  double stationary_weight = 0;
  int steps_per_iteration = 1;  // walk steps per application of the analysed operator
  bool pi_weight_flagged = false;
  std::size_t vertex_count = 0;
  std::string model;

  double completeness() const {
    double s = a0 * a0 + stationary_weight;
    for (const auto& e : entries) s += 2.0 * e.multiplicity * e.weight;
    return s;
  }
};

namespace detail {

inline constexpr double kPhaseTol = 1e-9;
inline constexpr double kWeightTol = 1e-14;

// Splits the s-weight of one block over its eigenphase groups.
struct GroupWeights {
  double stationary = 0;
  int stationary_count = 0;
  std::vector<std::pair<double, double>> groups;  // (theta, total weight of +theta and -theta)
};

inline GroupWeights block_group_weights(const CMatrix& block, double scale) {
  const BlockEigen e = block_eigens(block);
  const int d = static_cast<int>(block.rows());
  GroupWeights gw;
  for (int j = 0; j < d; ++j) {
    const double w = std::norm(e.vectors.col(j).sum()) / d * scale;  // |<s|q>|^2 / N
    if (w < kWeightTol) continue;
    const double th = std::abs(e.phases[static_cast<std::size_t>(j)]);
    if (th < kPhaseTol) {
      gw.stationary += w;
      ++gw.stationary_count;
      continue;
    }
    const double t = th > kPi - kPhaseTol ? kPi : th;
    auto it = std::find_if(gw.groups.begin(), gw.groups.end(), [&](const auto& p) { return std::abs(p.first - t) < kPhaseTol; });
    if (it == gw.groups.end())
      gw.groups.emplace_back(t, w);
    else
      it->second += w;
  }
  return gw;
}

inline void finish_spectrum(ModeSpectrum& ms) {
  if (ms.entries.empty()) throw NumericalError("mode spectrum has no entries");
  ms.theta_min = kPi;
  ms.retained_dim = 1;
  for (const auto& e : ms.entries) {
    ms.theta_min = std::min(ms.theta_min, e.theta);
    ms.retained_dim += static_cast<std::size_t>(e.multiplicity) * (e.theta < kPi ? 2u : 1u);
  }
  const double c = ms.completeness();
  if (std::abs(c - 1.0) > 1e-9) throw NumericalError("mode spectrum completeness " + std::to_string(c) + " != 1");
}

}  // namespace detail

inline ModeSpectrum mode_spectrum(const GraphSpec& g) {
  validate(g);
  if (g.shift == ShiftKind::moving && g.family == Family::torus)
    throw UnsupportedError("no abstract-search structure for the moving shift; use moving_shift_stationary_overlap");
  ModeSpectrum ms;
  const Graph graph(g);
  const std::size_t n = graph.vertex_count();
  ms.vertex_count = n;
  ms.a0 = 1.0 / std::sqrt(static_cast<double>(n));
  const double inv_n = 1.0 / static_cast<double>(n);

  if (g.family == Family::complete) {
    // Two applications of U' act as one Grover iterate on each register; phases {0, pi}.
    ms.model = "complete-grover";
    ms.steps_per_iteration = 2;
    ms.entries.push_back({kPi, (1.0 - inv_n) / 2.0, 1});
    detail::finish_spectrum(ms);
    return ms;
  }

  if (g.family == Family::hypercube) {
    ms.model = "hypercube";
    const int d = g.dims[0];
    for (int k = 1; k <= d; ++k) {
      Mode rep(static_cast<std::size_t>(d), 0);
      for (int i = 0; i < k; ++i) rep[static_cast<std::size_t>(i)] = 1;
      const auto gw = detail::block_group_weights(coin_block(g, rep), inv_n);
      double binom = 1;
      for (int i = 1; i <= k; ++i) binom = binom * (d - k + i) / i;
      ms.stationary_weight += gw.stationary * binom;
      for (const auto& [th, w] : gw.groups) {
        ms.entries.push_back({th, w / 2.0, static_cast<int>(std::lround(binom))});
        if (th == kPi) ms.pi_weight_flagged = true;
      }
    }
    detail::finish_spectrum(ms);
    return ms;
  }

  ms.model = g.shift == ShiftKind::dirac ? "torus-dirac" : "torus-flip-flop";
  for (const Mode& m : all_modes(g)) {
    if (std::all_of(m.begin(), m.end(), [](int k) { return k == 0; })) continue;
    const auto gw = detail::block_group_weights(coin_block(g, m), inv_n);
    ms.stationary_weight += gw.stationary;
    ms.retained_dim += static_cast<std::size_t>(gw.stationary_count);
    for (const auto& [th, w] : gw.groups) ms.entries.push_back({th, w / 2.0, 1});
  }
  const std::size_t stationary_dims = ms.retained_dim;
  detail::finish_spectrum(ms);
  ms.retained_dim += stationary_dims;
  return ms;
}

struct SpectralSums {
  double S1 = 0;    // sum (a_j^2/a0^2) m / (1 - cos theta)
  double S2 = 0;    // sum (a_j^2/a0^2) m / (1 - cos theta)^2
  double Scot = 0;  // sum a_j^2 m cot^2(theta/4)
};

inline SpectralSums spectral_sums(const ModeSpectrum& ms) {
  SpectralSums s;
  const double a0sq = ms.a0 * ms.a0;
  for (const auto& e : ms.entries) {
    const double gap = 1.0 - std::cos(e.theta);
    const double r = e.weight / a0sq * e.multiplicity;
    s.S1 += r / gap;
    s.S2 += r / (gap * gap);
    const double ct = 1.0 / std::tan(e.theta / 4.0);
    s.Scot += e.weight * e.multiplicity * ct * ct;
  }
  return s;
}

struct MovingOverlap {
  double overlap_sq = 0;    // |<Phi0|Phi_perp>|^2 = 1 - alpha00^2 / sum |alpha_kl|^2
  double alpha00_sq = 0;
  double alpha_sq_sum = 0;
  std::size_t large_pairs = 0;  // modes with |alpha_kl| > 1/(2 sqrt N)
};

/// Projection of the uniform start onto the eigenvalue-1 space of the marked moving-shift walk.
inline MovingOverlap moving_shift_stationary_overlap(const GraphSpec& g, std::size_t marked_vertex) {
  validate(g);
  if (g.family != Family::torus || g.dims.size() != 2 || g.shift != ShiftKind::moving)
    throw ConfigError("moving_shift_stationary_overlap requires a 2D torus with the moving shift");
  const int L = g.dims[0];
  const std::size_t n = static_cast<std::size_t>(L) * static_cast<std::size_t>(L);
  if (marked_vertex >= n) throw IndexError("marked vertex out of range");
  // Translation invariance: the value does not depend on the marked vertex.
  MovingOverlap r;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < L; ++k) {
    for (int l = 0; l < L; ++l) {
      const auto wk = std::polar(1.0, 2.0 * kPi * k / L);
      const auto wl = std::polar(1.0, 2.0 * kPi * l / L);
      const std::complex<double> u[4] = {wk * (1.0 + wl), 1.0 + wl, wl * (1.0 + wk), 1.0 + wk};
      double norm2 = 0;
      std::complex<double> s_dot = 0;
      for (const auto& x : u) {
        norm2 += std::norm(x);
        s_dot += x * 0.5;
      }
      // u vanishes only at (L/2, L/2), where the eigenvalue-1 vector is orthogonal to |s>.
      const double a2 = norm2 < 1e-20 ? 0.0 : std::norm(s_dot) / norm2 / static_cast<double>(n);
      if (k == 0 && l == 0) r.alpha00_sq = a2;
      r.alpha_sq_sum += a2;
      if (std::sqrt(a2) > 0.5 * inv_sqrt_n) ++r.large_pairs;
    }
  }
  r.overlap_sq = 1.0 - r.alpha00_sq / r.alpha_sq_sum;
  if (4 * r.large_pairs < n)
    throw NumericalError("fewer than N/4 modes have |alpha_kl| > 1/(2 sqrt N)");
  return r;
}

}  // namespace walklab
