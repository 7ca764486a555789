#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "walklab/errors.hpp"
#include "walklab/graph.hpp"

namespace walklab {

using cplx = std::complex<double>;

enum class BaseCoin { grover, identity };
/// minus_identity: C1 = -I. minus_c0: C1 = -C0 (complete graph).
/// projector_flip: I - 2|s,v><s,v| before an uncoined step (dirac2).
enum class Marking { minus_identity, minus_c0, projector_flip };

struct CoinConfig {
  BaseCoin base = BaseCoin::grover;
  Marking marking = Marking::minus_identity;
  std::vector<std::size_t> marked;
};

/// The coin pairing each family is analysed with.
inline CoinConfig paper_coin(const Graph& g, std::vector<std::size_t> marked = {}) {
  CoinConfig c;
  c.marked = std::move(marked);
  if (g.spec().coin == CoinKind::dirac2) {
    c.base = BaseCoin::identity;
    c.marking = Marking::projector_flip;
  } else if (g.family() == Family::complete) {
    c.marking = Marking::minus_c0;
  }
  return c;
}

inline void validate(const Graph& g, const CoinConfig& c) {
  for (std::size_t v : c.marked) g.check_vertex(v);
  auto sorted = c.marked;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("marked vertices must be distinct");
  const bool dirac = g.spec().coin == CoinKind::dirac2;
  if (dirac && (c.base != BaseCoin::identity || c.marking != Marking::projector_flip))
    throw ConfigError("dirac2 coin requires the identity base coin with projector_flip marking");
  if (!dirac && c.base != BaseCoin::grover) throw ConfigError("identity base coin is only used by dirac2");
  if (!dirac && c.marking == Marking::projector_flip)
    throw ConfigError("projector_flip marking is only used by dirac2");
  if (g.family() == Family::complete && c.marking != Marking::minus_c0)
    throw ConfigError("complete graph marking must be C1 = -C0");
  if (g.family() != Family::complete && c.marking == Marking::minus_c0)
    throw ConfigError("C1 = -C0 marking is only used on the complete graph");
}

/// Amplitudes over (vertex, direction), vertex-major.
class WalkState {
 public:
  explicit WalkState(Graph g) : graph_(std::move(g)), amps_(graph_.dimension()) {}
  WalkState(Graph g, std::vector<cplx> amps) : graph_(std::move(g)), amps_(std::move(amps)) {
    if (amps_.size() != graph_.dimension()) throw ConfigError("amplitude count does not match coin_dim*N");
  }

  const Graph& graph() const { return graph_; }
  std::vector<cplx>& amplitudes() { return amps_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::size_t size() const { return amps_.size(); }

  cplx& at(std::size_t v, int dir) { return amps_[graph_.index(v, dir)]; }
  const cplx& at(std::size_t v, int dir) const { return amps_[graph_.index(v, dir)]; }

  double norm_squared() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  void check_normalized(double tol = 1e-9) const {
    const double n = norm();
    if (std::abs(n - 1.0) > tol) throw NumericalError("state norm " + std::to_string(n) + " deviates from 1");
  }

  /// Scratch buffer reused by the gather so steps do not allocate.
  std::vector<cplx>& scratch() {
    scratch_.resize(amps_.size());
    return scratch_;
  }
  void swap_scratch() { amps_.swap(scratch_); }

 private:
  Graph graph_;
  std::vector<cplx> amps_;
  std::vector<cplx> scratch_;
};

inline WalkState uniform_state(const Graph& g) {
  WalkState s(g);
  const double a = 1.0 / std::sqrt(static_cast<double>(g.dimension()));
  std::fill(s.amplitudes().begin(), s.amplitudes().end(), cplx(a, 0.0));
  return s;
}

inline WalkState basis_state(const Graph& g, std::size_t v, int dir) {
  g.check_vertex(v);
  g.check_direction(dir);
  WalkState s(g);
  s.at(v, dir) = 1.0;
  return s;
}

/// |s> (x) |v> with s the uniform coin state.
inline WalkState coin_uniform_at(const Graph& g, std::size_t v) {
  g.check_vertex(v);
  WalkState s(g);
  const double a = 1.0 / std::sqrt(static_cast<double>(g.coin_dim()));
  for (int i = 0; i < g.coin_dim(); ++i) s.at(v, i) = a;
  return s;
}

namespace detail {

// Block transform for the marked vertices, applied in place.
inline void mark_block(cplx* b, int d, Marking m) {
  if (m == Marking::minus_identity) {
    for (int i = 0; i < d; ++i) b[i] = -b[i];
    return;
  }
  // -C0 and I - 2|s><s| coincide on a single block.
  cplx sum = 0;
  for (int i = 0; i < d; ++i) sum += b[i];
  const cplx m2 = 2.0 * sum / static_cast<double>(d);
  for (int i = 0; i < d; ++i) b[i] -= m2;
}

inline void grover_block(cplx* b, int d) {
  cplx sum = 0;
  for (int i = 0; i < d; ++i) sum += b[i];
  const cplx m2 = 2.0 * sum / static_cast<double>(d);
  for (int i = 0; i < d; ++i) b[i] = m2 - b[i];
}

}  // namespace detail

/// C' = C0 (x) (I - sum |v><v|) + C1 (x) sum |v><v|.
/// Every coin in use is an involution, so this is also the inverse coin.
inline void apply_coin(WalkState& s, const CoinConfig& c) {
  const Graph& g = s.graph();
  const int d = g.coin_dim();
  const std::size_t n = g.vertex_count();
  cplx* a = s.amplitudes().data();

  // Marked blocks are transformed out of place so the bulk loop stays branch free.
  std::vector<cplx> saved;
  saved.reserve(c.marked.size() * static_cast<std::size_t>(d));
  for (std::size_t v : c.marked) {
    const cplx* b = a + v * static_cast<std::size_t>(d);
    saved.insert(saved.end(), b, b + d);
    detail::mark_block(saved.data() + saved.size() - static_cast<std::size_t>(d), d, c.marking);
  }
  if (c.base == BaseCoin::grover) {
    for (std::size_t v = 0; v < n; ++v) detail::grover_block(a + v * static_cast<std::size_t>(d), d);
  }
  for (std::size_t k = 0; k < c.marked.size(); ++k)
    std::copy_n(saved.data() + k * static_cast<std::size_t>(d), d, a + c.marked[k] * static_cast<std::size_t>(d));
}

namespace detail {

inline void dirac_shift(WalkState& s, bool inverse) {
  const Graph& g = s.graph();
  const std::size_t n = g.vertex_count();
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<cplx>& in = s.amplitudes();
  std::vector<cplx>& out = s.scratch();
  // Hadamard-basis components: a along the left role, c along the right role.
  std::vector<cplx> a(n), c(n);
  if (!inverse) {
    for (std::size_t v = 0; v < n; ++v) {
      const cplx w0 = in[2 * g.offset(v, 1, +1)];      // up role arrived from y+1
      const cplx w1 = in[2 * g.offset(v, 1, -1) + 1];  // down role arrived from y-1
      a[v] = (w0 + w1) * r;
      c[v] = (w0 - w1) * r;
    }
    for (std::size_t v = 0; v < n; ++v) {
      const cplx al = a[g.offset(v, 0, +1)];  // left role arrived from x+1
      const cplx cr = c[g.offset(v, 0, -1)];  // right role arrived from x-1
      out[2 * v] = (al + cr) * r;
      out[2 * v + 1] = (al - cr) * r;
    }
  } else {
    for (std::size_t v = 0; v < n; ++v) {
      a[g.offset(v, 0, +1)] = (in[2 * v] + in[2 * v + 1]) * r;
      c[g.offset(v, 0, -1)] = (in[2 * v] - in[2 * v + 1]) * r;
    }
    for (std::size_t v = 0; v < n; ++v) {
      out[2 * g.offset(v, 1, +1)] = (a[v] + c[v]) * r;
      out[2 * g.offset(v, 1, -1) + 1] = (a[v] - c[v]) * r;
    }
  }
  s.swap_scratch();
}

inline void gather(WalkState& s, const std::vector<std::uint32_t>& from) {
  const cplx* in = s.amplitudes().data();
  std::vector<cplx>& out = s.scratch();
  const std::size_t dim = out.size();
  for (std::size_t j = 0; j < dim; ++j) out[j] = in[from[j]];
  s.swap_scratch();
}

}  // namespace detail

/// S: amplitude at (v, i) moves to shift_target(v, i).
inline void apply_shift(WalkState& s) {
  if (s.graph().shift() == ShiftKind::dirac)
    detail::dirac_shift(s, false);
  else
    detail::gather(s, s.graph().source());
}

inline void apply_shift_inverse(WalkState& s) {
  if (s.graph().shift() == ShiftKind::dirac)
    detail::dirac_shift(s, true);
  else
    detail::gather(s, s.graph().target());
}

/// One walk step U' = S C'.
inline void step(WalkState& s, const CoinConfig& c) {
  apply_coin(s, c);
  apply_shift(s);
}

/// U'^-1 = C'^-1 S^-1 with C' an involution.
inline void step_inverse(WalkState& s, const CoinConfig& c) {
  apply_shift_inverse(s);
  apply_coin(s, c);
}

/// 2|Phi0><Phi0| - I.
inline void reflect_about_uniform(WalkState& s) {
  auto& a = s.amplitudes();
  cplx sum = 0;
  for (const auto& x : a) sum += x;
  const cplx m2 = 2.0 * sum / static_cast<double>(a.size());
  for (auto& x : a) x = m2 - x;
}

inline cplx overlap(const WalkState& a, const WalkState& b) {
  if (a.size() != b.size()) throw ConfigError("overlap of states with different dimensions");
  cplx s = 0;
  const auto& x = a.amplitudes();
  const auto& y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline double vertex_probability(const WalkState& s, std::size_t v) {
  s.graph().check_vertex(v);
  double p = 0;
  for (int i = 0; i < s.graph().coin_dim(); ++i) p += std::norm(s.at(v, i));
  return p;
}

inline std::vector<double> all_vertex_probabilities(const WalkState& s) {
  std::vector<double> p(s.graph().vertex_count());
  for (std::size_t v = 0; v < p.size(); ++v) p[v] = vertex_probability(s, v);
  return p;
}

/// The vertex set together with every vertex one walk step away, deduplicated.
inline std::vector<std::size_t> closed_neighborhood(const Graph& g, const std::vector<std::size_t>& vs) {
  std::vector<std::size_t> out(vs);
  for (std::size_t v : vs) {
    auto nb = g.neighbors(v);
    out.insert(out.end(), nb.begin(), nb.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline double probability_over(const WalkState& s, const std::vector<std::size_t>& vs) {
  double p = 0;
  for (std::size_t v : vs) p += vertex_probability(s, v);
  return p;
}

struct VertexProbabilities {
  std::vector<double> p;       // per requested vertex
  std::vector<double> p_nbhd;  // p(v) plus its one-step neighbours
};

inline VertexProbabilities measure_probabilities(const WalkState& s, const std::vector<std::size_t>& vertices) {
  VertexProbabilities r;
  for (std::size_t v : vertices) {
    r.p.push_back(vertex_probability(s, v));
    r.p_nbhd.push_back(probability_over(s, closed_neighborhood(s.graph(), {v})));
  }
  return r;
}

// Serialization: 16-byte header (magic, coin_dim, N) then little-endian (re, im) doubles.

inline constexpr std::uint32_t kStateMagic = 0x314b4c57u;  // "WLK1"

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> buf{};
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

template <typename T>
T get_le(std::istream& is) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> buf{};
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!is) throw IoError("truncated state stream");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace detail

inline void write_state(std::ostream& os, const WalkState& s) {
  detail::put_le<std::uint32_t>(os, kStateMagic);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.graph().coin_dim()));
  detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(s.graph().vertex_count()));
  for (const auto& a : s.amplitudes()) {
    detail::put_le<double>(os, a.real());
    detail::put_le<double>(os, a.imag());
  }
  if (!os) throw IoError("failed to write state stream");
}

inline WalkState read_state(std::istream& is, const Graph& g) {
  if (detail::get_le<std::uint32_t>(is) != kStateMagic) throw IoError("bad state magic");
  const auto d = detail::get_le<std::uint32_t>(is);
  const auto n = detail::get_le<std::uint64_t>(is);
  if (d != static_cast<std::uint32_t>(g.coin_dim()) || n != g.vertex_count())
    throw IoError("state header does not match the graph (coin_dim " + std::to_string(d) + ", N " +
                  std::to_string(n) + ")");
  WalkState s(g);
  for (auto& a : s.amplitudes()) {
    const double re = detail::get_le<double>(is);
    const double im = detail::get_le<double>(is);
    a = cplx(re, im);
  }
  return s;
}

}  // namespace walklab
