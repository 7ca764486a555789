#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "walklab/errors.hpp"

namespace walklab {

enum class Family { torus, hypercube, complete };
enum class ShiftKind { flip_flop, moving, dirac, swap };
enum class CoinKind { grover, dirac2 };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::torus: return "torus";
    case Family::hypercube: return "hypercube";
    case Family::complete: return "complete";
  }
  return "?";
}

inline std::string to_string(ShiftKind s) {
  switch (s) {
    case ShiftKind::flip_flop: return "flip-flop";
    case ShiftKind::moving: return "moving";
    case ShiftKind::dirac: return "dirac";
    case ShiftKind::swap: return "swap";
  }
  return "?";
}

inline std::string to_string(CoinKind c) { return c == CoinKind::grover ? "grover" : "dirac2"; }

inline Family parse_family(const std::string& s) {
  if (s == "torus") return Family::torus;
  if (s == "hypercube") return Family::hypercube;
  if (s == "complete") return Family::complete;
  throw ConfigError("unknown family '" + s + "' (expected torus, hypercube or complete)");
}

inline ShiftKind parse_shift(const std::string& s) {
  if (s == "flip-flop" || s == "flip_flop") return ShiftKind::flip_flop;
  if (s == "moving") return ShiftKind::moving;
  if (s == "dirac") return ShiftKind::dirac;
  if (s == "swap") return ShiftKind::swap;
  throw ConfigError("unknown shift '" + s + "' (expected flip-flop, moving, dirac or swap)");
}

/// Description of a walk arena.
///
/// Torus: dims holds d copies of the side length L, N = L^d. Hypercube: dims = {d}, N = 2^d.
/// Complete: dims = {N}; every vertex carries a self-loop so coin_dim = N.
struct GraphSpec {
  Family family = Family::torus;
  std::vector<int> dims;
  ShiftKind shift = ShiftKind::flip_flop;
  CoinKind coin = CoinKind::grover;
  int coin_dim = 0;

  static GraphSpec torus(int side, int d, ShiftKind shift = ShiftKind::flip_flop) {
    GraphSpec g;
    g.family = Family::torus;
    g.dims.assign(static_cast<std::size_t>(std::max(d, 0)), side);
    g.shift = shift;
    g.coin = shift == ShiftKind::dirac ? CoinKind::dirac2 : CoinKind::grover;
    g.coin_dim = shift == ShiftKind::dirac ? 2 : 2 * d;
    return g;
  }
  static GraphSpec hypercube(int d) {
    GraphSpec g;
    g.family = Family::hypercube;
    g.dims = {d};
    g.coin_dim = d;
    return g;
  }
  static GraphSpec complete(int n) {
    GraphSpec g;
    g.family = Family::complete;
    g.dims = {n};
    g.shift = ShiftKind::swap;
    g.coin_dim = n;
    return g;
  }

  bool operator==(const GraphSpec&) const = default;
};

// Keeps the shift tables addressable by 32-bit indices and the state under a few GB.
inline constexpr std::size_t kMaxStateDimension = std::size_t{1} << 28;

/// Throws ConfigError naming the first violated constraint.
inline void validate(const GraphSpec& g) {
  if (g.dims.empty()) throw ConfigError("graph dims must not be empty");
  for (int x : g.dims)
    if (x <= 0) throw ConfigError("graph dims must be positive");
  if (g.shift == ShiftKind::dirac || g.coin == CoinKind::dirac2) {
    if (g.family != Family::torus || g.dims.size() != 2)
      throw ConfigError("dirac shift and dirac2 coin are only valid on a 2D torus (got " + to_string(g.family) +
                        " with " + std::to_string(g.dims.size()) + " dimension(s))");
    if (g.shift != ShiftKind::dirac || g.coin != CoinKind::dirac2)
      throw ConfigError("dirac shift and dirac2 coin must be used together");
    if (g.coin_dim != 2) throw ConfigError("dirac2 coin requires coin_dim = 2");
  }
  if (g.shift == ShiftKind::swap && g.family != Family::complete)
    throw ConfigError("swap shift is only valid on the complete graph");
  switch (g.family) {
    case Family::torus: {
      if (!std::all_of(g.dims.begin(), g.dims.end(), [&](int x) { return x == g.dims[0]; }))
        throw ConfigError("torus requires equal side lengths in every dimension");
      if (g.dims[0] < 2) throw ConfigError("torus side must be at least 2");
      if (g.shift != ShiftKind::dirac && g.coin_dim != 2 * static_cast<int>(g.dims.size()))
        throw ConfigError("torus with a grover coin requires coin_dim = 2d");
      break;
    }
    case Family::hypercube:
      if (g.dims.size() != 1) throw ConfigError("hypercube takes a single dimension entry d");
      if (g.dims[0] > 24) throw ConfigError("hypercube dimension d must be at most 24");
      if (g.shift != ShiftKind::flip_flop && g.shift != ShiftKind::moving)
        throw ConfigError("hypercube supports only the bit-flip shift (flip-flop or moving, which coincide)");
      if (g.coin_dim != g.dims[0]) throw ConfigError("hypercube requires coin_dim = d");
      break;
    case Family::complete:
      if (g.dims.size() != 1) throw ConfigError("complete graph takes a single entry N");
      if (g.dims[0] < 2) throw ConfigError("complete graph requires N >= 2");
      if (g.shift != ShiftKind::swap) throw ConfigError("complete graph requires the swap shift");
      if (g.coin_dim != g.dims[0]) throw ConfigError("complete graph requires coin_dim = N (self-loops included)");
      break;
  }
  double n = 1;
  if (g.family == Family::torus)
    for (int x : g.dims) n *= x;
  else if (g.family == Family::hypercube)
    n = static_cast<double>(std::size_t{1} << g.dims[0]);
  else
    n = g.dims[0];
  if (n * g.coin_dim > static_cast<double>(kMaxStateDimension))
    throw ConfigError("state dimension coin_dim*N exceeds the supported maximum 2^28");
}

enum class DiracRole { up, down, left, right };

struct DirectionLabel {
  enum class Kind { axis, bit, target, dirac };
  Kind kind = Kind::axis;
  int axis = -1;  // torus
  int sign = 0;   // torus: +1 or -1
  int bit = -1;   // hypercube
  std::size_t target = 0;  // complete graph
  DiracRole role = DiracRole::up;  // dirac: computational basis role of the up/down sub-step
};

struct Move {
  std::size_t vertex = 0;
  int direction = 0;
  bool operator==(const Move&) const = default;
};

/// Immutable walk arena with a precomputed shift permutation.
///
/// Amplitude layout is vertex-major: flat index = vertex * coin_dim + direction.
/// Torus vertices are row-major with x_1 fastest, v = sum_a x_a L^a.
/// Torus directions are ordered (axis 0 +, axis 0 -, axis 1 +, axis 1 -, ...).
class Graph {
 public:
  explicit Graph(GraphSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    coin_dim_ = spec_.coin_dim;
    switch (spec_.family) {
      case Family::torus: {
        side_ = spec_.dims[0];
        n_ = 1;
        for (std::size_t a = 0; a < spec_.dims.size(); ++a) {
          strides_.push_back(n_);
          n_ *= static_cast<std::size_t>(side_);
        }
        break;
      }
      case Family::hypercube:
        side_ = 2;
        n_ = std::size_t{1} << spec_.dims[0];
        break;
      case Family::complete:
        side_ = 0;
        n_ = static_cast<std::size_t>(spec_.dims[0]);
        break;
    }
    if (spec_.shift != ShiftKind::dirac) build_tables();
  }

  const GraphSpec& spec() const { return spec_; }
  Family family() const { return spec_.family; }
  ShiftKind shift() const { return spec_.shift; }
  std::size_t vertex_count() const { return n_; }
  int coin_dim() const { return coin_dim_; }
  std::size_t dimension() const { return n_ * static_cast<std::size_t>(coin_dim_); }
  /// Torus side length (2 for the hypercube, 0 for the complete graph).
  int side() const { return side_; }
  int rank() const { return spec_.family == Family::torus ? static_cast<int>(spec_.dims.size()) : 1; }
  bool is_permutation_shift() const { return spec_.shift != ShiftKind::dirac; }

  std::size_t index(std::size_t v, int dir) const { return v * static_cast<std::size_t>(coin_dim_) + static_cast<std::size_t>(dir); }

  std::vector<int> coords(std::size_t v) const {
    require_torus("coords");
    check_vertex(v);
    std::vector<int> x(spec_.dims.size());
    for (std::size_t a = 0; a < x.size(); ++a) {
      x[a] = static_cast<int>(v % static_cast<std::size_t>(side_));
      v /= static_cast<std::size_t>(side_);
    }
    return x;
  }

  /// Coordinates are reduced mod L, so negative entries are allowed.
  std::size_t vertex_at(const std::vector<int>& x) const {
    require_torus("vertex_at");
    if (x.size() != spec_.dims.size())
      throw IndexError("coordinate count " + std::to_string(x.size()) + " does not match torus rank " +
                       std::to_string(spec_.dims.size()));
    std::size_t v = 0;
    for (std::size_t a = 0; a < x.size(); ++a) v += static_cast<std::size_t>(wrap(x[a])) * strides_[a];
    return v;
  }

  /// Moves v by delta along one torus axis (periodic).
  std::size_t offset(std::size_t v, int axis, int delta) const {
    const std::size_t L = static_cast<std::size_t>(side_);
    const std::size_t s = strides_[static_cast<std::size_t>(axis)];
    const int x = static_cast<int>((v / s) % L);
    const int y = wrap(x + delta);
    return v + static_cast<std::size_t>(y) * s - static_cast<std::size_t>(x) * s;
  }

  /// Group translation: torus addition mod L, hypercube xor, complete graph cyclic shift.
  std::size_t translate(std::size_t v, std::size_t t) const {
    check_vertex(v);
    check_vertex(t);
    switch (spec_.family) {
      case Family::torus: {
        auto x = coords(v);
        auto y = coords(t);
        for (std::size_t a = 0; a < x.size(); ++a) x[a] += y[a];
        return vertex_at(x);
      }
      case Family::hypercube: return v ^ t;
      case Family::complete: return (v + t) % n_;
    }
    return v;
  }

  DirectionLabel label(int dir) const {
    check_direction(dir);
    DirectionLabel l;
    if (spec_.shift == ShiftKind::dirac) {
      l.kind = DirectionLabel::Kind::dirac;
      l.role = dir == 0 ? DiracRole::up : DiracRole::down;
    } else if (spec_.family == Family::torus) {
      l.kind = DirectionLabel::Kind::axis;
      l.axis = dir / 2;
      l.sign = dir % 2 == 0 ? +1 : -1;
    } else if (spec_.family == Family::hypercube) {
      l.kind = DirectionLabel::Kind::bit;
      l.bit = dir;
    } else {
      l.kind = DirectionLabel::Kind::target;
      l.target = static_cast<std::size_t>(dir);
    }
    return l;
  }

  /// (vertex, direction) -> (vertex', direction') for the permutation shifts.
  Move shift_target(std::size_t v, int dir) const {
    check_vertex(v);
    check_direction(dir);
    switch (spec_.shift) {
      case ShiftKind::flip_flop:
      case ShiftKind::moving: {
        if (spec_.family == Family::hypercube) return {v ^ (std::size_t{1} << dir), dir};
        const int axis = dir / 2;
        const int sign = dir % 2 == 0 ? +1 : -1;
        const std::size_t w = offset(v, axis, sign);
        if (spec_.shift == ShiftKind::moving) return {w, dir};
        return {w, dir ^ 1};
      }
      case ShiftKind::swap: return {static_cast<std::size_t>(dir), static_cast<int>(v)};
      case ShiftKind::dirac:
        throw UnsupportedError(
            "the dirac shift mixes coin states (left/right acts in the Hadamard basis); "
            "use dirac_move for its sub-step displacements");
    }
    return {v, dir};
  }

  /// Displacement of one Dirac sub-step role: up y-1, down y+1, left x-1, right x+1.
  std::size_t dirac_move(std::size_t v, DiracRole role) const {
    if (spec_.shift != ShiftKind::dirac) throw ConfigError("dirac_move requires the dirac shift");
    check_vertex(v);
    switch (role) {
      case DiracRole::up: return offset(v, 1, -1);
      case DiracRole::down: return offset(v, 1, +1);
      case DiracRole::left: return offset(v, 0, -1);
      case DiracRole::right: return offset(v, 0, +1);
    }
    return v;
  }

  /// Gather table of the shift: after shifting, amplitude j comes from source()[j].
  const std::vector<std::uint32_t>& source() const {
    if (!source_) throw UnsupportedError("the dirac shift has no permutation table");
    return *source_;
  }
  /// Gather table of the inverse shift.
  const std::vector<std::uint32_t>& target() const {
    if (!target_) throw UnsupportedError("the dirac shift has no permutation table");
    return *target_;
  }

  /// Distinct vertices one walk step away from v (v itself excluded).
  /// For the dirac walk a step is up/down followed by left/right, so these are the four diagonal vertices.
  std::vector<std::size_t> neighbors(std::size_t v) const {
    check_vertex(v);
    std::vector<std::size_t> out;
    if (spec_.shift == ShiftKind::dirac) {
      for (int dy : {-1, 1})
        for (int dx : {-1, 1}) out.push_back(offset(offset(v, 1, dy), 0, dx));
    } else {
      for (int i = 0; i < coin_dim_; ++i) out.push_back(shift_target(v, i).vertex);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), v), out.end());
    return out;
  }

  void check_vertex(std::size_t v) const {
    if (v >= n_) throw IndexError("vertex " + std::to_string(v) + " out of range [0, " + std::to_string(n_) + ")");
  }
  void check_direction(int dir) const {
    if (dir < 0 || dir >= coin_dim_)
      throw IndexError("direction " + std::to_string(dir) + " out of range [0, " + std::to_string(coin_dim_) + ")");
  }

 private:
  int wrap(int x) const {
    const int r = x % side_;
    return r < 0 ? r + side_ : r;
  }

  void require_torus(const char* what) const {
    if (spec_.family != Family::torus) throw ConfigError(std::string(what) + " requires a torus");
  }

  void build_tables() {
    const std::size_t dim = dimension();
    constexpr std::uint32_t kUnset = 0xffffffffu;
    std::vector<std::uint32_t> src(dim, kUnset);
    std::vector<std::uint32_t> dst(dim);
    for (std::size_t v = 0; v < n_; ++v) {
      for (int i = 0; i < coin_dim_; ++i) {
        const Move m = shift_target(v, i);
        const std::size_t from = index(v, i);
        const std::size_t to = index(m.vertex, m.direction);
        if (src[to] != kUnset) throw NumericalError("shift map is not a permutation");
        src[to] = static_cast<std::uint32_t>(from);
        dst[from] = static_cast<std::uint32_t>(to);
      }
    }
    source_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(src));
    target_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(dst));
  }

  GraphSpec spec_;
  std::size_t n_ = 0;
  int coin_dim_ = 0;
  int side_ = 0;
  std::vector<std::size_t> strides_;
  std::shared_ptr<const std::vector<std::uint32_t>> source_;
  std::shared_ptr<const std::vector<std::uint32_t>> target_;
};

inline Graph build_graph(const GraphSpec& spec) { return Graph(spec); }

inline Move shift_target(const Graph& g, std::size_t v, int dir) { return g.shift_target(v, dir); }

}  // namespace walklab
