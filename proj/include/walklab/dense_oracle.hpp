#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "walklab/errors.hpp"
#include "walklab/graph.hpp"
#include "walklab/spectral.hpp"
#include "walklab/state.hpp"
#include "walklab/trace.hpp"

// Ground truth for small instances. The matrices here are assembled from the walk definitions
// directly and share no code with the shift tables or coin kernels of the fast path.

namespace walklab {

inline constexpr std::size_t kDenseCap = 1024;

struct DenseOperator {
  CMatrix m;
  std::size_t coin_dim = 0;
  std::size_t vertex_count = 0;

  std::size_t dimension() const { return static_cast<std::size_t>(m.rows()); }
  double unitarity_error() const {
    const CMatrix e = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
    return e.cwiseAbs().maxCoeff();
  }
};

namespace oracle_detail {

inline std::size_t pow_size(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

// Torus vertex moved by delta along axis (own coordinate arithmetic).
inline std::size_t torus_step(std::size_t v, std::size_t axis, int delta, std::size_t L) {
  const std::size_t stride = pow_size(L, axis);
  const std::size_t x = (v / stride) % L;
  const std::size_t y = (x + L + static_cast<std::size_t>(delta + static_cast<int>(L))) % L;
  return v - x * stride + y * stride;
}

inline CMatrix permutation(std::size_t dim, const std::vector<std::size_t>& to) {
  CMatrix p = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < dim; ++c) p(static_cast<Eigen::Index>(to[c]), static_cast<Eigen::Index>(c)) = 1.0;
  return p;
}

inline CMatrix shift_matrix(const GraphSpec& spec, std::size_t n, std::size_t d) {
  const std::size_t dim = n * d;
  std::vector<std::size_t> to(dim);
  auto idx = [d](std::size_t v, std::size_t i) { return v * d + i; };
  switch (spec.family) {
    case Family::complete:
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < d; ++i) to[idx(v, i)] = idx(i, v);
      return permutation(dim, to);
    case Family::hypercube:
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < d; ++i) to[idx(v, i)] = idx(v ^ (std::size_t{1} << i), i);
      return permutation(dim, to);
    case Family::torus: break;
  }
  const std::size_t L = static_cast<std::size_t>(spec.dims[0]);
  if (spec.shift == ShiftKind::dirac) {
    // Up/down in the computational basis, then left/right in the Hadamard basis.
    std::vector<std::size_t> ud(dim), lr(dim);
    for (std::size_t v = 0; v < n; ++v) {
      ud[idx(v, 0)] = idx(torus_step(v, 1, -1, L), 0);
      ud[idx(v, 1)] = idx(torus_step(v, 1, +1, L), 1);
      lr[idx(v, 0)] = idx(torus_step(v, 0, -1, L), 0);
      lr[idx(v, 1)] = idx(torus_step(v, 0, +1, L), 1);
    }
    CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t v = 0; v < n; ++v) {
      const auto a = static_cast<Eigen::Index>(idx(v, 0)), b = static_cast<Eigen::Index>(idx(v, 1));
      h(a, a) = r;
      h(a, b) = r;
      h(b, a) = r;
      h(b, b) = -r;
    }
    return h * permutation(dim, lr) * h * permutation(dim, ud);
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t a = 0; a < spec.dims.size(); ++a) {
      const std::size_t plus = 2 * a, minus = 2 * a + 1;
      const std::size_t up = torus_step(v, a, +1, L), down = torus_step(v, a, -1, L);
      if (spec.shift == ShiftKind::flip_flop) {
        to[idx(v, plus)] = idx(up, minus);
        to[idx(v, minus)] = idx(down, plus);
      } else {
        to[idx(v, plus)] = idx(up, plus);
        to[idx(v, minus)] = idx(down, minus);
      }
    }
  }
  return permutation(dim, to);
}

inline CMatrix coin_matrix(const CoinConfig& c, std::size_t n, std::size_t d) {
  const auto D = static_cast<Eigen::Index>(d);
  const CMatrix id = CMatrix::Identity(D, D);
  const CMatrix ss = CMatrix::Constant(D, D, std::complex<double>(1.0 / static_cast<double>(d), 0.0));
  const CMatrix base = c.base == BaseCoin::grover ? CMatrix(2.0 * ss - id) : id;
  CMatrix marked;
  switch (c.marking) {
    case Marking::minus_identity: marked = -id; break;
    case Marking::minus_c0: marked = -(2.0 * ss - id); break;
    case Marking::projector_flip: marked = id - 2.0 * ss; break;
  }
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n * d), static_cast<Eigen::Index>(n * d));
  for (std::size_t v = 0; v < n; ++v) {
    const bool is_marked = std::find(c.marked.begin(), c.marked.end(), v) != c.marked.end();
    m.block(static_cast<Eigen::Index>(v * d), static_cast<Eigen::Index>(v * d), D, D) = is_marked ? marked : base;
  }
  return m;
}

}  // namespace oracle_detail

/// Explicit (coin_dim N)-square matrix of U' = S C'. Refuses dimensions above 1024.
inline DenseOperator dense_unitary(const GraphSpec& spec, const CoinConfig& coin) {
  const Graph g(spec);
  validate(g, coin);
  if (g.dimension() > kDenseCap)
    throw ConfigError("dense oracle refuses dimension " + std::to_string(g.dimension()) + " (cap " +
                      std::to_string(kDenseCap) + ")");
  DenseOperator op;
  op.coin_dim = static_cast<std::size_t>(g.coin_dim());
  op.vertex_count = g.vertex_count();
  op.m = oracle_detail::shift_matrix(spec, op.vertex_count, op.coin_dim) *
         oracle_detail::coin_matrix(coin, op.vertex_count, op.coin_dim);
  return op;
}

struct DenseEigen {
  std::vector<std::complex<double>> values;
  std::vector<double> phases;
  CMatrix vectors;  // orthonormal columns, same order as values
};

/// Full eigendecomposition through the complex Schur form, sorted by |phase|.
inline DenseEigen dense_eigens(const DenseOperator& op) {
  Eigen::ComplexSchur<CMatrix> schur(op.m);
  if (schur.info() != Eigen::Success) throw NumericalError("dense Schur decomposition did not converge");
  const CMatrix& T = schur.matrixT();
  const auto dim = T.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return std::abs(std::arg(T(a, a))) < std::abs(std::arg(T(b, b))); });
  DenseEigen e;
  e.vectors.resize(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto j = order[static_cast<std::size_t>(k)];
    e.values.push_back(T(j, j));
    e.phases.push_back(std::arg(T(j, j)));
    e.vectors.col(k) = schur.matrixU().col(j);
  }
  return e;
}

inline CVector to_vector(const std::vector<cplx>& v) {
  CVector x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
  return x;
}

inline CVector dense_uniform(std::size_t dim) {
  return CVector::Constant(static_cast<Eigen::Index>(dim), std::complex<double>(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

/// Squared norm of x projected on the eigenvectors whose phase satisfies pred.
template <typename Pred>
double eigenspace_weight(const DenseEigen& e, const CVector& x, Pred pred) {
  double w = 0;
  for (std::size_t k = 0; k < e.phases.size(); ++k)
    if (pred(e.phases[k])) w += std::norm(e.vectors.col(static_cast<Eigen::Index>(k)).dot(x));
  return w;
}

/// Evolution by repeated explicit matrix application.
inline CVector dense_evolve(const DenseOperator& op, CVector x, int steps) {
  for (int t = 0; t < steps; ++t) x = op.m * x;
  return x;
}

inline RunTrace dense_run_walk(const GraphSpec& spec, const CoinConfig& coin, int t_max,
                               const std::vector<std::size_t>& observed) {
  const Graph g(spec);
  const DenseOperator op = dense_unitary(spec, coin);
  const std::size_t d = op.coin_dim;
  const auto nbhd = closed_neighborhood(g, observed);
  auto prob = [&](const CVector& x, const std::vector<std::size_t>& vs) {
    double p = 0;
    for (std::size_t v : vs)
      for (std::size_t i = 0; i < d; ++i) p += std::norm(x(static_cast<Eigen::Index>(v * d + i)));
    return p;
  };
  RunTrace tr;
  CVector x = dense_uniform(op.dimension());
  for (int t = 0; t <= t_max; ++t) {
    if (t > 0) x = op.m * x;
    tr.p_marked.push_back(prob(x, observed));
    tr.p_nbhd.push_back(prob(x, nbhd));
    tr.norm.push_back(x.norm());
  }
  return tr;
}

}  // namespace walklab
