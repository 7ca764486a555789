#include <gtest/gtest.h>

#include "walklab/dense_oracle.hpp"
#include "walklab/experiment.hpp"

using namespace walklab;

TEST(DenseOracle, OperatorsAreUnitary) {
  for (const auto& spec : {GraphSpec::torus(8, 2), GraphSpec::torus(8, 2, ShiftKind::moving),
                           GraphSpec::torus(8, 2, ShiftKind::dirac), GraphSpec::torus(4, 3), GraphSpec::hypercube(6),
                           GraphSpec::complete(16)}) {
    const Graph g(spec);
    EXPECT_LT(dense_unitary(spec, paper_coin(g, {0, 3})).unitarity_error(), 1e-13);
  }
}

TEST(DenseOracle, RefusesLargeDimensions) {
  const GraphSpec spec = GraphSpec::torus(17, 2);  // 4 * 289 > 1024
  EXPECT_THROW(dense_unitary(spec, paper_coin(Graph(spec))), ConfigError);
  EXPECT_NO_THROW(dense_unitary(GraphSpec::torus(16, 2), paper_coin(Graph(GraphSpec::torus(16, 2)))));
}

TEST(DenseOracle, ValidatesCoin) {
  const GraphSpec spec = GraphSpec::complete(5);
  CoinConfig c = paper_coin(Graph(spec), {1});
  c.marking = Marking::minus_identity;
  EXPECT_THROW(dense_unitary(spec, c), ConfigError);
}

TEST(DenseOracle, MarkingEqualsUnmarkedWalkTimesReflection) {
  // U' = U (I - 2|s,v><s,v|) wherever C1 = -I (or the dirac projector flip).
  for (const auto& spec : {GraphSpec::torus(5, 2), GraphSpec::torus(4, 2, ShiftKind::dirac), GraphSpec::hypercube(4)}) {
    const Graph g(spec);
    const CMatrix u = dense_unitary(spec, paper_coin(g)).m;
    const CMatrix up = dense_unitary(spec, paper_coin(g, {2})).m;
    const CVector sv = to_vector(coin_uniform_at(g, 2).amplitudes());
    const CMatrix refl = CMatrix::Identity(u.rows(), u.cols()) - 2.0 * sv * sv.adjoint();
    EXPECT_LT((up - u * refl).cwiseAbs().maxCoeff(), 1e-14);
  }
  // With C1 = -C0 on the complete graph the whole marked vertex changes sign instead.
  const GraphSpec k = GraphSpec::complete(6);
  const Graph g(k);
  const CMatrix u = dense_unitary(k, paper_coin(g)).m;
  const CMatrix up = dense_unitary(k, paper_coin(g, {2})).m;
  CMatrix flip = CMatrix::Identity(u.rows(), u.cols());
  for (int i = 0; i < 6; ++i) flip(12 + i, 12 + i) = -1.0;
  EXPECT_LT((up - u * flip).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DenseOracle, EigensAreSortedAndOrthonormal) {
  const GraphSpec spec = GraphSpec::torus(4, 2);
  const DenseOperator op = dense_unitary(spec, paper_coin(Graph(spec), {0}));
  const DenseEigen e = dense_eigens(op);
  for (std::size_t k = 1; k < e.phases.size(); ++k) EXPECT_LE(std::abs(e.phases[k - 1]), std::abs(e.phases[k]));
  const CMatrix gram = e.vectors.adjoint() * e.vectors;
  EXPECT_LT((gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t k = 0; k < e.values.size(); ++k) {
    const auto col = e.vectors.col(static_cast<Eigen::Index>(k));
    EXPECT_LT((op.m * col - e.values[k] * col).norm(), 1e-12);
  }
}

TEST(DenseOracle, TraceAgreesWithFastPath) {
  for (const auto& spec : {GraphSpec::torus(8, 2), GraphSpec::torus(8, 2, ShiftKind::dirac), GraphSpec::hypercube(5),
                           GraphSpec::complete(16)}) {
    const Graph g(spec);
    const CoinConfig c = paper_coin(g, {3});
    EXPECT_LT(compare_traces(run_walk(g, c, 60), dense_run_walk(spec, c, 60, {3})), 1e-12);
  }
}

TEST(DenseOracle, EvolveMatchesRepeatedSteps) {
  const GraphSpec spec = GraphSpec::torus(6, 2, ShiftKind::moving);
  const Graph g(spec);
  const CoinConfig c = paper_coin(g, {7});
  const DenseOperator op = dense_unitary(spec, c);
  WalkState s = uniform_state(g);
  for (int t = 0; t < 40; ++t) step(s, c);
  const CVector x = dense_evolve(op, dense_uniform(g.dimension()), 40);
  EXPECT_LT((x - to_vector(s.amplitudes())).cwiseAbs().maxCoeff(), 1e-13);
}
