#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "walklab/state.hpp"

using namespace walklab;

namespace {

WalkState random_state(const Graph& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  WalkState s(g);
  for (auto& a : s.amplitudes()) a = cplx(gauss(rng), gauss(rng));
  const double n = s.norm();
  for (auto& a : s.amplitudes()) a /= n;
  return s;
}

double distance(const WalkState& a, const WalkState& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
  return m;
}

std::vector<GraphSpec> all_families() {
  return {GraphSpec::torus(6, 2), GraphSpec::torus(5, 2, ShiftKind::moving), GraphSpec::torus(6, 2, ShiftKind::dirac),
          GraphSpec::torus(3, 3), GraphSpec::torus(7, 1), GraphSpec::hypercube(5), GraphSpec::complete(9)};
}

}  // namespace

TEST(Coin, PaperCoinPairing) {
  EXPECT_EQ(paper_coin(Graph(GraphSpec::torus(4, 2))).marking, Marking::minus_identity);
  EXPECT_EQ(paper_coin(Graph(GraphSpec::complete(4))).marking, Marking::minus_c0);
  const CoinConfig d = paper_coin(Graph(GraphSpec::torus(4, 2, ShiftKind::dirac)));
  EXPECT_EQ(d.base, BaseCoin::identity);
  EXPECT_EQ(d.marking, Marking::projector_flip);
}

TEST(Coin, ValidationRejectsForeignPairings) {
  const Graph torus(GraphSpec::torus(4, 2));
  CoinConfig c = paper_coin(torus, {3, 3});
  EXPECT_THROW(validate(torus, c), ConfigError);
  c.marked = {16};
  EXPECT_THROW(validate(torus, c), IndexError);
  c.marked = {1};
  c.marking = Marking::minus_c0;
  EXPECT_THROW(validate(torus, c), ConfigError);
  c.marking = Marking::projector_flip;
  EXPECT_THROW(validate(torus, c), ConfigError);

  const Graph k(GraphSpec::complete(5));
  CoinConfig kc = paper_coin(k, {0});
  kc.marking = Marking::minus_identity;
  EXPECT_THROW(validate(k, kc), ConfigError);

  const Graph d(GraphSpec::torus(4, 2, ShiftKind::dirac));
  CoinConfig dc = paper_coin(d, {0});
  dc.base = BaseCoin::grover;
  EXPECT_THROW(validate(d, dc), ConfigError);
}

TEST(Coin, GroverAndMarkedBlocks) {
  const Graph g(GraphSpec::torus(3, 2));
  WalkState s = basis_state(g, 4, 1);
  apply_coin(s, paper_coin(g, {}));
  // (2|s><s| - I) e_1 = 1/2 everywhere, minus one at the source.
  EXPECT_NEAR(s.at(4, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(s.at(4, 1).real(), -0.5, 1e-15);

  WalkState m = basis_state(g, 4, 1);
  apply_coin(m, paper_coin(g, {4}));
  EXPECT_EQ(m.at(4, 1), cplx(-1.0, 0.0));
  EXPECT_EQ(m.at(4, 0), cplx(0.0, 0.0));

  // On the complete graph the marked block is -C0.
  const Graph k(GraphSpec::complete(4));
  WalkState a = basis_state(k, 2, 0), b = basis_state(k, 2, 0);
  apply_coin(a, paper_coin(k, {}));
  apply_coin(b, paper_coin(k, {2}));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(a.at(2, i) + b.at(2, i)), 0.0, 1e-15);
}

TEST(Step, PreservesNormOnEveryFamily) {
  for (const auto& spec : all_families()) {
    const Graph g(spec);
    WalkState s = random_state(g, 7);
    const CoinConfig c = paper_coin(g, {1, 2});
    for (int t = 0; t < 200; ++t) step(s, c);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12) << to_string(spec.family);
  }
}

TEST(Step, InverseUndoesStep) {
  for (const auto& spec : all_families()) {
    const Graph g(spec);
    const WalkState start = random_state(g, 11);
    WalkState s = start;
    const CoinConfig c = paper_coin(g, {0});
    for (int t = 0; t < 25; ++t) step(s, c);
    for (int t = 0; t < 25; ++t) step_inverse(s, c);
    EXPECT_LT(distance(s, start), 1e-12) << to_string(spec.family) << " " << to_string(spec.shift);
  }
}

TEST(Step, UniformIsFixedByTheUnmarkedWalk) {
  for (const auto& spec : all_families()) {
    const Graph g(spec);
    WalkState s = uniform_state(g);
    const CoinConfig c = paper_coin(g);
    for (int t = 0; t < 50; ++t) step(s, c);
    EXPECT_LT(distance(s, uniform_state(g)), 1e-13) << to_string(spec.family) << " " << to_string(spec.shift);
  }
}

TEST(Step, TranslationCovariance) {
  // Moving the marked vertex by t translates the whole evolution by t.
  const Graph g(GraphSpec::torus(6, 2));
  const std::size_t t = g.vertex_at({2, 5});
  WalkState a = uniform_state(g), b = uniform_state(g);
  const CoinConfig ca = paper_coin(g, {0}), cb = paper_coin(g, {t});
  for (int k = 0; k < 30; ++k) {
    step(a, ca);
    step(b, cb);
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    for (int i = 0; i < g.coin_dim(); ++i) EXPECT_NEAR(std::abs(a.at(v, i) - b.at(g.translate(v, t), i)), 0.0, 1e-13);
}

TEST(Step, DiracShiftMovesComputationalBasisDiagonally) {
  // |up> at v: up/down moves it to y-1, then it splits evenly between x-1 and x+1.
  const Graph g(GraphSpec::torus(8, 2, ShiftKind::dirac));
  const std::size_t v = g.vertex_at({3, 3});
  WalkState s = basis_state(g, v, 0);
  apply_shift(s);
  EXPECT_NEAR(vertex_probability(s, g.vertex_at({2, 2})), 0.5, 1e-15);
  EXPECT_NEAR(vertex_probability(s, g.vertex_at({4, 2})), 0.5, 1e-15);
  // The left-moving Hadamard state is (|0>+|1>)/sqrt 2.
  EXPECT_NEAR(s.at(g.vertex_at({2, 2}), 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(s.at(g.vertex_at({2, 2}), 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(s.at(g.vertex_at({4, 2}), 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(s.at(g.vertex_at({4, 2}), 1).real(), -0.5, 1e-15);
}

TEST(Reflection, AboutUniform) {
  const Graph g(GraphSpec::hypercube(4));
  WalkState u = uniform_state(g);
  reflect_about_uniform(u);
  EXPECT_LT(distance(u, uniform_state(g)), 1e-15);
  WalkState s = random_state(g, 3);
  const WalkState copy = s;
  reflect_about_uniform(s);
  reflect_about_uniform(s);
  EXPECT_LT(distance(s, copy), 1e-14);
}

TEST(Probabilities, VertexAndNeighbourhood) {
  const Graph g(GraphSpec::torus(4, 2));
  const WalkState u = uniform_state(g);
  EXPECT_NEAR(vertex_probability(u, 5), 1.0 / 16, 1e-15);
  const auto all = all_vertex_probabilities(u);
  EXPECT_EQ(all.size(), 16u);
  const auto nb = closed_neighborhood(g, {0});
  EXPECT_EQ(nb.size(), 5u);
  EXPECT_NEAR(probability_over(u, nb), 5.0 / 16, 1e-15);
  const auto m = measure_probabilities(u, {0, 5});
  EXPECT_NEAR(m.p_nbhd[1], 5.0 / 16, 1e-15);
  // The union of two overlapping neighbourhoods is counted once.
  EXPECT_EQ(closed_neighborhood(g, {0, 1}).size(), 8u);
}

TEST(Probabilities, OverlapNeedsMatchingDimensions) {
  EXPECT_THROW(overlap(uniform_state(Graph(GraphSpec::torus(4, 2))), uniform_state(Graph(GraphSpec::torus(5, 2)))),
               ConfigError);
  const Graph g(GraphSpec::torus(4, 2));
  EXPECT_NEAR(std::abs(overlap(uniform_state(g), coin_uniform_at(g, 3))), 0.25, 1e-15);
}

TEST(Serialization, RoundTripIsBitExact) {
  const Graph g(GraphSpec::torus(5, 2));
  const WalkState s = random_state(g, 99);
  std::stringstream ss;
  write_state(ss, s);
  EXPECT_EQ(ss.str().size(), 16 + 16 * g.dimension());
  EXPECT_EQ(ss.str().substr(0, 4), "WLK1");
  const WalkState r = read_state(ss, g);
  EXPECT_EQ(r.amplitudes(), s.amplitudes());
}

TEST(Serialization, RejectsMismatchAndTruncation) {
  const Graph g(GraphSpec::torus(5, 2));
  std::stringstream ss;
  write_state(ss, uniform_state(g));
  const std::string bytes = ss.str();

  std::stringstream other(bytes);
  EXPECT_THROW(read_state(other, Graph(GraphSpec::torus(6, 2))), IoError);

  std::stringstream cut(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_state(cut, g), IoError);

  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream magic(bad);
  EXPECT_THROW(read_state(magic, g), IoError);
}

TEST(WalkStateBasics, NormalizationCheck) {
  const Graph g(GraphSpec::torus(3, 2));
  WalkState s(g);
  EXPECT_THROW(s.check_normalized(), NumericalError);
  EXPECT_NO_THROW(uniform_state(g).check_normalized());
  EXPECT_THROW(WalkState(g, std::vector<cplx>(3)), ConfigError);
  EXPECT_THROW(basis_state(g, 9, 0), IndexError);
  EXPECT_THROW(basis_state(g, 0, 4), IndexError);
}
