#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hubbard/eigensolver.hpp"
#include "oracles.hpp"

using namespace hubbard;

namespace {

GroundState solve(const ChainSpec& spec, SolverOptions opt = {}) {
  return ground_state(build_hamiltonian(spec, SectorBasis(spec.sites, spec.n_up, spec.n_down)), opt);
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(StartVector, Definition) {
  EXPECT_EQ(fixed_start_vector(1), std::vector<double>{1.0});
  const auto v3 = fixed_start_vector(3);
  const double n = std::sqrt(14.0);
  EXPECT_DOUBLE_EQ(v3[0], 1 / n);
  EXPECT_DOUBLE_EQ(v3[1], 2 / n);
  EXPECT_DOUBLE_EQ(v3[2], 3 / n);
  for (std::size_t d : {2u, 7u, 8u, 100u, 12345u}) EXPECT_NEAR(norm(fixed_start_vector(d)), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(fixed_start_vector(9)[7], fixed_start_vector(9)[0]);
  EXPECT_THROW((void)fixed_start_vector(0), ValidationError);
}

TEST(GroundState, DimerFreeAmplitudes) {
  const auto gs = solve(make_uniform_chain(2, 1, 0, 1, 1, Boundary::open));
  EXPECT_NEAR(gs.energy, -2.0, 1e-12);
  for (double a : gs.vector) EXPECT_NEAR(std::abs(a), 0.5, 1e-12);
  EXPECT_TRUE(gs.exact);
}

TEST(GroundState, DimerFormulaBothPaths) {
  for (double U : {0.0, 1.0, 4.0, 8.0}) {
    const auto spec = make_uniform_chain(2, 1, U, 1, 1, Boundary::open);
    const double e0 = (U - std::sqrt(U * U + 16)) / 2;
    EXPECT_NEAR(solve(spec).energy, e0, 1e-12);
    SolverOptions opt;
    opt.force_lanczos = true;
    EXPECT_NEAR(solve(spec, opt).energy, e0, 1e-12);
  }
}

TEST(GroundState, OneDimensionalSector) {
  ChainSpec spec = make_uniform_chain(3, 1, 2, 3, 3, Boundary::periodic);
  spec.potential = {1, 0, 0.5};
  const auto h = build_hamiltonian(spec, SectorBasis(3, 3, 3));
  ASSERT_EQ(h.dim, 1u);
  for (bool force : {false, true}) {
    SolverOptions opt;
    opt.force_lanczos = force;
    const auto gs = ground_state(h, opt);
    EXPECT_DOUBLE_EQ(gs.energy, h.diagonal[0]);
    EXPECT_EQ(gs.vector, std::vector<double>{1.0});
  }
}

TEST(GroundState, LanczosMatchesDenseOnRandomInstances) {
  std::mt19937 rng(42);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const ChainSpec spec = oracle::random_spec(rng, 6);
    const auto h = build_hamiltonian(spec, SectorBasis(spec.sites, spec.n_up, spec.n_down));
    SolverOptions dense;
    dense.allow_degenerate = true;
    SolverOptions lanczos = dense;
    lanczos.force_lanczos = true;
    const auto a = ground_state(h, dense);
    const auto b = ground_state(h, lanczos);
    EXPECT_NEAR(a.energy, b.energy, 1e-10) << "trial " << trial;
    EXPECT_LE(b.residual_norm, 1e-10);
    EXPECT_NEAR(norm(b.vector), 1.0, 1e-12);
    if (a.gap > 1e-6) {
      double overlap = 0;
      for (std::size_t i = 0; i < h.dim; ++i) overlap += a.vector[i] * b.vector[i];
      EXPECT_GE(std::abs(overlap), 1 - 1e-8) << "trial " << trial;
      if (std::isfinite(a.gap)) {
        EXPECT_NEAR(a.gap, b.gap, 1e-5 * std::max(1.0, a.gap));
      } else {
        EXPECT_EQ(a.gap, b.gap);  // one-state sector
      }
      ++compared;
    }
  }
  EXPECT_GT(compared, 20);
}

TEST(GroundState, TenSiteRingEnergy) {
  const auto spec = make_uniform_chain(10, 1, 4, 3, 3, Boundary::periodic);
  const auto h = build_hamiltonian(spec, SectorBasis(10, 3, 3));
  ASSERT_EQ(h.dim, 14400u);
  const auto lan = ground_state(h);
  EXPECT_FALSE(lan.exact);
  EXPECT_LE(lan.residual_norm, 1e-10);
  EXPECT_NEAR(lan.energy, -8.2625313854, 1e-9);
}

TEST(GroundState, EightSiteRingAgreesWithDense) {
  const auto spec = make_impurity_chain(8, 1, 4, 2, 2, {2, 3}, 6, Boundary::periodic);
  const auto h = build_hamiltonian(spec, SectorBasis(8, 2, 2));
  ASSERT_EQ(h.dim, 784u);
  SolverOptions lanczos;
  lanczos.force_lanczos = true;
  const auto lan = ground_state(h, lanczos);
  EXPECT_FALSE(lan.exact);
  const auto ref = ground_state(h);
  EXPECT_TRUE(ref.exact);
  EXPECT_NEAR(ref.energy, lan.energy, 1e-10);
  EXPECT_NEAR(ref.gap, lan.gap, 1e-6);
}

TEST(GroundState, VariationalBoundAndMonotoneRitzValues) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 15; ++trial) {
    const ChainSpec spec = oracle::random_spec(rng, 7);
    const auto h = build_hamiltonian(spec, SectorBasis(spec.sites, spec.n_up, spec.n_down));
    const auto start = fixed_start_vector(h.dim);
    const auto hv = h.apply(start);
    double q = 0;
    for (std::size_t i = 0; i < h.dim; ++i) q += start[i] * hv[i];
    const auto res = lanczos_lowest(h, start, {}, 1e-10, 1000);
    EXPECT_LE(res.value, q + 1e-12);
    for (std::size_t k = 1; k < res.lowest_ritz_history.size(); ++k)
      EXPECT_LE(res.lowest_ritz_history[k], res.lowest_ritz_history[k - 1] + 1e-12);
  }
}

TEST(GroundState, CyclicRelabelingLeavesEnergyInvariant) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> Vd(0, 3);
  for (int L : {5, 6, 8}) {
    ChainSpec spec = make_uniform_chain(L, 1, 3, 2, 2, Boundary::periodic);
    for (double& v : spec.potential) v = Vd(rng);
    const double e = solve(spec).energy;
    for (int shift = 1; shift < L; ++shift) {
      ChainSpec rolled = spec;
      for (int i = 0; i < L; ++i) rolled.potential[static_cast<std::size_t>((i + shift) % L)] = spec.potential[static_cast<std::size_t>(i)];
      EXPECT_NEAR(solve(rolled).energy, e, 1e-10) << "L=" << L << " shift=" << shift;
    }
  }
}

TEST(GroundState, DegenerateRingIsRejectedUnlessAllowed) {
  // Two up and one down fermion on a six-site ring: open shell.
  const auto spec = make_uniform_chain(6, 1, 4, 2, 1, Boundary::periodic);
  const auto h = build_hamiltonian(spec, SectorBasis(6, 2, 1));
  try {
    (void)ground_state(h);
    FAIL() << "expected DegenerateGroundStateError";
  } catch (const DegenerateGroundStateError& e) {
    EXPECT_TRUE(e.best().degenerate);
    EXPECT_EQ(e.best().vector.size(), h.dim);
  }
  SolverOptions opt;
  opt.allow_degenerate = true;
  const auto gs = ground_state(h, opt);
  EXPECT_TRUE(gs.degenerate);
  opt.force_lanczos = true;
  EXPECT_TRUE(ground_state(h, opt).degenerate);
}

TEST(GroundState, IterationCapRaisesWithBestRitzPair) {
  const auto spec = make_uniform_chain(10, 1, 4, 3, 3, Boundary::periodic);
  const auto h = build_hamiltonian(spec, SectorBasis(10, 3, 3));
  SolverOptions opt;
  opt.max_iterations = 5;
  try {
    (void)ground_state(h, opt);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.residual(), 1e-10);
    EXPECT_EQ(e.ritz_vector().size(), h.dim);
    EXPECT_TRUE(std::isfinite(e.ritz_value()));
  }
}

TEST(GroundState, NonFiniteMatrixIsASolverError) {
  auto spec = make_uniform_chain(8, 1, 4, 2, 2, Boundary::periodic);
  auto h = build_hamiltonian(spec, SectorBasis(8, 2, 2));
  h.diagonal[3] = std::nan("");
  SolverOptions opt;
  opt.force_lanczos = true;
  EXPECT_THROW((void)ground_state(h, opt), SolverError);
}

TEST(GroundState, DeterministicAcrossRuns) {
  const auto spec = make_impurity_chain(10, 1, 4, 3, 3, {3, 4}, 8, Boundary::periodic);
  const auto a = solve(spec);
  const auto b = solve(spec);
  EXPECT_EQ(a.energy, b.energy);
  EXPECT_EQ(a.vector, b.vector);
  EXPECT_NEAR(a.energy, -6.11745294, 1e-7);
}
