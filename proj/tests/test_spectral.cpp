#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qwalk/spectral.hpp"

using namespace qwalk;

namespace {

bool contains(const std::vector<cplx>& v, cplx z, double tol) {
  return std::any_of(v.begin(), v.end(), [&](cplx w) { return std::abs(w - z) <= tol; });
}

}  // namespace

TEST(Superoperator, UnitaryAtZeroNoise) {
  const auto s = build_superoperator({0, 0, 0, 0}, 4, 0.0);
  EXPECT_LT(max_abs_diff(dagger(s.matrix) * s.matrix, ComplexMatrix::identity(16)), 1e-14);
  for (const cplx& l : general_eigenvalues(s.matrix)) EXPECT_NEAR(std::abs(l), 1.0, 1e-12);
}

TEST(Superoperator, ActionMatchesBlockStepper) {
  std::mt19937_64 rng(41);
  WalkConfig cfg;
  cfg.n = 5;
  cfg.p = 0.35;
  const FourierStepper fs(cfg);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Quadruple q{static_cast<int>(rng() % 5), static_cast<int>(rng() % 5), static_cast<int>(rng() % 5),
                      static_cast<int>(rng() % 5)};
    const auto b = oracle::random_matrix(4, 4, rng);
    const auto s = build_superoperator(q, 5, 0.35);
    worst = std::max(worst, max_abs_diff(apply_superoperator(s, b), fs.apply(q, b)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Superoperator, FullDephasingProjectsToDiagonal) {
  std::mt19937_64 rng(42);
  const auto b = oracle::random_matrix(4, 4, rng);
  ComplexMatrix diag_b(4, 4);
  for (std::size_t i = 0; i < 4; ++i) diag_b(i, i) = b(i, i);
  const Quadruple q{1, 2, 3, 0};
  const auto u = build_fourier_coin(1, 2, 4);
  const auto up = build_fourier_coin(3, 0, 4);
  const auto s = build_superoperator(q, 4, 1.0);
  EXPECT_LT(max_abs_diff(apply_superoperator(s, b), u * diag_b * dagger(up)), 1e-13);
}

TEST(Superoperator, PauliBasisIsUnitarilyEquivalent) {
  const auto p = pauli_tensor_basis();
  EXPECT_LT(max_abs_diff(dagger(p) * p, ComplexMatrix::identity(16)), 1e-14);
  std::mt19937_64 rng(43);
  const Quadruple q{0, 1, 2, 3};
  const auto e = build_superoperator(q, 4, 0.4);
  const auto pt = build_superoperator(q, 4, 0.4, SuperopBasis::pauli_tensor);
  EXPECT_LT(matching_distance(general_eigenvalues(e.matrix), general_eigenvalues(pt.matrix)), 1e-10);
  const auto b = oracle::random_matrix(4, 4, rng);
  EXPECT_LT(max_abs_diff(apply_superoperator(e, b), apply_superoperator(pt, b)), 1e-13);
}

TEST(Reference1D, Substitutions) {
  for (int n : {3, 8})
    for (int k = 0; k < n; ++k) {
      const auto m = build_reference_1d(k, k, 0.37, n);
      EXPECT_NEAR(m(0, 0).real(), 1.0, 1e-15);
      EXPECT_EQ(m(1, 0), cplx(0.0));
      EXPECT_EQ(m(2, 0), cplx(0.0));
      EXPECT_LT(std::abs(m(3, 0)), 1e-15);
    }
  const ComplexMatrix want{{1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}, {0, 1, 0, 0}};
  EXPECT_LT(max_abs_diff(build_reference_1d(0, 0, 0.0, 8), want), 1e-15);
}

TEST(Reference1D, DeterminantIsEigenvalueProduct) {
  for (auto [k, kp, p] : {std::tuple{1, 3, 0.2}, {0, 5, 0.9}, {7, 2, 0.5}}) {
    const auto m = build_reference_1d(k, kp, p, 8);
    cplx prod{1.0, 0.0};
    for (const cplx& l : general_eigenvalues(m)) prod *= l;
    EXPECT_LT(std::abs(prod - determinant(m)), 1e-10);
  }
}

TEST(CharPoly, Examples) {
  for (double q : {0.0, 0.3, 1.0})
    for (double cp : {-1.0, 0.2, 1.0}) {
      const CharPolyParams c{q, cp, 1.0, std::sqrt(1.0 - cp * cp), 0.0};
      EXPECT_LT(std::abs(char_poly_f(1.0, c)), 1e-14);
      EXPECT_LT(std::abs(char_poly_f(0.0, c) - q * q), 1e-15);
    }
  const CharPolyParams c{0.5, 0.0, 1.0, 1.0, 0.0};
  EXPECT_TRUE(contains(char_poly_roots(c), 1.0, 1e-12));
}

TEST(CharPoly, CompanionRootsMatchReferenceMatrix) {
  double worst = 0.0;
  for (int k = 0; k < 8; ++k)
    for (int kp = 0; kp < 8; ++kp)
      for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto c = CharPolyParams::from_momenta(k, kp, p, 8);
        worst = std::max(worst, resolved_matching_distance(char_poly_roots(c), general_eigenvalues(build_reference_1d(c))));
      }
  EXPECT_LT(worst, 1e-8);
}

TEST(CharPoly, SimpleRootsMatchWithoutClustering) {
  // p = 0.25 on N = 8 has no repeated roots
  double worst = 0.0;
  for (int k = 0; k < 8; ++k)
    for (int kp = 0; kp < 8; ++kp) {
      const auto c = CharPolyParams::from_momenta(k, kp, 0.25, 8);
      worst = std::max(worst, matching_distance(char_poly_roots(c), general_eigenvalues(build_reference_1d(c))));
    }
  EXPECT_LT(worst, 1e-12);
}

TEST(CharPoly, TripleRootAtFullDephasing) {
  // q = 0: f = l^3 (l - c-), a defective triple root at 0
  const auto c = CharPolyParams::from_momenta(0, 7, 1.0, 8);
  const auto raw = matching_distance(char_poly_roots(c), general_eigenvalues(build_reference_1d(c)));
  const auto resolved = resolved_matching_distance(char_poly_roots(c), general_eigenvalues(build_reference_1d(c)));
  EXPECT_GT(raw, resolved);
  EXPECT_LT(resolved, 1e-12);
}

TEST(Cluster, MeansAndSizes) {
  const std::vector<cplx> v{1.0 + 1e-6, 1.0 - 1e-6, cplx{1.0, 2e-6}, 3.0};
  const auto m = cluster_means(v, 1e-4);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(std::abs(m[i] - cplx{1.0, 2e-6 / 3.0}), 1e-15);
  EXPECT_EQ(m[3], cplx(3.0));
  // a double root does not match two distinct values
  EXPECT_GT(resolved_matching_distance({1.0, 1.0}, {1.0, 2.0}), 0.4);
}

TEST(CharPoly, RootsAreZerosOfF) {
  const auto c = CharPolyParams::from_momenta(2, 5, 0.3, 8);
  for (const cplx& r : char_poly_roots(c)) EXPECT_LT(std::abs(char_poly_f(r, c)), 1e-12);
}

TEST(Matching, Basics) {
  EXPECT_EQ(matching_distance({}, {}), 0.0);
  EXPECT_NEAR(matching_distance({1.0, 2.0}, {2.0, 1.0}), 0.0, 1e-15);
  EXPECT_NEAR(matching_distance({0.0, 0.0}, {0.0, 1.0}), 1.0, 1e-15);
  // greedy nearest would pair 1.0 with 1.1 and leave 0 -> 1.2; optimal bottleneck is 1.1
  EXPECT_NEAR(matching_distance({0.0, 1.0}, {1.1, 1.2}), 1.1, 1e-12);
  EXPECT_THROW(matching_distance({1.0}, {}), Error);
}

TEST(Proposition1, N4HalfNoise) {
  const auto rep = audit_proposition1(4, 0.5);
  EXPECT_EQ(rep.spectra.size(), 256u);
  EXPECT_TRUE(rep.contraction_holds);
  EXPECT_LE(rep.max_modulus, 1.0 + 1e-10);
  EXPECT_TRUE(rep.plus_one_exactly_diagonal_simple);
  EXPECT_EQ(rep.plus_one_count, 16u);
  // measured: -1 lives on the |dk| = N/2 fibres, not N/4
  EXPECT_GT(rep.minus_one_at_half, 0u);
  EXPECT_FALSE(rep.minus_one_only_at_quarter);
  EXPECT_GT(rep.sub_unit_radius, 0.0);
  EXPECT_LT(rep.sub_unit_radius, 1.0);
}

TEST(Proposition1, N5HasNoMinusOne) {
  const auto rep = audit_proposition1(5, 0.5);
  EXPECT_EQ(rep.minus_one_count, 0u);
  EXPECT_TRUE(rep.minus_one_only_at_quarter);
  EXPECT_TRUE(rep.plus_one_exactly_diagonal_simple);
}

TEST(Proposition1, FullDephasingStaysInDisk) {
  for (int n : {3, 4}) EXPECT_TRUE(audit_proposition1(n, 1.0).contraction_holds);
}

TEST(Proposition1, SubUnitRadiusN3) {
  EXPECT_NEAR(sub_unit_spectral_radius(3, 0.5), 0.87148, 1e-4);
  // diagonal fibres decay as sqrt(1 - p)
  EXPECT_NEAR(quadruple_sub_unit_radius({0, 0, 0, 0}, 3, 0.5), std::sqrt(0.5), 1e-9);
}

TEST(Factorization, DiagonalZeroNoiseIsRecorded) {
  std::vector<Quadruple> qs;
  for (int k = 0; k < 4; ++k) qs.push_back({k, (k + 1) % 4, k, (k + 1) % 4});
  const auto rep = audit_factorization(4, 0.0, qs);
  EXPECT_EQ(rep.rows.size(), 4u);
  for (const auto& r : rep.rows) {
    EXPECT_TRUE(std::isfinite(r.tensor_distance));
    EXPECT_TRUE(std::isfinite(r.f4_x_distance));
  }
}

TEST(Factorization, GenericQuadrupleRecordsDistance) {
  const auto rep = audit_factorization(4, 0.3, {{0, 1, 2, 3}});
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_GE(rep.rows[0].tensor_distance, 0.0);
  EXPECT_EQ(rep.max_tensor_distance, rep.rows[0].tensor_distance);
}

TEST(Factorization, SampleIsDeterministic) {
  const auto a = sample_quadruples(8);
  EXPECT_EQ(a, sample_quadruples(8));
  EXPECT_EQ(a.front(), (Quadruple{0, 0, 0, 0}));
  EXPECT_EQ(a.size(), 64u);
}

TEST(Contraction, EqualityAtZeroNoise) {
  const auto rep = audit_contraction(100, 0.0, {1, 2, 3, 0}, 4, 7);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_TRUE(rep.equality_holds);
}

TEST(Contraction, NoViolationsWithNoise) {
  const auto rep = audit_contraction(1000, 0.5, {0, 1, 2, 3}, 4, 8);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_LE(rep.max_ratio, 1.0);
  EXPECT_FALSE(rep.equality_holds);
}

TEST(Contraction, ZeroBlockIsFixed) {
  WalkConfig cfg;
  cfg.n = 4;
  cfg.p = 0.5;
  const auto lb = FourierStepper(cfg).apply({0, 1, 2, 3}, ComplexMatrix(4, 4));
  EXPECT_EQ(frobenius_inner(lb, lb).real(), 0.0);
}

TEST(BlockLimits, DiagonalAndGenericFibres) {
  const auto d = audit_block_limits(3, 0.5, 2000, 1e-3, default_coin_state(), {{0, 0, 0, 0}});
  EXPECT_TRUE(d.rows[0].within_tol);
  const auto g = audit_block_limits(5, 0.25, 2000, 1e-3, default_coin_state(), {{0, 0, 1, 2}});
  EXPECT_EQ(g.rows[0].kind, FibreKind::generic);
  EXPECT_TRUE(g.rows[0].within_tol);
}

TEST(BlockLimits, QuarterFibreTrendIsReported) {
  const auto rep = audit_block_limits(4, 0.5, 200, 1e-3, default_coin_state(), {{0, 0, 1, 1}});
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].kind, FibreKind::quarter);
  EXPECT_TRUE(std::isfinite(rep.rows[0].sign_corrected_diag));
  EXPECT_TRUE(std::isfinite(rep.rows[0].sign_corrected_diag_prev));
}

TEST(BlockLimits, RepresentativesCoverKinds) {
  const auto r8 = representative_fibres(8);
  bool quarter = false;
  bool half = false;
  for (const auto& q : r8) {
    quarter |= classify_fibre(q, 8) == FibreKind::quarter;
    half |= classify_fibre(q, 8) == FibreKind::half;
  }
  EXPECT_TRUE(quarter);
  EXPECT_TRUE(half);
}

TEST(DecayRate, MatchesFibreRadius) {
  const Quadruple q{0, 0, 1, 0};
  const double measured = measured_block_decay_rate(q, 3, 0.5, 100, 200);
  EXPECT_NEAR(measured / quadruple_sub_unit_radius(q, 3, 0.5), 1.0, 0.05);
}
