#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qwalk/infotheory.hpp"

using namespace qwalk;

namespace {

WalkConfig make(int n, double p, int t_max, CoinState coin = default_coin_state()) {
  WalkConfig c;
  c.n = n;
  c.p = p;
  c.t_max = t_max;
  c.coin_init = coin;
  return c;
}

DensityOperator coin_op(const ComplexMatrix& m) { return {m, BasisTag::coin_only}; }

/// |pos><pos| x sigma on the 4N^2 space, pos given as a site index.
DensityOperator product_state(int n, std::size_t site, const ComplexMatrix& sigma) {
  const std::size_t sites = static_cast<std::size_t>(n * n);
  ComplexMatrix pos(sites, sites);
  pos(site, site) = 1.0;
  return {kron(pos, sigma), BasisTag::position_coin};
}

}  // namespace

TEST(Entropy, Examples) {
  std::mt19937_64 rng(51);
  EXPECT_NEAR(von_neumann_entropy(coin_op(oracle::projector(oracle::random_unit_vector(4, rng)))), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(coin_op(ComplexMatrix::diagonal({0.25, 0.25, 0.25, 0.25}))), std::log(4.0), 1e-14);
  EXPECT_NEAR(von_neumann_entropy(coin_op(ComplexMatrix::diagonal({0.5, 0.5, 0.0, 0.0}))), std::log(2.0), 1e-14);
  EXPECT_NEAR(std::log(4.0), 1.386294, 1e-6);
  EXPECT_NEAR(nats_to_bits(std::log(2.0)), 1.0, 1e-15);
}

TEST(Entropy, BoundsOnRandomStates) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = von_neumann_entropy(coin_op(oracle::random_density(6, rng)));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::log(6.0) + 1e-12);
  }
}

TEST(Entropy, RejectsNonDensity) {
  try {
    von_neumann_entropy(coin_op(ComplexMatrix::diagonal({0.5, 0.2})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDensity);
  }
  try {
    von_neumann_entropy(coin_op(ComplexMatrix::diagonal({1.5, -0.5})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDensity);
  }
}

TEST(PartialTrace, ProductStateFactors) {
  std::mt19937_64 rng(53);
  const auto sigma = oracle::random_density(4, rng);
  const auto rho = product_state(3, 0, sigma);
  const auto w = partial_trace_coin(rho);
  EXPECT_EQ(w.basis, BasisTag::position_only);
  ComplexMatrix want(9, 9);
  want(0, 0) = 1.0;
  EXPECT_LT(max_abs_diff(w.matrix, want), 1e-15);
  const auto c = partial_trace_position(rho);
  EXPECT_EQ(c.basis, BasisTag::coin_only);
  EXPECT_LT(max_abs_diff(c.matrix, sigma), 1e-15);
}

TEST(PartialTrace, PreservesTrace) {
  std::mt19937_64 rng(54);
  const DensityOperator rho{oracle::random_density(64, rng), BasisTag::position_coin};
  EXPECT_NEAR(partial_trace_coin(rho).matrix.trace().real(), 1.0, 1e-12);
  EXPECT_NEAR(partial_trace_position(rho).matrix.trace().real(), 1.0, 1e-12);
}

TEST(PartialTrace, InitialCornerState) {
  const CoinState corner{1.0, 0.0, 0.0, 0.0};
  const auto c = partial_trace_position(initial_state(make(3, 0.0, 0, corner)));
  EXPECT_EQ(c.matrix(0, 0), cplx(1.0));
  EXPECT_EQ(max_abs(c.matrix - ComplexMatrix::diagonal({1.0, 0.0, 0.0, 0.0})), 0.0);
}

TEST(PartialTrace, BasisChecks) {
  EXPECT_THROW(partial_trace_coin(coin_op(ComplexMatrix::identity(4))), Error);
  EXPECT_THROW(partial_trace_position(DensityOperator{ComplexMatrix::identity(9), BasisTag::position_only}), Error);
}

TEST(MutualInfo, ProductAndPureEntangled) {
  std::mt19937_64 rng(55);
  const auto pure_prod = product_state(2, 1, oracle::projector(oracle::random_unit_vector(4, rng)));
  const auto pt = entropy_point(0, pure_prod);
  EXPECT_NEAR(pt.mutual_info, 0.0, 1e-12);

  // generic pure state on position x coin is entangled
  const auto psi = oracle::random_unit_vector(16, rng);
  const DensityOperator ent{oracle::projector(psi), BasisTag::position_coin};
  const auto pe = entropy_point(0, ent);
  EXPECT_NEAR(pe.s_total, 0.0, 1e-10);
  EXPECT_NEAR(pe.s_coin, pe.s_walker, 1e-10);
  EXPECT_NEAR(pe.mutual_info, 2.0 * pe.s_coin, 1e-10);
  EXPECT_GT(pe.s_coin, 0.1);
}

TEST(MutualInfo, Clamp) {
  const auto mi = mutual_information(1.0, 1.0, 2.0 + 1e-12);
  EXPECT_LT(mi.raw, 0.0);
  EXPECT_GE(mi.value, -1e-9);
  EXPECT_THROW(mutual_information(-1.0, 0.0, 0.0), Error);
}

TEST(MutualInfo, Subadditivity) {
  std::mt19937_64 rng(56);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator rho{oracle::random_density(36, rng, 1 + trial), BasisTag::position_coin};
    const auto pt = entropy_point(0, rho);
    EXPECT_LE(pt.s_total, pt.s_coin + pt.s_walker + 1e-9);
    EXPECT_GE(pt.mutual_info, -1e-9);
  }
}

TEST(MutualInfo, DecaysAtN3) {
  auto cfg = make(3, 0.25, 500);
  cfg.backend = Backend::fourier;
  cfg.record_stride = 500;
  const auto tr = entropy_trace(cfg);
  EXPECT_LT(tr.points.back().mutual_info, 0.05);
}

TEST(EntropyTrace, UnitaryRunStaysPure) {
  const auto tr = entropy_trace(make(3, 0.0, 40));
  for (const auto& pt : tr.points) {
    EXPECT_LT(pt.s_total, 1e-8) << pt.t;
    EXPECT_NEAR(pt.mutual_info, 2.0 * pt.s_coin, 1e-7) << pt.t;
  }
}

TEST(EntropyTrace, NoisyEntropyNonDecreasing) {
  auto cfg = make(3, 0.5, 200);
  cfg.backend = Backend::fourier;
  const auto tr = entropy_trace(cfg);
  for (std::size_t i = 2; i < tr.points.size(); ++i) {
    EXPECT_GE(tr.points[i].s_total, tr.points[i - 1].s_total - 1e-6) << tr.points[i].t;
  }
}

TEST(EntropyTrace, BackendsAgree) {
  auto cfg = make(4, 0.3, 30);
  cfg.backend = Backend::both;
  const auto tr = entropy_trace(cfg);
  EXPECT_EQ(tr.points.size(), 31u);
  EXPECT_LT(tr.cross_backend_deviation, 1e-8);
}

TEST(EntropyTrace, ClassicalLimitMutualInfoShrinks) {
  auto cfg = make(4, 1.0, 200);
  cfg.backend = Backend::fourier;
  const auto tr = entropy_trace(cfg);
  double early = 0.0;
  for (const auto& pt : tr.points)
    if (pt.t <= 10) early = std::max(early, pt.mutual_info);
  EXPECT_GT(early, 1e-3);
  EXPECT_LT(tr.points.back().mutual_info, 1e-10);
}

TEST(TraceDistance, Examples) {
  std::mt19937_64 rng(57);
  const auto r = coin_op(oracle::random_density(4, rng));
  EXPECT_NEAR(trace_norm_distance(r, r), 0.0, 1e-15);
  const DensityOperator a = coin_op(ComplexMatrix::diagonal({1.0, 0.0, 0.0, 0.0}));
  const DensityOperator b = coin_op(ComplexMatrix::diagonal({0.0, 1.0, 0.0, 0.0}));
  EXPECT_NEAR(trace_norm_distance(a, b), 2.0, 1e-15);
  const DensityOperator c{ComplexMatrix::identity(4) * cplx{0.25, 0.0}, BasisTag::position_only};
  EXPECT_THROW(trace_norm_distance(a, c), Error);
}

TEST(TraceDistance, ConvergesToUniformAtN3) {
  // odd N has no parity constraint, so the uniform candidate is I/36
  const ComplexMatrix uniform = ComplexMatrix::identity(36) * cplx{1.0 / 36.0, 0.0};
  auto cfg = make(3, 0.5, 2000);
  cfg.backend = Backend::fourier;
  cfg.record_stride = 10;
  std::vector<double> d;
  evolve_blocks(cfg, false, [&](int, const FourierBlockSet& bs) {
    d.push_back(trace_norm(reconstruct_full_rho(bs).matrix - uniform));
  });
  // strictly decreasing until it reaches the rounding floor
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i - 1] > 1e-11) {
      EXPECT_LT(d[i], d[i - 1]) << "t=" << 10 * i;
    }
  }
  EXPECT_LT(d.back(), 0.01);
}

TEST(GapHorizon, Basics) {
  EXPECT_EQ(gap_horizon(0.5, 1e-3), 10);
  EXPECT_EQ(gap_horizon(0.0), 1);
  EXPECT_THROW(gap_horizon(1.0), Error);
}

TEST(Limits, N3Report) {
  auto cfg = make(3, 0.5, 0);
  cfg.backend = Backend::fourier;
  const auto rep = limit_report(cfg, 4000);
  EXPECT_LT(rep.max_offdiag, 1e-4);
  EXPECT_EQ(rep.support_size, 36u);
  EXPECT_LT(rep.diag_relative_spread, 1e-3);
  EXPECT_NEAR(rep.measured_diag, 1.0 / 36.0, 1e-6);
  EXPECT_NEAR(rep.paper_diag, 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(rep.forced_diag, 1.0 / 36.0, 1e-15);
  EXPECT_NEAR(rep.paper_diag_total, 3.0, 1e-12);
  EXPECT_NEAR(rep.paper_entropy, 1.0 + std::log(3.0), 1e-15);
  EXPECT_NEAR(rep.measured_entropy, std::log(36.0), 1e-3);
  EXPECT_NEAR(rep.measured_entropy, rep.support_entropy, 1e-3);
}

TEST(Limits, N4ParityStructure) {
  auto cfg = make(4, 0.5, 0);
  cfg.backend = Backend::fourier;
  const auto rep = limit_report(cfg, 0);
  EXPECT_EQ(rep.t_long, rep.horizon);
  EXPECT_TRUE(rep.parity_single_step_rule);
  EXPECT_EQ(rep.support_sites.size(), 8u);
  EXPECT_EQ(rep.support_size, 32u);
}

TEST(Limits, HorizonTooShort) {
  auto cfg = make(3, 0.5, 0);
  cfg.backend = Backend::fourier;
  try {
    limit_report(cfg, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HorizonTooShort);
  }
}
