#pragma once

// Von Neumann entropies (nats), partial traces, mutual information and the
// long-run limit experiments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/evolution_direct.hpp"
#include "qwalk/evolution_fourier.hpp"
#include "qwalk/numerics.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/walk_model.hpp"

namespace qwalk {

inline constexpr double kLn2 = 0.69314718055994530942;

inline double nats_to_bits(double nats) { return nats / kLn2; }

/// -sum l ln l over the spectrum, with 0 ln 0 = 0 and eigenvalues in
/// [-1e-9, 0) clamped to zero.
inline double von_neumann_entropy(const DensityOperator& rho) {
  const double tr_err = std::abs(rho.matrix.trace() - cplx{1.0, 0.0});
  if (tr_err > 1e-8) throw Error(ErrorCode::NotDensity, "trace off by " + std::to_string(tr_err));
  const auto evals = hermitian_eigenvalues(rho.matrix, 1e-8);
  double s = 0.0;
  for (double l : evals) {
    if (l < -1e-9) throw Error(ErrorCode::NotDensity, "eigenvalue " + std::to_string(l));
    if (l > 0.0) s -= l * std::log(l);
  }
  return std::max(0.0, s);
}

/// rho_W = tr_C(rho), an N^2 x N^2 operator on positions.
inline DensityOperator partial_trace_coin(const DensityOperator& rho) {
  if (rho.basis != BasisTag::position_coin || rho.dim() % kCoinDim != 0) {
    throw Error(ErrorCode::BasisMismatch, "partial_trace_coin needs a position_coin operator");
  }
  const std::size_t sites = rho.dim() / kCoinDim;
  ComplexMatrix w(sites, sites);
  for (std::size_t a = 0; a < sites; ++a)
    for (std::size_t b = 0; b < sites; ++b) {
      cplx s{0.0, 0.0};
      for (std::size_t j = 0; j < kCoinDim; ++j) s += rho.matrix(a * kCoinDim + j, b * kCoinDim + j);
      w(a, b) = s;
    }
  return {std::move(w), BasisTag::position_only};
}

/// rho_C = tr_W(rho), 4x4.
inline DensityOperator partial_trace_position(const DensityOperator& rho) {
  if ((rho.basis != BasisTag::position_coin && rho.basis != BasisTag::fourier_coin) || rho.dim() % kCoinDim != 0) {
    throw Error(ErrorCode::BasisMismatch, "partial_trace_position needs a position x coin operator");
  }
  const std::size_t sites = rho.dim() / kCoinDim;
  ComplexMatrix c(kCoinDim, kCoinDim);
  for (std::size_t s = 0; s < sites; ++s)
    for (std::size_t l = 0; l < kCoinDim; ++l)
      for (std::size_t m = 0; m < kCoinDim; ++m) c(l, m) += rho.matrix(s * kCoinDim + l, s * kCoinDim + m);
  return {std::move(c), BasisTag::coin_only};
}

struct MutualInformation {
  double value = 0.0;  // clamped at the -1e-9 floor
  double raw = 0.0;
};

inline MutualInformation mutual_information(double s_coin, double s_walker, double s_total) {
  if (s_coin < 0.0 || s_walker < 0.0 || s_total < 0.0) {
    throw Error(ErrorCode::BadRange, "entropies must be non-negative");
  }
  const double raw = s_coin + s_walker - s_total;
  return {std::max(raw, -1e-9), raw};
}

inline double trace_norm_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.basis != b.basis || a.dim() != b.dim()) throw Error(ErrorCode::BasisMismatch, "trace_norm_distance operands differ");
  return trace_norm(a.matrix - b.matrix);
}

// ---------------------------------------------------------------------------

struct EntropyPoint {
  int t = 0;
  double s_total = 0.0;
  double s_coin = 0.0;
  double s_walker = 0.0;
  double mutual_info = 0.0;
  double mutual_info_raw = 0.0;
  double purity = 0.0;  // Tr rho^2
};

struct EntropyTrace {
  WalkConfig config;
  std::vector<EntropyPoint> points;
  // Largest |S_direct - S_fourier| over all three entropies (backend = both).
  double cross_backend_deviation = 0.0;

  std::vector<int> times() const {
    std::vector<int> t;
    for (const auto& p : points) t.push_back(p.t);
    return t;
  }
};

inline EntropyPoint entropy_point(int t, const DensityOperator& total, const DensityOperator& coin,
                                  const DensityOperator& walker) {
  EntropyPoint pt;
  pt.t = t;
  pt.s_total = von_neumann_entropy(total);
  pt.s_coin = von_neumann_entropy(coin);
  pt.s_walker = von_neumann_entropy(walker);
  const auto mi = mutual_information(pt.s_coin, pt.s_walker, pt.s_total);
  pt.mutual_info = mi.value;
  pt.mutual_info_raw = mi.raw;
  pt.purity = purity(total.matrix);
  return pt;
}

inline EntropyPoint entropy_point(int t, const DensityOperator& rho) {
  return entropy_point(t, rho, partial_trace_position(rho), partial_trace_coin(rho));
}

inline EntropyPoint entropy_point(int t, const FourierBlockSet& bs) {
  return entropy_point(t, momentum_density(bs), coin_reduced_density(bs), walker_reduced_density(bs));
}

inline EntropyTrace entropy_trace(const WalkConfig& cfg) {
  const WalkConfig valid = validate_config(cfg);
  EntropyTrace trace;
  trace.config = valid;
  if (valid.backend == Backend::direct) {
    evolve(valid, [&](int t, const DensityOperator& rho) { trace.points.push_back(entropy_point(t, rho)); });
  } else if (valid.backend == Backend::fourier) {
    evolve_blocks(valid, false, [&](int t, const FourierBlockSet& bs) { trace.points.push_back(entropy_point(t, bs)); });
  } else {
    std::map<int, EntropyPoint> fourier;
    evolve_blocks(valid, false, [&](int t, const FourierBlockSet& bs) { fourier[t] = entropy_point(t, bs); });
    evolve(valid, [&](int t, const DensityOperator& rho) {
      const EntropyPoint pt = entropy_point(t, rho);
      const EntropyPoint& f = fourier.at(t);
      trace.cross_backend_deviation =
          std::max({trace.cross_backend_deviation, std::abs(pt.s_total - f.s_total), std::abs(pt.s_coin - f.s_coin),
                    std::abs(pt.s_walker - f.s_walker)});
      trace.points.push_back(pt);
    });
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Long-run limits.

/// Steps needed for radius^t < target.
inline int gap_horizon(double radius, double target = 1e-5) {
  if (radius <= 0.0) return 1;
  if (radius >= 1.0) throw Error(ErrorCode::HorizonTooShort, "no spectral gap (radius >= 1)");
  return std::max(1, static_cast<int>(std::ceil(std::log(target) / std::log(radius))));
}

struct SupportCell {
  int x = 0;
  int y = 0;
  double mass = 0.0;
};

struct LimitReport {
  int n = 0;
  double p = 0.0;
  int t_long = 0;
  int horizon = 0;
  double sub_unit_radius = 0.0;

  double max_offdiag = 0.0;

  // Diagonal values over the measured support.
  std::size_t support_size = 0;  // number of diagonal entries carrying mass
  double measured_diag = 0.0;    // mean over the support
  double measured_diag_min = 0.0;
  double measured_diag_max = 0.0;
  double diag_relative_spread = 0.0;  // (max - min)/mean
  double paper_diag = 0.0;            // 1/(4N) for odd N, 1/N for even N
  double paper_diag_total = 0.0;      // paper_diag * 4N^2: what the claim sums to
  double forced_diag = 0.0;           // 1/(4N^2): uniform state on the full space
  double forced_diag_support = 0.0;   // 1/support_size

  double measured_entropy = 0.0;
  double paper_entropy = 0.0;     // 1 + ln N (odd) / ln N (even)
  double support_entropy = 0.0;   // ln(support_size)
  double full_space_entropy = 0.0;  // ln(4N^2)
  double s_coin = 0.0;
  double s_walker = 0.0;
  double mutual_info = 0.0;

  // Support lattice.
  std::vector<SupportCell> support_sites;
  bool parity_single_step_rule = false;  // every occupied site has x + y = t (mod 2)
  bool parity_dual_rule = false;         // every occupied site has t - x and t - y both even
};

inline LimitReport limit_report(const WalkConfig& cfg, int t_long) {
  WalkConfig valid = validate_config(cfg);
  if (!(valid.p > 0.0)) throw Error(ErrorCode::BadRange, "limit_report needs p > 0");
  LimitReport rep;
  rep.n = valid.n;
  rep.p = valid.p;
  rep.sub_unit_radius = sub_unit_spectral_radius(valid.n, valid.p);
  rep.horizon = gap_horizon(rep.sub_unit_radius);
  if (t_long <= 0) t_long = rep.horizon;
  if (t_long < rep.horizon) {
    throw Error(ErrorCode::HorizonTooShort, "t_long " + std::to_string(t_long) + " < gap horizon " +
                                                std::to_string(rep.horizon));
  }
  rep.t_long = t_long;

  valid.t_max = t_long;
  valid.record_stride = t_long;
  DensityOperator rho;
  EntropyPoint ent;
  if (valid.n <= kReconstructMaxN) {
    evolve_blocks(valid, false, [&](int t, const FourierBlockSet& bs) {
      if (t != t_long) return;
      rho = reconstruct_full_rho(bs);
      ent = entropy_point(t, bs);
    });
  } else {
    if (valid.n > kDirectMaxN) throw Error(ErrorCode::TooLarge, "limit_report supports N <= 12");
    evolve(valid, [&](int t, const DensityOperator& r) {
      if (t != t_long) return;
      rho = r;
      ent = entropy_point(t, r);
    });
  }

  const int n = valid.n;
  const std::size_t dim = rho.dim();
  rep.max_offdiag = max_offdiagonal(rho.matrix);
  // Mass below this is parity-forbidden (exact zeros up to rounding).
  constexpr double kSupportFloor = 1e-12;
  double lo = 1e300;
  double hi = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double v = rho.matrix(i, i).real();
    if (v <= kSupportFloor) continue;
    ++rep.support_size;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  if (rep.support_size > 0) {
    rep.measured_diag = sum / static_cast<double>(rep.support_size);
    rep.measured_diag_min = lo;
    rep.measured_diag_max = hi;
    rep.diag_relative_spread = (hi - lo) / rep.measured_diag;
    rep.forced_diag_support = 1.0 / static_cast<double>(rep.support_size);
    rep.support_entropy = std::log(static_cast<double>(rep.support_size));
  }
  const double nd = static_cast<double>(n);
  rep.paper_diag = (n % 2 == 1) ? 1.0 / (4.0 * nd) : 1.0 / nd;
  rep.paper_diag_total = rep.paper_diag * 4.0 * nd * nd;
  rep.forced_diag = 1.0 / (4.0 * nd * nd);
  rep.paper_entropy = (n % 2 == 1) ? 1.0 + std::log(nd) : std::log(nd);
  rep.full_space_entropy = std::log(4.0 * nd * nd);
  rep.measured_entropy = ent.s_total;
  rep.s_coin = ent.s_coin;
  rep.s_walker = ent.s_walker;
  rep.mutual_info = ent.mutual_info;

  const PositionDistribution dist = position_distribution(rho);
  rep.parity_single_step_rule = true;
  rep.parity_dual_rule = true;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double m = dist.at(x, y);
      if (m <= kSupportFloor) continue;
      rep.support_sites.push_back({x, y, m});
      if ((x + y - t_long) % 2 != 0) rep.parity_single_step_rule = false;
      if ((t_long - x) % 2 != 0 || (t_long - y) % 2 != 0) rep.parity_dual_rule = false;
    }
  return rep;
}

}  // namespace qwalk
