#pragma once

// Matrix representations of the per-quadruple superoperator
//   L_{k,k'}(B) = sum_n U_C(k) A_n B A_n^dagger U_C(k')^dagger
// and the audits built on their spectra.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/evolution_fourier.hpp"
#include "qwalk/numerics.hpp"
#include "qwalk/walk_model.hpp"

namespace qwalk {

// Unit-circle membership and class (+1 / -1) tolerances.
inline constexpr double kUnitCircleTol = 1e-8;
inline constexpr double kClassTol = 1e-6;

enum class SuperopBasis { elementary, pauli_tensor };

struct SuperoperatorMatrix {
  ComplexMatrix matrix;  // 16x16
  Quadruple quadruple;
  double p = 0.0;
  SuperopBasis basis = SuperopBasis::elementary;
};

inline std::vector<Quadruple> all_quadruples(int n) {
  std::vector<Quadruple> qs;
  qs.reserve(static_cast<std::size_t>(n) * n * n * n);
  for (int kx = 0; kx < n; ++kx)
    for (int ky = 0; ky < n; ++ky)
      for (int kxp = 0; kxp < n; ++kxp)
        for (int kyp = 0; kyp < n; ++kyp) qs.push_back({kx, ky, kxp, kyp});
  return qs;
}

/// Columns are vec(s_a x s_b)/2 in the order
/// oo, ox, oy, oz, xy, xz, yz, xo, yo, zo, yx, zx, zy, yy, zz, xx.
inline ComplexMatrix pauli_tensor_basis() {
  const std::array<ComplexMatrix, 4> s{
      ComplexMatrix{{1, 0}, {0, 1}},
      ComplexMatrix{{0, 1}, {1, 0}},
      ComplexMatrix{{0, -kI}, {kI, 0}},
      ComplexMatrix{{1, 0}, {0, -1}},
  };
  constexpr std::array<std::array<int, 2>, 16> order{{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {1, 0},
                                                      {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}, {2, 2}, {3, 3}, {1, 1}}};
  ComplexMatrix p(16, 16);
  for (std::size_t c = 0; c < order.size(); ++c) {
    const auto v = vec(kron(s[order[c][0]], s[order[c][1]]));
    for (std::size_t r = 0; r < v.size(); ++r) p(r, c) = 0.5 * v[r];
  }
  return p;
}

inline SuperoperatorMatrix build_superoperator(const Quadruple& q, int n, double p,
                                               SuperopBasis basis = SuperopBasis::elementary,
                                               KrausMode mode = KrausMode::sqrt) {
  const KrausFamily kraus = build_kraus(p, mode);
  const ComplexMatrix uk = build_fourier_coin(q.kx, q.ky, n);
  const ComplexMatrix ukp = build_fourier_coin(q.kxp, q.kyp, n);
  // vec(K B K'^dagger) = (conj(K') x K) vec(B)
  ComplexMatrix m(16, 16);
  for (const auto& a : kraus.operators) m += kron(conjugate(ukp * a), uk * a);
  if (basis == SuperopBasis::pauli_tensor) {
    const ComplexMatrix pb = pauli_tensor_basis();
    m = dagger(pb) * m * pb;
  }
  return {std::move(m), q, p, basis};
}

inline ComplexMatrix apply_superoperator(const SuperoperatorMatrix& s, const ComplexMatrix& b) {
  if (s.basis != SuperopBasis::elementary) {
    const ComplexMatrix pb = pauli_tensor_basis();
    const auto coeffs = matvec(dagger(pb), vec(b));
    const auto out = matvec(pb, matvec(s.matrix, coeffs));
    return unvec(out, kCoinDim);
  }
  return unvec(matvec(s.matrix, vec(b)), kCoinDim);
}

struct CharPolyParams {
  double q = 1.0;
  double cplus = 1.0;
  double cminus = 1.0;
  double splus = 0.0;
  double sminus = 0.0;

  static CharPolyParams from_momenta(int k, int kp, double p, int n) {
    const double ap = 2.0 * kPi * static_cast<double>(k + kp) / static_cast<double>(n);
    const double am = 2.0 * kPi * static_cast<double>(k - kp) / static_cast<double>(n);
    return {1.0 - p, std::cos(ap), std::cos(am), std::sin(ap), std::sin(am)};
  }
};

/// The printed 1D template
///   [ c-     iq s-   0      0  ]
///   [ 0      0       q s+   c+ ]
///   [ 0      0      -q c+   s+ ]
///   [ i s-   q c-    0      0  ]
inline ComplexMatrix build_reference_1d(const CharPolyParams& c) {
  return ComplexMatrix{{c.cminus, kI * c.q * c.sminus, 0.0, 0.0},
                       {0.0, 0.0, c.q * c.splus, c.cplus},
                       {0.0, 0.0, -c.q * c.cplus, c.splus},
                       {kI * c.sminus, c.q * c.cminus, 0.0, 0.0}};
}

inline ComplexMatrix build_reference_1d(int k, int kp, double p, int n) {
  return build_reference_1d(CharPolyParams::from_momenta(k, kp, p, n));
}

/// Coefficients (a0, a1, a2, a3) of f(l) = l^4 + a3 l^3 + a2 l^2 + a1 l + a0.
inline std::array<double, 4> char_poly_coefficients(const CharPolyParams& c) {
  return {c.q * c.q, c.q * (c.cplus - c.q * c.cminus), -2.0 * c.q * c.cplus * c.cminus, c.q * c.cplus - c.cminus};
}

inline cplx char_poly_f(cplx lambda, const CharPolyParams& c) {
  const auto a = char_poly_coefficients(c);
  return (((lambda + a[3]) * lambda + a[2]) * lambda + a[1]) * lambda + a[0];
}

inline ComplexMatrix companion_matrix(const CharPolyParams& c) {
  const auto a = char_poly_coefficients(c);
  ComplexMatrix m(4, 4);
  for (std::size_t i = 1; i < 4; ++i) m(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < 4; ++i) m(i, 3) = -a[i];
  return m;
}

inline std::vector<cplx> char_poly_roots(const CharPolyParams& c) { return general_eigenvalues(companion_matrix(c)); }

/// Bottleneck assignment: the smallest d such that a and b can be paired
/// one-to-one with every pair closer than d.
inline double matching_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "matching_distance size mismatch");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = std::abs(a[i] - b[j]);
  std::vector<double> levels = dist;
  std::sort(levels.begin(), levels.end());

  auto feasible = [&](double thr) {
    std::vector<int> match_b(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<char> seen(n, 0);
      std::function<bool(std::size_t)> augment = [&](std::size_t u) -> bool {
        for (std::size_t v = 0; v < n; ++v) {
          if (dist[u * n + v] > thr || seen[v]) continue;
          seen[v] = 1;
          if (match_b[v] < 0 || augment(static_cast<std::size_t>(match_b[v]))) {
            match_b[v] = static_cast<int>(u);
            return true;
          }
        }
        return false;
      };
      if (!augment(i)) return false;
    }
    return true;
  };

  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(levels[mid])) hi = mid;
    else lo = mid + 1;
  }
  return levels[lo];
}

/// Replaces every value by the mean of its cluster (values chained by gaps
/// below radius). Perturbed copies of a k-fold root scatter by ~eps^(1/k),
/// but their mean stays accurate to ~eps.
inline std::vector<cplx> cluster_means(const std::vector<cplx>& v, double radius) {
  const std::size_t n = v.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(v[i] - v[j]) < radius) parent[root(i)] = root(j);
  std::vector<cplx> sum(n, cplx{0.0, 0.0});
  std::vector<std::size_t> count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[root(i)] += v[i];
    ++count[root(i)];
  }
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = sum[root(i)] / static_cast<double>(count[root(i)]);
  return out;
}

/// matching_distance after collapsing clusters on both sides; cluster sizes
/// still have to agree for the distance to be small.
inline double resolved_matching_distance(const std::vector<cplx>& a, const std::vector<cplx>& b, double radius = 1e-4) {
  return matching_distance(cluster_means(a, radius), cluster_means(b, radius));
}

// ---------------------------------------------------------------------------
// Eigenvalue classification over all quadruples.

struct QuadrupleSpectrum {
  Quadruple quadruple;
  std::vector<cplx> eigenvalues;
};

struct UnitEigenvalue {
  Quadruple quadruple;
  cplx lambda;
  enum class Kind { plus_one, minus_one, other } kind = Kind::other;
};

struct SpectralReport {
  int n = 0;
  double p = 0.0;
  double modulus_tol = 1e-10;
  std::vector<QuadrupleSpectrum> spectra;  // sorted by quadruple
  double max_modulus = 0.0;
  std::size_t modulus_violations = 0;      // |lambda| > 1 + modulus_tol
  std::vector<UnitEigenvalue> unit_circle;  // ||lambda| - 1| <= kUnitCircleTol
  std::size_t plus_one_count = 0;
  std::size_t minus_one_count = 0;
  std::size_t other_unit_count = 0;
  double sub_unit_radius = 0.0;  // largest modulus strictly inside the unit circle
  bool contraction_holds = false;
  bool plus_one_exactly_diagonal_simple = false;
  bool minus_one_only_at_quarter = false;   // as claimed: modular |dk| = N/4 on both axes
  bool minus_one_at_all_quarter = false;    // every N/4 quadruple carries -1 (vacuous when 4 does not divide N)
  std::size_t minus_one_at_half = 0;        // -1 findings at modular |dk| = N/2 on both axes
  std::vector<std::string> violations;
};

inline bool is_quarter_quadruple(const Quadruple& q, int n) {
  if (n % 4 != 0) return false;
  return modular_distance(q.kx, q.kxp, n) == n / 4 && modular_distance(q.ky, q.kyp, n) == n / 4;
}

inline bool is_half_quadruple(const Quadruple& q, int n) {
  if (n % 2 != 0) return false;
  return modular_distance(q.kx, q.kxp, n) == n / 2 && modular_distance(q.ky, q.kyp, n) == n / 2;
}

inline std::string describe(const Quadruple& q) {
  return "(" + std::to_string(q.kx) + "," + std::to_string(q.ky) + "," + std::to_string(q.kxp) + "," +
         std::to_string(q.kyp) + ")";
}

inline SpectralReport audit_proposition1(int n, double p, double tol = 1e-10) {
  if (n < 2) throw Error(ErrorCode::BadRange, "N must be >= 2");
  SpectralReport rep;
  rep.n = n;
  rep.p = p;
  rep.modulus_tol = tol;
  std::size_t simple_plus_on_diagonal = 0;
  bool plus_elsewhere = false;
  std::size_t quarter_quads = 0;
  std::size_t quarter_with_minus = 0;
  bool minus_elsewhere = false;

  for (const Quadruple& q : all_quadruples(n)) {
    auto ev = general_eigenvalues(build_superoperator(q, n, p).matrix);
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
      return std::abs(a) != std::abs(b) ? std::abs(a) > std::abs(b) : std::arg(a) < std::arg(b);
    });
    std::size_t plus_here = 0;
    std::size_t minus_here = 0;
    for (const cplx& l : ev) {
      const double mod = std::abs(l);
      rep.max_modulus = std::max(rep.max_modulus, mod);
      if (mod > 1.0 + tol) {
        ++rep.modulus_violations;
        rep.violations.push_back("|lambda| = " + std::to_string(mod) + " > 1 at " + describe(q));
      }
      if (std::abs(l - 1.0) <= kClassTol) ++plus_here;
      if (std::abs(l + 1.0) <= kClassTol) ++minus_here;
      if (std::abs(mod - 1.0) <= kUnitCircleTol) {
        UnitEigenvalue u{q, l, UnitEigenvalue::Kind::other};
        if (std::abs(l - 1.0) <= kClassTol) u.kind = UnitEigenvalue::Kind::plus_one;
        else if (std::abs(l + 1.0) <= kClassTol) u.kind = UnitEigenvalue::Kind::minus_one;
        rep.unit_circle.push_back(u);
      } else if (mod < 1.0) {
        rep.sub_unit_radius = std::max(rep.sub_unit_radius, mod);
      }
    }
    rep.plus_one_count += plus_here;
    rep.minus_one_count += minus_here;
    if (q.is_diagonal()) {
      if (plus_here == 1) ++simple_plus_on_diagonal;
      else rep.violations.push_back("lambda ~ 1 multiplicity " + std::to_string(plus_here) + " at diagonal " + describe(q));
    } else if (plus_here > 0) {
      plus_elsewhere = true;
      rep.violations.push_back("lambda ~ 1 at off-diagonal " + describe(q));
    }
    const bool quarter = is_quarter_quadruple(q, n);
    if (quarter) {
      ++quarter_quads;
      if (minus_here > 0) ++quarter_with_minus;
    } else if (minus_here > 0) {
      minus_elsewhere = true;
    }
    if (minus_here > 0 && is_half_quadruple(q, n)) ++rep.minus_one_at_half;
    rep.spectra.push_back({q, std::move(ev)});
  }
  for (const auto& u : rep.unit_circle)
    if (u.kind == UnitEigenvalue::Kind::other) ++rep.other_unit_count;

  rep.contraction_holds = rep.modulus_violations == 0;
  rep.plus_one_exactly_diagonal_simple =
      simple_plus_on_diagonal == static_cast<std::size_t>(n) * static_cast<std::size_t>(n) && !plus_elsewhere;
  rep.minus_one_only_at_quarter = !minus_elsewhere;
  rep.minus_one_at_all_quarter = quarter_with_minus == quarter_quads;
  return rep;
}

/// Largest eigenvalue modulus strictly inside the unit circle over all
/// quadruples: the asymptotic decay rate of everything that does not survive.
inline double sub_unit_spectral_radius(int n, double p) {
  double r = 0.0;
  for (const Quadruple& q : all_quadruples(n))
    for (const cplx& l : general_eigenvalues(build_superoperator(q, n, p).matrix)) {
      const double mod = std::abs(l);
      if (mod < 1.0 - kUnitCircleTol) r = std::max(r, mod);
    }
  return r;
}

/// Largest eigenvalue modulus of one quadruple, excluding the unit circle.
inline double quadruple_sub_unit_radius(const Quadruple& q, int n, double p) {
  double r = 0.0;
  for (const cplx& l : general_eigenvalues(build_superoperator(q, n, p).matrix)) {
    const double mod = std::abs(l);
    if (mod < 1.0 - kUnitCircleTol) r = std::max(r, mod);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Tensor factorization claim g = f^4.

struct FactorizationRow {
  Quadruple quadruple;
  double tensor_distance = 0.0;  // 2D spectrum vs {lambda_i mu_j} of ref1d(kx,kx') x ref1d(ky,ky')
  double f4_x_distance = 0.0;    // 2D spectrum vs roots of f(kx,kx'), each four times
  double f4_y_distance = 0.0;    // same with (ky,ky')
};

struct FactorizationReport {
  int n = 0;
  double p = 0.0;
  double match_tol = 1e-6;
  std::vector<FactorizationRow> rows;
  std::size_t tensor_matches = 0;
  std::size_t f4_matches = 0;  // either axis
  double max_tensor_distance = 0.0;
  double max_f4_distance = 0.0;  // min over axes, max over rows
};

/// Deterministic sample: the origin fibre plus a stride through all N^4 quadruples.
inline std::vector<Quadruple> sample_quadruples(int n, std::size_t target = 64) {
  const auto all = all_quadruples(n);
  const std::size_t stride = std::max<std::size_t>(1, all.size() / target);
  std::vector<Quadruple> out;
  for (std::size_t i = 0; i < all.size(); i += stride) out.push_back(all[i]);
  return out;
}

inline FactorizationReport audit_factorization(int n, double p, const std::vector<Quadruple>& quads,
                                               double match_tol = 1e-6) {
  FactorizationReport rep;
  rep.n = n;
  rep.p = p;
  rep.match_tol = match_tol;
  for (const Quadruple& q : quads) {
    const auto ev = general_eigenvalues(build_superoperator(q, n, p).matrix);
    const auto ex = general_eigenvalues(build_reference_1d(q.kx, q.kxp, p, n));
    const auto ey = general_eigenvalues(build_reference_1d(q.ky, q.kyp, p, n));
    std::vector<cplx> products;
    for (const cplx& a : ex)
      for (const cplx& b : ey) products.push_back(a * b);
    auto repeat4 = [](const std::vector<cplx>& r) {
      std::vector<cplx> out;
      for (int i = 0; i < 4; ++i) out.insert(out.end(), r.begin(), r.end());
      return out;
    };
    FactorizationRow row;
    row.quadruple = q;
    row.tensor_distance = matching_distance(ev, products);
    row.f4_x_distance = matching_distance(ev, repeat4(char_poly_roots(CharPolyParams::from_momenta(q.kx, q.kxp, p, n))));
    row.f4_y_distance = matching_distance(ev, repeat4(char_poly_roots(CharPolyParams::from_momenta(q.ky, q.kyp, p, n))));
    const double f4 = std::min(row.f4_x_distance, row.f4_y_distance);
    if (row.tensor_distance <= match_tol) ++rep.tensor_matches;
    if (f4 <= match_tol) ++rep.f4_matches;
    rep.max_tensor_distance = std::max(rep.max_tensor_distance, row.tensor_distance);
    rep.max_f4_distance = std::max(rep.max_f4_distance, f4);
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Frobenius contraction of L on random inputs.

struct ContractionReport {
  Quadruple quadruple;
  int n = 0;
  double p = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  int violations = 0;              // <LB,LB> > <B,B> + 1e-12
  double max_ratio = 0.0;          // max <LB,LB>/<B,B>
  double max_equality_defect = 0.0;  // max |<LB,LB> - <B,B>|
  bool equality_expected = false;  // p == 0
  bool equality_holds = false;     // defect <= 1e-12 on every trial
};

inline ComplexMatrix random_gaussian_block(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix b(kCoinDim, kCoinDim);
  for (auto& z : b.data()) z = cplx{g(rng), g(rng)};
  return b;
}

inline ContractionReport audit_contraction(int trials, double p, const Quadruple& q, int n, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::BadRange, "trials must be >= 1");
  WalkConfig cfg;
  cfg.n = n;
  cfg.p = p;
  const FourierStepper stepper(cfg);
  std::mt19937_64 rng(seed);
  ContractionReport rep{q, n, p, trials, seed};
  rep.equality_expected = p == 0.0;
  for (int i = 0; i < trials; ++i) {
    const ComplexMatrix b = random_gaussian_block(rng);
    const ComplexMatrix lb = stepper.apply(q, b);
    const double before = frobenius_inner(b, b).real();
    const double after = frobenius_inner(lb, lb).real();
    if (after > before + 1e-12) ++rep.violations;
    rep.max_ratio = std::max(rep.max_ratio, after / before);
    rep.max_equality_defect = std::max(rep.max_equality_defect, std::abs(after - before));
  }
  rep.equality_holds = rep.max_equality_defect <= 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------
// Long-time behaviour of individual blocks.

enum class FibreKind { diagonal, quarter, half, generic, mixed };

constexpr std::string_view to_string(FibreKind k) noexcept {
  switch (k) {
    case FibreKind::diagonal: return "diagonal";
    case FibreKind::quarter: return "quarter";
    case FibreKind::half: return "half";
    case FibreKind::generic: return "generic";
    case FibreKind::mixed: return "mixed";
  }
  return "generic";
}

inline FibreKind classify_fibre(const Quadruple& q, int n) {
  if (q.is_diagonal()) return FibreKind::diagonal;
  const int dx = modular_distance(q.kx, q.kxp, n);
  const int dy = modular_distance(q.ky, q.kyp, n);
  if (n % 4 == 0 && dx == n / 4 && dy == n / 4) return FibreKind::quarter;
  if (n % 2 == 0 && dx == n / 2 && dy == n / 2) return FibreKind::half;
  if (dx == 0 || dy == 0) return FibreKind::mixed;
  return FibreKind::generic;
}

struct BlockLimitRow {
  Quadruple quadruple;
  FibreKind kind = FibreKind::generic;
  std::string claimed;        // what the limit claim says for this fibre
  double distance = 0.0;      // max-entry distance from the claimed limit at t_max
  double distance_prev = 0.0;  // same at t_max - 1
  double sign_corrected_diag = 0.0;       // mean of (-1)^t B_ii at t_max
  double sign_corrected_diag_prev = 0.0;  // at t_max - 1
  double max_offdiag = 0.0;   // max |B_ij|, i != j, at t_max
  bool within_tol = false;
};

struct BlockLimitReport {
  int n = 0;
  double p = 0.0;
  int t_max = 0;
  double tol = 0.0;
  std::vector<BlockLimitRow> rows;
};

/// Representative fibres of each kind that exists for this N.
inline std::vector<Quadruple> representative_fibres(int n) {
  std::vector<Quadruple> out{{0, 0, 0, 0}, {1, 0, 1, 0}};
  if (n % 4 == 0) out.push_back({0, 0, n / 4, n / 4});
  if (n % 2 == 0) out.push_back({0, 0, n / 2, n / 2});
  for (const Quadruple& q : all_quadruples(n)) {
    if (q.kx != 0 || q.ky != 0) continue;
    if (classify_fibre(q, n) == FibreKind::generic) {
      out.push_back(q);
      break;
    }
  }
  out.push_back({0, 0, 1, 0});
  return out;
}

inline BlockLimitReport audit_block_limits(int n, double p, int t_max, double tol,
                                           const CoinState& coin = default_coin_state(),
                                           std::vector<Quadruple> quads = {}) {
  if (t_max < 1) throw Error(ErrorCode::BadRange, "t_max must be >= 1");
  if (quads.empty()) quads = representative_fibres(n);
  WalkConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.coin_init = coin;
  const FourierStepper stepper(cfg);
  ComplexMatrix b0(kCoinDim, kCoinDim);
  for (std::size_t l = 0; l < kCoinDim; ++l)
    for (std::size_t m = 0; m < kCoinDim; ++m) b0(l, m) = coin[l] * std::conj(coin[m]);
  const ComplexMatrix quarter_identity = ComplexMatrix::identity(kCoinDim) * cplx{0.25, 0.0};

  BlockLimitReport rep{n, p, t_max, tol, {}};
  for (const Quadruple& q : quads) {
    BlockLimitRow row;
    row.quadruple = q;
    row.kind = classify_fibre(q, n);
    ComplexMatrix b = b0;
    ComplexMatrix prev = b0;
    for (int t = 0; t < t_max; ++t) {
      prev = b;
      b = stepper.apply(q, b);
    }
    auto sign_diag = [](const ComplexMatrix& m, int t) {
      const double s = (t % 2 == 0) ? 1.0 : -1.0;
      return s * m.trace().real() / static_cast<double>(kCoinDim);
    };
    row.sign_corrected_diag = sign_diag(b, t_max);
    row.sign_corrected_diag_prev = sign_diag(prev, t_max - 1);
    row.max_offdiag = max_offdiagonal(b);
    switch (row.kind) {
      case FibreKind::diagonal:
        row.claimed = "B -> I/4";
        row.distance = max_abs_diff(b, quarter_identity);
        row.distance_prev = max_abs_diff(prev, quarter_identity);
        break;
      case FibreKind::quarter:
      case FibreKind::half: {
        row.claimed = row.kind == FibreKind::quarter ? "(-1)^t B -> I/4 (claimed for |dk| = N/4)"
                                                     : "(-1)^t B -> c I (measured -1 fibre, |dk| = N/2)";
        const double se = (t_max % 2 == 0) ? 1.0 : -1.0;
        row.distance = max_abs_diff(b * cplx{se, 0.0}, quarter_identity);
        row.distance_prev = max_abs_diff(prev * cplx{-se, 0.0}, quarter_identity);
        break;
      }
      case FibreKind::generic:
      case FibreKind::mixed:
        row.claimed = "B -> 0";
        row.distance = max_abs(b);
        row.distance_prev = max_abs(prev);
        break;
    }
    row.within_tol = row.distance < tol;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

/// Geometric decay rate of ||B(t)||_F between t1 and t2 for one fibre.
inline double measured_block_decay_rate(const Quadruple& q, int n, double p, int t1, int t2,
                                        const CoinState& coin = default_coin_state()) {
  if (!(t2 > t1 && t1 >= 0)) throw Error(ErrorCode::BadRange, "need t2 > t1 >= 0");
  WalkConfig cfg;
  cfg.n = n;
  cfg.p = p;
  const FourierStepper stepper(cfg);
  ComplexMatrix b(kCoinDim, kCoinDim);
  for (std::size_t l = 0; l < kCoinDim; ++l)
    for (std::size_t m = 0; m < kCoinDim; ++m) b(l, m) = coin[l] * std::conj(coin[m]);
  double n1 = 0.0;
  for (int t = 0; t < t2; ++t) {
    if (t == t1) n1 = frobenius_norm(b);
    b = stepper.apply(q, b);
  }
  const double n2 = frobenius_norm(b);
  return std::pow(n2 / n1, 1.0 / static_cast<double>(t2 - t1));
}

}  // namespace qwalk
