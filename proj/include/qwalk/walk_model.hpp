#pragma once

// Static operators of the decoherent Hadamard walk on Z_N x Z_N: the coin,
// its momentum-space form, the conditional shift and the Kraus family.
//
// Composite basis layout: flat = (x*N + y)*4 + j, with coin index
// j = 0:L (x-1), 1:R (x+1), 2:D (y-1), 3:U (y+1).

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/numerics.hpp"

namespace qwalk {

inline constexpr std::size_t kCoinDim = 4;
inline constexpr int kDirectMaxN = 12;

enum class CoinDir : std::size_t { L = 0, R = 1, D = 2, U = 3 };

enum class KrausMode { sqrt, paper_literal };
enum class Backend { direct, fourier, both };

constexpr std::string_view to_string(KrausMode m) noexcept {
  return m == KrausMode::sqrt ? "sqrt" : "paper_literal";
}
constexpr std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::direct: return "direct";
    case Backend::fourier: return "fourier";
    case Backend::both: return "both";
  }
  return "direct";
}

inline KrausMode parse_kraus_mode(std::string_view s) {
  if (s == "sqrt") return KrausMode::sqrt;
  if (s == "paper_literal") return KrausMode::paper_literal;
  throw Error(ErrorCode::BadRange, "unknown kraus_mode '" + std::string(s) + "'");
}

inline Backend parse_backend(std::string_view s) {
  if (s == "direct") return Backend::direct;
  if (s == "fourier") return Backend::fourier;
  if (s == "both") return Backend::both;
  throw Error(ErrorCode::BadRange, "unknown backend '" + std::string(s) + "'");
}

using CoinState = std::array<cplx, kCoinDim>;

/// (1/2)(1, i, i, -1): the symmetric 1D state tensored with itself.
inline CoinState default_coin_state() {
  return {cplx{0.5, 0.0}, cplx{0.0, 0.5}, cplx{0.0, 0.5}, cplx{-0.5, 0.0}};
}

struct WalkConfig {
  int n = 3;
  double p = 0.0;
  CoinState coin_init = default_coin_state();
  int t_max = 0;
  KrausMode kraus_mode = KrausMode::sqrt;
  Backend backend = Backend::direct;
  double tol = 1e-10;
  // 0 selects the default schedule: every step up to t = 100, then every 10th.
  int record_stride = 0;
};

/// Steps at which a run records its state. Always contains 0 and t_max.
inline std::vector<int> record_times(const WalkConfig& cfg) {
  std::vector<int> times;
  for (int t = 0; t <= cfg.t_max; ++t) {
    const bool take = cfg.record_stride > 0 ? (t % cfg.record_stride == 0)
                                            : (t <= 100 || t % 10 == 0);
    if (take || t == cfg.t_max) times.push_back(t);
  }
  return times;
}

inline WalkConfig validate_config(WalkConfig cfg) {
  if (cfg.n < 2) throw Error(ErrorCode::BadRange, "N must be >= 2, got " + std::to_string(cfg.n));
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw Error(ErrorCode::BadRange, "p must lie in [0,1], got " + std::to_string(cfg.p));
  if (cfg.t_max < 0) throw Error(ErrorCode::BadRange, "t_max must be non-negative");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::BadRange, "tol must be positive");
  if (cfg.record_stride < 0) throw Error(ErrorCode::BadRange, "record_stride must be non-negative");

  double norm2 = 0.0;
  for (const auto& a : cfg.coin_init) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw Error(ErrorCode::BadNorm, "non-finite coin amplitude");
    norm2 += std::norm(a);
  }
  const double norm = std::sqrt(norm2);
  if (std::abs(norm - 1.0) > 1e-6) throw Error(ErrorCode::BadNorm, "coin_init norm " + std::to_string(norm));
  for (auto& a : cfg.coin_init) a /= norm;

  if (cfg.backend != Backend::fourier && cfg.n > kDirectMaxN) {
    throw Error(ErrorCode::DirectBackendTooLarge,
                "direct backend supports N <= " + std::to_string(kDirectMaxN) + ", got " + std::to_string(cfg.n));
  }
  return cfg;
}

inline ComplexMatrix build_hadamard2d_coin() {
  return ComplexMatrix{{0.5, 0.5, 0.5, 0.5},
                       {0.5, -0.5, 0.5, -0.5},
                       {0.5, 0.5, -0.5, -0.5},
                       {0.5, -0.5, -0.5, 0.5}};
}

/// Phase of a unit momentum step, e^{2 pi i k / N}.
inline cplx momentum_phase(int k, int n) {
  const double angle = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

/// Diag(e^{-2pi i kx/N}, e^{2pi i kx/N}, e^{-2pi i ky/N}, e^{2pi i ky/N}) * U_C.
inline ComplexMatrix build_fourier_coin(int kx, int ky, int n) {
  if (n < 2 || kx < 0 || ky < 0 || kx >= n || ky >= n)
    throw Error(ErrorCode::BadRange, "momentum out of range");
  const cplx ex = momentum_phase(kx, n);
  const cplx ey = momentum_phase(ky, n);
  const std::array<cplx, kCoinDim> phase{std::conj(ex), ex, std::conj(ey), ey};
  ComplexMatrix u = build_hadamard2d_coin();
  for (std::size_t r = 0; r < kCoinDim; ++r)
    for (std::size_t c = 0; c < kCoinDim; ++c) u(r, c) *= phase[r];
  return u;
}

struct KrausFamily {
  std::array<ComplexMatrix, 5> operators;
  KrausMode mode = KrausMode::sqrt;
  double p = 0.0;

  /// sum_n A_n^dagger A_n - I.
  ComplexMatrix completeness_defect() const {
    ComplexMatrix s(kCoinDim, kCoinDim);
    for (const auto& a : operators) s += dagger(a) * a;
    return s - ComplexMatrix::identity(kCoinDim);
  }

  bool is_diagonal() const {
    for (const auto& a : operators)
      for (std::size_t i = 0; i < kCoinDim; ++i)
        for (std::size_t j = 0; j < kCoinDim; ++j)
          if (i != j && a(i, j) != cplx{0.0, 0.0}) return false;
    return true;
  }

  /// For a diagonal family, sum_n A_n B A_n^dagger = W o B (entrywise) with
  /// W_lm = sum_n a_n[l] conj(a_n[m]).
  std::array<cplx, kCoinDim * kCoinDim> hadamard_weights() const {
    std::array<cplx, kCoinDim * kCoinDim> w{};
    for (const auto& a : operators)
      for (std::size_t l = 0; l < kCoinDim; ++l)
        for (std::size_t m = 0; m < kCoinDim; ++m) w[l * kCoinDim + m] += a(l, l) * std::conj(a(m, m));
    return w;
  }
};

inline KrausFamily build_kraus(double p, KrausMode mode) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadRange, "p must lie in [0,1]");
  KrausFamily fam;
  fam.mode = mode;
  fam.p = p;
  if (mode == KrausMode::sqrt) {
    const double a0 = std::sqrt(1.0 - p);
    const double aj = std::sqrt(p);
    fam.operators[0] = ComplexMatrix::diagonal({a0, a0, a0, a0});
    for (std::size_t j = 0; j < kCoinDim; ++j) {
      ComplexMatrix a(kCoinDim, kCoinDim);
      a(j, j) = aj;
      fam.operators[j + 1] = a;
    }
  } else {
    // As printed: A1..A4 carry p at coin slots 1, 4, 2, 3 respectively.
    const double q = 1.0 - p;
    fam.operators[0] = ComplexMatrix::diagonal({q, q, q, q});
    fam.operators[1] = ComplexMatrix::diagonal({p, 0.0, 0.0, 0.0});
    fam.operators[2] = ComplexMatrix::diagonal({0.0, 0.0, 0.0, p});
    fam.operators[3] = ComplexMatrix::diagonal({0.0, p, 0.0, 0.0});
    fam.operators[4] = ComplexMatrix::diagonal({0.0, 0.0, p, 0.0});
  }
  return fam;
}

struct Site {
  int x = 0;
  int y = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

inline std::size_t site_index(int n, int x, int y) {
  return static_cast<std::size_t>(x) * static_cast<std::size_t>(n) + static_cast<std::size_t>(y);
}

inline std::size_t flat_index(int n, int x, int y, std::size_t j) {
  return site_index(n, x, y) * kCoinDim + j;
}

/// The conditional shift as a permutation of the 4N^2 composite basis.
class ShiftMap {
 public:
  explicit ShiftMap(int n) : n_(n) {
    if (n < 2) throw Error(ErrorCode::BadRange, "N must be >= 2");
    const std::size_t sites = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    target_.resize(sites * kCoinDim);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (std::size_t j = 0; j < kCoinDim; ++j) {
          const Site to = move(Site{x, y}, static_cast<CoinDir>(j));
          target_[flat_index(n, x, y, j)] = flat_index(n, to.x, to.y, j);
        }
  }

  int n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return target_.size(); }
  std::size_t operator()(std::size_t flat) const { return target_.at(flat); }
  std::span<const std::size_t> targets() const noexcept { return target_; }

  Site move(Site s, CoinDir dir) const noexcept {
    switch (dir) {
      case CoinDir::L: s.x = (s.x + n_ - 1) % n_; break;
      case CoinDir::R: s.x = (s.x + 1) % n_; break;
      case CoinDir::D: s.y = (s.y + n_ - 1) % n_; break;
      case CoinDir::U: s.y = (s.y + 1) % n_; break;
    }
    return s;
  }

 private:
  int n_;
  std::vector<std::size_t> target_;
};

inline ShiftMap build_shift(int n) { return ShiftMap(n); }

}  // namespace qwalk
