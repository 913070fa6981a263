#pragma once

// Momentum-space picture: rho(t) = (1/N^2) sum |k><k'| x B(t; k, k') where
// each 4x4 block evolves on its own under
//   B <- sum_n U_C(k) A_n B A_n^dagger U_C(k')^dagger.
//
// Kets are |k> = (1/N) sum_x e^{-2 pi i x.k / N} |x>. The negative exponent is
// the one consistent with the coin phases of build_fourier_coin and the shift
// (L moves x -> x-1); with it the reconstructed rho equals the direct one.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/evolution_direct.hpp"
#include "qwalk/numerics.hpp"
#include "qwalk/walk_model.hpp"

namespace qwalk {

inline constexpr int kReconstructMaxN = 8;

struct Momentum {
  int kx = 0;
  int ky = 0;
  friend bool operator==(const Momentum&, const Momentum&) = default;
};

struct Quadruple {
  int kx = 0;
  int ky = 0;
  int kxp = 0;
  int kyp = 0;

  Momentum left() const noexcept { return {kx, ky}; }
  Momentum right() const noexcept { return {kxp, kyp}; }
  bool is_diagonal() const noexcept { return kx == kxp && ky == kyp; }
  friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

/// min(|d|, N - |d|) for d = a - b on Z_N.
inline int modular_distance(int a, int b, int n) {
  int d = ((a - b) % n + n) % n;
  return std::min(d, n - d);
}

class FourierBlockSet {
 public:
  static constexpr std::size_t kBlockSize = kCoinDim * kCoinDim;

  FourierBlockSet() = default;
  FourierBlockSet(int n, bool diagonal_only)
      : n_(n), diagonal_only_(diagonal_only), data_(block_count(n, diagonal_only) * kBlockSize) {}

  int n() const noexcept { return n_; }
  int t() const noexcept { return t_; }
  void set_t(int t) noexcept { t_ = t; }
  bool diagonal_only() const noexcept { return diagonal_only_; }
  std::size_t momenta() const noexcept { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
  std::size_t size() const noexcept { return data_.size() / kBlockSize; }

  std::size_t momentum_index(Momentum k) const { return site_index(n_, k.kx, k.ky); }

  /// Storage slot for (k, k'); throws DiagonalOnlyStored if absent.
  std::size_t slot(Momentum k, Momentum kp) const {
    const std::size_t a = momentum_index(k);
    const std::size_t b = momentum_index(kp);
    if (diagonal_only_) {
      if (a != b) throw Error(ErrorCode::DiagonalOnlyStored, "off-diagonal block requested from a diagonal-only set");
      return a;
    }
    return a * momenta() + b;
  }

  ComplexMatrix block(Momentum k, Momentum kp) const { return block_at(slot(k, kp)); }
  ComplexMatrix block(const Quadruple& q) const { return block(q.left(), q.right()); }

  ComplexMatrix block_at(std::size_t slot) const {
    const cplx* p = raw(slot);
    return ComplexMatrix(kCoinDim, kCoinDim, std::vector<cplx>(p, p + kBlockSize));
  }

  void set_block(Momentum k, Momentum kp, const ComplexMatrix& b) {
    cplx* p = raw(slot(k, kp));
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t j = 0; j < kCoinDim; ++j) p[i * kCoinDim + j] = b(i, j);
  }

  cplx* raw(std::size_t slot) { return &data_.at(slot * kBlockSize); }
  const cplx* raw(std::size_t slot) const { return &data_.at(slot * kBlockSize); }

  void require_full(const char* what) const {
    if (diagonal_only_) throw Error(ErrorCode::DiagonalOnlyStored, std::string(what) + " needs the full block set");
  }

 private:
  static std::size_t block_count(int n, bool diagonal_only) {
    const std::size_t m = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    return diagonal_only ? m : m * m;
  }

  int n_ = 0;
  int t_ = 0;
  bool diagonal_only_ = false;
  std::vector<cplx> data_;
};

inline FourierBlockSet init_blocks(const WalkConfig& cfg, bool diagonal_only = false) {
  if (cfg.n < 2) throw Error(ErrorCode::BadRange, "N must be >= 2");
  FourierBlockSet bs(cfg.n, diagonal_only);
  for (std::size_t s = 0; s < bs.size(); ++s) {
    cplx* b = bs.raw(s);
    for (std::size_t l = 0; l < kCoinDim; ++l)
      for (std::size_t m = 0; m < kCoinDim; ++m) b[l * kCoinDim + m] = cfg.coin_init[l] * std::conj(cfg.coin_init[m]);
  }
  return bs;
}

/// In-place block stepper with per-momentum coin matrices precomputed.
class FourierStepper {
 public:
  explicit FourierStepper(const WalkConfig& cfg) : n_(cfg.n), kraus_(build_kraus(cfg.p, cfg.kraus_mode)) {
    diagonal_kraus_ = kraus_.is_diagonal();
    weights_ = kraus_.hadamard_weights();
    const std::size_t m = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
    coins_.resize(m);
    coin_kraus_.resize(m);
    for (int kx = 0; kx < n_; ++kx)
      for (int ky = 0; ky < n_; ++ky) {
        const std::size_t a = site_index(n_, kx, ky);
        const ComplexMatrix u = build_fourier_coin(kx, ky, n_);
        to_array(u, coins_[a]);
        for (std::size_t k = 0; k < kraus_.operators.size(); ++k) to_array(u * kraus_.operators[k], coin_kraus_[a][k]);
      }
  }

  const KrausFamily& kraus() const noexcept { return kraus_; }

  void step(FourierBlockSet& bs) const {
    if (bs.n() != n_) throw Error(ErrorCode::InvalidArgument, "block set N does not match stepper");
    const std::size_t m = bs.momenta();
    if (bs.diagonal_only()) {
      for (std::size_t a = 0; a < m; ++a) step_block(bs.raw(a), a, a);
    } else {
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) step_block(bs.raw(a * m + b), a, b);
    }
    bs.set_t(bs.t() + 1);
  }

  /// One application of the superoperator L_{k,k'} to an arbitrary 4x4 B.
  ComplexMatrix apply(const Quadruple& q, const ComplexMatrix& b) const {
    Block in{};
    to_array(b, in);
    step_block(in.data(), site_index(n_, q.kx, q.ky), site_index(n_, q.kxp, q.kyp));
    return ComplexMatrix(kCoinDim, kCoinDim, std::vector<cplx>(in.begin(), in.end()));
  }

 private:
  using Block = std::array<cplx, kCoinDim * kCoinDim>;

  static void to_array(const ComplexMatrix& m, Block& out) {
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t j = 0; j < kCoinDim; ++j) out[i * kCoinDim + j] = m(i, j);
  }

  // out += left * b * right^dagger
  static void accumulate(const Block& left, const cplx* b, const Block& right, Block& out) {
    Block lb{};
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t k = 0; k < kCoinDim; ++k) {
        const cplx lik = left[i * kCoinDim + k];
        for (std::size_t j = 0; j < kCoinDim; ++j) lb[i * kCoinDim + j] += lik * b[k * kCoinDim + j];
      }
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t j = 0; j < kCoinDim; ++j) {
        cplx s{0.0, 0.0};
        for (std::size_t k = 0; k < kCoinDim; ++k) s += lb[i * kCoinDim + k] * std::conj(right[j * kCoinDim + k]);
        out[i * kCoinDim + j] += s;
      }
  }

  void step_block(cplx* b, std::size_t a, std::size_t c) const {
    Block out{};
    if (diagonal_kraus_) {
      Block weighted{};
      for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = b[i] * weights_[i];
      accumulate(coins_[a], weighted.data(), coins_[c], out);
    } else {
      for (std::size_t k = 0; k < coin_kraus_[a].size(); ++k) accumulate(coin_kraus_[a][k], b, coin_kraus_[c][k], out);
    }
    std::copy(out.begin(), out.end(), b);
  }

  int n_;
  KrausFamily kraus_;
  bool diagonal_kraus_ = true;
  Block weights_{};
  std::vector<Block> coins_;
  std::vector<std::array<Block, 5>> coin_kraus_;
};

inline FourierBlockSet step_blocks(FourierBlockSet bs, const WalkConfig& cfg) {
  FourierStepper(cfg).step(bs);
  return bs;
}

/// Runs the block recurrence to cfg.t_max, calling visit at record_times(cfg).
inline void evolve_blocks(const WalkConfig& cfg, bool diagonal_only,
                          const std::function<void(int, const FourierBlockSet&)>& visit) {
  WalkConfig fourier_cfg = cfg;
  fourier_cfg.backend = Backend::fourier;
  const WalkConfig valid = validate_config(fourier_cfg);
  const auto times = record_times(valid);
  const FourierStepper stepper(valid);
  FourierBlockSet bs = init_blocks(valid, diagonal_only);
  std::size_t next = 0;
  for (int t = 0;; ++t) {
    if (next < times.size() && times[next] == t) {
      visit(t, bs);
      ++next;
    }
    if (t == valid.t_max) break;
    stepper.step(bs);
  }
}

/// rho_C = (1/N^2) sum_k B(k, k).
inline DensityOperator coin_reduced_density(const FourierBlockSet& bs) {
  ComplexMatrix rc(kCoinDim, kCoinDim);
  const std::size_t m = bs.momenta();
  for (std::size_t a = 0; a < m; ++a) {
    const cplx* b = bs.raw(bs.diagonal_only() ? a : a * m + a);
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t j = 0; j < kCoinDim; ++j) rc(i, j) += b[i * kCoinDim + j];
  }
  rc *= cplx{1.0 / static_cast<double>(m), 0.0};
  return {std::move(rc), BasisTag::coin_only};
}

/// Walker state in the momentum basis: M[k][k'] = (1/N^2) Tr B(k, k').
inline DensityOperator walker_reduced_density(const FourierBlockSet& bs) {
  bs.require_full("walker_reduced_density");
  const std::size_t m = bs.momenta();
  ComplexMatrix w(m, m);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const cplx* blk = bs.raw(a * m + b);
      cplx tr{0.0, 0.0};
      for (std::size_t l = 0; l < kCoinDim; ++l) tr += blk[l * kCoinDim + l];
      w(a, b) = tr * scale;
    }
  return {std::move(w), BasisTag::position_only};
}

/// Full state in the orthonormal momentum x coin basis: the 4N^2 block matrix
/// with entries B(k, k')/N^2. Unitarily equivalent to the position-basis rho.
inline DensityOperator momentum_density(const FourierBlockSet& bs) {
  bs.require_full("momentum_density");
  const std::size_t m = bs.momenta();
  const std::size_t d = m * kCoinDim;
  ComplexMatrix r(d, d);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const cplx* blk = bs.raw(a * m + b);
      for (std::size_t i = 0; i < kCoinDim; ++i)
        for (std::size_t j = 0; j < kCoinDim; ++j) r(a * kCoinDim + i, b * kCoinDim + j) = blk[i * kCoinDim + j] * scale;
    }
  return {std::move(r), BasisTag::fourier_coin};
}

/// Position-basis rho(t) from the blocks. Guarded at N <= 8.
inline DensityOperator reconstruct_full_rho(const FourierBlockSet& bs) {
  bs.require_full("reconstruct_full_rho");
  const int n = bs.n();
  if (n > kReconstructMaxN) {
    throw Error(ErrorCode::TooLarge, "reconstruction supports N <= " + std::to_string(kReconstructMaxN));
  }
  const std::size_t m = bs.momenta();
  const double inv_n = 1.0 / static_cast<double>(n);
  // F[site][k] = <x,y|k> = e^{-2 pi i (x kx + y ky)/N} / N
  ComplexMatrix f(m, m);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int kx = 0; kx < n; ++kx)
        for (int ky = 0; ky < n; ++ky) {
          const int phase = ((x * kx + y * ky) % n + n) % n;
          f(site_index(n, x, y), site_index(n, kx, ky)) = std::conj(momentum_phase(phase, n)) * inv_n;
        }
  const ComplexMatrix t = kron(f, ComplexMatrix::identity(kCoinDim));
  const DensityOperator mom = momentum_density(bs);
  return {t * mom.matrix * dagger(t), BasisTag::position_coin};
}

/// P(x, y, t) = (1/N^4) sum_{k,k'} e^{-2 pi i ((x)(kx - kx') + y (ky - ky'))/N} Tr B(k, k').
inline double probability_at(const FourierBlockSet& bs, int x, int y) {
  bs.require_full("probability_at");
  const int n = bs.n();
  const std::size_t m = bs.momenta();
  cplx sum{0.0, 0.0};
  for (int kx = 0; kx < n; ++kx)
    for (int ky = 0; ky < n; ++ky)
      for (int kxp = 0; kxp < n; ++kxp)
        for (int kyp = 0; kyp < n; ++kyp) {
          const cplx* blk = bs.raw(site_index(n, kx, ky) * m + site_index(n, kxp, kyp));
          cplx tr{0.0, 0.0};
          for (std::size_t l = 0; l < kCoinDim; ++l) tr += blk[l * kCoinDim + l];
          const int phase = ((x * (kx - kxp) + y * (ky - kyp)) % n + n) % n;
          sum += std::conj(momentum_phase(phase, n)) * tr;
        }
  return sum.real() / static_cast<double>(m * m);
}

inline PositionDistribution fourier_position_distribution(const FourierBlockSet& bs) {
  PositionDistribution dist{bs.n(), std::vector<double>(bs.momenta(), 0.0)};
  for (int x = 0; x < bs.n(); ++x)
    for (int y = 0; y < bs.n(); ++y) dist.at(x, y) = probability_at(bs, x, y);
  return dist;
}

/// max over stored pairs of |B(k,k') - B(k',k)^dagger|.
inline double block_hermiticity_defect(const FourierBlockSet& bs) {
  const std::size_t m = bs.momenta();
  double worst = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = bs.diagonal_only() ? a : 0; b < (bs.diagonal_only() ? a + 1 : m); ++b) {
      const cplx* x = bs.raw(bs.diagonal_only() ? a : a * m + b);
      const cplx* y = bs.raw(bs.diagonal_only() ? a : b * m + a);
      for (std::size_t i = 0; i < kCoinDim; ++i)
        for (std::size_t j = 0; j < kCoinDim; ++j)
          worst = std::max(worst, std::abs(x[i * kCoinDim + j] - std::conj(y[j * kCoinDim + i])));
    }
  return worst;
}

}  // namespace qwalk
