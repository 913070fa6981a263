#pragma once

// Ground-truth evolution of the full 4N^2-dimensional density operator.
//
// One step is rho -> sum_n U A_n rho A_n^dagger U^dagger with U = S (I x U_C).
// The coin channel acts on each 4x4 position-pair block independently and
// the shift is an index permutation; U is never materialized.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/numerics.hpp"
#include "qwalk/walk_model.hpp"

namespace qwalk {

enum class BasisTag { position_coin, fourier_coin, coin_only, position_only };

constexpr std::string_view to_string(BasisTag b) noexcept {
  switch (b) {
    case BasisTag::position_coin: return "position_coin";
    case BasisTag::fourier_coin: return "fourier_coin";
    case BasisTag::coin_only: return "coin_only";
    case BasisTag::position_only: return "position_only";
  }
  return "position_coin";
}

struct DensityOperator {
  ComplexMatrix matrix;
  BasisTag basis = BasisTag::position_coin;

  std::size_t dim() const noexcept { return matrix.rows(); }
};

/// Numerical health of a density operator.
struct DensityCheck {
  double trace_error = 0.0;   // |Tr rho - 1|
  double hermiticity = 0.0;   // max |rho - rho^dagger|
  double min_eigenvalue = 0.0;
  double purity = 0.0;        // Tr rho^2

  bool ok(double trace_tol = 1e-10, double herm_tol = 1e-10, double psd_tol = 1e-9) const {
    return trace_error <= trace_tol && hermiticity <= herm_tol && min_eigenvalue >= -psd_tol;
  }
};

inline double purity(const ComplexMatrix& rho) {
  // Tr rho^2 = sum_ij rho_ij rho_ji.
  double s = 0.0;
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j) s += (rho(i, j) * rho(j, i)).real();
  return s;
}

inline DensityCheck check_density(const DensityOperator& rho) {
  DensityCheck c;
  c.trace_error = std::abs(rho.matrix.trace() - cplx{1.0, 0.0});
  c.hermiticity = hermiticity_defect(rho.matrix);
  const auto evals = hermitian_eigenvalues(rho.matrix, std::max(1e-8, 2.0 * c.hermiticity));
  c.min_eigenvalue = evals.empty() ? 0.0 : evals.front();
  c.purity = purity(rho.matrix);
  return c;
}

struct PositionDistribution {
  int n = 0;
  std::vector<double> probs;  // index x*N + y

  double at(int x, int y) const { return probs.at(site_index(n, x, y)); }
  double& at(int x, int y) { return probs.at(site_index(n, x, y)); }

  double total() const {
    double s = 0.0;
    for (double v : probs) s += v;
    return s;
  }
};

inline double max_abs_diff(const PositionDistribution& a, const PositionDistribution& b) {
  if (a.n != b.n) throw Error(ErrorCode::InvalidArgument, "distribution size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) m = std::max(m, std::abs(a.probs[i] - b.probs[i]));
  return m;
}

inline std::size_t walk_dim(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * kCoinDim;
}

/// rho(0) = |0,0><0,0| x |psi0><psi0|.
inline DensityOperator initial_state(const WalkConfig& cfg) {
  const std::size_t d = walk_dim(cfg.n);
  DensityOperator rho{ComplexMatrix(d, d), BasisTag::position_coin};
  for (std::size_t l = 0; l < kCoinDim; ++l)
    for (std::size_t m = 0; m < kCoinDim; ++m) rho.matrix(l, m) = cfg.coin_init[l] * std::conj(cfg.coin_init[m]);
  return rho;
}

/// Precomputed step machinery for one configuration.
class DirectStepper {
 public:
  explicit DirectStepper(const WalkConfig& cfg)
      : n_(cfg.n), shift_(cfg.n), kraus_(build_kraus(cfg.p, cfg.kraus_mode)) {
    const ComplexMatrix coin = build_hadamard2d_coin();
    diagonal_kraus_ = kraus_.is_diagonal();
    weights_ = kraus_.hadamard_weights();
    to_array(coin, coin_);
    for (std::size_t k = 0; k < kraus_.operators.size(); ++k) to_array(coin * kraus_.operators[k], coin_kraus_[k]);
  }

  int n() const noexcept { return n_; }
  const KrausFamily& kraus() const noexcept { return kraus_; }

  DensityOperator step(const DensityOperator& rho) const {
    if (rho.basis != BasisTag::position_coin || rho.dim() != walk_dim(n_)) {
      throw Error(ErrorCode::BasisMismatch, "direct step needs a position_coin operator of dim " +
                                                std::to_string(walk_dim(n_)));
    }
    const std::size_t d = rho.dim();
    const std::size_t sites = d / kCoinDim;
    ComplexMatrix coined(d, d);
    Block in{};
    Block tmp{};
    Block out{};
    for (std::size_t s = 0; s < sites; ++s) {
      for (std::size_t r = 0; r < sites; ++r) {
        load(rho.matrix, s, r, in);
        if (diagonal_kraus_) {
          for (std::size_t i = 0; i < in.size(); ++i) tmp[i] = in[i] * weights_[i];
          conjugate_by(coin_, tmp, coin_, out);
        } else {
          out.fill(cplx{0.0, 0.0});
          Block term{};
          for (const auto& k : coin_kraus_) {
            conjugate_by(k, in, k, term);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += term[i];
          }
        }
        store(coined, s, r, out);
      }
    }
    ComplexMatrix shifted(d, d);
    const auto target = shift_.targets();
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t ti = target[i];
      for (std::size_t j = 0; j < d; ++j) shifted(ti, target[j]) = coined(i, j);
    }
    return {std::move(shifted), BasisTag::position_coin};
  }

 private:
  using Block = std::array<cplx, kCoinDim * kCoinDim>;

  static void to_array(const ComplexMatrix& m, Block& out) {
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t j = 0; j < kCoinDim; ++j) out[i * kCoinDim + j] = m(i, j);
  }

  static void load(const ComplexMatrix& m, std::size_t s, std::size_t r, Block& b) {
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t j = 0; j < kCoinDim; ++j) b[i * kCoinDim + j] = m(s * kCoinDim + i, r * kCoinDim + j);
  }

  static void store(ComplexMatrix& m, std::size_t s, std::size_t r, const Block& b) {
    for (std::size_t i = 0; i < kCoinDim; ++i)
      for (std::size_t j = 0; j < kCoinDim; ++j) m(s * kCoinDim + i, r * kCoinDim + j) = b[i * kCoinDim + j];
  }

  // out = left * b * right^dagger
  static void conjugate_by(const Block& left, const Block& b, const Block& right, Block& out) {
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
        out[i * kCoinDim + j] = s;
      }
  }

  int n_;
  ShiftMap shift_;
  KrausFamily kraus_;
  bool diagonal_kraus_ = true;
  Block weights_{};
  Block coin_{};
  std::array<Block, 5> coin_kraus_{};
};

inline DensityOperator step(const DensityOperator& rho, const WalkConfig& cfg) {
  return DirectStepper(cfg).step(rho);
}

/// Runs the recurrence to cfg.t_max, calling visit(t, rho) at every time in
/// record_times(cfg).
inline void evolve(const WalkConfig& cfg, const std::function<void(int, const DensityOperator&)>& visit) {
  const WalkConfig valid = validate_config(cfg);
  if (valid.backend == Backend::fourier && valid.n > kDirectMaxN) {
    throw Error(ErrorCode::DirectBackendTooLarge, "direct evolution needs N <= 12");
  }
  const auto times = record_times(valid);
  const DirectStepper stepper(valid);
  DensityOperator rho = initial_state(valid);
  std::size_t next = 0;
  for (int t = 0;; ++t) {
    if (next < times.size() && times[next] == t) {
      visit(t, rho);
      ++next;
    }
    if (t == valid.t_max) break;
    rho = stepper.step(rho);
  }
}

struct Snapshot {
  int t = 0;
  DensityOperator rho;
};

inline std::vector<Snapshot> evolve(const WalkConfig& cfg) {
  std::vector<Snapshot> out;
  evolve(cfg, [&](int t, const DensityOperator& rho) { out.push_back({t, rho}); });
  return out;
}

inline PositionDistribution position_distribution(const DensityOperator& rho) {
  if (rho.basis != BasisTag::position_coin || rho.dim() % kCoinDim != 0) {
    throw Error(ErrorCode::BasisMismatch, "position_distribution needs a position_coin operator");
  }
  const std::size_t sites = rho.dim() / kCoinDim;
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(sites))));
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != sites) {
    throw Error(ErrorCode::BasisMismatch, "dimension is not 4N^2");
  }
  PositionDistribution dist{n, std::vector<double>(sites, 0.0)};
  for (std::size_t s = 0; s < sites; ++s) {
    double v = 0.0;
    for (std::size_t j = 0; j < kCoinDim; ++j) v += rho.matrix(s * kCoinDim + j, s * kCoinDim + j).real();
    dist.probs[s] = v;
  }
  return dist;
}

/// t-fold application of the nearest-neighbour stochastic kernel on the
/// torus, starting from (0,0). Shares no code with the quantum path.
inline PositionDistribution classical_walk_oracle(int n, int t) {
  if (n < 2 || t < 0) throw Error(ErrorCode::BadRange, "classical oracle needs N >= 2, t >= 0");
  std::vector<double> cur(static_cast<std::size_t>(n * n), 0.0);
  cur[0] = 1.0;
  std::vector<double> next(cur.size());
  for (int step = 0; step < t; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        const double share = 0.25 * cur[static_cast<std::size_t>(x * n + y)];
        if (share == 0.0) continue;
        next[static_cast<std::size_t>(((x + 1) % n) * n + y)] += share;
        next[static_cast<std::size_t>(((x + n - 1) % n) * n + y)] += share;
        next[static_cast<std::size_t>(x * n + (y + 1) % n)] += share;
        next[static_cast<std::size_t>(x * n + (y + n - 1) % n)] += share;
      }
    cur.swap(next);
  }
  return {n, std::move(cur)};
}

/// Largest |rho_ij| over pairs with different positions (coin indices free).
inline double max_position_offdiagonal(const DensityOperator& rho) {
  double m = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i)
    for (std::size_t j = 0; j < rho.dim(); ++j)
      if (i / kCoinDim != j / kCoinDim) m = std::max(m, std::abs(rho.matrix(i, j)));
  return m;
}

/// Largest |rho_ij| with i != j.
inline double max_offdiagonal(const ComplexMatrix& rho) {
  double m = 0.0;
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j)
      if (i != j) m = std::max(m, std::abs(rho(i, j)));
  return m;
}

}  // namespace qwalk
