#pragma once

// Experiment runner: config parsing, backend dispatch and CSV/JSON writers.
//
// Every CSV starts with a '#' line carrying the schema version, the echoed
// config and the seed. Reals are written with 12 significant digits in
// lowercase scientific notation.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qwalk/error.hpp"
#include "qwalk/evolution_direct.hpp"
#include "qwalk/evolution_fourier.hpp"
#include "qwalk/infotheory.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/walk_model.hpp"

namespace qwalk::cli {

inline constexpr std::string_view kSchemaVersion = "qwalk-1";

enum class Command { evolve, entropy, spectrum, audit, limits };

inline Command parse_command(std::string_view s) {
  if (s == "evolve") return Command::evolve;
  if (s == "entropy") return Command::entropy;
  if (s == "spectrum") return Command::spectrum;
  if (s == "audit") return Command::audit;
  if (s == "limits") return Command::limits;
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + std::string(s) + "'");
}

struct RunManifest {
  WalkConfig config;
  Command command = Command::evolve;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitHorizon = 4 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadNorm:
    case ErrorCode::BadRange:
    case ErrorCode::DirectBackendTooLarge:
    case ErrorCode::BasisMismatch:
    case ErrorCode::DiagonalOnlyStored:
    case ErrorCode::TooLarge:
    case ErrorCode::InvalidArgument:
      return kExitConfig;
    case ErrorCode::HorizonTooShort:
      return kExitHorizon;
    case ErrorCode::NotHermitian:
    case ErrorCode::NoConvergence:
    case ErrorCode::NotDensity:
      return kExitNumerical;
  }
  return kExitNumerical;
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

/// Round-trips v through the 12-digit text form so JSON output is stable.
inline double round12(double v) { return std::strtod(fmt(v).c_str(), nullptr); }

// ---------------------------------------------------------------------------
// Config I/O

inline nlohmann::ordered_json config_to_json(const WalkConfig& cfg, std::uint64_t seed) {
  nlohmann::ordered_json coin = nlohmann::ordered_json::array();
  for (const auto& a : cfg.coin_init) coin.push_back({round12(a.real()), round12(a.imag())});
  return {{"n", cfg.n},
          {"p", round12(cfg.p)},
          {"coin_init", coin},
          {"t_max", cfg.t_max},
          {"kraus_mode", std::string(to_string(cfg.kraus_mode))},
          {"backend", std::string(to_string(cfg.backend))},
          {"tol", round12(cfg.tol)},
          {"record_stride", cfg.record_stride},
          {"seed", seed}};
}

/// Parses the JSON config. Unknown keys are rejected.
inline RunManifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  static const std::vector<std::string> known{"n", "p", "coin_init", "t_max", "kraus_mode",
                                              "backend", "tol", "record_stride", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  }
  RunManifest m;
  try {
    WalkConfig& c = m.config;
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("p")) c.p = j.at("p").get<double>();
    if (j.contains("t_max")) c.t_max = j.at("t_max").get<int>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("record_stride")) c.record_stride = j.at("record_stride").get<int>();
    if (j.contains("kraus_mode")) c.kraus_mode = parse_kraus_mode(j.at("kraus_mode").get<std::string>());
    if (j.contains("backend")) c.backend = parse_backend(j.at("backend").get<std::string>());
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("coin_init")) {
      const auto& arr = j.at("coin_init");
      if (!arr.is_array() || arr.size() != kCoinDim) {
        throw Error(ErrorCode::InvalidArgument, "coin_init must hold 4 [re, im] pairs");
      }
      for (std::size_t i = 0; i < kCoinDim; ++i) {
        const auto& pair = arr.at(i);
        if (!pair.is_array() || pair.size() != 2) throw Error(ErrorCode::InvalidArgument, "coin_init entry must be [re, im]");
        c.coin_init[i] = cplx{pair.at(0).get<double>(), pair.at(1).get<double>()};
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  return m;
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config parse: ") + e.what());
  }
  return manifest_from_json(j);
}

inline std::string header_line(const RunManifest& m) {
  return std::string("# schema=") + std::string(kSchemaVersion) + " seed=" + std::to_string(m.seed) +
         " config=" + config_to_json(m.config, m.seed).dump();
}

namespace detail {

inline std::ofstream open_output(const RunManifest& m, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(m.output_dir, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "cannot create output dir " + m.output_dir.string());
  std::ofstream out(m.output_dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + (m.output_dir / name).string());
  return out;
}

inline void write_json(const RunManifest& m, const std::string& name, const nlohmann::ordered_json& body) {
  auto out = open_output(m, name);
  out << body.dump(2) << '\n';
}

inline nlohmann::ordered_json envelope(const RunManifest& m, std::string_view command) {
  return {{"schema_version", std::string(kSchemaVersion)},
          {"command", std::string(command)},
          {"seed", m.seed},
          {"config", config_to_json(m.config, m.seed)}};
}

inline nlohmann::ordered_json quad_json(const Quadruple& q) { return {q.kx, q.ky, q.kxp, q.kyp}; }

inline nlohmann::ordered_json cplx_json(cplx z) { return {round12(z.real()), round12(z.imag())}; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

/// distribution.csv (t, x, y, p; sites with P > 1e-14) and invariants.log.
inline void cmd_evolve(const RunManifest& m) {
  const WalkConfig cfg = validate_config(m.config);
  auto dist_out = detail::open_output(m, "distribution.csv");
  auto inv_out = detail::open_output(m, "invariants.log");
  dist_out << header_line(m) << '\n' << "t,x,y,p\n";
  inv_out << header_line(m) << '\n';
  const bool both = cfg.backend == Backend::both;
  inv_out << (both ? "t,trace_error,hermiticity,min_eigenvalue,purity,backend_trace_distance\n"
                   : "t,trace_error,hermiticity,min_eigenvalue,purity\n");

  auto emit = [&](int t, const PositionDistribution& dist, const DensityCheck& chk, const double* backend_dist) {
    for (int x = 0; x < cfg.n; ++x)
      for (int y = 0; y < cfg.n; ++y) {
        const double pr = dist.at(x, y);
        if (pr > 1e-14) dist_out << t << ',' << x << ',' << y << ',' << fmt(pr) << '\n';
      }
    inv_out << t << ',' << fmt(chk.trace_error) << ',' << fmt(chk.hermiticity) << ',' << fmt(chk.min_eigenvalue) << ','
            << fmt(chk.purity);
    if (backend_dist != nullptr) inv_out << ',' << fmt(*backend_dist);
    inv_out << '\n';
  };

  if (cfg.backend == Backend::fourier) {
    evolve_blocks(cfg, false, [&](int t, const FourierBlockSet& bs) {
      emit(t, fourier_position_distribution(bs), check_density(momentum_density(bs)), nullptr);
    });
    return;
  }
  if (both) {
    if (cfg.n > kReconstructMaxN) throw Error(ErrorCode::TooLarge, "backend=both reconstructs rho; needs N <= 8");
    std::vector<FourierBlockSet> blocks;
    evolve_blocks(cfg, false, [&](int, const FourierBlockSet& bs) { blocks.push_back(bs); });
    std::size_t i = 0;
    evolve(cfg, [&](int t, const DensityOperator& rho) {
      const double d = trace_norm_distance(rho, reconstruct_full_rho(blocks.at(i++)));
      emit(t, position_distribution(rho), check_density(rho), &d);
    });
    return;
  }
  evolve(cfg, [&](int t, const DensityOperator& rho) { emit(t, position_distribution(rho), check_density(rho), nullptr); });
}

/// entropy.csv (t, s_total, s_coin, s_walker, mutual_info), nats.
inline void cmd_entropy(const RunManifest& m) {
  const EntropyTrace trace = entropy_trace(m.config);
  auto out = detail::open_output(m, "entropy.csv");
  out << header_line(m) << '\n' << "t,s_total,s_coin,s_walker,mutual_info\n";
  for (const auto& pt : trace.points) {
    out << pt.t << ',' << fmt(pt.s_total) << ',' << fmt(pt.s_coin) << ',' << fmt(pt.s_walker) << ','
        << fmt(pt.mutual_info) << '\n';
  }
}

inline nlohmann::ordered_json prop1_json(const SpectralReport& rep) {
  nlohmann::ordered_json minus = nlohmann::ordered_json::array();
  nlohmann::ordered_json other = nlohmann::ordered_json::array();
  for (const auto& u : rep.unit_circle) {
    nlohmann::ordered_json row{{"quadruple", detail::quad_json(u.quadruple)}, {"lambda", detail::cplx_json(u.lambda)}};
    if (u.kind == UnitEigenvalue::Kind::minus_one) minus.push_back(row);
    if (u.kind == UnitEigenvalue::Kind::other) other.push_back(row);
  }
  return {{"n", rep.n},
          {"p", round12(rep.p)},
          {"modulus_tol", rep.modulus_tol},
          {"max_modulus", round12(rep.max_modulus)},
          {"modulus_violations", rep.modulus_violations},
          {"contraction_holds", rep.contraction_holds},
          {"sub_unit_radius", round12(rep.sub_unit_radius)},
          {"plus_one_count", rep.plus_one_count},
          {"plus_one_exactly_diagonal_simple", rep.plus_one_exactly_diagonal_simple},
          {"minus_one_count", rep.minus_one_count},
          {"minus_one_only_at_quarter", rep.minus_one_only_at_quarter},
          {"minus_one_at_all_quarter", rep.minus_one_at_all_quarter},
          {"minus_one_at_half", rep.minus_one_at_half},
          {"other_unit_count", rep.other_unit_count},
          {"minus_one_findings", minus},
          {"other_unit_findings", other},
          {"violations", rep.violations}};
}

inline nlohmann::ordered_json factorization_json(const FactorizationReport& rep) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"quadruple", detail::quad_json(r.quadruple)},
                    {"tensor_distance", round12(r.tensor_distance)},
                    {"f4_x_distance", round12(r.f4_x_distance)},
                    {"f4_y_distance", round12(r.f4_y_distance)}});
  }
  return {{"n", rep.n},
          {"p", round12(rep.p)},
          {"match_tol", rep.match_tol},
          {"sampled", rep.rows.size()},
          {"tensor_matches", rep.tensor_matches},
          {"f4_matches", rep.f4_matches},
          {"max_tensor_distance", round12(rep.max_tensor_distance)},
          {"max_f4_distance", round12(rep.max_f4_distance)},
          {"rows", rows}};
}

inline nlohmann::ordered_json contraction_json(const ContractionReport& rep) {
  return {{"quadruple", detail::quad_json(rep.quadruple)},
          {"p", round12(rep.p)},
          {"trials", rep.trials},
          {"seed", rep.seed},
          {"violations", rep.violations},
          {"max_ratio", round12(rep.max_ratio)},
          {"max_equality_defect", round12(rep.max_equality_defect)},
          {"equality_expected", rep.equality_expected},
          {"equality_holds", rep.equality_holds}};
}

inline nlohmann::ordered_json block_limits_json(const BlockLimitReport& rep) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"quadruple", detail::quad_json(r.quadruple)},
                    {"kind", std::string(to_string(r.kind))},
                    {"claimed", r.claimed},
                    {"distance", round12(r.distance)},
                    {"distance_prev", round12(r.distance_prev)},
                    {"sign_corrected_diag", round12(r.sign_corrected_diag)},
                    {"sign_corrected_diag_prev", round12(r.sign_corrected_diag_prev)},
                    {"max_offdiag", round12(r.max_offdiag)},
                    {"within_tol", r.within_tol}});
  }
  return {{"n", rep.n}, {"p", round12(rep.p)}, {"t_max", rep.t_max}, {"tol", rep.tol}, {"rows", rows}};
}

/// Contraction audits at a fixed set of quadruples, seeded from the manifest.
inline nlohmann::ordered_json contraction_suite(const RunManifest& m, int trials) {
  const int n = m.config.n;
  const std::vector<Quadruple> quads{{0, 0, 0, 0}, {0, 0, 1, 0}, {1, 1 % n, n - 1, 0}};
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  std::uint64_t seed = m.seed;
  for (const auto& q : quads) {
    arr.push_back(contraction_json(audit_contraction(trials, m.config.p, q, n, seed)));
    ++seed;
  }
  return arr;
}

/// spectrum.csv (16 rows per quadruple) and audit_report.json.
inline void cmd_spectrum(const RunManifest& m) {
  WalkConfig cfg = m.config;
  cfg.backend = Backend::fourier;
  cfg = validate_config(cfg);
  const SpectralReport rep = audit_proposition1(cfg.n, cfg.p);
  auto out = detail::open_output(m, "spectrum.csv");
  out << header_line(m) << '\n' << "kx,ky,kxp,kyp,re_lambda,im_lambda,modulus\n";
  for (const auto& qs : rep.spectra)
    for (const cplx& l : qs.eigenvalues) {
      const Quadruple& q = qs.quadruple;
      out << q.kx << ',' << q.ky << ',' << q.kxp << ',' << q.kyp << ',' << fmt(l.real()) << ',' << fmt(l.imag()) << ','
          << fmt(std::abs(l)) << '\n';
    }
  auto body = detail::envelope(m, "spectrum");
  body["proposition1"] = prop1_json(rep);
  body["factorization"] = factorization_json(audit_factorization(cfg.n, cfg.p, sample_quadruples(cfg.n)));
  body["contraction"] = contraction_suite(m, 1000);
  detail::write_json(m, "audit_report.json", body);
}

/// audit_report.json with every claim audit, without the raw spectrum.
inline void cmd_audit(const RunManifest& m) {
  WalkConfig cfg = m.config;
  cfg.backend = Backend::fourier;
  cfg = validate_config(cfg);
  auto body = detail::envelope(m, "audit");
  body["proposition1"] = prop1_json(audit_proposition1(cfg.n, cfg.p));
  body["factorization"] = factorization_json(audit_factorization(cfg.n, cfg.p, sample_quadruples(cfg.n)));
  body["contraction"] = contraction_suite(m, 1000);
  if (cfg.p > 0.0 && cfg.p < 1.0) {
    const int t = cfg.t_max > 0 ? cfg.t_max : 2000;
    body["block_limits"] = block_limits_json(audit_block_limits(cfg.n, cfg.p, t, 1e-3, cfg.coin_init));
  }
  const KrausFamily literal = build_kraus(cfg.p, KrausMode::paper_literal);
  body["paper_literal_completeness_defect"] = round12(max_abs(literal.completeness_defect()));
  detail::write_json(m, "audit_report.json", body);
}

inline nlohmann::ordered_json limits_json(const RunManifest& m, const LimitReport& r) {
  auto body = detail::envelope(m, "limits");
  body["t_long"] = r.t_long;
  body["gap_horizon"] = r.horizon;
  body["sub_unit_radius"] = round12(r.sub_unit_radius);
  body["max_offdiag"] = round12(r.max_offdiag);
  body["paper_diag"] = round12(r.paper_diag);
  body["paper_diag_total"] = round12(r.paper_diag_total);
  body["forced_diag"] = round12(r.forced_diag);
  body["forced_diag_support"] = round12(r.forced_diag_support);
  body["measured_diag"] = round12(r.measured_diag);
  body["measured_diag_min"] = round12(r.measured_diag_min);
  body["measured_diag_max"] = round12(r.measured_diag_max);
  body["diag_relative_spread"] = round12(r.diag_relative_spread);
  body["support_size"] = r.support_size;
  body["paper_entropy"] = round12(r.paper_entropy);
  body["support_entropy"] = round12(r.support_entropy);
  body["full_space_entropy"] = round12(r.full_space_entropy);
  body["measured_entropy"] = round12(r.measured_entropy);
  body["s_coin"] = round12(r.s_coin);
  body["s_walker"] = round12(r.s_walker);
  body["mutual_info"] = round12(r.mutual_info);

  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  table.push_back({{"quantity", "diagonal_limit"},
                   {"paper", round12(r.paper_diag)},
                   {"forced", round12(r.forced_diag)},
                   {"measured", round12(r.measured_diag)}});
  table.push_back({{"quantity", "entropy_limit"},
                   {"paper", round12(r.paper_entropy)},
                   {"forced", round12(r.support_entropy)},
                   {"measured", round12(r.measured_entropy)}});
  table.push_back({{"quantity", "mutual_information_limit"}, {"paper", 0.0}, {"forced", 0.0}, {"measured", round12(r.mutual_info)}});
  body["comparison"] = table;

  nlohmann::ordered_json sites = nlohmann::ordered_json::array();
  for (const auto& s : r.support_sites) sites.push_back({s.x, s.y, round12(s.mass)});
  body["support_parity"] = {{"t", r.t_long},
                            {"occupied_sites", r.support_sites.size()},
                            {"x_plus_y_equals_t_mod_2", r.parity_single_step_rule},
                            {"t_minus_x_and_t_minus_y_even", r.parity_dual_rule},
                            {"sites", sites}};
  return body;
}

/// limits.json; t_long = config t_max, or the gap horizon when t_max is 0.
inline void cmd_limits(const RunManifest& m) {
  const LimitReport r = limit_report(m.config, m.config.t_max);
  detail::write_json(m, "limits.json", limits_json(m, r));
}

inline void run(const RunManifest& m) {
  switch (m.command) {
    case Command::evolve: cmd_evolve(m); break;
    case Command::entropy: cmd_entropy(m); break;
    case Command::spectrum: cmd_spectrum(m); break;
    case Command::audit: cmd_audit(m); break;
    case Command::limits: cmd_limits(m); break;
  }
}

}  // namespace qwalk::cli
