#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "qpos/losschannel.hpp"
#include "qpos/montecarlo.hpp"
#include "qpos/protocol.hpp"
#include "qpos/spectrum.hpp"
#include "qpos/states.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + out_path);
  file << content;
  if (!file) throw std::runtime_error("failed writing: " + out_path);
}

struct FamilyFlags {
  std::string family;
  int channels = 2;
  int photons_per_channel = 1;
  double mean_photons = 1.0;
  int entangled_channels = 1;
  int groups = 2;
  int photons_per_group = 2;
  double delta_omega = 1.0;
  double delta_Omega = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "state family: cl, en, un, pe, ge")
        ->required();
    cmd->add_option("--M", channels, "number of channels (photons for un/pe)");
    cmd->add_option("--N", photons_per_channel, "photons per channel (en)");
    cmd->add_option("--nbar", mean_photons, "mean photons per pulse (cl)");
    cmd->add_option("--Q", entangled_channels, "entangled channels (pe)");
    cmd->add_option("--G", groups, "photon groups (ge)");
    cmd->add_option("--K", photons_per_group, "photons per group (ge)");
    cmd->add_option("--delta-omega", delta_omega, "intra-group spread (ge)");
    cmd->add_option("--delta-Omega", delta_Omega, "carrier spread (ge)");
  }

  qpos::StateFamily build() const {
    if (family == "cl") return qpos::Classical{channels, mean_photons};
    if (family == "en") return qpos::MaxEntangled{channels, photons_per_channel};
    if (family == "un") return qpos::Unentangled{channels};
    if (family == "pe") return qpos::PartialEntangled{channels, entangled_channels};
    if (family == "ge")
      return qpos::GroupEntangled{
          groups, photons_per_group,
          qpos::GroupSpectrum{delta_Omega, delta_omega}};
    throw std::invalid_argument("unknown family: " + family);
  }
};

std::string csv_or_json(const std::string& format,
                        const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  if (format == "json") {
    std::string out = "[";
    for (size_t r = 0; r < rows.size(); ++r) {
      json obj = json::object();
      for (size_t c = 0; c < header.size(); ++c) obj[header[c]] = rows[r][c];
      out += (r ? ",\n" : "\n") + obj.dump();
    }
    out += "\n]\n";
    return out;
  }
  std::string out;
  for (size_t c = 0; c < header.size(); ++c)
    out += (c ? "," : "") + header[c];
  out += "\n";
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
    out += "\n";
  }
  return out;
}

// --------------------------------------------------------------------------
// accuracy
// --------------------------------------------------------------------------

int cmd_accuracy(const FamilyFlags& fam, const std::vector<double>& etas,
                 double dtau, long long runs, const std::string& format,
                 const std::string& out_path) {
  const qpos::StateFamily family = fam.build();
  const std::string code = qpos::family_code(family);
  std::vector<std::vector<std::string>> rows;
  for (double eta : etas) {
    const auto report = qpos::accuracy_report(family, eta, dtau, runs);
    rows.push_back({code,
                    std::to_string(fam.channels),
                    code == "en" ? std::to_string(fam.photons_per_channel) : "",
                    code == "pe" ? std::to_string(fam.entangled_channels) : "",
                    code == "ge" ? std::to_string(fam.groups) : "",
                    code == "ge" ? std::to_string(fam.photons_per_group) : "",
                    code == "cl" ? fmt(fam.mean_photons) : "",
                    fmt(eta), fmt(dtau), std::to_string(runs),
                    fmt(report.delta_t_per_run), fmt(report.delta_t_r_runs),
                    fmt(report.usable_run_fraction)});
  }
  emit(out_path,
       csv_or_json(format,
                   {"family", "M", "N", "Q", "G", "K", "nbar", "eta", "dtau",
                    "r", "delta_t_per_run", "delta_t_r_runs",
                    "usable_run_fraction"},
                   rows));
  return 0;
}

// --------------------------------------------------------------------------
// region-map and gain-surface sweeps
// --------------------------------------------------------------------------

struct EtaAxis {
  double min = 0.02, max = 1.0;
  int points = 50;
  std::string scale = "linear";

  void attach(CLI::App* cmd) {
    cmd->add_option("--eta-min", min, "lower efficiency bound");
    cmd->add_option("--eta-max", max, "upper efficiency bound");
    cmd->add_option("--eta-points", points, "grid points along eta");
    cmd->add_option("--eta-scale", scale, "linear or log")
        ->check(CLI::IsMember({"linear", "log"}));
  }

  std::vector<double> expand() const {
    if (points < 2) throw std::invalid_argument("eta axis: points must be >= 2");
    if (!(min > 0.0 && max <= 1.0 && min < max))
      throw std::invalid_argument("eta axis: need 0 < min < max <= 1");
    std::vector<double> values(points);
    for (int i = 0; i < points; ++i) {
      const double t = double(i) / (points - 1);
      values[i] = scale == "log"
                      ? min * std::pow(max / min, t)
                      : min + t * (max - min);
    }
    return values;
  }
};

int cmd_region_map(int m_min, int m_max, int m_step, const EtaAxis& axis,
                   int group_size, double ratio, const std::string& format,
                   const std::string& out_path) {
  if (m_step < 1 || m_min < 2 || m_max < m_min)
    throw std::invalid_argument("region-map: bad M range");
  const auto etas = axis.expand();
  std::vector<std::vector<std::string>> rows;
  for (int m = m_min; m <= m_max; m += m_step) {
    const double threshold = qpos::threshold_eta(m);
    for (double eta : etas) {
      const auto region = qpos::classify_region(m, eta, group_size, ratio);
      rows.push_back({std::to_string(m), fmt(eta),
                      fmt(qpos::gain_lambda(m, eta)), fmt(threshold),
                      region.label});
    }
  }
  emit(out_path, csv_or_json(
                     format, {"M", "eta", "lambda", "threshold", "region_label"},
                     rows));
  return 0;
}

int cmd_gain_surface(int m_min, int m_max, int m_step, const EtaAxis& axis,
                     const std::string& format, const std::string& out_path) {
  if (m_step < 1 || m_min < 1 || m_max < m_min)
    throw std::invalid_argument("gain-surface: bad M range");
  const auto etas = axis.expand();
  std::vector<int> ms;
  for (int m = m_min; m <= m_max; m += m_step) ms.push_back(m);

  std::vector<double> lambdas(ms.size() * etas.size());
#pragma omp parallel for schedule(static)
  for (long long idx = 0; idx < static_cast<long long>(lambdas.size()); ++idx) {
    const size_t i = static_cast<size_t>(idx);
    lambdas[i] = qpos::gain_lambda(ms[i / etas.size()], etas[i % etas.size()]);
  }

  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < lambdas.size(); ++i)
    rows.push_back({std::to_string(ms[i / etas.size()]),
                    fmt(etas[i % etas.size()]), fmt(lambdas[i])});
  emit(out_path, csv_or_json(format, {"M", "eta", "lambda"}, rows));
  return 0;
}

// --------------------------------------------------------------------------
// montecarlo
// --------------------------------------------------------------------------

int cmd_montecarlo(const FamilyFlags& fam, const std::vector<double>& etas,
                   double dtau, double true_offset, long long runs,
                   std::uint64_t seed, const std::string& format,
                   const std::string& out_path) {
  const qpos::StateFamily family = fam.build();
  const std::string code = qpos::family_code(family);
  std::vector<std::vector<std::string>> rows;
  std::uint64_t row_seed = seed;
  for (double eta : etas) {
    const auto batch =
        qpos::run_batch(family, eta, dtau, true_offset, runs, row_seed);
    const auto est = qpos::estimate(batch);
    rows.push_back({code,
                    std::to_string(fam.channels),
                    code == "en" ? std::to_string(fam.photons_per_channel) : "",
                    code == "pe" ? std::to_string(fam.entangled_channels) : "",
                    code == "ge" ? std::to_string(fam.groups) : "",
                    code == "ge" ? std::to_string(fam.photons_per_group) : "",
                    fmt(eta), std::to_string(runs),
                    std::to_string(est.runs_used), fmt(est.mean),
                    fmt(est.std_of_mean),
                    fmt(qpos::lossy_accuracy(family, eta, dtau))});
    ++row_seed;  // each sweep row gets its own stream block
  }
  emit(out_path,
       csv_or_json(format,
                   {"family", "M", "N", "Q", "G", "K", "eta", "runs",
                    "runs_used", "mean", "std_of_mean", "analytic_std"},
                   rows));
  return 0;
}

// --------------------------------------------------------------------------
// kraus-verify
// --------------------------------------------------------------------------

int cmd_kraus_verify(const std::vector<double>& etas, int dim,
                     const std::string& format, const std::string& out_path) {
  std::vector<std::vector<std::string>> rows;
  for (double eta : etas) {
    const auto ks = qpos::kraus_operators(eta, dim);
    // deterministic full-rank test state for the trace-preservation probe
    Eigen::VectorXcd psi(dim);
    for (int k = 0; k < dim; ++k) psi(k) = 1.0 / std::sqrt(double(k + 1));
    psi.normalize();
    const Eigen::MatrixXcd rho = psi * psi.adjoint();
    const double trace_err =
        std::abs(qpos::apply_loss_raw(rho, ks).trace().real() - 1.0);
    rows.push_back({fmt(eta), std::to_string(dim),
                    fmt(qpos::completeness_error(ks)),
                    fmt(qpos::beam_splitter_check(eta, dim)), fmt(trace_err)});
  }
  emit(out_path,
       csv_or_json(format,
                   {"eta", "dim", "completeness_error", "bs_deviation",
                    "trace_error"},
                   rows));
  return 0;
}

// --------------------------------------------------------------------------
// protocol
// --------------------------------------------------------------------------

json estimate_json(const qpos::Estimate& est) {
  return {{"mean", est.mean},
          {"std_of_mean", est.std_of_mean},
          {"runs_used", est.runs_used},
          {"runs_total", est.runs_total}};
}

int cmd_protocol(const std::string& mode, int channels, long long copies,
                 double eta, double dtau, double freq_bin,
                 const std::string& eve_name, double eve_fraction,
                 double distance, std::uint64_t seed,
                 const std::string& out_path) {
  qpos::RunRng rng(seed, 0);
  std::string out;

  if (mode == "one") {
    const auto result =
        qpos::run_protocol_one(channels, copies, eta, dtau, distance, rng);
    for (const auto& rec : result.copies) {
      json line = {{"type", "copy"},
                   {"index", rec.index},
                   {"complete", rec.complete}};
      if (rec.complete) {
        line["estimate"] = rec.estimate;
        line["bob_times"] = rec.bob_times;
      }
      out += line.dump() + "\n";
    }
    json summary = {{"type", "summary"},
                    {"mode", "one"},
                    {"copies", result.copies_total},
                    {"copies_used", result.copies_used}};
    if (result.estimate) summary["estimate"] = estimate_json(*result.estimate);
    out += summary.dump() + "\n";
  } else if (mode == "two") {
    qpos::EveConfig eve;
    eve.fraction = eve_fraction;
    if (eve_name == "none") eve.strategy = qpos::EveStrategy::None;
    else if (eve_name == "time") eve.strategy = qpos::EveStrategy::MeasureTime;
    else if (eve_name == "frequency")
      eve.strategy = qpos::EveStrategy::MeasureFrequency;
    else throw std::invalid_argument("unknown eve strategy: " + eve_name);

    if (freq_bin <= 0.0) freq_bin = 1.0 / (2.0 * dtau) / 8.0;
    const auto transcript = qpos::run_protocol_two(
        channels, copies, eta, dtau, freq_bin, eve, distance, rng);

    const auto basis_name = [](qpos::Basis b) {
      return b == qpos::Basis::Time ? "time" : "frequency";
    };
    for (const auto& rec : transcript.copies) {
      json line = {{"type", "copy"},
                   {"index", rec.index},
                   {"arrived", rec.arrived}};
      if (rec.arrived) {
        line["tampered"] = rec.tampered;
        line["alice_basis"] = basis_name(rec.alice_basis);
        line["bob_basis"] = basis_name(rec.bob_basis);
        line["sifted"] = rec.sifted;
        if (rec.freq_match) {
          line["alice_freq_bin"] = *rec.alice_freq_bin;
          line["bob_freq_bin"] = *rec.bob_freq_bin;
          line["freq_match"] = *rec.freq_match;
        }
        if (rec.alice_time) {
          line["alice_time"] = *rec.alice_time;
          line["bob_time_sum"] = *rec.bob_time_sum;
          line["broadcast"] =
              rec.broadcast == qpos::CopyRecord::Broadcast::Alice ? "alice"
                                                                  : "bob";
        }
      }
      out += line.dump() + "\n";
    }
    const auto verdict_name = [](qpos::Verdict v) {
      switch (v) {
        case qpos::Verdict::Clean: return "clean";
        case qpos::Verdict::EavesdropperDetected: return "eavesdropper_detected";
        default: return "inconclusive";
      }
    };
    json summary = {{"type", "summary"},
                    {"mode", "two"},
                    {"verdict", verdict_name(transcript.verdict)},
                    {"copies", copies},
                    {"n_checked", transcript.n_checked},
                    {"collision_prob", transcript.collision_prob},
                    {"predicted_detection", transcript.predicted_detection}};
    if (transcript.estimate)
      summary["estimate"] = estimate_json(*transcript.estimate);
    if (transcript.alice_estimate)
      summary["alice_estimate"] = estimate_json(*transcript.alice_estimate);
    if (transcript.bob_estimate)
      summary["bob_estimate"] = estimate_json(*transcript.bob_estimate);
    out += summary.dump() + "\n";
  } else {
    throw std::invalid_argument("protocol mode must be 'one' or 'two'");
  }

  emit(out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("QPOS_THREADS")) {
    const int n = std::atoi(env);
#ifdef _OPENMP
    if (n >= 1) omp_set_num_threads(n);
#else
    (void)n;
#endif
  }

  CLI::App app{"Entanglement-enhanced positioning simulator"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 1;
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "master seed for stochastic commands");

  // accuracy
  auto* acc = app.add_subcommand("accuracy", "analytic accuracy formulas");
  FamilyFlags acc_fam;
  acc_fam.attach(acc);
  std::vector<double> acc_etas{1.0};
  double acc_dtau = 1.0;
  long long acc_runs = 1;
  acc->add_option("--eta", acc_etas, "efficiency value(s), one row each");
  acc->add_option("--dtau", acc_dtau, "single-photon arrival-time std");
  acc->add_option("--r", acc_runs, "number of experimental runs");

  // region-map
  auto* reg = app.add_subcommand("region-map",
                                 "which state family wins where");
  int reg_m_min = 2, reg_m_max = 40, reg_m_step = 2, reg_k = 2;
  double reg_ratio = 2.0;
  EtaAxis reg_axis;
  reg->add_option("--M-min", reg_m_min, "smallest photon number");
  reg->add_option("--M-max", reg_m_max, "largest photon number");
  reg->add_option("--M-step", reg_m_step, "photon number step");
  reg->add_option("--K", reg_k, "photons per group");
  reg->add_option("--ratio", reg_ratio, "delta_omega^2 / delta_Omega^2");
  reg_axis.attach(reg);

  // gain-surface
  auto* gain = app.add_subcommand("gain-surface", "lambda over (M, eta)");
  int g_m_min = 1, g_m_max = 64, g_m_step = 1;
  EtaAxis gain_axis;
  gain_axis.min = 0.05;
  gain_axis.points = 20;
  gain->add_option("--M-min", g_m_min, "smallest photon number");
  gain->add_option("--M-max", g_m_max, "largest photon number");
  gain->add_option("--M-step", g_m_step, "photon number step");
  gain_axis.attach(gain);

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "seeded stochastic runs");
  FamilyFlags mc_fam;
  mc_fam.attach(mc);
  std::vector<double> mc_etas{1.0};
  double mc_dtau = 1.0, mc_offset = 0.0;
  long long mc_runs = 100000;
  mc->add_option("--eta", mc_etas, "efficiency value(s), one row each");
  mc->add_option("--dtau", mc_dtau, "single-photon arrival-time std");
  mc->add_option("--true-offset", mc_offset, "ground-truth arrival offset");
  mc->add_option("--runs", mc_runs, "experimental runs per row");

  // kraus-verify
  auto* kv = app.add_subcommand("kraus-verify",
                                "loss-channel construction cross-check");
  std::vector<double> kv_etas{0.1, 0.36, 0.5, 0.9, 1.0};
  int kv_dim = 6;
  kv->add_option("--eta", kv_etas, "efficiency value(s)");
  kv->add_option("--dim", kv_dim, "Fock truncation (photons + 1)");

  // protocol
  auto* proto = app.add_subcommand("protocol", "crypto-positioning session");
  std::string p_mode = "one", p_eve = "none";
  int p_channels = 2;
  long long p_copies = 1000;
  double p_eta = 1.0, p_dtau = 1.0, p_bin = 0.0, p_fraction = 1.0,
         p_distance = 0.0;
  proto->add_option("--mode", p_mode, "one or two")
      ->check(CLI::IsMember({"one", "two"}));
  proto->add_option("--M", p_channels, "photons per copy");
  proto->add_option("--copies", p_copies, "entangled copies in the session");
  proto->add_option("--eta", p_eta, "per-photon efficiency");
  proto->add_option("--dtau", p_dtau, "single-photon arrival-time std");
  proto->add_option("--freq-bin", p_bin,
                    "frequency comparison bin (default sigma_omega/8)");
  proto->add_option("--eve", p_eve, "none, time, or frequency");
  proto->add_option("--eve-fraction", p_fraction, "fraction intercepted");
  proto->add_option("--distance", p_distance, "true distance (time units)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*acc)
      return cmd_accuracy(acc_fam, acc_etas, acc_dtau, acc_runs, format,
                          out_path);
    if (*reg)
      return cmd_region_map(reg_m_min, reg_m_max, reg_m_step, reg_axis, reg_k,
                            reg_ratio, format, out_path);
    if (*gain)
      return cmd_gain_surface(g_m_min, g_m_max, g_m_step, gain_axis, format,
                              out_path);
    if (*mc)
      return cmd_montecarlo(mc_fam, mc_etas, mc_dtau, mc_offset, mc_runs, seed,
                            format, out_path);
    if (*kv) return cmd_kraus_verify(kv_etas, kv_dim, format, out_path);
    if (*proto)
      return cmd_protocol(p_mode, p_channels, p_copies, p_eta, p_dtau, p_bin,
                          p_eve, p_fraction, p_distance, seed, out_path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
