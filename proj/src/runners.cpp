#include "paramsim/runners.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

#include <json.hpp>

#include "paramsim/adiabatic.hpp"
#include "paramsim/errors.hpp"
#include "paramsim/gatebench.hpp"
#include "paramsim/parallel.hpp"
#include "paramsim/swt.hpp"

namespace paramsim {

namespace {

using nlohmann::json;

std::string format_number(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

double to_mhz(double angular) { return angular / MHz; }
double to_ghz(double angular) { return angular / GHz; }

struct CsvWriter {
  explicit CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out(path) {
    if (!out) throw ConfigError("cannot write '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
      out << (i ? "," : "") << header[i];
    out << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  }
  std::ofstream out;
};

struct PointStatus {
  bool ok = false;
  std::string error;
  double wall_ms = 0.0;
  json data;
};

class Manifest {
 public:
  Manifest(const std::string& subcommand, const RunConfig& cfg, const CliOptions& opts) {
    data_["subcommand"] = subcommand;
    data_["config_hash"] = cfg.config_hash;
    data_["config_echo"] = cfg.raw_text;
    data_["warnings"] = cfg.warnings;
    data_["workers"] = opts.workers;
    data_["versions"] = {{"paramsim", "1.0.0"},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                       std::to_string(EIGEN_MINOR_VERSION)}};
    start_ = std::chrono::steady_clock::now();
  }
  void set(const std::string& key, json value) { data_[key] = std::move(value); }
  void add_points(const std::vector<PointStatus>& points) {
    json list = json::array();
    int failures = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      json p;
      p["index"] = i;
      p["status"] = points[i].ok ? "ok" : "error";
      p["wall_ms"] = points[i].wall_ms;
      if (!points[i].error.empty()) p["error"] = points[i].error;
      if (!points[i].data.is_null()) p["point"] = points[i].data;
      if (!points[i].ok) ++failures;
      list.push_back(std::move(p));
    }
    data_["points"] = std::move(list);
    data_["failed_points"] = failures;
  }
  void write(const std::string& path) {
    const auto elapsed = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    data_["total_wall_ms"] = elapsed;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << data_.dump(2) << "\n";
  }

 private:
  json data_;
  std::chrono::steady_clock::time_point start_;
};

template <typename Fn>
PointStatus timed_point(Fn&& fn) {
  PointStatus status;
  const auto start = std::chrono::steady_clock::now();
  try {
    status.data = fn();
    status.ok = true;
  } catch (const std::exception& e) {
    status.error = e.what();
  }
  status.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  return status;
}

int finalize(const std::vector<PointStatus>& points) {
  const auto failures =
      std::count_if(points.begin(), points.end(), [](const auto& p) { return !p.ok; });
  if (!points.empty() && failures == static_cast<long>(points.size()))
    return exit_numerical_error;
  return exit_ok;
}

// ---------------------------------------------------------------------------
// couplings
// ---------------------------------------------------------------------------

int run_couplings(const RunConfig& cfg, const CliOptions& opts, const std::string& out_dir) {
  struct Point {
    double delta1, delta2;
  };
  std::vector<Point> grid;
  if (cfg.sweep_delta1 && cfg.sweep_delta2) {
    for (const double d1 : cfg.sweep_delta1->values())
      for (const double d2 : cfg.sweep_delta2->values()) grid.push_back({d1, d2});
  } else if (cfg.explicit_tones.size() == 2) {
    grid.push_back({cfg.explicit_tones[0].delta, cfg.explicit_tones[1].delta});
  } else {
    throw ConfigError(
        "couplings needs sweep.delta1_phi0 and sweep.delta2_phi0 (or two explicit tones)");
  }

  std::vector<PointStatus> points(grid.size());
  parallel_indexed(grid.size(), opts.workers, [&](std::size_t i) {
    points[i] = timed_point([&]() -> json {
      const auto res = resonant_modulation(cfg.device, grid[i].delta1, grid[i].delta2,
                                           SwtOrder::harmonic_second);
      return {{"delta1", grid[i].delta1},
              {"delta2", grid[i].delta2},
              {"omega_x_mhz", to_mhz(res.eff.omega_x())},
              {"omega_y_mhz", to_mhz(res.eff.omega_y())},
              {"omega_bar1_ghz", to_ghz(res.omega_bar[0])},
              {"omega_bar2_ghz", to_ghz(res.omega_bar[1])}};
    });
  });

  CsvWriter csv(out_dir + "/couplings.csv",
                {"config_hash", "delta1_phi0", "delta2_phi0", "omega_x_mhz", "omega_y_mhz",
                 "omega_bar1_ghz", "omega_bar2_ghz"});
  for (const auto& p : points) {
    if (!p.ok) continue;
    csv.row({cfg.config_hash, format_number(p.data["delta1"]),
             format_number(p.data["delta2"]), format_number(p.data["omega_x_mhz"]),
             format_number(p.data["omega_y_mhz"]), format_number(p.data["omega_bar1_ghz"]),
             format_number(p.data["omega_bar2_ghz"])});
  }
  Manifest manifest("couplings", cfg, opts);
  manifest.add_points(points);
  manifest.write(out_dir + "/couplings_manifest.json");
  return finalize(points);
}

// ---------------------------------------------------------------------------
// gate
// ---------------------------------------------------------------------------

int run_gate(const RunConfig& cfg, const CliOptions& opts, const std::string& out_dir) {
  if (!cfg.sweep_delta1) throw ConfigError("gate needs sweep.delta1_phi0");
  const auto delta1_values = cfg.sweep_delta1->values();
  const ModelKind kind = ModelKind::full;

  std::vector<PointStatus> points(delta1_values.size());
  parallel_indexed(delta1_values.size(), opts.workers, [&](std::size_t i) {
    points[i] = timed_point([&]() -> json {
      const double delta1 = delta1_values[i];
      const double delta2 = ising_delta2(cfg.device, delta1);
      const auto gate = prepare_gate_modulation(cfg.device, delta1, delta2, kind);
      const auto extraction =
          extract_coupling(cfg.device, gate, kind, cfg.gate_step, cfg.gate_periods);
      const auto bench = run_xx_gate(cfg.device, gate, kind, cfg.gate_step);
      return {{"delta1", delta1},
              {"delta2", delta2},
              {"omega_x_extracted_mhz", to_mhz(extraction.omega_coupling)},
              {"omega_x_first_mhz", to_mhz(gate.first_order.omega_x())},
              {"omega_x_second_mhz", to_mhz(gate.second_order.omega_x())},
              {"contrast", extraction.contrast},
              {"infidelity", bench.infidelity},
              {"gate_time_us", bench.gate_time / us},
              {"max_missing_weight", bench.fidelity.max_missing_weight}};
    });
  });

  CsvWriter csv(out_dir + "/gate.csv",
                {"config_hash", "delta1_phi0", "delta2_phi0", "omega_x_extracted_mhz",
                 "omega_x_first_mhz", "omega_x_second_mhz", "contrast", "infidelity",
                 "gate_time_us"});
  for (const auto& p : points) {
    if (!p.ok) continue;
    csv.row({cfg.config_hash, format_number(p.data["delta1"]),
             format_number(p.data["delta2"]),
             format_number(p.data["omega_x_extracted_mhz"]),
             format_number(p.data["omega_x_first_mhz"]),
             format_number(p.data["omega_x_second_mhz"]), format_number(p.data["contrast"]),
             format_number(p.data["infidelity"]), format_number(p.data["gate_time_us"])});
  }
  Manifest manifest("gate", cfg, opts);
  manifest.add_points(points);
  manifest.write(out_dir + "/gate_manifest.json");
  return finalize(points);
}

// ---------------------------------------------------------------------------
// anneal family
// ---------------------------------------------------------------------------

RunOptions anneal_run_options(const RunConfig& cfg, const CliOptions& opts) {
  RunOptions run;
  bool model_full = cfg.protocol_model_full;
  if (opts.model_full) model_full = *opts.model_full;
  run.model = model_full ? ProtocolModel::full : ProtocolModel::effective;
  run.mode = cfg.protocol_mode_lindblad ? RunMode::lindblad : RunMode::unitary;
  run.noise = cfg.dissipation;
  if (run.model == ProtocolModel::full && run.mode == RunMode::lindblad &&
      !(cfg.full_lindblad || opts.full_lindblad))
    throw ConfigError(
        "full-model Lindblad runs are expensive; pass --full-lindblad (or set "
        "protocol.full_lindblad = true) to confirm");
  return run;
}

ScheduleOptions anneal_schedule_options(const RunConfig& cfg, const CliOptions& opts,
                                        bool needs_full) {
  ScheduleOptions sched;
  sched.eps0 = cfg.eps0;
  sched.with_full_frequencies = needs_full;
  sched.calibrate = cfg.calibrate || opts.calibrate;
  return sched;
}

json anneal_row_json(const MoleculeRow& row, double t_total, const AnnealResult& result,
                     double scale_mha_per_mhz) {
  const double delta_e_mhz = to_mhz(result.delta_e);
  return {{"r_angstrom", row.r_angstrom},
          {"t_us", t_total / us},
          {"energy_mhz", to_mhz(result.energy)},
          {"exact_mhz", to_mhz(result.exact_ground_energy)},
          {"delta_e_mhz", delta_e_mhz},
          {"abs_delta_e_mha", std::abs(delta_e_mhz) * scale_mha_per_mhz},
          {"fidelity", result.fidelity},
          {"infidelity", 1.0 - result.fidelity},
          {"leakage", result.leakage},
          {"coupler_population", result.coupler_population},
          {"min_gap_mhz", to_mhz(result.min_gap)},
          {"inv_min_gap_us", (result.min_gap > 0) ? (1.0 / result.min_gap) / us : 0.0}};
}

const std::vector<std::string> anneal_csv_header = {
    "config_hash", "r_angstrom",  "t_us",        "energy_mhz",
    "exact_mhz",   "delta_e_mhz", "abs_delta_e_mha", "fidelity",
    "infidelity",  "leakage",     "min_gap_mhz", "inv_min_gap_us"};

void anneal_csv_row(CsvWriter& csv, const std::string& hash, const json& d) {
  csv.row({hash, format_number(d["r_angstrom"]), format_number(d["t_us"]),
           format_number(d["energy_mhz"]), format_number(d["exact_mhz"]),
           format_number(d["delta_e_mhz"]), format_number(d["abs_delta_e_mha"]),
           format_number(d["fidelity"]), format_number(d["infidelity"]),
           format_number(d["leakage"]), format_number(d["min_gap_mhz"]),
           format_number(d["inv_min_gap_us"])});
}

int run_anneal(const RunConfig& cfg, const CliOptions& opts, const std::string& out_dir) {
  if (cfg.molecule_table_path.empty() || !cfg.anneal_r_angstrom || !(cfg.protocol_t > 0))
    throw ConfigError("anneal needs molecule.table, anneal.r_angstrom and protocol.t_us");
  const auto table = MoleculeTable::load_csv(cfg.molecule_table_path);
  const auto& row = table.row_near(*cfg.anneal_r_angstrom);
  const auto run_opts = anneal_run_options(cfg, opts);
  const auto sched_opts =
      anneal_schedule_options(cfg, opts, run_opts.model == ProtocolModel::full);

  std::vector<PointStatus> points(1);
  points[0] = timed_point([&]() -> json {
    const auto target = TargetHamiltonian::molecule_row(row.a_y, row.j_x, row.j_y);
    const auto schedule = build_schedule(target, cfg.device, cfg.protocol_t, sched_opts);
    const auto result = run_protocol(schedule, cfg.device, run_opts);

    // Fig.-4-style diagnostic track of the effective parameters.
    CsvWriter track(out_dir + "/anneal_track.csv",
                    {"config_hash", "s", "omega_x_mhz", "omega_y_mhz", "epsilon1_mhz",
                     "epsilon2_mhz", "f1_mhz", "f2_mhz"});
    for (const auto& p : schedule.track) {
      track.row({cfg.config_hash, format_number(p.s), format_number(to_mhz(p.omega_x)),
                 format_number(to_mhz(p.omega_y)), format_number(to_mhz(p.epsilon1)),
                 format_number(to_mhz(p.epsilon2)),
                 format_number(to_mhz(schedule.drive_amp_final[0] * p.s)),
                 format_number(to_mhz(schedule.drive_amp_final[1] * p.s))});
    }
    return anneal_row_json(row, cfg.protocol_t, result, cfg.scale_mha_per_mhz);
  });

  CsvWriter csv(out_dir + "/anneal.csv", anneal_csv_header);
  if (points[0].ok) anneal_csv_row(csv, cfg.config_hash, points[0].data);
  Manifest manifest("anneal", cfg, opts);
  manifest.add_points(points);
  manifest.write(out_dir + "/anneal_manifest.json");
  return finalize(points);
}

int run_anneal_sweep(const RunConfig& cfg, const CliOptions& opts,
                     const std::string& out_dir) {
  if (cfg.molecule_table_path.empty() || !(cfg.protocol_t > 0))
    throw ConfigError("anneal-sweep needs molecule.table and protocol.t_us");
  const auto table = MoleculeTable::load_csv(cfg.molecule_table_path);
  const auto run_opts = anneal_run_options(cfg, opts);
  const auto sched_opts =
      anneal_schedule_options(cfg, opts, run_opts.model == ProtocolModel::full);

  std::vector<PointStatus> points(table.rows.size());
  parallel_indexed(table.rows.size(), opts.workers, [&](std::size_t i) {
    points[i] = timed_point([&]() -> json {
      const auto& row = table.rows[i];
      const auto target = TargetHamiltonian::molecule_row(row.a_y, row.j_x, row.j_y);
      const auto schedule = build_schedule(target, cfg.device, cfg.protocol_t, sched_opts);
      const auto result = run_protocol(schedule, cfg.device, run_opts);
      return anneal_row_json(row, cfg.protocol_t, result, cfg.scale_mha_per_mhz);
    });
  });

  CsvWriter csv(out_dir + "/anneal_sweep.csv", anneal_csv_header);
  for (const auto& p : points)
    if (p.ok) anneal_csv_row(csv, cfg.config_hash, p.data);
  Manifest manifest("anneal-sweep", cfg, opts);
  manifest.add_points(points);
  manifest.write(out_dir + "/anneal_sweep_manifest.json");
  return finalize(points);
}

int run_topt_scan(const RunConfig& cfg, const CliOptions& opts, const std::string& out_dir) {
  if (cfg.molecule_table_path.empty() || !cfg.anneal_r_angstrom || !cfg.sweep_t_us)
    throw ConfigError("topt-scan needs molecule.table, anneal.r_angstrom and sweep.t_us");
  if (cfg.dissipation.empty())
    throw ConfigError("topt-scan needs a dissipation section");
  const auto table = MoleculeTable::load_csv(cfg.molecule_table_path);
  const auto& row = table.row_near(*cfg.anneal_r_angstrom);
  const auto target = TargetHamiltonian::molecule_row(row.a_y, row.j_x, row.j_y);

  std::vector<double> t_values;
  for (const double t_us_value : cfg.sweep_t_us->values()) t_values.push_back(t_us_value * us);

  ScheduleOptions sched_opts;
  sched_opts.eps0 = cfg.eps0;
  sched_opts.with_full_frequencies = false;
  const ProtocolSchedule base = build_schedule(target, cfg.device, t_values.front(),
                                               sched_opts);

  std::vector<PointStatus> points(t_values.size());
  parallel_indexed(t_values.size(), opts.workers, [&](std::size_t i) {
    points[i] = timed_point([&]() -> json {
      RunOptions run;
      run.model = ProtocolModel::effective;
      run.mode = RunMode::lindblad;
      run.noise = cfg.dissipation;
      const auto result =
          run_protocol(base.with_total_time(t_values[i]), cfg.device, run);
      return anneal_row_json(row, t_values[i], result, cfg.scale_mha_per_mhz);
    });
  });

  CsvWriter csv(out_dir + "/topt_scan.csv", anneal_csv_header);
  double best_f = -1.0, t_opt = 0.0;
  for (const auto& p : points) {
    if (!p.ok) continue;
    anneal_csv_row(csv, cfg.config_hash, p.data);
    if (p.data["fidelity"].get<double>() > best_f) {
      best_f = p.data["fidelity"].get<double>();
      t_opt = p.data["t_us"].get<double>();
    }
  }
  Manifest manifest("topt-scan", cfg, opts);
  manifest.add_points(points);
  manifest.set("t_opt_us", t_opt);
  manifest.set("max_fidelity", best_f);
  manifest.write(out_dir + "/topt_scan_manifest.json");
  return finalize(points);
}

int run_coherence_sweep(const RunConfig& cfg, const CliOptions& opts,
                        const std::string& out_dir) {
  if (cfg.molecule_table_path.empty() || !cfg.anneal_r_angstrom || !cfg.sweep_tcoh_us ||
      !(cfg.protocol_t > 0))
    throw ConfigError(
        "coherence-sweep needs molecule.table, anneal.r_angstrom, sweep.tcoh_us and "
        "protocol.t_us");
  const auto table = MoleculeTable::load_csv(cfg.molecule_table_path);
  const auto& row = table.row_near(*cfg.anneal_r_angstrom);
  const auto target = TargetHamiltonian::molecule_row(row.a_y, row.j_x, row.j_y);

  std::vector<double> t_coh;
  for (const double v : cfg.sweep_tcoh_us->values()) t_coh.push_back(v * us);

  ScheduleOptions sched_opts;
  sched_opts.eps0 = cfg.eps0;
  const auto sweep = coherence_sweep(target, cfg.device, cfg.protocol_t, t_coh, sched_opts,
                                     {}, opts.workers);

  CsvWriter csv(out_dir + "/coherence_sweep.csv",
                {"config_hash", "variant", "tcoh_us", "delta_e_mhz", "abs_delta_e_mha",
                 "fidelity"});
  json crossings = json::object();
  for (std::size_t v = 0; v < sweep.variants.size(); ++v) {
    double crossing_us = -1.0;
    for (std::size_t i = 0; i < t_coh.size(); ++i) {
      const double de_mhz = to_mhz(sweep.delta_e[v][i]);
      const double de_mha = std::abs(de_mhz) * cfg.scale_mha_per_mhz;
      csv.row({cfg.config_hash, sweep.variants[v].name, format_number(t_coh[i] / us),
               format_number(de_mhz), format_number(de_mha),
               format_number(sweep.fidelity[v][i])});
      if (crossing_us < 0 && de_mha <= 1.5) crossing_us = t_coh[i] / us;
    }
    crossings[sweep.variants[v].name] = crossing_us;
  }
  Manifest manifest("coherence-sweep", cfg, opts);
  manifest.set("chemical_accuracy_crossing_tcoh_us", crossings);
  manifest.add_points({});
  manifest.write(out_dir + "/coherence_sweep_manifest.json");
  return exit_ok;
}

}  // namespace

int run_subcommand(const std::string& name, const std::string& config_path,
                   const CliOptions& options) {
  try {
    const RunConfig cfg = parse_config(config_path);
    const std::string out_dir = options.out_dir.empty() ? cfg.output_dir : options.out_dir;
    std::filesystem::create_directories(out_dir);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

    if (name == "couplings") return run_couplings(cfg, options, out_dir);
    if (name == "gate") return run_gate(cfg, options, out_dir);
    if (name == "anneal") return run_anneal(cfg, options, out_dir);
    if (name == "anneal-sweep") return run_anneal_sweep(cfg, options, out_dir);
    if (name == "topt-scan") return run_topt_scan(cfg, options, out_dir);
    if (name == "coherence-sweep") return run_coherence_sweep(cfg, options, out_dir);
    std::cerr << "unknown subcommand '" << name << "'\n";
    return exit_validation_error;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation_error;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical_error;
  }
}

}  // namespace paramsim
