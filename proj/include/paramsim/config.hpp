// Strict key-value configuration and the molecule coefficient table.
//
// Config files are plain text, one `key = value` per line, '#' comments.
// Keys are dotted paths with optional [index] segments and mandatory unit
// suffixes on physical quantities (_ghz, _mhz, _phi0, _us, _ps, _rad).
// Unknown keys are rejected; validation reports every violation at once.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paramsim/adiabatic.hpp"
#include "paramsim/device.hpp"
#include "paramsim/dynamics.hpp"
#include "paramsim/types.hpp"

namespace paramsim {

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool log = false;

  std::vector<double> values() const;
};

struct RunConfig {
  DeviceParams device;
  double drive_form_is_cosine = false;
  std::vector<double> drive_amp;    // rad/s, optional manual drive amplitudes
  std::vector<double> drive_phase;  // rad
  std::vector<Tone> explicit_tones;

  double protocol_t = 0.0;      // seconds
  double eps0 = 2.5 * MHz;
  bool protocol_model_full = false;
  bool protocol_mode_lindblad = false;
  bool calibrate = false;
  bool full_lindblad = false;

  LindbladSpec dissipation;

  std::optional<SweepRange> sweep_delta1;
  std::optional<SweepRange> sweep_delta2;
  std::optional<SweepRange> sweep_t_us;
  std::optional<SweepRange> sweep_tcoh_us;

  double gate_step = 1.0 * ps;
  double gate_periods = 2.2;

  std::optional<double> anneal_r_angstrom;
  std::string molecule_table_path;
  double scale_mha_per_mhz = 1.0;

  std::string output_dir = "out";
  std::string config_hash;
  std::string raw_text;
  std::vector<std::string> warnings;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");

// FNV-1a 64-bit over the raw config bytes, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

struct MoleculeRow {
  double r_angstrom = 0.0;
  double a_y = 0.0;  // rad/s
  double j_x = 0.0;
  double j_y = 0.0;
};

struct MoleculeTable {
  std::vector<MoleculeRow> rows;
  double scale_mha_per_mhz = 1.0;

  // Header row R_angstrom,Ay_mhz,Jx_mhz,Jy_mhz is mandatory; R must be
  // strictly increasing and every value finite.
  static MoleculeTable load_csv(const std::string& path);
  const MoleculeRow& row_near(double r_angstrom, double tol = 1e-6) const;
};

}  // namespace paramsim
