#include "paramsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "paramsim/errors.hpp"

namespace paramsim {

std::vector<double> SweepRange::values() const {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double w = static_cast<double>(i) / (count - 1);
    if (log) {
      out.push_back(start * std::pow(stop / start, w));
    } else {
      out.push_back(start + (stop - start) * w);
    }
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct RawEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Violations {
  std::vector<std::string> items;
  void add(const std::string& msg) { items.push_back(msg); }
  void raise_if_any(const std::string& origin) const {
    if (items.empty()) return;
    std::string joined = "invalid config " + origin + ":";
    for (const auto& item : items) joined += "\n  - " + item;
    throw ConfigError(joined);
  }
};

// Key pattern matching: literal segments plus [*] index wildcards.
bool match_key(const std::string& key, const std::string& pattern, std::vector<int>* indices) {
  std::size_t ki = 0, pi = 0;
  indices->clear();
  while (pi < pattern.size()) {
    if (pattern.compare(pi, 3, "[*]") == 0 && pattern[pi] == '[') {
      if (ki >= key.size() || key[ki] != '[') return false;
      const auto close = key.find(']', ki);
      if (close == std::string::npos) return false;
      const std::string num = key.substr(ki + 1, close - ki - 1);
      if (num.empty() ||
          !std::all_of(num.begin(), num.end(), [](char c) { return std::isdigit(c); }))
        return false;
      indices->push_back(std::stoi(num));
      ki = close + 1;
      pi += 3;
    } else {
      if (ki >= key.size() || key[ki] != pattern[pi]) return false;
      ++ki;
      ++pi;
    }
  }
  return ki == key.size();
}

bool parse_double(const std::string& text, double* out) {
  try {
    std::size_t pos = 0;
    *out = std::stod(text, &pos);
    return pos == text.size() && std::isfinite(*out);
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& text, int* out) {
  try {
    std::size_t pos = 0;
    *out = std::stoi(text, &pos);
    return pos == text.size();
  } catch (...) {
    return false;
  }
}

bool parse_bool(const std::string& text, bool* out) {
  if (text == "true") {
    *out = true;
    return true;
  }
  if (text == "false") {
    *out = false;
    return true;
  }
  return false;
}

bool parse_range(const std::string& text, SweepRange* out) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(trim(part));
  if (parts.size() != 3 && parts.size() != 4) return false;
  if (!parse_double(parts[0], &out->start) || !parse_double(parts[1], &out->stop)) return false;
  if (!parse_int(parts[2], &out->count) || out->count < 1) return false;
  out->log = false;
  if (parts.size() == 4) {
    if (parts[3] != "log") return false;
    out->log = true;
    if (out->start <= 0 || out->stop <= 0) return false;
  }
  return true;
}

const std::vector<std::string> known_patterns = {
    "qubits[*].freq_ghz", "qubits[*].anharm_mhz", "qubits[*].g_mhz", "qubits[*].dim",
    "coupler.freq0_ghz", "coupler.anharm_mhz", "coupler.dim",
    "flux.theta_phi0", "flux.tones[*].delta_phi0", "flux.tones[*].freq_ghz",
    "flux.tones[*].phase_rad",
    "drive[*].amp_mhz", "drive[*].phase_rad", "drive.form",
    "protocol.t_us", "protocol.eps0_mhz", "protocol.model", "protocol.mode",
    "protocol.calibrate", "protocol.full_lindblad",
    "dissipation.q1.t1_us", "dissipation.q1.t2_us", "dissipation.q2.t1_us",
    "dissipation.q2.t2_us", "dissipation.c.t1_us", "dissipation.c.t2_us",
    "sweep.delta1_phi0", "sweep.delta2_phi0", "sweep.t_us", "sweep.tcoh_us",
    "gate.step_ps", "gate.periods",
    "anneal.r_angstrom", "molecule.table", "molecule.scale_mha_per_mhz",
    "output.dir",
};

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  Violations violations;
  std::vector<RawEntry> entries;
  {
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
      ++line_no;
      const auto hash_pos = line.find('#');
      if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        violations.add("line " + std::to_string(line_no) + ": expected key = value");
        continue;
      }
      RawEntry entry;
      entry.key = trim(line.substr(0, eq));
      entry.value = trim(line.substr(eq + 1));
      entry.line = line_no;
      if (entry.key.empty() || entry.value.empty()) {
        violations.add("line " + std::to_string(line_no) + ": empty key or value");
        continue;
      }
      entries.push_back(entry);
    }
  }

  // Unknown keys and duplicates.
  std::map<std::string, RawEntry> by_key;
  for (const auto& entry : entries) {
    bool known = false;
    std::vector<int> indices;
    for (const auto& pattern : known_patterns)
      if (match_key(entry.key, pattern, &indices)) {
        known = true;
        break;
      }
    if (!known) {
      violations.add("line " + std::to_string(entry.line) + ": unknown key '" + entry.key +
                     "' (unit suffix missing or unsupported name)");
      continue;
    }
    if (by_key.count(entry.key))
      violations.add("line " + std::to_string(entry.line) + ": duplicate key '" + entry.key +
                     "'");
    by_key[entry.key] = entry;
  }

  RunConfig cfg;
  cfg.raw_text = text;
  cfg.config_hash = fnv1a_hex(text);

  const auto get_double = [&](const std::string& key, double* out) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    if (!parse_double(it->second.value, out)) {
      violations.add("line " + std::to_string(it->second.line) + ": '" + key +
                     "' is not a number");
      return false;
    }
    return true;
  };
  const auto get_int = [&](const std::string& key, int* out) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    if (!parse_int(it->second.value, out)) {
      violations.add("line " + std::to_string(it->second.line) + ": '" + key +
                     "' is not an integer");
      return false;
    }
    return true;
  };
  const auto get_bool = [&](const std::string& key, bool* out) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    if (!parse_bool(it->second.value, out)) {
      violations.add("line " + std::to_string(it->second.line) + ": '" + key +
                     "' must be true or false");
      return false;
    }
    return true;
  };
  const auto get_string = [&](const std::string& key, std::string* out) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    *out = it->second.value;
    return true;
  };
  const auto get_range = [&](const std::string& key, std::optional<SweepRange>* out) {
    const auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    SweepRange range;
    if (!parse_range(it->second.value, &range)) {
      violations.add("line " + std::to_string(it->second.line) + ": '" + key +
                     "' must be start:stop:count[:log]");
      return false;
    }
    *out = range;
    return true;
  };

  // Device section (required).
  for (int j = 0;; ++j) {
    const std::string base = "qubits[" + std::to_string(j) + "].";
    if (!by_key.count(base + "freq_ghz") && !by_key.count(base + "anharm_mhz") &&
        !by_key.count(base + "g_mhz"))
      break;
    QubitParams q;
    double v = 0.0;
    if (get_double(base + "freq_ghz", &v)) q.omega = v * GHz;
    else violations.add("missing required key '" + base + "freq_ghz'");
    if (get_double(base + "anharm_mhz", &v)) q.anharm = v * MHz;
    else violations.add("missing required key '" + base + "anharm_mhz'");
    if (get_double(base + "g_mhz", &v)) q.g = v * MHz;
    else violations.add("missing required key '" + base + "g_mhz'");
    int dim = 3;
    get_int(base + "dim", &dim);
    q.dim = dim;
    cfg.device.qubits.push_back(q);
  }
  if (cfg.device.qubits.empty())
    violations.add("missing required section 'qubits' (qubits[0].freq_ghz, ...)");

  {
    double v = 0.0;
    if (get_double("coupler.freq0_ghz", &v)) cfg.device.coupler.omega0 = v * GHz;
    else violations.add("missing required section 'coupler' (coupler.freq0_ghz)");
    if (get_double("coupler.anharm_mhz", &v)) cfg.device.coupler.anharm = v * MHz;
    int dim = 3;
    get_int("coupler.dim", &dim);
    cfg.device.coupler.dim = dim;
  }
  {
    double v = 0.0;
    if (get_double("flux.theta_phi0", &v)) cfg.device.theta = v;
    else violations.add("missing required section 'flux' (flux.theta_phi0)");
  }

  // Optional explicit tones.
  for (int m = 0;; ++m) {
    const std::string base = "flux.tones[" + std::to_string(m) + "].";
    if (!by_key.count(base + "delta_phi0") && !by_key.count(base + "freq_ghz")) break;
    Tone tone;
    double v = 0.0;
    if (get_double(base + "delta_phi0", &v)) tone.delta = v;
    else violations.add("missing key '" + base + "delta_phi0'");
    if (get_double(base + "freq_ghz", &v)) tone.omega = v * GHz;
    else violations.add("missing key '" + base + "freq_ghz'");
    if (get_double(base + "phase_rad", &v)) tone.phase = v;
    cfg.explicit_tones.push_back(tone);
  }

  // Optional manual drives.
  for (int j = 0;; ++j) {
    const std::string base = "drive[" + std::to_string(j) + "].";
    if (!by_key.count(base + "amp_mhz") && !by_key.count(base + "phase_rad")) break;
    double amp = 0.0, phase = 0.0;
    get_double(base + "amp_mhz", &amp);
    get_double(base + "phase_rad", &phase);
    cfg.drive_amp.push_back(amp * MHz);
    cfg.drive_phase.push_back(phase);
  }
  {
    std::string form;
    if (get_string("drive.form", &form)) {
      if (form == "cosine") cfg.drive_form_is_cosine = true;
      else if (form != "paper")
        violations.add("'drive.form' must be paper or cosine");
    }
  }

  {
    double v = 0.0;
    if (get_double("protocol.t_us", &v)) {
      cfg.protocol_t = v * us;
      if (!(v > 0)) violations.add("'protocol.t_us' must be positive");
    }
    if (get_double("protocol.eps0_mhz", &v)) cfg.eps0 = v * MHz;
    std::string s;
    if (get_string("protocol.model", &s)) {
      if (s == "full") cfg.protocol_model_full = true;
      else if (s != "effective") violations.add("'protocol.model' must be full or effective");
    }
    if (get_string("protocol.mode", &s)) {
      if (s == "lindblad") cfg.protocol_mode_lindblad = true;
      else if (s != "unitary") violations.add("'protocol.mode' must be unitary or lindblad");
    }
    get_bool("protocol.calibrate", &cfg.calibrate);
    get_bool("protocol.full_lindblad", &cfg.full_lindblad);
  }

  for (const std::string label : {"q1", "q2", "c"}) {
    const std::string base = "dissipation." + label + ".";
    double t1 = 0.0, t2 = 0.0;
    const bool has_t1 = get_double(base + "t1_us", &t1);
    const bool has_t2 = get_double(base + "t2_us", &t2);
    if (has_t1 || has_t2) {
      SubsystemNoise n;
      n.t1 = has_t1 ? t1 * us : 0.0;
      n.t2 = has_t2 ? t2 * us : 0.0;
      cfg.dissipation.noise[label] = n;
    }
  }

  get_range("sweep.delta1_phi0", &cfg.sweep_delta1);
  get_range("sweep.delta2_phi0", &cfg.sweep_delta2);
  get_range("sweep.t_us", &cfg.sweep_t_us);
  get_range("sweep.tcoh_us", &cfg.sweep_tcoh_us);

  {
    double v = 0.0;
    if (get_double("gate.step_ps", &v)) {
      cfg.gate_step = v * ps;
      if (!(v > 0)) violations.add("'gate.step_ps' must be positive");
    }
    if (get_double("gate.periods", &v)) {
      cfg.gate_periods = v;
      if (!(v >= 2.0)) violations.add("'gate.periods' must be at least 2");
    }
    if (get_double("anneal.r_angstrom", &v)) cfg.anneal_r_angstrom = v;
    get_string("molecule.table", &cfg.molecule_table_path);
    get_double("molecule.scale_mha_per_mhz", &cfg.scale_mha_per_mhz);
    get_string("output.dir", &cfg.output_dir);
  }

  // Device-level invariants.
  if (violations.items.empty()) {
    for (const auto& v : cfg.device.violations()) violations.add(v);
    if (!cfg.explicit_tones.empty()) {
      FluxModulation mod;
      mod.theta = cfg.device.theta;
      mod.tones = cfg.explicit_tones;
      for (const auto& v : mod.violations()) violations.add(v);
    }
    try {
      cfg.dissipation.validate();
    } catch (const ConfigError& e) {
      violations.add(e.what());
    }
  }

  violations.raise_if_any(origin);
  cfg.warnings = cfg.device.warnings();
  // Weak-drive diagnostic: max_t f_j / min_j g_j < 0.1.
  double g_min = std::numeric_limits<double>::infinity();
  for (const auto& q : cfg.device.qubits) g_min = std::min(g_min, q.g);
  for (std::size_t j = 0; j < cfg.drive_amp.size(); ++j)
    if (cfg.drive_amp[j] / g_min >= 0.1)
      cfg.warnings.push_back("drive[" + std::to_string(j) +
                             "] amplitude breaks the weak-drive condition f << g");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Molecule table
// ---------------------------------------------------------------------------

MoleculeTable MoleculeTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read molecule table '" + path + "'");
  MoleculeTable table;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!header_seen) {
      if (cells != std::vector<std::string>{"R_angstrom", "Ay_mhz", "Jx_mhz", "Jy_mhz"})
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": header row must be R_angstrom,Ay_mhz,Jx_mhz,Jy_mhz");
      header_seen = true;
      continue;
    }
    if (cells.size() != 4)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 4 columns");
    MoleculeRow row;
    double values[4];
    for (int i = 0; i < 4; ++i) {
      if (!parse_double(cells[static_cast<std::size_t>(i)], &values[i]))
        throw ConfigError(path + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                          cells[static_cast<std::size_t>(i)] + "'");
    }
    row.r_angstrom = values[0];
    row.a_y = values[1] * MHz;
    row.j_x = values[2] * MHz;
    row.j_y = values[3] * MHz;
    if (!table.rows.empty() && !(row.r_angstrom > table.rows.back().r_angstrom))
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": R values must be strictly increasing");
    table.rows.push_back(row);
  }
  if (!header_seen) throw ConfigError(path + ": missing header row");
  if (table.rows.empty()) throw ConfigError(path + ": table has no rows");
  return table;
}

const MoleculeRow& MoleculeTable::row_near(double r_angstrom, double tol) const {
  for (const auto& row : rows)
    if (std::abs(row.r_angstrom - r_angstrom) <= tol) return row;
  std::string available;
  for (const auto& row : rows) available += " " + std::to_string(row.r_angstrom);
  throw ConfigError("no table row at R = " + std::to_string(r_angstrom) +
                    " (available:" + available + ")");
}

}  // namespace paramsim
