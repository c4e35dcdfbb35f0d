#include "bispin/config.hpp"

#include <charconv>
#include <cmath>

#include "bispin/io.hpp"

namespace bispin {

const std::vector<ConfigKey>& config_schema() {
  using K = KeyType;
  static const std::vector<ConfigKey> schema{
      {"donor.nuclear_spin", K::real, "4.5", "nuclear spin I (half-integer)"},
      {"donor.hyperfine_mhz", K::real, "1475.4", "isotropic hyperfine A/h, MHz"},
      {"donor.g_factor", K::real, "2.0003", "electron g factor"},
      {"donor.nuclear_ratio_delta", K::real, "2.488e-4", "nuclear/electron Zeeman ratio"},

      {"levels.b_min_mt", K::real, "0", "field grid start, mT"},
      {"levels.b_max_mt", K::real, "600", "field grid end, mT"},
      {"levels.n_points", K::integer, "601", "grid points"},

      {"spectroscopy.frequency_mhz", K::real, "4044", "microwave frequency, MHz"},
      {"spectroscopy.b_min_mt", K::real, "0", "search range start, mT"},
      {"spectroscopy.b_max_mt", K::real, "1000", "search range end, mT"},
      {"spectroscopy.intensity_floor", K::real, "0.05", "minimum |<u|Sx|l>|^2 kept"},
      {"spectroscopy.fwhm_mt", K::real, "0.7", "Gaussian line width for the spectrum"},
      {"spectroscopy.step_mt", K::real, "0.01", "spectrum field step, mT"},
      {"spectroscopy.window_fwhm", K::real, "5", "spectrum half-window around each line, in fwhm"},

      {"freqmap.b_min_mt", K::real, "0", "field grid start, mT"},
      {"freqmap.b_max_mt", K::real, "1000", "field grid end, mT"},
      {"freqmap.n_points", K::integer, "501", "grid points"},
      {"freqmap.intensity_floor", K::real, "0.05", "minimum intensity kept"},

      {"rabi.frequency_mhz", K::real, "4044", "drive frequency, MHz"},
      {"rabi.pi_pulse_ns", K::real, "32", "pi-pulse length on the reference transition, ns"},
      {"rabi.reference_upper", K::integer, "11", "reference transition upper label"},
      {"rabi.reference_lower", K::integer, "10", "reference transition lower label"},
      {"rabi.duration_us", K::real, "1", "nutation record length, us"},
      {"rabi.step_ns", K::real, "2", "nutation sampling step, ns"},

      {"cce.label_upper", K::integer, "11", "coherence upper label"},
      {"cce.label_lower", K::integer, "10", "coherence lower label"},
      {"cce.field_mt", K::real, "344.6", "static field, mT"},
      {"cce.b_direction", K::real_list, "1,-1,0", "field direction (crystal axes)"},
      {"cce.side_nm", K::real, "14", "cubic bath edge, nm"},
      {"cce.a0_nm", K::real, "0.543", "lattice constant, nm"},
      {"cce.abundance", K::real, "0.0467", "29Si fraction"},
      {"cce.neighbour_shell", K::integer, "3", "pair cutoff shell (1..3) when r_max_nm is 0"},
      {"cce.r_max_nm", K::real, "0", "explicit pair cutoff, nm (0: use neighbour_shell)"},
      {"cce.n_configs", K::integer, "20", "bath configurations"},
      {"cce.t_max_ms", K::real, "1", "echo time grid end, ms"},
      {"cce.n_times", K::integer, "101", "echo time points"},
      {"cce.fit", K::boolean, "true", "fit the mean echo and record it in the manifest"},

      {"cce.kohn_luttinger.k0_fraction", K::real, "0.85", "valley minimum, units of 2 pi / a0"},
      {"cce.kohn_luttinger.a_nm", K::real, "2.509", "transverse Bohr radius, nm"},
      {"cce.kohn_luttinger.b_nm", K::real, "1.443", "longitudinal Bohr radius, nm"},
      {"cce.kohn_luttinger.e0_mev", K::real, "31.3", "effective-mass binding energy, meV"},
      {"cce.kohn_luttinger.ionization_mev", K::real, "69", "donor ionization energy, meV"},
      {"cce.kohn_luttinger.eta", K::real, "186", "density enhancement at 29Si sites"},

      {"converge.sides_nm", K::real_list, "7,10,14,18", "bath edges to compare, nm"},
      {"converge.shells", K::real_list, "2,3", "pair cutoff shells to compare"},

      {"fit.model", K::text, "echo_decay", "echo_decay|t1_raman_orbach|exp_recovery|gaussian_lines|linear_baseline"},
      {"fit.input", K::text, "", "input CSV"},
      {"fit.fix_delta_k", K::real, "0", "fixed Delta/kB for t1_raman_orbach (0: free)"},
      {"fit.n_lines", K::integer, "1", "gaussian_lines: number of lines"},
      {"fit.mode", K::text, "absorption", "gaussian_lines: absorption|derivative"},

      {"run.seed", K::integer, "1", "base seed; configuration i uses seed + i"},
      {"run.workers", K::integer, "1", "worker threads"},
      {"run.out", K::text, "out", "output directory"},
  };
  return schema;
}

namespace {

const ConfigKey* find_key(const std::string& path) {
  for (const auto& k : config_schema())
    if (k.path == path) return &k;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

double to_real(std::string_view s, const std::string& path) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError(path + ": expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t to_integer(std::string_view s, const std::string& path) {
  s = trim(s);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw UsageError(path + ": expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool to_boolean(std::string_view s, const std::string& path) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw UsageError(path + ": expected true/false, got '" + std::string(s) + "'");
}

std::vector<double> to_list(std::string_view s, const std::string& path) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(to_real(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start), path));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void validate(const ConfigKey& key, const std::string& value) {
  switch (key.type) {
    case KeyType::real: to_real(value, key.path); break;
    case KeyType::integer: to_integer(value, key.path); break;
    case KeyType::boolean: to_boolean(value, key.path); break;
    case KeyType::real_list: to_list(value, key.path); break;
    case KeyType::text: break;
  }
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& k : config_schema()) values_[k.path] = k.default_value;
}

void RunConfig::set(const std::string& path, const std::string& value) {
  const ConfigKey* key = find_key(path);
  if (!key) throw UsageError("unknown config key '" + path + "'");
  const std::string v(trim(value));
  validate(*key, v);
  values_[path] = v;
}

void RunConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("expected section.key=value, got '" + assignment + "'");
  set(std::string(trim(std::string_view(assignment).substr(0, eq))), assignment.substr(eq + 1));
}

RunConfig RunConfig::from_text(std::string_view text, const std::string& source) {
  RunConfig cfg;
  std::string section;
  std::size_t pos = 0, line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw UsageError(where + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (section.empty()) throw UsageError(where + ": key '" + key + "' outside a section");
    try {
      cfg.set(section + "." + key, std::string(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(where + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) { return from_text(read_file(path), path.string()); }

const std::string& RunConfig::raw(const std::string& path) const {
  const auto it = values_.find(path);
  if (it == values_.end()) throw UsageError("unknown config key '" + path + "'");
  return it->second;
}

double RunConfig::real(const std::string& path) const { return to_real(raw(path), path); }
std::int64_t RunConfig::integer(const std::string& path) const { return to_integer(raw(path), path); }
bool RunConfig::boolean(const std::string& path) const { return to_boolean(raw(path), path); }
std::vector<double> RunConfig::real_list(const std::string& path) const { return to_list(raw(path), path); }

std::string RunConfig::to_text(bool with_help) const {
  std::string out;
  std::string section;
  for (const auto& k : config_schema()) {
    const auto dot = k.path.rfind('.');
    const std::string sec = k.path.substr(0, dot);
    if (sec != section) {
      out += (section.empty() ? "" : "\n") + std::string("[") + sec + "]\n";
      section = sec;
    }
    if (with_help) out += "# " + k.help + "\n";
    out += k.path.substr(dot + 1) + " = " + values_.at(k.path) + "\n";
  }
  return out;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : config_schema()) j[k.path] = values_.at(k.path);
  return j;
}

SpinSystem RunConfig::spin_system() const {
  SpinSystem sys;
  sys.nuclear_spin = real("donor.nuclear_spin");
  sys.hyperfine_mhz = real("donor.hyperfine_mhz");
  sys.g_factor = real("donor.g_factor");
  sys.nuclear_ratio_delta = real("donor.nuclear_ratio_delta");
  try {
    sys.validate();
  } catch (const std::exception& e) {
    throw UsageError(std::string("donor: ") + e.what());
  }
  return sys;
}

CceParams RunConfig::cce_params() const {
  CceParams p;
  p.label_upper = static_cast<int>(integer("cce.label_upper"));
  p.label_lower = static_cast<int>(integer("cce.label_lower"));
  p.field_b = real("cce.field_mt") * 1e-3;
  const auto dir = real_list("cce.b_direction");
  if (dir.size() != 3) throw UsageError("cce.b_direction: expected three components");
  p.b_direction = Eigen::Vector3d(dir[0], dir[1], dir[2]);
  if (p.b_direction.norm() == 0.0) throw UsageError("cce.b_direction: zero vector");
  p.b_direction.normalize();
  p.lattice = {real("cce.a0_nm"), real("cce.side_nm")};
  if (!(p.lattice.a0_nm > 0.0)) throw UsageError("cce.a0_nm: must be positive");
  if (p.lattice.cells_per_edge() < 2) throw UsageError("cce.side_nm: must be at least 2 a0");
  p.abundance = real("cce.abundance");
  if (!(p.abundance >= 0.0 && p.abundance <= 1.0)) throw UsageError("cce.abundance: must be in [0, 1]");
  const double r_max = real("cce.r_max_nm");
  if (r_max > 0.0) {
    p.r_max_nm = r_max;
  } else {
    switch (integer("cce.neighbour_shell")) {
      case 1: p.r_max_nm = nearest_neighbour_distance(p.lattice.a0_nm); break;
      case 2: p.r_max_nm = second_neighbour_distance(p.lattice.a0_nm); break;
      case 3: p.r_max_nm = third_neighbour_distance(p.lattice.a0_nm); break;
      default: throw UsageError("cce.neighbour_shell: must be 1, 2 or 3");
    }
  }
  p.n_configs = static_cast<int>(integer("cce.n_configs"));
  if (p.n_configs < 1) throw UsageError("cce.n_configs: must be >= 1");
  const auto n_times = integer("cce.n_times");
  if (n_times < 2) throw UsageError("cce.n_times: must be >= 2");
  if (!(real("cce.t_max_ms") > 0.0)) throw UsageError("cce.t_max_ms: must be positive");
  p.times_ms = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n_times), 0.0, real("cce.t_max_ms"));
  p.kohn_luttinger.k0_fraction = real("cce.kohn_luttinger.k0_fraction");
  p.kohn_luttinger.a_nm = real("cce.kohn_luttinger.a_nm");
  p.kohn_luttinger.b_nm = real("cce.kohn_luttinger.b_nm");
  p.kohn_luttinger.e0_mev = real("cce.kohn_luttinger.e0_mev");
  p.kohn_luttinger.ionization_mev = real("cce.kohn_luttinger.ionization_mev");
  p.kohn_luttinger.eta = real("cce.kohn_luttinger.eta");
  const auto seed = integer("run.seed");
  if (seed < 0) throw UsageError("run.seed: must be non-negative");
  p.seed_base = static_cast<std::uint64_t>(seed);
  p.workers = static_cast<int>(integer("run.workers"));
  if (p.workers < 1) throw UsageError("run.workers: must be >= 1");
  const int n_levels = spin_system().dimension();
  for (int label : {p.label_upper, p.label_lower})
    if (label < 1 || label > n_levels) throw UsageError("cce: label out of range 1.." + std::to_string(n_levels));
  return p;
}

}  // namespace bispin
