#include "bispin/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "bispin/doublet.hpp"
#include "bispin/io.hpp"
#include "bispin/spectroscopy.hpp"

namespace bispin {

namespace {

using nlohmann::json;

class Outputs {
 public:
  Outputs(std::string command, const RunConfig& cfg)
      : command_(std::move(command)), cfg_(cfg), dir_(cfg.text("run.out")), start_(std::chrono::steady_clock::now()) {
    if (dir_.empty()) throw UsageError("run.out: empty output directory");
  }

  void write(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    checksums_[name] = blob_checksum(content);
    files_.push_back(name);
  }

  CommandOutcome finish(json result, int exit_code = kExitOk) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    CommandOutcome out;
    out.exit_code = exit_code;
    out.out_dir = dir_;
    out.manifest = {
        {"command", command_},
        {"version", BISPIN_VERSION},
        {"config", cfg_.to_json()},
        {"constants_sha256", constants_hash(cfg_.spin_system())},
        {"wall_time_s", wall},
        {"outputs", checksums_},
        {"result", std::move(result)},
        {"exit_code", exit_code},
    };
    const std::string manifest_name = command_ + ".manifest.json";
    write_file(dir_ / manifest_name, dump_json(out.manifest));
    out.files = files_;
    out.files.push_back(manifest_name);
    return out;
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::filesystem::path dir_;
  std::chrono::steady_clock::time_point start_;
  json checksums_ = json::object();
  std::vector<std::string> files_;
};

Eigen::VectorXd field_grid_tesla(const RunConfig& cfg, const std::string& section) {
  const double lo = cfg.real(section + ".b_min_mt"), hi = cfg.real(section + ".b_max_mt");
  const auto n = cfg.integer(section + ".n_points");
  if (lo < 0.0 || !(hi > lo)) throw UsageError(section + ": need 0 <= b_min_mt < b_max_mt");
  if (n < 2) throw UsageError(section + ".n_points: must be >= 2");
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), lo, hi) * 1e-3;
}

json transition_json(const Transition& t) {
  return {{"label_upper", t.label_upper},
          {"label_lower", t.label_lower},
          {"field_mt", t.field_b * 1e3},
          {"frequency_mhz", t.frequency_mhz},
          {"sx_element", t.sx_element},
          {"intensity", t.intensity},
          {"dfdb_mhz_per_mt", t.dfdb_mhz_per_mt}};
}

std::string pair_name(int upper, int lower) { return std::to_string(upper) + "-" + std::to_string(lower); }

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

std::string constants_hash(const SpinSystem& sys) {
  const PhysicalConstants& c = sys.constants;
  std::string s;
  for (double v : {c.planck_h, c.bohr_magneton, c.boltzmann_kB, c.vacuum_permeability_mu0, c.gyro_si29,
                   sys.electron_spin, sys.nuclear_spin, sys.hyperfine_mhz, sys.g_factor, sys.nuclear_ratio_delta}) {
    s += format_double(v) + "\n";
  }
  return sha256_hex(s);
}

json fit_result_json(const FitResult& r) {
  json params = json::object();
  for (const auto& p : r.params) {
    params[p.name] = {{"value", p.value}, {"std_error", p.std_error ? json(*p.std_error) : json(nullptr)}, {"fixed", p.fixed}};
  }
  return {{"model", model_name(r.model)}, {"converged", r.converged},     {"n_iterations", r.n_iterations},
          {"residual_norm", r.residual_norm}, {"flags", r.flags}, {"params", params}};
}

CommandOutcome cmd_levels(const RunConfig& cfg) {
  const SpinSystem sys = cfg.spin_system();
  const Eigen::VectorXd grid = field_grid_tesla(cfg, "levels");
  Outputs out("levels", cfg);
  const int d = sys.dimension();
  CsvTable table;
  table.header.push_back("B_mT");
  for (int k = 1; k <= d; ++k) table.header.push_back("E" + std::to_string(k));
  for (int k = 1; k <= d; ++k) table.header.push_back("C" + std::to_string(k));
  std::vector<double> row(static_cast<std::size_t>(2 * d + 1));
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const DonorEigensystem es = diagonalize(sys, grid(i));
    row[0] = grid(i) * 1e3;
    for (int k = 1; k <= d; ++k) {
      row[static_cast<std::size_t>(k)] = es.energy(k);
      row[static_cast<std::size_t>(d + k)] = concurrence(es, k);
    }
    table.add_row(row);
  }
  out.write("levels.csv", to_csv(table));
  return out.finish({{"n_fields", grid.size()}, {"n_levels", d}});
}

CommandOutcome cmd_resonances(const RunConfig& cfg) {
  const SpinSystem sys = cfg.spin_system();
  const double f = cfg.real("spectroscopy.frequency_mhz");
  const double lo = cfg.real("spectroscopy.b_min_mt") * 1e-3, hi = cfg.real("spectroscopy.b_max_mt") * 1e-3;
  const double floor = cfg.real("spectroscopy.intensity_floor");
  const double fwhm = cfg.real("spectroscopy.fwhm_mt"), step = cfg.real("spectroscopy.step_mt");
  const double half_window = cfg.real("spectroscopy.window_fwhm") * fwhm;
  if (!(f > 0.0)) throw UsageError("spectroscopy.frequency_mhz: must be positive");
  if (lo < 0.0 || !(hi > lo)) throw UsageError("spectroscopy: need 0 <= b_min_mt < b_max_mt");
  if (!(fwhm > 0.0) || !(step > 0.0) || !(half_window > 0.0)) throw UsageError("spectroscopy: widths must be positive");

  Outputs out("resonances", cfg);
  const std::vector<Transition> lines = find_all_resonances(sys, f, lo, hi, floor);
  json list = json::array();
  for (const auto& t : lines) list.push_back(transition_json(t));
  out.write("resonances.json", dump_json({{"frequency_mhz", f}, {"intensity_floor", floor}, {"resonances", list}}));

  // Derivative spectrum on windows around each line, grid points on multiples of step.
  std::set<long long> ticks;
  for (const auto& t : lines) {
    const auto a = static_cast<long long>(std::floor((t.field_b * 1e3 - half_window) / step));
    const auto b = static_cast<long long>(std::ceil((t.field_b * 1e3 + half_window) / step));
    for (long long k = a; k <= b; ++k) ticks.insert(k);
  }
  Eigen::VectorXd grid(static_cast<Eigen::Index>(ticks.size()));
  Eigen::Index i = 0;
  for (long long k : ticks) grid(i++) = static_cast<double>(k) * step * 1e-3;
  CsvTable table;
  table.header = {"B_mT", "signal"};
  if (!lines.empty()) {
    const SpectrumCurve curve = synthesize_spectrum(lines, fwhm, SpectrumMode::derivative, grid);
    for (Eigen::Index k = 0; k < grid.size(); ++k) table.add_row(std::vector<double>{grid(k) * 1e3, curve.signal(k)});
  }
  out.write("resonance_spectrum.csv", to_csv(table));
  return out.finish({{"n_resonances", lines.size()}, {"resonances", list}});
}

CommandOutcome cmd_freqmap(const RunConfig& cfg) {
  const SpinSystem sys = cfg.spin_system();
  const Eigen::VectorXd grid = field_grid_tesla(cfg, "freqmap");
  Outputs out("freqmap", cfg);
  const auto map = frequency_field_map(sys, grid, cfg.real("freqmap.intensity_floor"));
  CsvTable table;
  table.header = {"B_mT", "label_upper", "label_lower", "frequency_mhz", "intensity"};
  for (const auto& p : map) {
    table.add_row(std::vector<double>{p.field_b * 1e3, static_cast<double>(p.label_upper),
                                      static_cast<double>(p.label_lower), p.frequency_mhz, p.intensity});
  }
  out.write("freqmap.csv", to_csv(table));
  return out.finish({{"n_rows", map.size()}});
}

CommandOutcome cmd_rabi(const RunConfig& cfg) {
  const SpinSystem sys = cfg.spin_system();
  const double f = cfg.real("rabi.frequency_mhz");
  const double t_pi_us = cfg.real("rabi.pi_pulse_ns") * 1e-3;
  const double duration = cfg.real("rabi.duration_us"), dt = cfg.real("rabi.step_ns") * 1e-3;
  const int ref_u = static_cast<int>(cfg.integer("rabi.reference_upper"));
  const int ref_l = static_cast<int>(cfg.integer("rabi.reference_lower"));
  if (!(f > 0.0) || !(t_pi_us > 0.0) || !(duration > 0.0) || !(dt > 0.0)) {
    throw UsageError("rabi: frequency, pulse length, duration and step must be positive");
  }
  const auto n = static_cast<Eigen::Index>(std::floor(duration / dt + 1e-9)) + 1;
  if (n < 16) throw UsageError("rabi: need at least 16 samples (duration / step)");

  const std::vector<Transition> lines =
      find_all_resonances(sys, f, 0.0, cfg.real("spectroscopy.b_max_mt") * 1e-3, cfg.real("spectroscopy.intensity_floor"));
  const auto ref = std::find_if(lines.begin(), lines.end(),
                                [&](const Transition& t) { return t.label_upper == ref_u && t.label_lower == ref_l; });
  if (ref == lines.end()) throw UsageError("rabi: reference transition " + pair_name(ref_u, ref_l) + " is not resonant");
  // pi pulse of length t_pi on the reference transition: f_Rabi = 1 / (2 t_pi).
  const double f1 = 1.0 / (2.0 * t_pi_us) / (2.0 * ref->sx_element);

  Outputs out("rabi", cfg);
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, 0.0, static_cast<double>(n - 1) * dt);
  CsvTable table;
  table.header.push_back("t_us");
  std::vector<Eigen::VectorXd> signals;
  json entries = json::array();
  for (const auto& line : lines) {
    const double fr = rabi_frequency(sys, line.label_upper, line.label_lower, line.field_b, f1);
    Eigen::VectorXd s = (2.0 * std::numbers::pi * fr * t.array()).cos().matrix();
    const auto peak = rabi_peak(as_span(t), as_span(s));
    table.header.push_back("T" + std::to_string(line.label_upper) + "_" + std::to_string(line.label_lower));
    entries.push_back({{"transition", pair_name(line.label_upper, line.label_lower)},
                       {"field_mt", line.field_b * 1e3},
                       {"rabi_mhz", fr},
                       {"fft_peak_mhz", peak ? json(*peak) : json(nullptr)},
                       {"ratio_to_reference", line.sx_element / ref->sx_element}});
    signals.push_back(std::move(s));
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<double> row{t(k)};
    for (const auto& s : signals) row.push_back(s(k));
    table.add_row(row);
  }
  out.write("rabi.csv", to_csv(table));
  return out.finish({{"drive_f1_mhz", f1}, {"reference", pair_name(ref_u, ref_l)}, {"transitions", entries}});
}

CommandOutcome cmd_cce(const RunConfig& cfg) {
  const SpinSystem sys = cfg.spin_system();
  const CceParams params = cfg.cce_params();
  const EchoCurve curve = ensemble_echo(params, sys);
  Outputs out("cce", cfg);
  CsvTable table;
  table.header = {"t_ms", "mean", "std_of_mean"};
  for (Eigen::Index k = 0; k < curve.times_ms.size(); ++k) {
    table.add_row(std::vector<double>{curve.times_ms(k), curve.amplitude(k), curve.std_of_mean(k)});
  }
  out.write("echo.csv", to_csv(table));
  json result = {{"transition", pair_name(params.label_upper, params.label_lower)},
                 {"n_configs", params.n_configs},
                 {"r_max_nm", params.r_max_nm}};
  int code = kExitOk;
  if (cfg.boolean("cce.fit")) {
    // Fit over the points still above 1e-6; the decayed tail carries no shape.
    EchoCurve fit_curve;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < curve.amplitude.size(); ++k)
      if (curve.amplitude(k) > 1e-6) keep.push_back(k);
    fit_curve.times_ms = curve.times_ms(keep);
    fit_curve.amplitude = curve.amplitude(keep);
    const FitResult fit = fit_echo_decay(fit_curve);
    result["fit"] = fit_result_json(fit);
    if (!fit.converged) code = kExitNumerical;
  }
  return out.finish(result, code);
}

CommandOutcome cmd_cce_converge(const RunConfig& cfg) {
  const SpinSystem sys = cfg.spin_system();
  const CceParams params = cfg.cce_params();
  const std::vector<double> sides = cfg.real_list("converge.sides_nm");
  const std::vector<double> shells = cfg.real_list("converge.shells");
  if (sides.empty() || shells.empty()) throw UsageError("converge: sides_nm and shells must be non-empty");
  std::vector<double> r_max;
  for (double s : shells) {
    if (s == 1.0) r_max.push_back(nearest_neighbour_distance(params.lattice.a0_nm));
    else if (s == 2.0) r_max.push_back(second_neighbour_distance(params.lattice.a0_nm));
    else if (s == 3.0) r_max.push_back(third_neighbour_distance(params.lattice.a0_nm));
    else throw UsageError("converge.shells: entries must be 1, 2 or 3");
  }
  for (double side : sides) {
    if (LatticeSpec{params.lattice.a0_nm, side}.cells_per_edge() < 2) throw UsageError("converge.sides_nm: side below 2 a0");
  }
  const ConvergenceTable table = convergence_study(params, sys, sides, r_max);

  Outputs out("cce-converge", cfg);
  CsvTable csv;
  csv.header.push_back("t_ms");
  for (double side : sides)
    for (double shell : shells) {
      const std::string tag = "_side" + format_double(side) + "_shell" + format_double(shell);
      csv.header.push_back("mean" + tag);
      csv.header.push_back("sem" + tag);
    }
  for (Eigen::Index k = 0; k < params.times_ms.size(); ++k) {
    std::vector<double> row{params.times_ms(k)};
    for (const auto& e : table.entries) {
      row.push_back(e.curve.amplitude(k));
      row.push_back(e.curve.std_of_mean(k));
    }
    csv.add_row(row);
  }
  out.write("converge_curves.csv", to_csv(csv));
  json distances = {{"sides_nm", sides}, {"shells", shells}, {"r_max_nm", r_max},
                    {"side_distance", table.side_distance}, {"r_max_distance", table.r_max_distance}};
  out.write("converge.json", dump_json(distances));
  return out.finish(distances);
}

CommandOutcome cmd_fit(const RunConfig& cfg) {
  const std::string& model_text = cfg.text("fit.model");
  const auto model = parse_model_id(model_text);
  if (!model) throw UsageError("fit.model: unknown model '" + model_text + "'");
  if (cfg.text("fit.input").empty()) throw UsageError("fit.input: no input file given");
  const CsvTable input = read_csv(cfg.text("fit.input"));

  static const std::map<ModelId, std::pair<std::string, std::string>> columns{
      {ModelId::echo_decay, {"t_ms", "amplitude"}},
      {ModelId::t1_raman_orbach, {"T_K", "rate"}},
      {ModelId::exp_recovery, {"t", "M"}},
      {ModelId::gaussian_lines, {"B_mT", "signal"}},
      {ModelId::linear_baseline, {"x", "y"}},
  };
  const auto& [xname, yname] = columns.at(*model);
  // Validate every column before anything is written.
  const Eigen::VectorXd x = input.column(xname);
  const Eigen::VectorXd y = input.column(yname);
  const bool weighted = input.column_index("sigma").has_value();
  const Eigen::VectorXd sigma = weighted ? input.column("sigma") : Eigen::VectorXd();
  const std::span<const double> sig = weighted ? as_span(sigma) : std::span<const double>{};

  FitResult fit;
  try {
    switch (*model) {
      case ModelId::echo_decay: fit = fit_echo_decay(EchoCurve{x, y, {}}, sig); break;
      case ModelId::t1_raman_orbach: {
        const double fixed = cfg.real("fit.fix_delta_k");
        fit = fit_t1_temperature(as_span(x), as_span(y), fixed > 0.0 ? std::optional<double>(fixed) : std::nullopt, sig);
        break;
      }
      case ModelId::exp_recovery: fit = fit_exp_recovery(as_span(x), as_span(y), sig); break;
      case ModelId::gaussian_lines: {
        const std::string& mode = cfg.text("fit.mode");
        if (mode != "absorption" && mode != "derivative") throw UsageError("fit.mode: absorption or derivative");
        const SpectrumMode m = mode == "derivative" ? SpectrumMode::derivative : SpectrumMode::absorption;
        fit = fit_gaussian_lines(SpectrumCurve{x * 1e-3, y, m}, static_cast<int>(cfg.integer("fit.n_lines")), m);
        break;
      }
      case ModelId::linear_baseline: fit = fit_linear_baseline(as_span(x), as_span(y), sig); break;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("fit: ") + e.what());
  }

  Outputs out("fit", cfg);
  CsvTable res;
  res.header = {xname, yname, "fit", "residual"};
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    res.add_row(std::vector<double>{x(k), y(k), y(k) - fit.residuals(k), fit.residuals(k)});
  }
  const json result = fit_result_json(fit);
  out.write(std::string(model_name(*model)) + ".json", dump_json(result));
  out.write(std::string(model_name(*model)) + "_residuals.csv", to_csv(res));
  return out.finish(result, fit.converged ? kExitOk : kExitNumerical);
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"levels", "resonances", "freqmap", "rabi", "cce", "cce-converge", "fit"};
  return names;
}

CommandOutcome run_command(std::string_view name, const RunConfig& cfg) {
  if (name == "levels") return cmd_levels(cfg);
  if (name == "resonances") return cmd_resonances(cfg);
  if (name == "freqmap") return cmd_freqmap(cfg);
  if (name == "rabi") return cmd_rabi(cfg);
  if (name == "cce") return cmd_cce(cfg);
  if (name == "cce-converge") return cmd_cce_converge(cfg);
  if (name == "fit") return cmd_fit(cfg);
  throw UsageError("unknown command '" + std::string(name) + "'");
}

}  // namespace bispin
