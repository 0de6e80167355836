// phi4: command-line front end for wave construction, spectral reports,
// parameter sweeps and evolution experiments.
//
// Exit codes: 0 success, 1 internal failure, 2 invalid parameters,
// 3 internal consistency violation, 4 blow-up.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "phi4/phi4.hpp"

namespace {

using phi4::json;

enum class Command { wave, spectrum, stability, evolve, sweep };

struct RunConfig {
  Command command = Command::wave;
  double L = 0.0;
  double c = 0.0;
  std::size_t N = 256;
  double dt = 1e-3;
  double T = 100.0;
  double eps = 1e-3;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  bool projected = true;
  std::size_t workers = 1;
  std::size_t sample_every = 100;
  std::string perturbation = "random";
  std::size_t mode = 1;
  double blowup_ceiling = 0.0;
  double speed_step = 1e-4;
  double c_min = 0.0;
  double c_max = 0.0;
  std::size_t count = 20;
};

const char* command_name(Command c) {
  switch (c) {
    case Command::wave: return "wave";
    case Command::spectrum: return "spectrum";
    case Command::stability: return "stability";
    case Command::evolve: return "evolve";
    case Command::sweep: return "sweep";
  }
  return "?";
}

json config_json(const RunConfig& cfg) {
  return json{{"command", command_name(cfg.command)},
              {"L", cfg.L},
              {"c", cfg.c},
              {"N", cfg.N},
              {"dt", cfg.dt},
              {"T", cfg.T},
              {"eps", cfg.eps},
              {"seed", cfg.seed},
              {"format", cfg.format},
              {"projected", cfg.projected},
              {"sample_every", cfg.sample_every},
              {"perturbation", cfg.perturbation},
              {"mode", cfg.mode},
              {"blowup_ceiling", cfg.blowup_ceiling},
              {"speed_step", cfg.speed_step}};
}

std::string out_prefix(const RunConfig& cfg) {
  return cfg.out.empty() ? std::string("phi4_") + command_name(cfg.command) : cfg.out;
}

int cmd_wave(const RunConfig& cfg) {
  const phi4::WaveParameters wave = phi4::solve_modulus(cfg.L, cfg.c);
  const phi4::WaveSamples samples = phi4::sample_wave(wave, cfg.N);
  const std::string prefix = out_prefix(cfg);

  json j{{"config", config_json(cfg)},
         {"parameters", phi4::to_json(wave)},
         {"ode_residual", phi4::ode_residual(wave, cfg.N)}};
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < cfg.N; ++i) {
      rows.push_back({samples.h.x(i), samples.h[i], samples.dh[i], samples.d2h[i]});
    }
    j["columns"] = {"x", "h", "h_x", "h_xx"};
    j["profile"] = std::move(rows);
  } else {
    std::ostringstream csv;
    phi4::write_profile_csv(csv, samples);
    phi4::write_text_file(prefix + ".csv", csv.str());
  }
  phi4::write_json_file(prefix + ".json", j);
  return 0;
}

json spectrum_record(const RunConfig& cfg, double speed) {
  const phi4::SpectrumAnalysis a = phi4::analyze_spectrum(cfg.L, speed, cfg.N, cfg.speed_step);
  json j = phi4::to_json(a);
  j["config"] = config_json(cfg);
  j["config"]["c"] = speed;
  return j;
}

void check_index(const json& record) {
  if (!record["index"]["consistent"].get<bool>()) {
    throw phi4::IndexMismatch("index formulas disagree with the constrained spectra (see report)");
  }
}

int cmd_spectrum(const RunConfig& cfg) {
  const json j = spectrum_record(cfg, cfg.c);
  phi4::write_json_file(out_prefix(cfg) + ".json", j);
  check_index(j);
  return 0;
}

phi4::Perturbation make_perturbation(const RunConfig& cfg, double period) {
  if (cfg.perturbation == "trig") return phi4::trig_perturbation(period, cfg.N, cfg.mode);
  if (cfg.perturbation == "mean") {
    // Mean-carrying direction for the unprojected contrast run: constant plus the random field.
    phi4::Perturbation p = phi4::random_perturbation(period, cfg.N, cfg.seed);
    for (std::size_t j = 0; j < cfg.N; ++j) p.p[j] += 1.0;
    return p;
  }
  return phi4::random_perturbation(period, cfg.N, cfg.seed);
}

phi4::EvolutionTrace evolve_once(const RunConfig& cfg, const phi4::WaveParameters& wave, double eps) {
  phi4::ExperimentConfig ec;
  ec.epsilon = eps;
  ec.horizon = cfg.T;
  ec.dt = cfg.dt;
  ec.sample_every = cfg.sample_every;
  ec.integrator.projected = cfg.projected;
  if (cfg.blowup_ceiling > 0.0) ec.integrator.blowup_ceiling = cfg.blowup_ceiling;
  return phi4::run_experiment(wave, make_perturbation(cfg, wave.period()), ec);
}

void write_trace(const RunConfig& cfg, const phi4::EvolutionTrace& trace, json meta) {
  const std::string prefix = out_prefix(cfg);
  if (cfg.format == "json") {
    meta["trace"] = phi4::to_json(trace, true);
  } else {
    std::ostringstream csv;
    phi4::write_trace_csv(csv, trace);
    phi4::write_text_file(prefix + ".csv", csv.str());
    meta["trace"] = phi4::to_json(trace, false);
  }
  phi4::write_json_file(prefix + ".meta.json", meta);
}

int cmd_evolve(const RunConfig& cfg) {
  const phi4::WaveParameters wave = phi4::solve_modulus(cfg.L, cfg.c);
  const phi4::EvolutionTrace trace = evolve_once(cfg, wave, cfg.eps);
  json meta{{"config", config_json(cfg)}, {"parameters", phi4::to_json(wave)}};
  meta["config"]["k"] = wave.modulus();
  write_trace(cfg, trace, std::move(meta));
  return 0;
}

int cmd_stability(const RunConfig& cfg) {
  if (!(cfg.eps > 0.0)) throw phi4::InvalidParameters("stability needs --eps > 0");
  if (!cfg.projected) throw phi4::InvalidParameters("stability is defined for the projected flow");
  const phi4::WaveParameters wave = phi4::solve_modulus(cfg.L, cfg.c);
  const phi4::EvolutionTrace full = evolve_once(cfg, wave, cfg.eps);
  const phi4::EvolutionTrace half = evolve_once(cfg, wave, 0.5 * cfg.eps);
  json meta{{"config", config_json(cfg)}, {"parameters", phi4::to_json(wave)}};
  meta["config"]["k"] = wave.modulus();
  meta["stability"] = {{"ratio", full.stability_ratio},
                       {"ratio_half_eps", half.stability_ratio},
                       {"ratio_change", full.stability_ratio / half.stability_ratio}};
  write_trace(cfg, full, std::move(meta));
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const double lo = cfg.c_min > 0.0 ? cfg.c_min : phi4::min_speed(cfg.L) + 1e-3;
  const double hi = cfg.c_max > 0.0 ? cfg.c_max : 0.99;
  if (cfg.count == 0 || !(hi >= lo)) throw phi4::InvalidParameters("sweep needs count >= 1 and c_max >= c_min");
  std::vector<double> speeds(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    speeds[i] = cfg.count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cfg.count - 1);
    phi4::solve_modulus(cfg.L, speeds[i]);  // validate before fanning out
  }

  const std::string prefix = out_prefix(cfg);
  std::vector<json> signatures(cfg.count);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.count; i = next++) {
      try {
        const json rec = spectrum_record(cfg, speeds[i]);
        phi4::write_json_file(prefix + "_" + std::to_string(i) + ".json", rec);
        signatures[i] = {{"c", speeds[i]},
                         {"file", prefix + "_" + std::to_string(i) + ".json"},
                         {"n_L1", rec["operators"]["L1"]["n"]},
                         {"z_L1", rec["operators"]["L1"]["z"]},
                         {"n_L", rec["operators"]["L"]["n"]},
                         {"z_L", rec["operators"]["L"]["z"]},
                         {"n_L1_Pi", rec["operators"]["L1_Pi"]["n"]},
                         {"z_L1_Pi", rec["operators"]["L1_Pi"]["z"]},
                         {"n_L_Pi", rec["operators"]["L_Pi"]["n"]},
                         {"z_L_Pi", rec["operators"]["L_Pi"]["z"]},
                         {"consistent", rec["index"]["consistent"]},
                         {"D1_closed", rec["D1_closed"]},
                         {"d2", rec["d2"]}};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.workers, cfg.count));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  json summary{{"config", config_json(cfg)}, {"records", signatures}};
  phi4::write_json_file(prefix + "_summary.json", summary);
  for (const json& s : signatures) {
    if (!s["consistent"].get<bool>()) throw phi4::IndexMismatch("index mismatch in sweep record " + s["file"].get<std::string>());
  }
  return 0;
}

void add_wave_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--L", cfg.L, "Spatial period, 0 < L < 2 pi")->required();
  sub->add_option("--N", cfg.N, "Grid size (even)")->check(CLI::Range(std::size_t{16}, std::size_t{1} << 16));
  sub->add_option("--out", cfg.out, "Output path prefix");
  sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_evolution_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--dt", cfg.dt, "Time step")->check(CLI::PositiveNumber);
  sub->add_option("--T", cfg.T, "Time horizon")->check(CLI::PositiveNumber);
  sub->add_option("--eps", cfg.eps, "Perturbation amplitude")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", cfg.seed, "RNG seed (mt19937_64)");
  sub->add_option("--sample-every", cfg.sample_every, "Steps between trace samples")->check(CLI::PositiveNumber);
  sub->add_option("--perturbation", cfg.perturbation, "Perturbation direction")
      ->check(CLI::IsMember({"random", "trig", "mean"}));
  sub->add_option("--mode", cfg.mode, "Fourier mode of the trig perturbation");
  sub->add_option("--blowup-ceiling", cfg.blowup_ceiling, "Abort with exit 4 once max|phi| exceeds this (default 10 a)")
      ->check(CLI::PositiveNumber);
  auto* proj = sub->add_flag("--projected,!--unprojected", cfg.projected, "Zero-mean projected flow (default)");
  proj->default_val(true);
}

// Expands `sweep --config FILE` into ordinary flags. Keys may sit at top level or under a
// [sweep] section; a key already given on the command line keeps its command-line value.
std::vector<std::string> with_sweep_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args.front() != "sweep") {
    std::reverse(args.begin(), args.end());
    return args;
  }
  std::string path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
      const bool scoped = item.parents.empty() || (item.parents.size() == 1 && item.parents.front() == "sweep");
      if (!scoped || item.name == "++" || item.name == "--") continue;
      const std::string flag = "--" + item.name;
      const bool given = std::any_of(kept.begin(), kept.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
      });
      if (given) continue;
      kept.push_back(flag);
      kept.insert(kept.end(), item.inputs.begin(), item.inputs.end());
    }
  }
  std::reverse(kept.begin(), kept.end());
  return kept;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Snoidal traveling waves of the phi^4 equation: construction, spectra, stability"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* wave = app.add_subcommand("wave", "Sample the wave profile (x, h, h', h'')");
  add_wave_options(wave, cfg);
  wave->add_option("--c", cfg.c, "Wave speed")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Spectra of L1, L, L1_Pi, L_Pi with index data and d''(c)");
  add_wave_options(spectrum, cfg);
  spectrum->add_option("--c", cfg.c, "Wave speed")->required();
  spectrum->add_option("--dc", cfg.speed_step, "Speed step for d''(c)")->check(CLI::PositiveNumber);

  auto* evolve = app.add_subcommand("evolve", "Evolve the perturbed wave and write the trace");
  add_wave_options(evolve, cfg);
  evolve->add_option("--c", cfg.c, "Wave speed")->required();
  add_evolution_options(evolve, cfg);

  auto* stability = app.add_subcommand("stability", "Orbital stability experiment at eps and eps/2");
  add_wave_options(stability, cfg);
  stability->add_option("--c", cfg.c, "Wave speed")->required();
  add_evolution_options(stability, cfg);

  auto* sweep = app.add_subcommand("sweep", "Spectrum reports over a range of speeds");
  add_wave_options(sweep, cfg);
  sweep->add_option("--c-min", cfg.c_min, "Smallest speed (default: just above the admissible edge)");
  sweep->add_option("--c-max", cfg.c_max, "Largest speed (default 0.99)");
  sweep->add_option("--count", cfg.count, "Number of speeds");
  sweep->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--dc", cfg.speed_step, "Speed step for d''(c)")->check(CLI::PositiveNumber);
  std::string config_file;
  sweep->add_option("--config", config_file, "key = value file with sweep options (command-line flags take precedence)");

  try {
    app.parse(with_sweep_config(argc, argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*wave) cfg.command = Command::wave;
  if (*spectrum) cfg.command = Command::spectrum;
  if (*evolve) cfg.command = Command::evolve;
  if (*stability) cfg.command = Command::stability;
  if (*sweep) cfg.command = Command::sweep;

  try {
    if (cfg.N % 2 != 0) throw phi4::InvalidParameters("--N must be even");
    switch (cfg.command) {
      case Command::wave: return cmd_wave(cfg);
      case Command::spectrum: return cmd_spectrum(cfg);
      case Command::evolve: return cmd_evolve(cfg);
      case Command::stability: return cmd_stability(cfg);
      case Command::sweep: return cmd_sweep(cfg);
    }
  } catch (const phi4::InvalidParameters& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const phi4::ConsistencyError& e) {
    std::cerr << "consistency violation: " << e.what() << '\n';
    return 3;
  } catch (const phi4::BlowUp& e) {
    std::cerr << "blow-up at t=" << e.time() << ": " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
