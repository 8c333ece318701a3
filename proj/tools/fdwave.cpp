// fdwave command-line runner: reproducible experiments on the damped
// fractional wave equation over T^1, with CSV/SVG artifacts and a checksummed
// run manifest.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "fdwave/fdwave.hpp"

namespace fs = std::filesystem;
using namespace fdwave;

namespace {

std::vector<double> geometric_grid(double lo, double hi, int count, bool descending) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = descending ? hi : lo;
    return g;
  }
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    g[i] = descending ? hi * std::pow(lo / hi, t) : lo * std::pow(hi / lo, t);
  }
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = (lo + hi) / 2.0;
    return g;
  }
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

fs::path resolve_output_dir(const ExperimentConfig& cfg) {
  std::string dir = cfg.output_dir;
  if (dir.empty()) {
    const char* env = std::getenv("FDWAVE_OUTPUT_DIR");
    dir = env && *env ? env : "fdwave_out";
  }
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

double effective_beta(const ExperimentConfig& cfg, const DampingProfile& profile) {
  return cfg.beta >= 0.0 ? cfg.beta : profile.declared_beta;
}

int run_rates(const ExperimentConfig& cfg) {
  const double beta = cfg.beta >= 0.0 ? cfg.beta : parse_profile(cfg.profile).declared_beta;
  const RateConstants r = RateConstants::make(cfg.alpha, beta);
  std::cout << "nu_sharp = " << format_double(r.nu) << "\n";
  std::cout << "gamma_sharp = " << format_double(r.gamma) << "\n";
  return 0;
}

Table mode_table(const EigenPair& pair, const SampleField& chi, const FourierGrid& grid) {
  Table t;
  t.columns = {"x", "re_v", "im_v", "abs_v", "chi"};
  const SampleField vs = to_samples(pair.mode, grid);
  for (int j = 0; j < grid.n; ++j)
    t.add_row({grid.points[j], vs.values[j].real(), vs.values[j].imag(),
               std::abs(vs.values[j]), chi.values[j].real()});
  return t;
}

int run_modes(const ExperimentConfig& cfg) {
  const DampingProfile profile = parse_profile(cfg.profile);
  const FourierGrid grid = make_grid(cfg.n_modes);
  const SampleField chi = sample(profile, grid);

  std::vector<EigenPair> pairs;
  if (cfg.all_modes) {
    if (cfg.n_modes > 512)
      throw std::runtime_error("modes --all is limited to n_modes <= 512; use --target above");
    pairs = spectrum(assemble_generator(cfg.alpha, chi, grid));
  } else {
    pairs = modes_near_target(cfg.alpha, chi, grid, cfg.target, cfg.count);
  }

  const fs::path dir = resolve_output_dir(cfg);
  std::vector<std::string> outputs;

  Table eig;
  eig.columns = {"re_lambda", "im_lambda", "residual"};
  for (const EigenPair& p : pairs)
    eig.add_row({p.lambda.real(), p.lambda.imag(), p.residual});
  write_table((dir / "eigenvalues.csv").string(), eig);
  outputs.push_back("eigenvalues.csv");

  std::vector<EigenPair> selected = pairs;
  std::sort(selected.begin(), selected.end(), [&](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.lambda - cfg.target) < std::abs(b.lambda - cfg.target);
  });
  const int n_sel = std::min<int>(cfg.count, static_cast<int>(selected.size()));
  for (int i = 0; i < n_sel; ++i) {
    const Table mt = mode_table(selected[i], chi, grid);
    const std::string base = "mode_" + std::to_string(i);
    write_table((dir / (base + ".csv")).string(), mt);
    emit_plot(mt, "mode", (dir / (base + ".svg")).string());
    outputs.push_back(base + ".csv");
    outputs.push_back(base + ".svg");
    std::cout << "lambda[" << i << "] = " << format_double(selected[i].lambda.real()) << " + ("
              << format_double(selected[i].lambda.imag()) << ")i   residual "
              << format_double(selected[i].residual) << "\n";
  }

  const RateConstants r = RateConstants::make(cfg.alpha, effective_beta(cfg, profile));
  write_manifest(dir, cfg, outputs, r.nu, r.gamma, true);
  return 0;
}

Table scan_table(const ScanResult& scan, const RateConstants& rates) {
  Table t;
  t.columns = {"parameter", "z_worst", "norm", "N_used"};
  for (const ScanRow& row : scan.rows) {
    std::optional<double> z;
    if (row.has_z) z = row.z_worst;
    t.add_row({row.parameter, z, row.norm, static_cast<double>(row.n_used)});
  }
  t.add_footer("fitted_exponent", scan.fitted_exponent);
  t.add_footer("nu_sharp", rates.nu);
  t.add_footer("gamma_sharp", rates.gamma);
  t.add_footer("fit_residual", scan.fit_residual);
  return t;
}

int run_resolvent_scan(const ExperimentConfig& cfg) {
  const DampingProfile profile = parse_profile(cfg.profile);
  const RateConstants rates = RateConstants::make(cfg.alpha, effective_beta(cfg, profile));
  const WorkerPool pool(cfg.workers);
  ScanOptions opts;
  opts.trim = cfg.trim;
  opts.check_doubling = cfg.check_doubling;
  const ScanResult scan =
      scan_h(cfg.alpha, profile, geometric_grid(cfg.h_min, cfg.h_max, cfg.h_count, true),
             linear_grid(cfg.z_min, cfg.z_max, cfg.z_count), default_grid_rule, pool, opts);

  const fs::path dir = resolve_output_dir(cfg);
  const Table t = scan_table(scan, rates);
  write_table((dir / "scan.csv").string(), t);
  emit_plot(t, "scan", (dir / "scan.svg").string());
  write_manifest(dir, cfg, {"scan.csv", "scan.svg"}, rates.nu, rates.gamma, true);
  std::cout << "fitted_exponent = " << format_double(scan.fitted_exponent)
            << "   nu_sharp = " << format_double(rates.nu) << "\n";
  return 0;
}

int run_lambda_scan(const ExperimentConfig& cfg) {
  const DampingProfile profile = parse_profile(cfg.profile);
  const RateConstants rates = RateConstants::make(cfg.alpha, effective_beta(cfg, profile));
  const WorkerPool pool(cfg.workers);
  ScanOptions opts;
  opts.trim = cfg.trim;
  const ScanResult scan =
      scan_lambda(cfg.alpha, profile,
                  geometric_grid(cfg.lambda_min, cfg.lambda_max, cfg.lambda_count, false), pool,
                  {}, opts);

  const fs::path dir = resolve_output_dir(cfg);
  const Table t = scan_table(scan, rates);
  write_table((dir / "scan.csv").string(), t);
  emit_plot(t, "scan", (dir / "scan.svg").string());
  write_manifest(dir, cfg, {"scan.csv", "scan.svg"}, rates.nu, rates.gamma, true);
  std::cout << "fitted_exponent = " << format_double(scan.fitted_exponent)
            << "   (-2(1+nu/alpha) = "
            << format_double(-2.0 * (1.0 + rates.nu / cfg.alpha)) << ")\n";
  return 0;
}

int run_evolve(const ExperimentConfig& cfg) {
  const DampingProfile profile = parse_profile(cfg.profile);
  const FourierGrid grid = make_grid(cfg.n_modes);
  const SampleField chi = sample(profile, grid);
  const double omega_max = std::pow(grid.n / 2.0, cfg.alpha / 2.0);
  const double dt = cfg.dt > 0.0 ? cfg.dt : 0.4 / omega_max;

  const WaveState initial = broadband_initial(grid, cfg.alpha, cfg.seed);
  const EnergyTrace trace =
      evolve(initial, cfg.t_final, dt, cfg.alpha, chi, grid, cfg.sample_every, profile.name);

  Table t;
  t.columns = {"t", "E", "dissipation"};
  for (const TraceRow& r : trace.rows) t.add_row({r.t, r.energy, r.dissipation});

  const RateConstants rates = RateConstants::make(cfg.alpha, effective_beta(cfg, profile));
  double fit_hi = cfg.fit_t_max > 0.0 ? cfg.fit_t_max : std::min(cfg.t_final, 50.0);
  if (cfg.fit_t_max <= 0.0 && cfg.n_modes <= 512) {
    const double a = spectral_abscissa(spectrum(assemble_generator(cfg.alpha, chi, grid)));
    if (a < 0.0) fit_hi = std::min(fit_hi, 0.5 / std::abs(a));
    t.add_footer("spectral_abscissa", a);
  }
  try {
    t.add_footer("gamma_fit", fit_decay(trace, cfg.fit_t_min, fit_hi));
  } catch (const std::exception& e) {
    std::cerr << "fdwave: decay fit skipped: " << e.what() << "\n";
  }
  t.add_footer("gamma_sharp", rates.gamma);
  t.add_footer("nu_sharp", rates.nu);

  const fs::path dir = resolve_output_dir(cfg);
  write_table((dir / "trace.csv").string(), t);
  emit_plot(t, "trace", (dir / "trace.svg").string());
  write_manifest(dir, cfg, {"trace.csv", "trace.svg"}, rates.nu, rates.gamma, true);
  std::cout << "rows = " << trace.rows.size()
            << "   E(0) = " << format_double(trace.rows.front().energy)
            << "   E(T) = " << format_double(trace.rows.back().energy) << "\n";
  return 0;
}

int run_commutator_scan(const ExperimentConfig& cfg) {
  const DampingProfile family =
      cfg.beta >= 0.0 ? holder_profile(cfg.beta) : parse_profile(cfg.profile);
  const SeparableSymbol sym = cfg.symbol == "narrow" ? narrow_symbol() : default_symbol();
  std::vector<double> h_grid;
  for (int e = cfg.h_exp_min; e <= cfg.h_exp_max; ++e) h_grid.push_back(std::pow(2.0, -e));
  const WorkerPool pool(cfg.workers);
  const CommutatorScan scan = scaling_fit(family, sym, h_grid, pool);

  Table t;
  t.columns = {"h", "N_used", "norm", "holder_norm_f"};
  for (const CommutatorScanRow& r : scan.rows)
    t.add_row({r.h, static_cast<double>(r.n_used), r.norm, r.holder_norm_f});
  t.add_footer("fitted_slope", scan.fitted_slope);
  t.add_footer("beta_declared", scan.beta_declared);

  const fs::path dir = resolve_output_dir(cfg);
  write_table((dir / "commutator.csv").string(), t);
  emit_plot(t, "scan", (dir / "commutator.svg").string());
  const RateConstants rates = RateConstants::make(cfg.alpha, scan.beta_declared);
  write_manifest(dir, cfg, {"commutator.csv", "commutator.svg"}, rates.nu, rates.gamma, true);
  std::cout << "fitted_slope = " << format_double(scan.fitted_slope)
            << "   beta_declared = " << format_double(scan.beta_declared) << "\n";
  return 0;
}

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--alpha", cfg.alpha, "fractional exponent in (0,2)");
  cmd->add_option("--beta", cfg.beta, "Holder class of sqrt(chi) (default: from profile)");
  cmd->add_option("--profile", cfg.profile, "indicator | tanh | holder:<beta> | custom:<path>");
  cmd->add_option("--output-dir", cfg.output_dir, "output directory (env FDWAVE_OUTPUT_DIR)");
  cmd->add_option("--seed", cfg.seed, "seed for all randomness");
  cmd->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;

  // --config loads first so that explicit flags win
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    try {
      if (a == "--config" && i + 1 < argc)
        cfg = load_config(argv[i + 1], cfg);
      else if (a.rfind("--config=", 0) == 0)
        cfg = load_config(a.substr(9), cfg);
    } catch (const std::exception& e) {
      std::cerr << "fdwave: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App app{"spectral laboratory for the damped fractional wave equation on the circle"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  // config-file runs carry the command inside the file; every knob is
  // acceptable at top level so overrides work without a subcommand
  add_common_options(&app, cfg);
  app.add_option("--n-modes", cfg.n_modes);
  app.add_option("--target", cfg.target);
  app.add_option("--count", cfg.count);
  app.add_flag("--all", cfg.all_modes);
  app.add_option("--h-min", cfg.h_min);
  app.add_option("--h-max", cfg.h_max);
  app.add_option("--h-count", cfg.h_count);
  app.add_option("--z-min", cfg.z_min);
  app.add_option("--z-max", cfg.z_max);
  app.add_option("--z-count", cfg.z_count);
  app.add_option("--lambda-min", cfg.lambda_min);
  app.add_option("--lambda-max", cfg.lambda_max);
  app.add_option("--lambda-count", cfg.lambda_count);
  app.add_option("--trim", cfg.trim);
  app.add_flag("--check-doubling,!--no-check-doubling", cfg.check_doubling);
  app.add_option("--dt", cfg.dt);
  app.add_option("--t-final", cfg.t_final);
  app.add_option("--sample-every", cfg.sample_every);
  app.add_option("--fit-t-min", cfg.fit_t_min);
  app.add_option("--fit-t-max", cfg.fit_t_max);
  app.add_option("--h-exp-min", cfg.h_exp_min);
  app.add_option("--h-exp-max", cfg.h_exp_max);
  app.add_option("--symbol", cfg.symbol);

  CLI::App* rates = app.add_subcommand("rates", "print nu# and gamma# for (alpha, beta)");
  add_common_options(rates, cfg);

  CLI::App* modes = app.add_subcommand("modes", "eigenvalues and eigenmodes of P(lambda)");
  add_common_options(modes, cfg);
  modes->add_option("--n-modes", cfg.n_modes, "Fourier modes (even, >= 8)");
  modes->add_option("--target", cfg.target, "find eigenvalues nearest this real value");
  modes->add_option("--count", cfg.count, "number of modes to emit");
  modes->add_flag("--all", cfg.all_modes, "full dense spectrum (n_modes <= 512)");

  CLI::App* rscan = app.add_subcommand("resolvent-scan", "||P(h,z)^{-1}|| against h");
  add_common_options(rscan, cfg);
  rscan->add_option("--h-min", cfg.h_min, "smallest h");
  rscan->add_option("--h-max", cfg.h_max, "largest h");
  rscan->add_option("--h-count", cfg.h_count, "geometric h points");
  rscan->add_option("--z-min", cfg.z_min, "z window low edge (>= 0.9)");
  rscan->add_option("--z-max", cfg.z_max, "z window high edge (<= 1.1)");
  rscan->add_option("--z-count", cfg.z_count, "z grid points");
  rscan->add_option("--trim", cfg.trim, "fit-window trim fraction per side");
  rscan->add_flag("--check-doubling,!--no-check-doubling", cfg.check_doubling,
                  "N vs 2N stability diagnostic on fitted rows");

  CLI::App* lscan = app.add_subcommand("lambda-scan", "||P(lambda)^{-1}|| along the real axis");
  add_common_options(lscan, cfg);
  lscan->add_option("--lambda-min", cfg.lambda_min, "smallest lambda (>= 5)");
  lscan->add_option("--lambda-max", cfg.lambda_max, "largest lambda");
  lscan->add_option("--lambda-count", cfg.lambda_count, "geometric lambda points");
  lscan->add_option("--trim", cfg.trim, "fit-window trim fraction per side");

  CLI::App* evo = app.add_subcommand("evolve", "time evolution and energy trace");
  add_common_options(evo, cfg);
  evo->add_option("--n-modes", cfg.n_modes, "Fourier modes (even, >= 8)");
  evo->add_option("--dt", cfg.dt, "time step (0 = 0.4/omega_max)");
  evo->add_option("--t-final", cfg.t_final, "final time");
  evo->add_option("--sample-every", cfg.sample_every, "record every this many steps");
  evo->add_option("--fit-t-min", cfg.fit_t_min, "decay-fit window start");
  evo->add_option("--fit-t-max", cfg.fit_t_max, "decay-fit window end (0 = automatic)");

  CLI::App* cscan = app.add_subcommand("commutator-scan", "h-scaling of ||[sqrt(chi), Op_h(a)]||");
  add_common_options(cscan, cfg);
  cscan->add_option("--h-exp-min", cfg.h_exp_min, "h = 2^{-e}, smallest e");
  cscan->add_option("--h-exp-max", cfg.h_exp_max, "h = 2^{-e}, largest e");
  cscan->add_option("--symbol", cfg.symbol, "default | narrow");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (app.get_subcommands().size() == 1) cfg.command = app.get_subcommands()[0]->get_name();

  try {
    validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "fdwave: " << e.what() << "\n";
    return 1;
  }

  try {
    if (cfg.command == "rates") return run_rates(cfg);
    if (cfg.command == "modes") return run_modes(cfg);
    if (cfg.command == "resolvent-scan") return run_resolvent_scan(cfg);
    if (cfg.command == "lambda-scan") return run_lambda_scan(cfg);
    if (cfg.command == "evolve") return run_evolve(cfg);
    if (cfg.command == "commutator-scan") return run_commutator_scan(cfg);
    std::cerr << "fdwave: no command given (use a subcommand or a config file)\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fdwave: " << cfg.command << " failed: " << e.what() << "\n";
    return 2;
  }
}
