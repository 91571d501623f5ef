// feedcap: feedback-capacity designs, capacity curves, Monte Carlo
// simulation and the verification suite for stable minimum-phase Gaussian
// ISI channels.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "feedcap/capacity.hpp"
#include "feedcap/io.hpp"
#include "feedcap/rng.hpp"
#include "feedcap/sim.hpp"
#include "feedcap/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace feedcap;

namespace {

constexpr const char* kBundledChannel =
    R"({"kind":"rational","num":[1.0,0.5,-0.4],"den":[1.0,0.0,0.6,-0.4]})";

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads <= 0) {
    if (const char* env = std::getenv("FEEDCAP_THREADS")) {
      threads = std::atoi(env);
    }
  }
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

ChannelModel channel_from_arg(const std::string& path) {
  if (path.empty()) return channel_from_json(Json::parse(kBundledChannel));
  return load_channel(path);
}

std::string describe_design(const EncoderDesign& d) {
  std::ostringstream os;
  os << "n*            = " << d.n_star << "\n";
  os << "A* (companion, last row): ";
  for (int j = 0; j < d.A_star.cols(); ++j) {
    os << d.A_star(d.A_star.rows() - 1, j) << (j + 1 < d.A_star.cols() ? " " : "\n");
  }
  os << "eigenvalues of A*: ";
  for (const Cplx& lam : eigen_spectrum(d.A_star).eigenvalues) {
    os << lam.real() << (lam.imag() >= 0 ? "+" : "") << lam.imag() << "j  ";
  }
  os << "\n";
  os << "rate          = " << d.rate << " bits/use\n";
  os << "P_inf         = " << d.power << " (" << 10.0 * std::log10(d.power)
     << " dB)\n";
  os << "K_e           = " << d.ke << "\n";
  return os.str();
}

int cmd_design(const std::string& channel_path, double rate, double power,
               const fs::path& out_dir, int restarts) {
  const ChannelModel ch = channel_from_arg(channel_path);
  PowerForRateOptions pfr;
  if (restarts > 0) pfr.restarts = restarts;

  DesignResult result = [&] {
    if (rate > 0) return power_for_rate(ch, rate, pfr);
    CapacityOptions copts;
    copts.pfr = pfr;
    CapacityResult cr = capacity_for_power(ch, power, copts);
    return DesignResult{std::move(cr.design), cr.report};
  }();

  fs::create_directories(out_dir);
  const fs::path out = out_dir / "design.json";
  save_design(result.design, &result.report, out);
  std::cout << describe_design(result.design);
  std::cout << "written: " << out.string() << "\n";
  return 0;
}

int cmd_capacity_curve(const std::string& channel_path, const std::string& grid,
                       const std::string& db_grid, const fs::path& out_dir,
                       int restarts) {
  const ChannelModel ch = channel_from_arg(channel_path);
  std::vector<double> powers;
  if (!db_grid.empty()) {
    double lo = 0, hi = 0, step = 1;
    char c1 = 0, c2 = 0;
    std::istringstream is(db_grid);
    is >> lo >> c1 >> hi >> c2 >> step;
    if (!is || c1 != ':' || c2 != ':' || step <= 0 || hi < lo) {
      std::cerr << "bad --power-db-grid, expected lo:hi:step\n";
      return kExitUsage;
    }
    for (double db = lo; db <= hi + 1e-9; db += step) {
      powers.push_back(std::pow(10.0, db / 10.0));
    }
  } else {
    std::istringstream is(grid);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      if (!tok.empty()) powers.push_back(std::stod(tok));
    }
  }
  if (powers.empty()) {
    std::cerr << "empty power grid\n";
    return kExitUsage;
  }
  for (const double p : powers) {
    if (p <= 0) {
      std::cerr << "power grid entries must be positive\n";
      return kExitUsage;
    }
  }

  CapacityOptions copts;
  copts.rate_tol = ch.order() == 0 ? 1e-7 : 1e-4;
  copts.pfr.restarts = restarts > 0 ? restarts : 12;

  fs::create_directories(out_dir);
  const fs::path out = out_dir / "capacity_curve.csv";
  std::ostringstream csv;
  csv.precision(12);
  csv << "power_db,capacity_bits,feedforward_bits\n";
  bool any_failed = false;
  for (const double p : powers) {
    const double db = 10.0 * std::log10(p);
    try {
      const CapacityResult cr = capacity_for_power(ch, p, copts);
      const double ff = feedforward_capacity(ch, p);
      csv << db << "," << cr.capacity_bits << "," << ff << "\n";
      std::cout << db << " dB: C = " << cr.capacity_bits << " bits, feedforward "
                << ff << " bits\n";
      // Neighboring grid points give the next solve a head start.
      copts.bracket_hint = cr.capacity_bits;
      copts.pfr.warm_starts.clear();
      for (const BranchOutcome* b :
           {&cr.report.plus, &cr.report.minus, &cr.report.pass1_plus,
            &cr.report.pass1_minus}) {
        if (b->converged) copts.pfr.warm_starts.push_back(b->a_f);
      }
    } catch (const Error& e) {
      any_failed = true;
      csv << db << ",nan,nan\n";
      std::cerr << db << " dB: failed (" << e.what() << ")\n";
    }
  }
  write_text(out, csv.str());
  std::cout << "written: " << out.string() << "\n";
  return any_failed ? kExitNumerical : 0;
}

int cmd_simulate(const std::string& design_path, const std::string& mode,
                 long trials, int T, double epsilon, std::uint64_t seed,
                 const std::string& w_fixed, bool serial, bool zero_noise,
                 const fs::path& out_dir) {
  const EncoderDesign design = load_design(design_path);
  SimConfig cfg;
  cfg.trials = trials;
  cfg.T = T;
  cfg.epsilon = epsilon;
  cfg.seed = seed;
  cfg.zero_noise = zero_noise;
  if (!w_fixed.empty()) {
    std::istringstream is(w_fixed);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(is, tok, ',')) vals.push_back(std::stod(tok));
    Vec w(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) w(static_cast<int>(i)) = vals[i];
    cfg.w_fixed = w;
  }

  SimResult res;
  try {
    if (mode == "digital") {
      cfg.mode = SimMode::kDigital;
      fs::create_directories(out_dir);
      write_text(out_dir / "codebook.json",
                 codebook_summary(build_codebook(design, cfg.T, cfg.epsilon)).dump(2) +
                     "\n");
      res = serial ? run_digital_serial(design, cfg) : run_digital(design, cfg);
    } else if (mode == "analog") {
      cfg.mode = SimMode::kAnalog;
      res = serial ? run_analog_serial(design, cfg) : run_analog(design, cfg);
    } else {
      std::cerr << "--mode must be digital or analog\n";
      return kExitUsage;
    }
  } catch (const HorizonError& e) {
    std::cerr << "horizon error: " << e.what()
              << "\nhint: increase --T or --epsilon\n";
    return kExitNumerical;
  }

  export_sim_result(res, out_dir);
  if (!res.pe_by_horizon.empty()) {
    const HorizonStat& last = res.pe_by_horizon.back();
    std::cout << "final PE = " << last.pe << " +- " << last.sigma
              << " (theory " << last.pe_theory << ")\n";
  }
  std::cout << "final avg power = "
            << res.avg_power_trace(res.avg_power_trace.size() - 1) << "\n";
  std::cout << "written: " << (out_dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_verify(const std::string& channel_path, bool full, std::uint64_t seed) {
  const ChannelModel ch = channel_from_arg(channel_path);
  const std::vector<CheckResult> checks =
      full ? run_full_checks(ch, seed) : run_quick_checks(ch, seed);
  std::cout << format_check_table(checks);
  const int failures =
      static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                     [](const CheckResult& c) { return !c.pass; }));
  std::cout << (failures == 0 ? "all checks passed\n"
                              : std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : kExitNumerical;
}

int cmd_example(const std::string& channel_path, const fs::path& out_dir,
                std::uint64_t seed, long trials) {
  const ChannelModel ch = channel_from_arg(channel_path);
  fs::create_directories(out_dir);

  std::cout << "solving the rate-1 design...\n";
  const DesignResult dr = power_for_rate(ch, 1.0);
  const EncoderDesign& d = dr.design;
  save_design(d, &dr.report, out_dir / "design.json");
  std::cout << describe_design(d);

  int misses = 0;
  auto expect = [&](const std::string& name, double value, double target,
                    double tol) {
    const bool ok = std::abs(value - target) <= tol;
    std::cout << (ok ? "[ok]   " : "[MISS] ") << name << ": " << value
              << " (expected " << target << " +- " << tol << ")\n";
    if (!ok) ++misses;
  };

  expect("n_star", d.n_star, 1.0, 0.0);
  expect("P_inf", d.power, 0.743, 0.005);
  expect("P_inf_dB", 10.0 * std::log10(d.power), -1.290, 0.03);
  expect("K_e", d.ke, 4.0, 1e-6);
  if (d.n_star == 1) {
    expect("a_1", d.A_star(1, 1), -0.887, 0.01);
  }

  // Digital transmission at the schedule of the published experiment.
  SimConfig dig;
  dig.trials = trials;
  dig.T = 27;
  dig.epsilon = 0.2;
  dig.seed = seed;
  dig.mode = SimMode::kDigital;
  const SimResult dres = run_digital(d, dig);
  export_sim_result(dres, out_dir / "digital");
  const HorizonStat& last = dres.pe_by_horizon.back();
  std::cout << "digital: PE(T=27) = " << last.pe << " +- " << last.sigma
            << ", theory " << last.pe_theory << "\n";
  if (last.pe >= 1e-2) {
    std::cout << "[MISS] empirical PE above 1e-2\n";
    ++misses;
  }
  if (std::abs(last.pe - last.pe_theory) > 2.0 * std::max(last.sigma, 1e-12)) {
    std::cout << "[MISS] empirical PE further than 2 sigma from theory\n";
    ++misses;
  }

  // Analog transmission: single published trace plus the power average.
  SimConfig ana;
  ana.trials = 1;
  ana.T = 200;
  ana.seed = seed;
  ana.mode = SimMode::kAnalog;
  if (d.n_star == 1) {
    Vec w(2);
    w << -0.2, -0.7;
    ana.w_fixed = w;
  }
  const SimResult ares = run_analog(d, ana);
  export_sim_result(ares, out_dir / "analog");
  {
    const Vec noise = [&] {
      Vec nv(ana.T + 1);
      for (int t = 0; t <= ana.T; ++t) nv(t) = normal_at(seed, 0, t);
      return nv;
    }();
    const TransmissionTrace tr =
        run_transmission(d, ch, ana.w_fixed ? *ana.w_fixed : Vec::Zero(d.n_star + 1),
                         ana.T, noise);
    export_trace(tr, out_dir / "analog" / "trace.csv");
  }

  SimConfig pw;
  pw.trials = 1000;
  pw.T = 500;
  pw.seed = seed + 1;
  pw.mode = SimMode::kAnalog;
  const SimResult pres = run_analog(d, pw);
  const double final_power = pres.avg_power_trace(pres.avg_power_trace.size() - 1);
  expect("avg power at T=500", final_power, d.power, 0.05 * d.power);

  const Mat mse = analog_mse(d, 200);
  expect("rate-distortion slope at T=200",
         -std::log2(mse.determinant()) / (2.0 * 201.0), 1.0, 0.01);

  std::cout << (misses == 0 ? "example reproduced within tolerances\n"
                            : std::to_string(misses) + " comparison(s) missed\n");
  return misses == 0 ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feedback capacity toolkit for Gaussian ISI channels"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "cap OpenMP workers (default: all)");

  std::string channel_path, out_dir = ".";
  std::uint64_t seed = 1;

  auto* design = app.add_subcommand("design", "solve for an operating point");
  double rate = 0.0, power = 0.0;
  int restarts = 0;
  design->add_option("--channel", channel_path, "channel JSON (default: bundled)");
  design->add_option("--rate", rate, "target rate, bits per channel use");
  design->add_option("--power", power, "target average power");
  design->add_option("--out", out_dir, "output directory");
  design->add_option("--restarts", restarts, "optimizer restarts");

  auto* curve = app.add_subcommand("capacity-curve", "feedback vs feedforward curve");
  std::string grid, db_grid;
  curve->add_option("--channel", channel_path, "channel JSON (default: bundled)");
  curve->add_option("--power-grid", grid, "comma-separated powers (linear)");
  curve->add_option("--power-db-grid", db_grid, "lo:hi:step in dB");
  curve->add_option("--out", out_dir, "output directory");
  curve->add_option("--restarts", restarts, "optimizer restarts per point");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo transmission");
  std::string design_path, mode = "digital", w_fixed;
  long trials = 10000;
  int T = 27;
  double epsilon = 0.2;
  bool serial = false, zero_noise = false;
  sim->add_option("--design", design_path, "design JSON")->required();
  sim->add_option("--mode", mode, "digital | analog");
  sim->add_option("--trials", trials, "number of trials");
  sim->add_option("--T", T, "horizon (coding length T+1)");
  sim->add_option("--epsilon", epsilon, "rate back-off in (0,1)");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--w", w_fixed, "fixed analog W, comma-separated");
  sim->add_flag("--serial", serial, "use the serial reference implementation");
  sim->add_flag("--zero-noise", zero_noise, "disable channel noise (debug)");
  sim->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  bool quick = false, full = false;
  verify->add_option("--channel", channel_path, "channel JSON (default: bundled)");
  verify->add_flag("--quick", quick, "quick suite (default)");
  verify->add_flag("--full", full, "adds the optimizer cross-oracles");
  verify->add_option("--seed", seed, "suite seed");

  auto* example = app.add_subcommand("example", "reproduce the third-order example");
  example->add_option("--channel", channel_path, "channel JSON (default: bundled)");
  example->add_option("--out", out_dir, "output directory");
  example->add_option("--seed", seed, "Monte Carlo seed");
  example->add_option("--trials", trials, "digital trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  apply_threads(threads);

  try {
    if (design->parsed()) {
      const bool has_rate = design->count("--rate") > 0;
      const bool has_power = design->count("--power") > 0;
      if (has_rate == has_power) {
        std::cerr << "exactly one of --rate or --power is required\n";
        return kExitUsage;
      }
      if (has_rate && rate <= 0) {
        std::cerr << "rate must be positive\n";
        return kExitUsage;
      }
      if (has_power && power <= 0) {
        std::cerr << "power must be positive\n";
        return kExitUsage;
      }
      return cmd_design(channel_path, has_rate ? rate : 0.0,
                        has_power ? power : 0.0, out_dir, restarts);
    }
    if (curve->parsed()) {
      return cmd_capacity_curve(channel_path, grid, db_grid, out_dir, restarts);
    }
    if (sim->parsed()) {
      return cmd_simulate(design_path, mode, trials, T, epsilon, seed, w_fixed,
                          serial, zero_noise, out_dir);
    }
    if (verify->parsed()) {
      return cmd_verify(channel_path, full, seed);
    }
    if (example->parsed()) {
      return cmd_example(channel_path, out_dir, seed,
                         example->count("--trials") ? trials : 10000);
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DimensionError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
