// Acceptance suite: end-to-end checks of the deliverable at pinned
// tolerances, one pass/fail line per criterion.  Exit status is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "feedcap/capacity.hpp"
#include "feedcap/coding.hpp"
#include "feedcap/finite_horizon.hpp"
#include "feedcap/rng.hpp"
#include "feedcap/sim.hpp"
#include "feedcap/verify.hpp"

using namespace feedcap;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void criterion(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %-34s %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ChannelModel third_order_channel() {
  Vec num(3), den(4);
  num << 1.0, 0.5, -0.4;
  den << 1.0, 0.0, 0.6, -0.4;
  return make_channel(rational_system(num, den));
}

double max_rel(const Mat& a, const Mat& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

int main() {
  const ChannelModel ch = third_order_channel();

  // --- Third-order design reproduction -----------------------------------
  auto t0 = Clock::now();
  const DesignResult dr = power_for_rate(ch, 1.0);
  const double design_time = seconds_since(t0);
  const EncoderDesign& d = dr.design;
  {
    const double a1 = d.n_star == 1 ? d.A_star(1, 1) : std::nan("");
    const double di_entry = d.n_star == 1 ? d.A_star(1, 0) : std::nan("");
    const bool pass = d.n_star == 1 && std::abs(std::abs(di_entry) - 2.0) < 1e-9 &&
                      std::abs(a1 - (-0.887)) <= 0.01 &&
                      std::abs(d.power - 0.743) <= 0.005 &&
                      std::abs(10.0 * std::log10(d.power) - (-1.290)) <= 0.03 &&
                      design_time <= 60.0;
    criterion("design reproduction", pass,
              fmt("n*=%d, row=(%.3f, %.4f), P=%.4f (%.3f dB), %.1f s", d.n_star,
                  di_entry, a1, d.power, 10.0 * std::log10(d.power), design_time));
  }

  // --- Steady-state rate identity over the rate grid ---------------------
  std::vector<DesignResult> grid_designs;
  {
    double worst_rate = 0.0, worst_ke = 0.0;
    for (const double rate : {0.25, 0.5, 1.0, 2.0}) {
      grid_designs.push_back(power_for_rate(ch, rate));
      const EncoderDesign& g = grid_designs.back().design;
      worst_rate = std::max(worst_rate, std::abs(0.5 * std::log2(g.ke) - rate));
      worst_ke = std::max(worst_ke, std::abs(g.ke - std::exp2(2.0 * rate)));
    }
    criterion("steady-state rate identity",
              worst_rate <= 1e-6 && worst_ke <= 1e-6,
              fmt("max|R - log2(Ke)/2| = %.2e, max|Ke - 2^{2R}| = %.2e",
                  worst_rate, worst_ke));
  }

  // --- Two-path Riccati agreement -----------------------------------------
  {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const AugmentedPlant plant = random_plant(9000 + k);
      worst = std::max(worst, max_rel(solve_steady_by_iteration(plant).sigma,
                                      solve_steady_by_reduction(plant).sigma));
    }
    const AugmentedPlant opt = d.plant();
    worst = std::max(worst, max_rel(solve_steady_by_iteration(opt).sigma,
                                    solve_steady_by_reduction(opt).sigma));
    criterion("two-path riccati agreement", worst <= 1e-8,
              fmt("max entrywise relative gap = %.2e over 21 plants", worst));
  }

  // --- Finite-horizon oracle chain ----------------------------------------
  {
    double worst_chain = 0.0, worst_power = 0.0;
    for (int k = 0; k < 20; ++k) {
      const ChannelModel rch = random_channel(4000 + k);
      const GeneralCodingConfig cfg = random_config(rch, 4400 + k, 2, 20);
      const FiniteHorizonReport rep = mmse_fisher_crb(cfg);
      double sum_ke = 0.0;
      for (const double ke : rep.ke_sequence) sum_ke += 0.5 * std::log2(ke);
      const double vals[5] = {sum_ke, mutual_info_matrix_form(cfg),
                              rep.mutual_info_bits,
                              -0.5 * std::log2(rep.mmse_W.determinant()),
                              -0.5 * std::log2(rep.crb_W.determinant())};
      for (const double a : vals) {
        for (const double b : vals) worst_chain = std::max(worst_chain, std::abs(a - b));
      }
      const AugmentedPlant plant = augment(rch, cfg.A, cfg.C);
      double p_ric = 0.0;
      for (const Mat& s : riccati_trajectory(plant, cfg.T).sigmas) {
        p_ric += (plant.Dbb * s * plant.Dbb.transpose())(0, 0);
      }
      p_ric /= (cfg.T + 1);
      worst_power = std::max(worst_power, std::abs(p_ric - rep.input_power));
    }
    criterion("finite-horizon oracle chain",
              worst_chain <= 1e-8 && worst_power <= 1e-8,
              fmt("info chain %.2e, power gap %.2e (20 configs)", worst_chain,
                  worst_power));
  }

  // --- Optimal feedback generator optimality ------------------------------
  {
    double worst_gap = 0.0, worst_perturb = 0.0;
    for (int k = 0; k < 10; ++k) {
      const ChannelModel rch = random_channel(5000 + k);
      const GeneralCodingConfig cfg = random_config(rch, 5500 + k, 2, 8);
      const FeedbackGenerators fg = optimal_feedback_generator(cfg);
      const double p_k = input_power_of_ghat(cfg, fg.ghat);
      worst_gap = std::max(
          worst_gap, std::abs(p_k - input_power_of_ghat(cfg, ghat_by_normal_equations(cfg))));
      NormalStream rng(909, k);
      for (int trial = 0; trial < 100; ++trial) {
        Mat pert = fg.ghat;
        for (int i = 1; i <= cfg.T; ++i) {
          for (int j = 0; j < i; ++j) pert(i, j) += 1e-3 * rng.next();
        }
        worst_perturb = std::max(worst_perturb, p_k - input_power_of_ghat(cfg, pert));
      }
    }
    criterion("optimal-feedback optimality",
              worst_gap <= 1e-8 && worst_perturb <= 1e-12,
              fmt("normal-eqn gap %.2e, best perturbation gain %.2e", worst_gap,
                  worst_perturb));
  }

  // --- Gauss-Markov cross-oracle ------------------------------------------
  {
    CapacityOptions copts;
    copts.rate_tol = 5e-5;
    copts.pfr.restarts = 12;
    const CapacityResult cr = capacity_for_power(ch, d.power, copts);
    GmSearchOptions gm;
    gm.restarts = 16;
    const double gm_rate = gm_max_rate_at_power(ch, d.power, gm);
    criterion("GM stationary cross-oracle",
              std::abs(gm_rate - cr.capacity_bits) <= 3e-3,
              fmt("GM %.5f vs capacity %.5f bits at P=%.4f", gm_rate,
                  cr.capacity_bits, d.power));
  }

  // --- All-pass and Bode ---------------------------------------------------
  {
    const AugmentedPlant plant = d.plant();
    const Vec gain = (Vec(plant.dim()) << d.L1, d.L2).finished();
    const StateSpaceSystem tne(plant.Abb - gain * plant.Cbb, -gain,
                               Mat(plant.Cbb), Mat::Constant(1, 1, 1.0));
    const double di = degree_of_instability(d.A_star);
    double worst = 0.0;
    for (int k = 0; k < 128; ++k) {
      const double theta = -0.5 + (k + 0.5) / 128.0;
      worst = std::max(worst, std::abs(std::abs(frequency_response(tne, theta)) - di));
    }
    const int nq = 4096;
    double integral = 0.0;
    for (int k = 0; k < nq; ++k) {
      const double theta = -0.5 + (k + 0.5) / nq;
      integral += std::log(std::abs(frequency_response(tne, theta)));
    }
    integral /= nq;
    criterion("all-pass flatness and bode integral",
              worst <= 1e-6 && std::abs(integral - std::log(di)) <= 1e-3,
              fmt("flatness %.2e, integral gap %.2e", worst,
                  std::abs(integral - std::log(di))));
  }

  // --- Digital error probability ------------------------------------------
  {
    t0 = Clock::now();
    SimConfig cfg;
    cfg.trials = 10000;
    cfg.T = 27;
    cfg.epsilon = 0.2;
    cfg.seed = 2027;
    const SimResult res = run_digital(d, cfg);
    const HorizonStat& last = res.pe_by_horizon.back();
    const double sim_time = seconds_since(t0);

    // Double-exponential decay of the closed-form curve.
    const RiccatiTrajectory traj = riccati_trajectory(d.plant(), 61);
    std::vector<double> xs, ys;
    for (int t = 14; t <= 60; ++t) {
      const double pe = theoretical_pe(d, traj, t, 0.2);
      if (pe < 0.5 && pe > 1e-280) {
        xs.push_back(t);
        ys.push_back(std::log(-std::log(pe)));
      }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
      syy += ys[i] * ys[i];
    }
    const double r = (n * sxy - sx * sy) /
                     std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));

    const bool pass = last.pe < 1e-2 &&
                      std::abs(last.pe - last.pe_theory) <= 2.0 * last.sigma &&
                      r * r >= 0.98 && sim_time <= 600.0;
    criterion("digital error probability", pass,
              fmt("PE=%.2e (theory %.2e, sigma %.1e), R^2=%.4f, %.1f s", last.pe,
                  last.pe_theory, last.sigma, r * r, sim_time));
  }

  // --- Analog rate-distortion ---------------------------------------------
  {
    const Mat mse200 = analog_mse(d, 200);
    const double slope = -std::log2(mse200.determinant()) / (2.0 * 201.0);

    SimConfig cfg;
    cfg.trials = 1000;
    cfg.T = 500;
    cfg.seed = 515;
    cfg.mode = SimMode::kAnalog;
    const SimResult res = run_analog(d, cfg);
    const double avg = res.avg_power_trace(res.avg_power_trace.size() - 1);

    criterion("analog rate-distortion and power",
              std::abs(slope - 1.0) <= 0.01 &&
                  std::abs(avg - 0.743) <= 0.05 * 0.743,
              fmt("RD slope %.4f, avg power %.4f (target 0.743 +- 5%%)", slope, avg));
  }

  // --- Upper bound, monotonicity, feedforward comparison ------------------
  {
    double worst_bound = -1e9, worst_mono = -1e9, worst_ff = -1e9;
    double prev = 0.0;
    for (std::size_t i = 0; i < grid_designs.size(); ++i) {
      const EncoderDesign& g = grid_designs[i].design;
      worst_bound = std::max(worst_bound, g.power - upper_bound(ch, g.rate));
      worst_mono = std::max(worst_mono, prev - g.power);
      prev = g.power;
      worst_ff = std::max(worst_ff, feedforward_capacity(ch, g.power) - g.rate);
    }
    criterion("bound/monotonicity/feedforward",
              worst_bound <= 1e-6 && worst_mono <= 1e-9 && worst_ff <= 1e-9,
              fmt("bound slack %.2e, monotonicity %.2e, ff gap %.2e", worst_bound,
                  worst_mono, worst_ff));
  }

  // --- AWGN degeneracy ------------------------------------------------------
  {
    const ChannelModel awgn = awgn_channel();
    double worst = 0.0;
    for (const double p : {1.0, 3.0, 15.0}) {
      CapacityOptions copts;
      copts.rate_tol = 1e-8;
      const CapacityResult cr = capacity_for_power(awgn, p, copts);
      worst = std::max(worst, std::abs(cr.capacity_bits - 0.5 * std::log2(1.0 + p)));
    }
    criterion("AWGN degeneracy", worst <= 1e-6,
              fmt("max |C - log2(1+P)/2| = %.2e", worst));
  }

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
