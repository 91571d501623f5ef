#include "feedcap/sim.hpp"

#include <cmath>

#include "feedcap/rng.hpp"

namespace feedcap {

namespace {

// Counter layout within a trial substream: noise draws use counters
// 0 .. T, the message draw lives at 2^40, analog W components above 2^41.
constexpr std::uint64_t kMessageCounter = std::uint64_t{1} << 40;
constexpr std::uint64_t kWCounter = std::uint64_t{1} << 41;

Vec trial_noise(const SimConfig& cfg, long trial) {
  Vec noise = Vec::Zero(cfg.T + 1);
  if (!cfg.zero_noise) {
    for (int t = 0; t <= cfg.T; ++t) {
      noise(t) = normal_at(cfg.seed, static_cast<std::uint64_t>(trial), t);
    }
  }
  return noise;
}

void binomial_stat(HorizonStat& st) {
  const double n = static_cast<double>(st.trials);
  const double p = static_cast<double>(st.errors) / n;
  st.pe = p;
  if (st.errors >= 30) {
    st.sigma = std::sqrt(p * (1.0 - p) / n);
  } else {
    // Wilson interval half-width at one standard score.
    const double z = 1.0;
    const double denom = 1.0 + z * z / n;
    st.sigma = (z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))) / denom;
  }
}

void check_budget(const SimConfig& cfg) {
  if (cfg.trials < 1) throw ValidationError("sim: trials must be >= 1");
  if (static_cast<long long>(cfg.trials) * (cfg.T + 1) > cfg.cell_budget) {
    throw ValidationError("sim: trials * (T+1) exceeds the configured budget");
  }
}

SimResult run_digital_impl(const EncoderDesign& design, const SimConfig& cfg,
                           bool parallel) {
  check_budget(cfg);
  const Codebook book = build_codebook(design, cfg.T, cfg.epsilon);
  const RiccatiTrajectory traj = riccati_trajectory(design.plant(), cfg.T + 1);
  const long n_trials = cfg.trials;
  const int n_horizons = cfg.T + 1;

  // Per-trial slots keep the reduction deterministic under any scheduling.
  std::vector<std::uint8_t> err(static_cast<std::size_t>(n_trials) * n_horizons);
  Mat power(n_trials, cfg.T + 1);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long i = 0; i < n_trials; ++i) {
    const double u = uniform01(cfg.seed, static_cast<std::uint64_t>(i), kMessageCounter);
    const std::int64_t msg = std::min<std::int64_t>(
        book.message_count - 1,
        static_cast<std::int64_t>(u * static_cast<double>(book.message_count)));
    const Vec w = encode_message(book, msg);
    const Vec noise = trial_noise(cfg, i);
    const TransmissionTrace tr = run_transmission(design, design.channel, w, cfg.T, noise);
    for (int h = 0; h < n_horizons; ++h) {
      const std::int64_t dec = decode_message(book, tr.x_hat_0.row(h).transpose());
      err[static_cast<std::size_t>(i) * n_horizons + h] = (dec != msg) ? 1 : 0;
    }
    power.row(i) = tr.power_running_avg.transpose();
  }

  SimResult res;
  res.mode = SimMode::kDigital;
  res.trials = n_trials;
  res.T = cfg.T;
  res.epsilon = cfg.epsilon;
  res.seed = cfg.seed;
  res.pe_by_horizon.resize(n_horizons);
  for (int h = 0; h < n_horizons; ++h) {
    HorizonStat& st = res.pe_by_horizon[h];
    st.horizon = h;
    st.trials = n_trials;
    for (long i = 0; i < n_trials; ++i) {
      st.errors += err[static_cast<std::size_t>(i) * n_horizons + h];
    }
    binomial_stat(st);
    st.pe_theory = theoretical_pe(design, traj, h, cfg.epsilon);
  }
  res.avg_power_trace = power.colwise().mean().transpose();
  return res;
}

SimResult run_analog_impl(const EncoderDesign& design, const SimConfig& cfg,
                          bool parallel) {
  check_budget(cfg);
  const int n1 = design.n_star + 1;
  if (cfg.w_fixed && cfg.w_fixed->size() != n1) {
    throw DimensionError("sim: fixed W must have length n*+1");
  }
  const RiccatiTrajectory traj = riccati_trajectory(design.plant(), cfg.T + 1);
  const long n_trials = cfg.trials;

  std::vector<int> checkpoints;
  for (int t : cfg.mse_checkpoints) {
    if (t >= 0 && t <= cfg.T) checkpoints.push_back(t);
  }
  const int n_check = static_cast<int>(checkpoints.size());

  Mat power(n_trials, cfg.T + 1);
  Mat errs(n_trials, static_cast<long>(n_check) * n1);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long i = 0; i < n_trials; ++i) {
    Vec w(n1);
    if (cfg.w_fixed) {
      w = *cfg.w_fixed;
    } else {
      for (int j = 0; j < n1; ++j) {
        w(j) = normal_at(cfg.seed, static_cast<std::uint64_t>(i), kWCounter + j);
      }
    }
    const Vec noise = trial_noise(cfg, i);
    const TransmissionTrace tr = run_transmission(design, design.channel, w, cfg.T, noise);
    power.row(i) = tr.power_running_avg.transpose();
    for (int c = 0; c < n_check; ++c) {
      const Vec e = w - tr.x_hat_0.row(checkpoints[c]).transpose();
      errs.row(i).segment(static_cast<long>(c) * n1, n1) = e.transpose();
    }
  }

  SimResult res;
  res.mode = SimMode::kAnalog;
  res.trials = n_trials;
  res.T = cfg.T;
  res.epsilon = cfg.epsilon;
  res.seed = cfg.seed;
  res.avg_power_trace = power.colwise().mean().transpose();
  res.mse_checkpoints = checkpoints;
  for (int c = 0; c < n_check; ++c) {
    Mat acc = Mat::Zero(n1, n1);
    for (long i = 0; i < n_trials; ++i) {
      const Vec e = errs.row(i).segment(static_cast<long>(c) * n1, n1).transpose();
      acc += e * e.transpose();
    }
    res.mse_empirical.push_back(acc / static_cast<double>(n_trials));
    res.mse_theory.push_back(analog_mse_loop(design, checkpoints[c]));
    res.mse_theory_kf.push_back(analog_mse(design, traj, checkpoints[c]));
  }
  return res;
}

}  // namespace

SimResult run_digital(const EncoderDesign& design, const SimConfig& cfg) {
  return run_digital_impl(design, cfg, true);
}

SimResult run_digital_serial(const EncoderDesign& design, const SimConfig& cfg) {
  return run_digital_impl(design, cfg, false);
}

SimResult run_analog(const EncoderDesign& design, const SimConfig& cfg) {
  return run_analog_impl(design, cfg, true);
}

SimResult run_analog_serial(const EncoderDesign& design, const SimConfig& cfg) {
  return run_analog_impl(design, cfg, false);
}

}  // namespace feedcap
