#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "feedcap/coding.hpp"

namespace feedcap {

enum class SimMode { kDigital, kAnalog };

struct SimConfig {
  long trials = 1000;
  int T = 27;
  double epsilon = 0.2;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::kDigital;
  std::optional<Vec> w_fixed;             // analog mode
  bool zero_noise = false;                // debug switch
  std::vector<int> mse_checkpoints = {5, 10, 20};
  // Budget on trials * (T + 1) so a typo cannot swallow the machine.
  long long cell_budget = 400000000;
};

struct HorizonStat {
  int horizon = 0;
  long errors = 0;
  long trials = 0;
  double pe = 0.0;
  double sigma = 0.0;      // binomial error bar (Wilson below 30 errors)
  double pe_theory = 0.0;
};

struct SimResult {
  SimMode mode = SimMode::kDigital;
  long trials = 0;
  int T = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  std::vector<HorizonStat> pe_by_horizon;  // digital: every time step up to T
  Vec avg_power_trace;                     // mean running power across trials

  std::vector<int> mse_checkpoints;        // analog
  std::vector<Mat> mse_empirical;
  std::vector<Mat> mse_theory;             // exact covariance of the steady-gain loop
  std::vector<Mat> mse_theory_kf;          // time-varying-filter (asymptotic) predictor
};

// Monte Carlo over independent trials.  Per trial: a uniformly random
// message (digital) or Gaussian/fixed W (analog), a fresh noise substream
// derived from (seed, trial), one transmission, decoding at every horizon.
// The parallel entry points use OpenMP over trials; results are identical
// to the serial reference for any thread count because every trial writes
// its own slot and reduction order is fixed.
SimResult run_digital(const EncoderDesign& design, const SimConfig& cfg);
SimResult run_digital_serial(const EncoderDesign& design, const SimConfig& cfg);
SimResult run_analog(const EncoderDesign& design, const SimConfig& cfg);
SimResult run_analog_serial(const EncoderDesign& design, const SimConfig& cfg);

}  // namespace feedcap
