#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "feedcap/channel.hpp"
#include "feedcap/optim.hpp"
#include "feedcap/riccati.hpp"

namespace feedcap {

// Deliverable of the capacity optimizer: the steady-state encoder/decoder
// parameters for one operating point, together with the channel it was
// designed against.
struct EncoderDesign {
  int n_star = 0;
  Mat A_star;          // (n*+1) square, purely unstable
  RowVec C_star;       // [1, 0, ...]
  Vec L1;              // n*+1
  Vec L2;              // m
  Mat sigma_star;      // full stabilizing error covariance
  Mat sigma_x_star;    // message block [I 0] Sigma [I 0]'
  double rate = 0.0;   // bits per channel use, log2 DI(A*)
  double power = 0.0;  // Dbb Sigma Dbb'
  double ke = 1.0;
  ChannelModel channel;

  AugmentedPlant plant() const { return augment(channel, A_star, C_star); }
};

struct BranchOutcome {
  double best = std::numeric_limits<double>::infinity();
  Vec a_f;
  bool converged = false;
};

struct OptimizerReport {
  BranchOutcome plus, minus;   // +DI and -DI branches of the final pass
  BranchOutcome pass1_plus, pass1_minus;
  int restarts = 0;
  int total_evals = 0;
  int pass1_n = 0;
  int n_star = 0;
  char chosen_branch = '+';
};

struct PowerForRateOptions {
  int restarts = 32;
  std::uint64_t seed = 0xfeedca9001ULL;
  bool parallel = true;
  double dare_tol = 1e-12;
  int dare_max_iter = 20000;
  // Candidates with an eigenvalue this close to the unit circle are
  // infeasible for the inner DARE solve and get +inf objective.
  double boundary_reject = 3e-3;
  // |lambda| must exceed 1 + count_tol to count as an unstable mode when
  // choosing n*.
  double count_tol = 1e-2;
  std::vector<Vec> warm_starts;  // applied to solves of matching dimension
};

struct DesignResult {
  EncoderDesign design;
  OptimizerReport report;
};

// The two-pass Riccati-constrained power minimization at a fixed rate:
// pass 1 at encoder order n = max(m-1, 0), count the unstable modes of the
// optimizer's A, then re-solve at n = n*.
DesignResult power_for_rate(const ChannelModel& ch, double rate_bits,
                            const PowerForRateOptions& opts = {});

struct CapacityOptions {
  double rate_tol = 1e-6;       // bisection bracket width on the rate
  double bracket_lo = 1e-4;
  double bracket_hi = 20.0;
  double bracket_hint = 0.0;    // expected rate; narrows the initial probe
  int max_iter = 90;
  PowerForRateOptions pfr;
};

struct CapacityResult {
  double capacity_bits = 0.0;
  EncoderDesign design;
  OptimizerReport report;
};

// Inverts power_for_rate by bisection on the rate.
CapacityResult capacity_for_power(const ChannelModel& ch, double power,
                                  const CapacityOptions& opts = {});

// Closed-form bound min over the +-2^R evaluations of Z, from the
// one-unstable-eigenvalue design.
double upper_bound(const ChannelModel& ch, double rate_bits);

// Gauss-Markov stationary formulation with the white injection removed:
// for a gain vector d, the stabilizing solution of the closed-loop Riccati
// equation gives (rate, power) = (log2-rate of the innovation, d' Sigma_s d).
struct GmPoint {
  double rate = 0.0;
  double power = 0.0;
};

GmPoint gm_rate_power(const ChannelModel& ch, const Vec& d);

struct GmSearchOptions {
  int restarts = 24;
  std::uint64_t seed = 0xfeedca9002ULL;
  bool parallel = true;
  double power_match_tol = 1e-9;
};

// Independent oracle: maximum GM rate over d at a fixed power, handled by
// projecting candidate directions onto the power surface by scaling.
double gm_max_rate_at_power(const ChannelModel& ch, double power,
                            const GmSearchOptions& opts = {});

// Feedforward capacity of the equivalent colored-noise channel by
// waterfilling over |Z(e^{j 2 pi theta})|^2.
double feedforward_capacity(const ChannelModel& ch, double power,
                            int quad_points = 4096);

}  // namespace feedcap
