#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "feedcap/base.hpp"

namespace feedcap {

using Objective = std::function<double(const Vec&)>;

struct NelderMeadOptions {
  double initial_step = 0.25;
  double f_tol = 1e-12;
  double x_tol = 1e-10;
  int max_evals = 2000;
};

struct NelderMeadResult {
  Vec x;
  double value = std::numeric_limits<double>::infinity();
  int evals = 0;
  bool converged = false;
};

// Derivative-free simplex search; infeasible points signalled by +inf.
NelderMeadResult nelder_mead(const Objective& f, const Vec& x0,
                             const NelderMeadOptions& opts = {});

struct MultistartOptions {
  int restarts = 32;            // random starts in the box, plus the listed seeds
  double box_low = -3.0;
  double box_high = 3.0;
  std::uint64_t seed = 0xfeedca9001ULL;
  bool parallel = true;         // OpenMP over starts; result independent of scheduling
  NelderMeadOptions local;
};

struct MultistartResult {
  Vec x;
  double value = std::numeric_limits<double>::infinity();
  int total_evals = 0;
  int converged_runs = 0;
  std::vector<Vec> starts;
};

// Runs a local search from deterministic random starts (plus user-supplied
// seed points) and min-reduces.  The winner is selected by (value, start
// index) so the reduction is independent of thread scheduling.
MultistartResult multistart_minimize(const Objective& f, int dim,
                                     const std::vector<Vec>& seed_points,
                                     const MultistartOptions& opts = {});

}  // namespace feedcap
