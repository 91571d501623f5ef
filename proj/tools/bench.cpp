// Benchmark: OpenMP kernels against their serial reference implementations.
// The Monte Carlo harness and the multistart optimizer are the two
// data-parallel hot paths; both must produce bit-identical results in either
// mode, so this target reports timing only.

#include <chrono>
#include <iostream>

#include "feedcap/capacity.hpp"
#include "feedcap/io.hpp"
#include "feedcap/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace feedcap;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "built without OpenMP\n";
#endif

  const ChannelModel ch = channel_from_json(
      Json::parse(R"({"kind":"rational","num":[1.0,0.5,-0.4],"den":[1.0,0.0,0.6,-0.4]})"));

  // Optimizer: serial vs parallel multistart.
  {
    PowerForRateOptions opts;
    opts.parallel = false;
    auto t0 = Clock::now();
    const DesignResult serial = power_for_rate(ch, 1.0, opts);
    const double t_serial = ms_since(t0);

    opts.parallel = true;
    t0 = Clock::now();
    const DesignResult parallel = power_for_rate(ch, 1.0, opts);
    const double t_parallel = ms_since(t0);

    std::cout << "power_for_rate   serial " << t_serial << " ms, parallel "
              << t_parallel << " ms, speedup " << t_serial / t_parallel
              << ", |dP| = " << std::abs(serial.design.power - parallel.design.power)
              << "\n";

    // Monte Carlo: serial vs parallel trials.
    SimConfig cfg;
    cfg.trials = 4000;
    cfg.T = 27;
    cfg.epsilon = 0.2;
    cfg.seed = 7;
    t0 = Clock::now();
    const SimResult rs = run_digital_serial(serial.design, cfg);
    const double t_sim_serial = ms_since(t0);
    t0 = Clock::now();
    const SimResult rp = run_digital(serial.design, cfg);
    const double t_sim_parallel = ms_since(t0);

    long mismatch = 0;
    for (std::size_t h = 0; h < rs.pe_by_horizon.size(); ++h) {
      mismatch += std::abs(rs.pe_by_horizon[h].errors - rp.pe_by_horizon[h].errors);
    }
    std::cout << "run_digital      serial " << t_sim_serial << " ms, parallel "
              << t_sim_parallel << " ms, speedup " << t_sim_serial / t_sim_parallel
              << ", error-count mismatch " << mismatch << "\n";
  }
  return 0;
}
