#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feedcap/capacity.hpp"
#include "feedcap/finite_horizon.hpp"

namespace feedcap {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Deterministic generators for randomized property suites.
ChannelModel random_channel(std::uint64_t seed, int max_order = 3);
GeneralCodingConfig random_config(const ChannelModel& ch, std::uint64_t seed,
                                  int max_n = 2, int max_T = 20);
AugmentedPlant random_plant(std::uint64_t seed);

// Invariant suites; each entry carries the measured residual and its bound.
std::vector<CheckResult> run_quick_checks(const ChannelModel& ch,
                                          std::uint64_t seed = 2024);
std::vector<CheckResult> run_full_checks(const ChannelModel& ch,
                                         std::uint64_t seed = 2024);

std::string format_check_table(const std::vector<CheckResult>& checks);
bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace feedcap
