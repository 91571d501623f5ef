#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "feedcap/io.hpp"
#include "feedcap/rng.hpp"
#include "feedcap/sim.hpp"

using namespace feedcap;

namespace {

ChannelModel third_order_channel() {
  Vec num(3), den(4);
  num << 1.0, 0.5, -0.4;
  den << 1.0, 0.0, 0.6, -0.4;
  return make_channel(rational_system(num, den));
}

const EncoderDesign& paper_design() {
  static const EncoderDesign d = [] {
    PowerForRateOptions o;
    o.restarts = 12;
    return power_for_rate(third_order_channel(), 1.0, o).design;
  }();
  return d;
}

}  // namespace

TEST_CASE("normal source statistics") {
  const long n = 1000000;
  double s1 = 0, s2 = 0, lag = 0;
  double prev = 0;
  for (long i = 0; i < n; ++i) {
    const double x = normal_at(123, 5, i);
    s1 += x;
    s2 += x * x;
    if (i > 0) lag += x * prev;
    prev = x;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  const double rho1 = (lag / (n - 1)) / var;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(rho1) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("substreams are independent of draw order") {
  // Counter-based draws: reading a stream twice or out of order is identical.
  Vec a(16), b(16);
  for (int i = 0; i < 16; ++i) a(i) = normal_at(9, 3, i);
  for (int i = 15; i >= 0; --i) b(i) = normal_at(9, 3, i);
  CHECK(a.isApprox(b));
  CHECK(normal_at(9, 3, 0) != normal_at(9, 4, 0));
}

TEST_CASE("trial budget guard") {
  SimConfig cfg;
  cfg.trials = 100000000;
  cfg.T = 500;
  CHECK_THROWS_AS(run_digital(paper_design(), cfg), ValidationError);
  cfg.trials = 0;
  CHECK_THROWS_AS(run_digital(paper_design(), cfg), ValidationError);
}

TEST_CASE("zero-noise digital run has no errors") {
  SimConfig cfg;
  cfg.trials = 50;
  cfg.T = 27;
  cfg.epsilon = 0.2;
  cfg.seed = 3;
  cfg.zero_noise = true;
  const SimResult res = run_digital(paper_design(), cfg);
  CHECK(res.pe_by_horizon.back().errors == 0);
}

TEST_CASE("determinism and parallel/serial equivalence") {
  SimConfig cfg;
  cfg.trials = 500;
  cfg.T = 27;
  cfg.epsilon = 0.2;
  cfg.seed = 77;

  const SimResult a = run_digital(paper_design(), cfg);
  const SimResult b = run_digital(paper_design(), cfg);
  const SimResult c = run_digital_serial(paper_design(), cfg);

  REQUIRE(a.pe_by_horizon.size() == b.pe_by_horizon.size());
  for (std::size_t h = 0; h < a.pe_by_horizon.size(); ++h) {
    CHECK(a.pe_by_horizon[h].errors == b.pe_by_horizon[h].errors);
    CHECK(a.pe_by_horizon[h].errors == c.pe_by_horizon[h].errors);
  }
  CHECK(a.avg_power_trace.isApprox(b.avg_power_trace, 0.0));
  CHECK(a.avg_power_trace.isApprox(c.avg_power_trace, 0.0));

  cfg.mode = SimMode::kAnalog;
  const SimResult pa = run_analog(paper_design(), cfg);
  const SimResult ps = run_analog_serial(paper_design(), cfg);
  CHECK(pa.avg_power_trace.isApprox(ps.avg_power_trace, 0.0));
  for (std::size_t i = 0; i < pa.mse_empirical.size(); ++i) {
    CHECK(pa.mse_empirical[i].isApprox(ps.mse_empirical[i], 0.0));
  }
}

TEST_CASE("digital error rate tracks the closed form") {
  SimConfig cfg;
  cfg.trials = 4000;
  cfg.T = 27;
  cfg.epsilon = 0.2;
  cfg.seed = 11;
  const SimResult res = run_digital(paper_design(), cfg);
  const HorizonStat& last = res.pe_by_horizon.back();
  CHECK(last.pe < 1e-2);
  CHECK(std::abs(last.pe - last.pe_theory) <= 3.0 * std::max(last.sigma, 1e-4));

  // Monotone nonincreasing past the transient, modulo binomial noise.
  for (std::size_t h = 12; h + 1 < res.pe_by_horizon.size(); ++h) {
    const HorizonStat& a = res.pe_by_horizon[h];
    const HorizonStat& b = res.pe_by_horizon[h + 1];
    CHECK(b.pe <= a.pe + 2.0 * (a.sigma + b.sigma) + 1e-9);
  }
}

TEST_CASE("analog distortion matches the loop prediction") {
  SimConfig cfg;
  cfg.trials = 10000;
  cfg.T = 25;
  cfg.seed = 19;
  cfg.mode = SimMode::kAnalog;
  cfg.mse_checkpoints = {5, 10, 20};
  const SimResult res = run_analog(paper_design(), cfg);
  REQUIRE(res.mse_checkpoints.size() == 3);
  for (std::size_t c = 0; c < res.mse_checkpoints.size(); ++c) {
    const Mat& emp = res.mse_empirical[c];
    const Mat& theory = res.mse_theory[c];
    for (int i = 0; i < emp.rows(); ++i) {
      for (int j = 0; j < emp.cols(); ++j) {
        // Standard error of a sample covariance entry.
        const double se = std::sqrt((theory(i, i) * theory(j, j) +
                                     theory(i, j) * theory(i, j)) /
                                    cfg.trials);
        CHECK(std::abs(emp(i, j) - theory(i, j)) <= 3.0 * se);
      }
    }
    // The filter predictor is a lower bound and converges from below.
    CHECK(res.mse_theory_kf[c].trace() <= theory.trace() + 1e-12);
  }
}

TEST_CASE("analog power average approaches the design power") {
  SimConfig cfg;
  cfg.trials = 300;
  cfg.T = 500;
  cfg.seed = 23;
  cfg.mode = SimMode::kAnalog;
  const SimResult res = run_analog(paper_design(), cfg);
  const double final_avg = res.avg_power_trace(res.avg_power_trace.size() - 1);
  CHECK(final_avg == doctest::Approx(paper_design().power).epsilon(0.08));
}

TEST_CASE("fixed analog message reproduces the published trace shape") {
  SimConfig cfg;
  cfg.trials = 4;
  cfg.T = 120;
  cfg.seed = 29;
  cfg.mode = SimMode::kAnalog;
  Vec w(2);
  w << -0.2, -0.7;
  cfg.w_fixed = w;
  const SimResult res = run_analog(paper_design(), cfg);
  CHECK(res.avg_power_trace.size() == 121);

  // The decoder estimate converges to the fixed message on every trial.
  const Vec noise = [&] {
    Vec nv(cfg.T + 1);
    for (int t = 0; t <= cfg.T; ++t) nv(t) = normal_at(cfg.seed, 0, t);
    return nv;
  }();
  const TransmissionTrace tr =
      run_transmission(paper_design(), paper_design().channel, w, cfg.T, noise);
  CHECK((w - tr.x_hat_0.row(cfg.T).transpose()).norm() < 0.02);
}

TEST_CASE("export formats") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() /
                                    "feedcap_test_export";
  std::filesystem::remove_all(dir);

  SimConfig cfg;
  cfg.trials = 200;
  cfg.T = 27;
  cfg.epsilon = 0.2;
  cfg.seed = 31;
  const SimResult res = run_digital(paper_design(), cfg);
  export_sim_result(res, dir);

  std::ifstream pe(dir / "pe_curve.csv");
  REQUIRE(pe.good());
  std::string header;
  std::getline(pe, header);
  CHECK(header == "T,pe_emp,pe_emp_sigma,pe_theory");
  int rows = 0;
  std::string line, last_line;
  while (std::getline(pe, line)) {
    if (!line.empty()) {
      ++rows;
      last_line = line;
    }
  }
  CHECK(rows == cfg.T + 1);

  // Read back the final row and compare with the in-memory values.
  std::istringstream last(last_line);
  std::string tok;
  std::getline(last, tok, ',');
  CHECK(std::stoi(tok) == cfg.T);
  std::getline(last, tok, ',');
  CHECK(std::stod(tok) == res.pe_by_horizon.back().pe);  // 17-digit round trip

  std::ifstream summary(dir / "summary.json");
  REQUIRE(summary.good());
  Json j;
  summary >> j;
  CHECK(j.at("trials").get<long>() == cfg.trials);

  // Trace export schema.
  const Vec noise = Vec::Zero(11);
  const TransmissionTrace tr =
      run_transmission(paper_design(), paper_design().channel, Vec::Zero(2), 10, noise);
  export_trace(tr, dir / "trace.csv");
  std::ifstream trace_in(dir / "trace.csv");
  std::getline(trace_in, header);
  CHECK(header == "t,u,y,power_avg,xhat0_0,xhat0_1");

  std::filesystem::remove_all(dir);
}
