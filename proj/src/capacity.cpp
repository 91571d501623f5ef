#include "feedcap/capacity.hpp"

#include <algorithm>
#include <cmath>

namespace feedcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fast objective for one candidate a_f on one sign branch: power of the
// reduced-order stabilizing solution, +inf on any infeasibility.
double branch_objective(const ChannelModel& ch, double signed_di, const Vec& a_f,
                        const PowerForRateOptions& opts) {
  const Mat A = companion_form(signed_di, a_f);
  const int n1 = static_cast<int>(A.rows());
  const Spectrum sa = eigen_spectrum(A);
  for (const Cplx& lam : sa.eigenvalues) {
    if (std::abs(std::abs(lam) - 1.0) < opts.boundary_reject) return kInf;
  }
  const int m = ch.order();
  RowVec c_red = RowVec::Zero(n1);
  c_red(0) = 1.0;
  if (m > 0) {
    const Spectrum sf = eigen_spectrum(ch.F());
    for (const Cplx& la : sa.eigenvalues) {
      for (const Cplx& lf : sf.eigenvalues) {
        if (std::abs(la - lf) < 1e-6) return kInf;
      }
    }
    Mat phi;
    try {
      phi = solve_sylvester(ch.F(), A, -(ch.G() * c_red));
    } catch (const Error&) {
      return kInf;
    }
    c_red += ch.H() * phi;
  }
  try {
    const RiccatiSolution red = solve_singular_dare(
        A, c_red, Mat::Identity(n1, n1), opts.dare_tol, opts.dare_max_iter);
    return red.sigma(0, 0);  // C = e_1' so the power is the (0,0) entry
  } catch (const Error&) {
    return kInf;
  }
}

BranchOutcome solve_branch(const ChannelModel& ch, double signed_di, int n,
                           const PowerForRateOptions& opts, int* evals) {
  std::vector<Vec> seeds;
  seeds.push_back(Vec::Zero(n));
  for (const Vec& w : opts.warm_starts) {
    if (static_cast<int>(w.size()) == n) seeds.push_back(w);
  }
  MultistartOptions mo;
  mo.restarts = opts.restarts;
  mo.seed = opts.seed;
  mo.parallel = opts.parallel;
  mo.local.max_evals = 200 * std::max(n, 1);
  mo.local.f_tol = 1e-11;
  mo.local.x_tol = 1e-9;
  const MultistartResult res = multistart_minimize(
      [&](const Vec& a) { return branch_objective(ch, signed_di, a, opts); }, n,
      seeds, mo);
  if (evals) *evals += res.total_evals;
  BranchOutcome out;
  out.best = res.value;
  out.a_f = res.x;
  out.converged = std::isfinite(res.value);
  return out;
}

struct PassResult {
  BranchOutcome plus, minus;
  double signed_di = 0.0;
  Vec a_f;
  double best = kInf;
};

PassResult run_pass(const ChannelModel& ch, double di, int n,
                    const PowerForRateOptions& opts, int* evals) {
  PassResult pr;
  pr.plus = solve_branch(ch, +di, n, opts, evals);
  pr.minus = solve_branch(ch, -di, n, opts, evals);
  // Equal objectives resolve to the +DI branch.
  const bool plus_wins =
      pr.plus.best <= pr.minus.best + 1e-9 * std::max(1.0, std::abs(pr.minus.best));
  if (plus_wins) {
    pr.signed_di = +di;
    pr.a_f = pr.plus.a_f;
    pr.best = pr.plus.best;
  } else {
    pr.signed_di = -di;
    pr.a_f = pr.minus.a_f;
    pr.best = pr.minus.best;
  }
  return pr;
}

int count_unstable(const Mat& A, double count_tol) {
  int count = 0;
  for (const Cplx& lam : eigen_spectrum(A).eigenvalues) {
    if (std::abs(lam) > 1.0 + count_tol) ++count;
  }
  return count;
}

}  // namespace

DesignResult power_for_rate(const ChannelModel& ch, double rate_bits,
                            const PowerForRateOptions& opts) {
  if (!(rate_bits > 0.0)) {
    throw ValidationError("power_for_rate: rate must be positive");
  }
  const double di = std::exp2(rate_bits);
  const int m = ch.order();

  // At low rates the design eigenvalues themselves sit near the unit circle,
  // so the infeasibility band and the mode-counting threshold must scale with
  // the available gap, and slow near-circle convergence needs a larger budget.
  const double di_gap = di - 1.0;
  PowerForRateOptions eff = opts;
  eff.boundary_reject = std::min(opts.boundary_reject, 0.25 * di_gap);
  eff.count_tol = std::min(opts.count_tol, 0.5 * di_gap);
  if (di_gap < 10.0 * opts.boundary_reject) {
    const double need = 80.0 / std::max(eff.boundary_reject, 1e-9);
    eff.dare_max_iter = std::max(opts.dare_max_iter,
                                 static_cast<int>(std::min(need, 4.0e6)));
  }

  OptimizerReport report;
  report.restarts = eff.restarts;
  report.pass1_n = std::max(m - 1, 0);

  int n = report.pass1_n;
  PassResult pass = run_pass(ch, di, n, eff, &report.total_evals);
  if (!std::isfinite(pass.best)) {
    throw ConvergenceError("power_for_rate: optimizer failed on both branches");
  }
  report.pass1_plus = pass.plus;
  report.pass1_minus = pass.minus;

  // Count the meaningfully unstable modes of the pass-1 solution and
  // re-solve at that order; repeat if the count keeps shrinking.
  for (int guard = 0; guard <= m + 1; ++guard) {
    const Mat a_opt = companion_form(pass.signed_di, pass.a_f);
    const int count = count_unstable(a_opt, eff.count_tol);
    const int n_star = std::max(count - 1, 0);
    if (n_star == n) break;
    n = n_star;
    pass = run_pass(ch, di, n, eff, &report.total_evals);
    if (!std::isfinite(pass.best)) {
      throw ConvergenceError("power_for_rate: optimizer failed at n* = " +
                             std::to_string(n));
    }
  }
  report.plus = pass.plus;
  report.minus = pass.minus;
  report.n_star = n;
  report.chosen_branch = pass.signed_di > 0 ? '+' : '-';

  EncoderDesign d;
  d.n_star = n;
  d.A_star = companion_form(pass.signed_di, pass.a_f);
  d.C_star = RowVec::Zero(n + 1);
  d.C_star(0) = 1.0;
  d.channel = ch;

  // Authoritative solve on the full plant; the budget scales with the gap
  // between the slowest design mode and the unit circle.
  const AugmentedPlant plant = augment(ch, d.A_star, d.C_star);
  const int final_budget = std::max(
      200000, static_cast<int>(std::min(35.0 / std::max(di_gap, 1e-8), 5.0e6)));
  const RiccatiSolution sol = solve_steady_by_iteration(plant, 1e-12, final_budget);
  d.sigma_star = sol.sigma;
  d.sigma_x_star = sol.sigma.topLeftCorner(n + 1, n + 1);
  d.L1 = sol.gain.head(n + 1);
  d.L2 = sol.gain.tail(m);
  d.ke = sol.ke;
  d.power = (plant.Dbb * sol.sigma * plant.Dbb.transpose())(0, 0);
  d.rate = std::log2(degree_of_instability(d.A_star));

  for (const Cplx& lam : eigen_spectrum(d.A_star).eigenvalues) {
    if (std::abs(lam) <= 1.0 + kCircleTol) {
      throw ConvergenceError(
          "power_for_rate: accepted design is not purely unstable");
    }
  }
  if (std::abs(d.rate - rate_bits) > 1e-6 * std::max(1.0, rate_bits)) {
    throw ConvergenceError("power_for_rate: rate identity violated");
  }
  if (std::abs(d.ke - std::exp2(2.0 * d.rate)) > 1e-6 * d.ke) {
    throw ConvergenceError("power_for_rate: K_e != 2^{2R} at the fixed point");
  }
  const double bound = upper_bound(ch, rate_bits);
  const double bound_slack = std::max(1e-6, 1e-9 * bound * std::max(1.0, di));
  if (d.power > bound + bound_slack) {
    throw ConvergenceError("power_for_rate: power exceeds the closed-form bound");
  }
  return DesignResult{std::move(d), report};
}

CapacityResult capacity_for_power(const ChannelModel& ch, double power,
                                  const CapacityOptions& opts) {
  if (!(power > 0.0)) {
    throw ValidationError("capacity_for_power: power must be positive");
  }

  PowerForRateOptions pfr = opts.pfr;
  auto eval = [&](double rate) {
    DesignResult r = power_for_rate(ch, rate, pfr);
    // Carry both passes' solutions forward as warm starts for nearby rates.
    pfr.warm_starts.clear();
    for (const BranchOutcome* b : {&r.report.plus, &r.report.minus,
                                   &r.report.pass1_plus, &r.report.pass1_minus}) {
      if (b->converged) pfr.warm_starts.push_back(b->a_f);
    }
    return r;
  };

  const bool hinted = opts.bracket_hint > 0.0;
  double lo = hinted ? std::max(opts.bracket_lo, opts.bracket_hint / 3.0)
                     : opts.bracket_lo;
  DesignResult at_lo = eval(lo);
  if (at_lo.design.power >= power) {
    // Power target below the bracket: shrink geometrically.
    for (int i = 0; i < 40 && at_lo.design.power > power; ++i) {
      lo *= 0.5;
      at_lo = eval(lo);
    }
  }
  // Probe the upper end geometrically from a moderate rate; extreme rates
  // are evaluated only when the target actually calls for them.
  double hi = hinted ? std::min(std::max(1.4 * opts.bracket_hint, 2.0 * lo),
                                opts.bracket_hi)
                     : std::min(4.0, opts.bracket_hi);
  DesignResult at_hi = eval(hi);
  while (at_hi.design.power < power && hi < opts.bracket_hi) {
    lo = hi;
    hi = std::min(2.0 * hi, opts.bracket_hi);
    at_hi = eval(hi);
  }
  if (at_lo.design.power > power || at_hi.design.power < power) {
    throw ConvergenceError("capacity_for_power: bracket failure at [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  DesignResult best = at_hi;
  for (int i = 0; i < opts.max_iter && (hi - lo) > opts.rate_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    DesignResult at_mid = eval(mid);
    if (at_mid.design.power >= power) {
      hi = mid;
      best = std::move(at_mid);
    } else {
      lo = mid;
    }
  }
  CapacityResult out;
  out.capacity_bits = best.design.rate;
  out.design = std::move(best.design);
  out.report = best.report;
  return out;
}

double upper_bound(const ChannelModel& ch, double rate_bits) {
  const double di = std::exp2(rate_bits);
  const double snr_term = std::exp2(2.0 * rate_bits) - 1.0;
  double best = kInf;
  for (const double z : {di, -di}) {
    const Cplx zinv_val = transfer_at(ch.inv_z, Cplx(z, 0.0));
    if (std::abs(zinv_val) < 1e-12) {
      throw SingularEquationError("upper_bound: Z has a pole at " +
                                  std::to_string(z));
    }
    const double zval = 1.0 / zinv_val.real();
    best = std::min(best, snr_term * zval * zval);
  }
  return best;
}

GmPoint gm_rate_power(const ChannelModel& ch, const Vec& d) {
  const int m = ch.order();
  if (m < 1) {
    throw ValidationError("gm_rate_power: channel memory required (m >= 1)");
  }
  if (d.size() != m) throw DimensionError("gm_rate_power: d must have length m");

  const Mat Q = ch.F() + ch.G() * d.transpose();
  const RowVec c = ch.H() + d.transpose();
  const Spectrum sq = eigen_spectrum(Q);
  if (sq.unit_circle_count > 0) {
    throw ConvergenceError("gm_rate_power: closed loop has a unit-circle mode");
  }
  const RiccatiSolution sol =
      solve_singular_dare(Q, c, Mat::Identity(m, m), 1e-12, 200000);
  GmPoint p;
  p.rate = 0.5 * std::log2(sol.ke);
  p.power = (d.transpose() * sol.sigma * d)(0, 0);
  return p;
}

namespace {

// Scales rho * d onto the power surface; returns rate there, or -inf if the
// direction cannot reach the target power.
double gm_rate_at_projected(const ChannelModel& ch, const Vec& dir, double power,
                            double match_tol) {
  if (dir.cwiseAbs().maxCoeff() < 1e-12) return -kInf;
  auto point = [&](double rho) -> std::optional<GmPoint> {
    try {
      return gm_rate_power(ch, rho * dir);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  double hi = 1.0;
  std::optional<GmPoint> at_hi = point(hi);
  int expand = 0;
  while ((!at_hi || at_hi->power < power) && expand < 90) {
    hi *= 1.7;
    at_hi = point(hi);
    ++expand;
  }
  if (!at_hi || at_hi->power < power) return -kInf;
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const std::optional<GmPoint> at_mid = point(mid);
    if (at_mid && at_mid->power >= power) {
      hi = mid;
      at_hi = at_mid;
    } else {
      lo = mid;
    }
    if (at_hi->power - power < match_tol * std::max(1.0, power) &&
        at_hi->power >= power) {
      break;
    }
  }
  return at_hi->rate;
}

}  // namespace

double gm_max_rate_at_power(const ChannelModel& ch, double power,
                            const GmSearchOptions& opts) {
  const int m = ch.order();
  if (m < 1) {
    throw ValidationError("gm_max_rate_at_power: channel memory required");
  }
  MultistartOptions mo;
  mo.restarts = opts.restarts;
  mo.seed = opts.seed;
  mo.parallel = opts.parallel;
  mo.local.max_evals = 400 * m;
  std::vector<Vec> seeds;
  seeds.push_back(Vec::Ones(m));
  const MultistartResult res = multistart_minimize(
      [&](const Vec& dir) {
        const double r =
            gm_rate_at_projected(ch, dir, power, opts.power_match_tol);
        return std::isfinite(r) ? -r : kInf;
      },
      m, seeds, mo);
  if (!std::isfinite(res.value)) {
    throw ConvergenceError("gm_max_rate_at_power: no feasible direction found");
  }
  return -res.value;
}

double feedforward_capacity(const ChannelModel& ch, double power, int quad_points) {
  if (!(power > 0.0)) {
    throw ValidationError("feedforward_capacity: power must be positive");
  }
  const int n = quad_points;
  Vec noise_psd(n);
  for (int k = 0; k < n; ++k) {
    const double theta = -0.5 + (k + 0.5) / n;
    const Cplx zi = frequency_response(ch.inv_z, theta);
    noise_psd(k) = 1.0 / std::norm(zi);
  }
  const double nmin = noise_psd.minCoeff();

  auto filled = [&](double level) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += std::max(level - noise_psd(k), 0.0);
    return acc / n;
  };
  double lo = nmin;
  double hi = nmin + power + 1.0;
  while (filled(hi) < power) hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (filled(mid) >= power ? hi : lo) = mid;
  }
  const double level = 0.5 * (lo + hi);

  double bits = 0.0;
  for (int k = 0; k < n; ++k) {
    bits += 0.5 * std::log2(std::max(level, noise_psd(k)) / noise_psd(k));
  }
  return bits / n;
}

}  // namespace feedcap
