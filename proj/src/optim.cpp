#include "feedcap/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feedcap/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace feedcap {

NelderMeadResult nelder_mead(const Objective& f, const Vec& x0,
                             const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult res;

  if (n == 0) {
    res.x = x0;
    res.value = f(x0);
    res.evals = 1;
    res.converged = true;
    return res;
  }

  std::vector<Vec> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 1; i <= n; ++i) {
    double step = opts.initial_step;
    if (std::abs(x0(i - 1)) > 1.0) step *= std::abs(x0(i - 1));
    pts[i](i - 1) += step;
  }
  int evals = 0;
  for (int i = 0; i <= n; ++i) {
    fv[i] = f(pts[i]);
    ++evals;
  }

  std::vector<int> order(n + 1);
  while (evals < opts.max_evals) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], worst = order[n], second_worst = order[n - 1];

    if (std::isfinite(fv[best]) && std::isfinite(fv[worst])) {
      const double fspread = std::abs(fv[worst] - fv[best]);
      double xspread = 0.0;
      for (int i = 1; i <= n; ++i) {
        xspread = std::max(xspread, (pts[order[i]] - pts[best]).cwiseAbs().maxCoeff());
      }
      if (fspread <= opts.f_tol * std::max(1.0, std::abs(fv[best])) &&
          xspread <= opts.x_tol) {
        res.converged = true;
        break;
      }
    }

    Vec centroid = Vec::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= n;

    const Vec xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[best]) {
      const Vec xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second_worst]) {
      pts[worst] = xr;
      fv[worst] = fr;
    } else {
      const Vec xc = centroid + 0.5 * (pts[worst] - centroid);
      const double fc = f(xc);
      ++evals;
      if (fc < fv[worst]) {
        pts[worst] = xc;
        fv[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          fv[i] = f(pts[i]);
          ++evals;
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (fv[i] < fv[best]) best = i;
  }
  res.x = pts[best];
  res.value = fv[best];
  res.evals = evals;
  return res;
}

MultistartResult multistart_minimize(const Objective& f, int dim,
                                     const std::vector<Vec>& seed_points,
                                     const MultistartOptions& opts) {
  std::vector<Vec> starts = seed_points;
  for (int r = 0; r < opts.restarts; ++r) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) {
      const double u = uniform01(opts.seed, static_cast<std::uint64_t>(r),
                                 static_cast<std::uint64_t>(i));
      x(i) = opts.box_low + u * (opts.box_high - opts.box_low);
    }
    starts.push_back(x);
  }

  const int count = static_cast<int>(starts.size());
  std::vector<NelderMeadResult> results(count);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
#endif
  for (int i = 0; i < count; ++i) {
    results[i] = nelder_mead(f, starts[i], opts.local);
  }

  MultistartResult out;
  out.starts = starts;
  int winner = -1;
  for (int i = 0; i < count; ++i) {
    out.total_evals += results[i].evals;
    if (results[i].converged) ++out.converged_runs;
    if (winner < 0 || results[i].value < results[winner].value) winner = i;
  }
  if (winner >= 0) {
    out.x = results[winner].x;
    out.value = results[winner].value;
  }
  return out;
}

}  // namespace feedcap
