#include "feedcap/riccati.hpp"

#include <cmath>
#include <sstream>

namespace feedcap {

AugmentedPlant::AugmentedPlant(Mat a, RowVec c, Mat f, Vec g, RowVec h)
    : A(std::move(a)), C(std::move(c)), F(std::move(f)), G(std::move(g)), H(std::move(h)) {
  const int n1 = static_cast<int>(A.rows());
  const int mm = static_cast<int>(F.rows());
  if (A.rows() != A.cols() || n1 < 1) {
    throw DimensionError("AugmentedPlant: A must be square and non-empty");
  }
  if (C.cols() != n1) throw DimensionError("AugmentedPlant: C must be 1 x (n+1)");
  if (F.rows() != F.cols()) throw DimensionError("AugmentedPlant: F must be square");
  if (G.size() != mm || H.cols() != mm) {
    throw DimensionError("AugmentedPlant: G, H must match channel order");
  }
  Abb = Mat::Zero(n1 + mm, n1 + mm);
  Abb.topLeftCorner(n1, n1) = A;
  if (mm > 0) {
    Abb.bottomLeftCorner(mm, n1) = G * C;
    Abb.bottomRightCorner(mm, mm) = F;
  }
  Cbb.resize(n1 + mm);
  Cbb.head(n1) = C;
  Cbb.tail(mm) = H;
  Dbb = RowVec::Zero(n1 + mm);
  Dbb.head(n1) = C;
}

Mat riccati_initial_condition(int n, int m) {
  if (n < 0 || m < 0) throw DimensionError("riccati_initial_condition: negative dims");
  Mat s = Mat::Zero(n + 1 + m, n + 1 + m);
  s.topLeftCorner(n + 1, n + 1).setIdentity();
  return s;
}

namespace {

// sigma+ = A S A' - (A S C')(C S A')/(C S C' + 1) for an arbitrary pair.
inline void step_once(const Mat& A, const RowVec& C, const Mat& sigma, Mat& out,
                      Vec* gain, double* ke) {
  const double k = (C * sigma * C.transpose())(0, 0) + 1.0;
  const Vec asc = A * (sigma * C.transpose());
  out.noalias() = A * sigma * A.transpose();
  out.noalias() -= asc * (asc.transpose() / k);
  out = 0.5 * (out + out.transpose());  // symmetry drifts in finite precision
  if (gain) *gain = asc / k;
  if (ke) *ke = k;
}

}  // namespace

RiccatiStepResult riccati_step(const AugmentedPlant& plant, const Mat& sigma) {
  if (sigma.rows() != plant.dim() || sigma.cols() != plant.dim()) {
    throw DimensionError("riccati_step: sigma dimension mismatch");
  }
  RiccatiStepResult r;
  step_once(plant.Abb, plant.Cbb, sigma, r.sigma_next, &r.gain, &r.ke);
  return r;
}

RiccatiTrajectory riccati_trajectory(const AugmentedPlant& plant, int T) {
  if (T < 0) throw DimensionError("riccati_trajectory: negative horizon");
  RiccatiTrajectory traj;
  traj.sigmas.reserve(T + 1);
  traj.gains.reserve(T);
  traj.ke.reserve(T + 1);
  Mat sigma = riccati_initial_condition(plant.n(), plant.m());
  for (int t = 0; t <= T; ++t) {
    traj.sigmas.push_back(sigma);
    RiccatiStepResult r = riccati_step(plant, sigma);
    traj.ke.push_back(r.ke);
    if (t < T) traj.gains.push_back(r.gain);
    sigma = std::move(r.sigma_next);
  }
  return traj;
}

int matrix_rank(const Mat& m, double rel_tol) {
  if (m.rows() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec sv = svd.singularValues();
  // Absolute floor so a covariance that converged to zero reports rank 0.
  const double thresh = std::max(rel_tol * sv(0), 1e-9);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
  }
  return rank;
}

RiccatiSolution solve_singular_dare(const Mat& A, const RowVec& C,
                                    const Mat& sigma0, double tol, int max_iter) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d || C.cols() != d || sigma0.rows() != d || sigma0.cols() != d) {
    throw DimensionError("solve_singular_dare: dimension mismatch");
  }
  Mat sigma = sigma0;
  Mat next(d, d), work(d, d);
  Vec sc(d), asc(d);
  // One step amplifies rounding noise by about ||A||^2, which puts a floor
  // under the reachable successive-difference tolerance.
  const double noise_floor =
      8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, A.squaredNorm());
  const double tol_eff = std::max(tol, noise_floor);
  double diff = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    sc.noalias() = sigma * C.transpose();
    const double k = (C * sc)(0) + 1.0;
    asc.noalias() = A * sc;
    work.noalias() = sigma * A.transpose();
    next.noalias() = A * work;
    const double inv_k = 1.0 / k;
    for (int i = 0; i < d; ++i) {
      next(i, i) -= asc(i) * asc(i) * inv_k;
      for (int j = i + 1; j < d; ++j) {
        const double v =
            0.5 * (next(i, j) + next(j, i)) - asc(i) * asc(j) * inv_k;
        next(i, j) = v;
        next(j, i) = v;
      }
    }
    diff = (next - sigma).cwiseAbs().maxCoeff();
    sigma.swap(next);
    // Tolerance is absolute up to unit scale and relative beyond it, since
    // the successive difference of a large covariance bottoms out at the
    // precision floor.
    if (diff < tol_eff * std::max(1.0, sigma.cwiseAbs().maxCoeff())) break;
  }
  if (it >= max_iter) {
    std::ostringstream os;
    os << "singular DARE iteration did not converge; last residual " << diff;
    throw ConvergenceError(os.str());
  }

  RiccatiSolution sol;
  sol.sigma = sigma;
  sol.iterations = it + 1;
  sol.residual = diff;
  const double k = (C * sigma * C.transpose())(0, 0) + 1.0;
  sol.ke = k;
  sol.gain = A * (sigma * C.transpose()) / k;
  sol.closed_loop_radius = spectral_radius(A - sol.gain * C);
  sol.rank = matrix_rank(sigma);
  sol.path = RiccatiPath::kIteration;
  if (sol.closed_loop_radius >= 1.0) {
    throw ConvergenceError("singular DARE fixed point is not stabilizing (radius " +
                           std::to_string(sol.closed_loop_radius) + ")");
  }
  return sol;
}

RiccatiSolution solve_steady_by_iteration(const AugmentedPlant& plant, double tol,
                                          int max_iter) {
  return solve_singular_dare(plant.Abb, plant.Cbb,
                             riccati_initial_condition(plant.n(), plant.m()), tol,
                             max_iter);
}

RiccatiSolution solve_steady_by_reduction(const AugmentedPlant& plant, double tol,
                                          int max_iter) {
  const int n1 = plant.n() + 1;
  const int m = plant.m();

  // F phi - phi A = -G C decouples the channel block; the remaining
  // (n+1)-dimensional equation uses the effective output map C + H phi.
  Mat phi;
  if (m > 0) {
    phi = solve_sylvester(plant.F, plant.A, -(plant.G * plant.C));
  } else {
    phi = Mat::Zero(0, n1);
  }
  RowVec c_red = plant.C;
  if (m > 0) c_red += plant.H * phi;

  RiccatiSolution red =
      solve_singular_dare(plant.A, c_red, Mat::Identity(n1, n1), tol, max_iter);

  RiccatiSolution sol;
  sol.sigma = Mat::Zero(n1 + m, n1 + m);
  sol.sigma.topLeftCorner(n1, n1) = red.sigma;
  if (m > 0) {
    sol.sigma.topRightCorner(n1, m) = red.sigma * phi.transpose();
    sol.sigma.bottomLeftCorner(m, n1) = phi * red.sigma;
    sol.sigma.bottomRightCorner(m, m) = phi * red.sigma * phi.transpose();
  }
  sol.sigma = 0.5 * (sol.sigma + sol.sigma.transpose());
  sol.iterations = red.iterations;
  sol.residual = red.residual;
  const double k = (plant.Cbb * sol.sigma * plant.Cbb.transpose())(0, 0) + 1.0;
  sol.ke = k;
  sol.gain = plant.Abb * (sol.sigma * plant.Cbb.transpose()) / k;
  sol.closed_loop_radius = spectral_radius(plant.Abb - sol.gain * plant.Cbb);
  sol.rank = matrix_rank(sol.sigma);
  sol.path = RiccatiPath::kReducedOrder;
  if (sol.closed_loop_radius >= 1.0) {
    throw ConvergenceError("reduced-order DARE solution is not stabilizing");
  }
  return sol;
}

}  // namespace feedcap
