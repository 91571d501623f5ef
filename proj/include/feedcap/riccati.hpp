#pragma once

#include <vector>

#include "feedcap/statespace.hpp"

namespace feedcap {

// Filtering plant for the estimation-error dynamics of an encoder (A, C)
// driving a channel (F, G, H, 1):
//
//   Abb = [ A   0 ]    Cbb = [ C  H ]    Dbb = [ C  0 ]
//         [ GC  F ]
//
// The block structure is assembled (and therefore verified) on construction.
struct AugmentedPlant {
  Mat A;      // (n+1) x (n+1) encoder state map
  RowVec C;   // 1 x (n+1)
  Mat F;      // m x m channel state map
  Vec G;      // m
  RowVec H;   // 1 x m
  Mat Abb;
  RowVec Cbb;
  RowVec Dbb;

  AugmentedPlant(Mat a, RowVec c, Mat f, Vec g, RowVec h);

  int n() const { return static_cast<int>(A.rows()) - 1; }
  int m() const { return static_cast<int>(F.rows()); }
  int dim() const { return static_cast<int>(Abb.rows()); }
};

// blkdiag(I_{n+1}, 0_m): the message block starts with identity covariance,
// the channel state starts known.
Mat riccati_initial_condition(int n, int m);

struct RiccatiStepResult {
  Mat sigma_next;
  Vec gain;
  double ke = 1.0;
};

// One step of sigma+ = A S A' - A S C' C S A' / (C S C' + 1), re-symmetrized.
RiccatiStepResult riccati_step(const AugmentedPlant& plant, const Mat& sigma);

struct RiccatiTrajectory {
  std::vector<Mat> sigmas;  // Sigma_0 .. Sigma_T
  std::vector<Vec> gains;   // L_0 .. L_{T-1}
  std::vector<double> ke;   // K_{e,0} .. K_{e,T}
};

RiccatiTrajectory riccati_trajectory(const AugmentedPlant& plant, int T);

enum class RiccatiPath { kIteration, kReducedOrder };

struct RiccatiSolution {
  Mat sigma;
  Vec gain;
  double ke = 1.0;
  int rank = 0;
  double closed_loop_radius = 0.0;
  RiccatiPath path = RiccatiPath::kIteration;
  int iterations = 0;
  double residual = 0.0;  // last successive-difference max norm
};

// Generic fixed-point iteration of the singular filtering Riccati recursion
// for an arbitrary pair (A, C) from a given initial covariance.  Returns the
// limit with its stabilizing certificate.  Used by the augmented-plant solver
// and by the Gauss-Markov oracle.
RiccatiSolution solve_singular_dare(const Mat& A, const RowVec& C,
                                    const Mat& sigma0, double tol = 1e-12,
                                    int max_iter = 200000);

// Steady state by iterating the recursion from riccati_initial_condition.
RiccatiSolution solve_steady_by_iteration(const AugmentedPlant& plant,
                                          double tol = 1e-12,
                                          int max_iter = 200000);

// Steady state by Sylvester block-diagonalization: solve
// F phi - phi A = -G C, reduce to an (n+1)-dimensional Riccati equation in
// the transformed coordinates, and reconstruct the full covariance.
RiccatiSolution solve_steady_by_reduction(const AugmentedPlant& plant,
                                          double tol = 1e-12,
                                          int max_iter = 200000);

// Numerical rank from singular values with relative threshold.
int matrix_rank(const Mat& m, double rel_tol = 1e-6);

}  // namespace feedcap
