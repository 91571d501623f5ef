#pragma once

#include <vector>

#include "feedcap/base.hpp"

namespace feedcap {

// Discrete-time linear system x+ = A x + B u, y = C x + D u.
// state_dim == 0 is legal and denotes a static (memoryless) system.
struct StateSpaceSystem {
  Mat A, B, C, D;

  StateSpaceSystem() : A(0, 0), B(0, 1), C(1, 0), D(Mat::Zero(1, 1)) {}
  StateSpaceSystem(Mat a, Mat b, Mat c, Mat d);

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }
  bool siso() const { return input_dim() == 1 && output_dim() == 1; }

  // Static SISO gain.
  static StateSpaceSystem gain(double d);
};

// For a SISO system with invertible feedthrough, the realization of the
// inverse input/output map: (A - B D^-1 C, B D^-1, -D^-1 C, D^-1).
StateSpaceSystem inverse_system(const StateSpaceSystem& sys);

struct Spectrum {
  std::vector<Cplx> eigenvalues;
  int unstable_count = 0;     // strictly outside the unit circle
  int unit_circle_count = 0;  // within tol of the unit circle
};

Spectrum eigen_spectrum(const Mat& m, double tol = kCircleTol);

// Product of |lambda| over eigenvalues strictly outside the unit circle;
// 1 when there are none.
double degree_of_instability(const Mat& m, double tol = kCircleTol);

// Companion matrix [[0_{n x 1}, I_n], [top_coeff, a_f]] of size (n+1).
// Characteristic polynomial: z^{n+1} - a_n z^n - ... - a_1 z - top_coeff
// with a_f = (a_1, ..., a_n); det = (-1)^n * top_coeff.
Mat companion_form(double top_coeff, const Vec& a_f);

// Stacked [C; CA; ...; CA^{rows-1}].
Mat observability_matrix(const Mat& A, const RowVec& C, int rows);

bool is_observable(const Mat& A, const RowVec& C, double tol = 1e-9);
bool is_controllable(const Mat& A, const Vec& B, double tol = 1e-9);

// Solves F*phi - phi*A = Q for phi (F m x m, A k x k, Q m x k) by
// Kronecker vectorization.  Requires lambda(F) and lambda(A) disjoint.
Mat solve_sylvester(const Mat& F, const Mat& A, const Mat& Q);

// Lower-triangular Toeplitz operator of an impulse response h_0..h_T.
// Acting on a length-(T+1) vector equals causal convolution truncated
// to the horizon.
struct ToeplitzOperator {
  Vec impulse;
  bool strictly_causal = false;

  ToeplitzOperator() = default;
  ToeplitzOperator(Vec h, bool strict);

  int size() const { return static_cast<int>(impulse.size()); }
  Vec apply(const Vec& u) const;
  Mat dense() const;
};

// Impulse response h_0 = D, h_t = C A^{t-1} B for t >= 1, truncated at T.
ToeplitzOperator toeplitz_of(const StateSpaceSystem& sys, int T,
                             bool strictly_causal = false);

// D + C (e^{j 2 pi theta} I - A)^{-1} B for SISO sys, theta in [-1/2, 1/2].
Cplx frequency_response(const StateSpaceSystem& sys, double theta);

// Evaluation of the transfer function at an arbitrary complex point.
Cplx transfer_at(const StateSpaceSystem& sys, const Cplx& z);

double spectral_radius(const Mat& m);

}  // namespace feedcap
