#pragma once

#include <cstdint>
#include <vector>

#include "feedcap/capacity.hpp"

namespace feedcap {

// One run of the bounded (stabilized) realization of the coding loop.
// u_t depends on y^{t-1} only; all internal signals stay bounded because the
// transmitter propagates the estimation error x~ instead of the raw encoder
// state.
struct TransmissionTrace {
  Vec u;                  // channel inputs, length T+1
  Vec y;                  // channel outputs, length T+1
  Mat x_hat_0;            // row t = decoder estimate of W at time t
  Vec power_running_avg;  // running average of u^2
};

// Runs the loop seeded with x~_0 = W (equivalently x~_{-1} = A^{-1} W
// advanced one step with no innovation).
TransmissionTrace run_transmission(const EncoderDesign& design,
                                   const ChannelModel& ch, const Vec& w, int T,
                                   const Vec& noise);

// Hypercube codebook in the eigenbasis of the end-to-end error covariance
// A^{-T-1} Sigma_x* A'^{-T-1}.  Axis i is split into
// max(1, floor(sigma_i^{-(1-eps)})) segments; messages are the cell centers
// indexed in row-major mixed radix (axis 0 most significant).
struct Codebook {
  int T = 0;
  double epsilon = 0.0;
  Mat basis;                          // orthonormal columns e^(i)
  Vec sigmas;                         // ascending
  std::vector<std::int64_t> segments;
  std::int64_t message_count = 1;
};

Codebook build_codebook(const EncoderDesign& design, int T, double epsilon);

Vec encode_message(const Codebook& book, std::int64_t index);

// Nearest-center decoding in the codebook basis; coordinates outside the
// hypercube clamp to the boundary cell, exact ties resolve to the lower index.
std::int64_t decode_message(const Codebook& book, const Vec& xhat0);

// Closed-form error probability 1 - prod_i (1 - 2 Q(sigma_{T,i}^{-eps} / 2))
// with sigma from the finite-horizon MSE(xhat_{0,T}).
double theoretical_pe(const EncoderDesign& design, int T, double epsilon);
double theoretical_pe(const EncoderDesign& design, const RiccatiTrajectory& traj,
                      int T, double epsilon);

// End-to-end distortion MSE(W_hat_t) = A^{-t-1} Sigma_{x,t+1} A'^{-t-1}
// of the time-varying-gain filter (the quantity behind the asymptotic
// rate-distortion identity).
Mat analog_mse(const EncoderDesign& design, int t);
Mat analog_mse(const EncoderDesign& design, const RiccatiTrajectory& traj, int t);

// Exact distortion of the implemented loop, which runs the steady-state
// gains from t = 0: the loop state covariance follows the Lyapunov
// recursion P+ = (Abb - L Cbb) P (Abb - L Cbb)' + L L' from P_0 = Sigma_0.
// Converges to analog_mse as the transient dies out.
Mat analog_mse_loop(const EncoderDesign& design, int t);

// Gaussian tail probability P(Z > x).
double gaussian_q(double x);

}  // namespace feedcap
