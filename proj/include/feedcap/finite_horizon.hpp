#pragma once

#include "feedcap/channel.hpp"

namespace feedcap {

// Encoder (A, C) over a channel at a fixed dense-matrix horizon T.
// These are the explicit-matrix oracles the property tests compare the
// recursive implementations against; everything here is O(T^3) by design.
struct GeneralCodingConfig {
  Mat A;
  RowVec C;
  int T = 0;
  ChannelModel channel;

  GeneralCodingConfig(Mat a, RowVec c, int horizon, ChannelModel ch);

  int n() const { return static_cast<int>(A.rows()) - 1; }
};

// Dense (T+1) x (T+1) lower-triangular Toeplitz matrix of the inverse filter.
Mat zinv_matrix(const GeneralCodingConfig& cfg);

// Stacked [C; CA; ...; CA^T], size (T+1) x (n+1).
Mat gamma_matrix(const GeneralCodingConfig& cfg);

// (1/2) log2 det(I + Zinv Gamma Gamma' Zinv'), in bits.
double mutual_info_matrix_form(const GeneralCodingConfig& cfg);

struct FiniteHorizonReport {
  double mutual_info_bits = 0.0;
  double rate = 0.0;  // mutual_info_bits / (T+1)
  Mat mmse_W;
  Mat fisher_W;
  Mat crb_W;
  double input_power = 0.0;     // (1/(T+1)) sum_t C A^t MMSE_{W,t} A^t' C'
  std::vector<double> ke_sequence;
};

FiniteHorizonReport mmse_fisher_crb(const GeneralCodingConfig& cfg);

struct FeedbackGenerators {
  Mat ghat;  // strictly lower triangular Kalman estimator of r from ybar
  Mat g;     // feedback generator: -ghat (I - Zinv ghat)^{-1}
};

// Builds the strictly causal MMSE estimator row by row from the time-varying
// Kalman recursion, and the induced feedback generator.
FeedbackGenerators optimal_feedback_generator(const GeneralCodingConfig& cfg);

// Independent oracle: per-row normal equations for the strictly causal
// linear MMSE estimator (no Kalman machinery).
Mat ghat_by_normal_equations(const GeneralCodingConfig& cfg);

// Average input power (1/(T+1)) E u'u for a given strictly causal estimator:
// u = (I - ghat Zinv) Gamma W - ghat N.
double input_power_of_ghat(const GeneralCodingConfig& cfg, const Mat& ghat);

// Explicit input covariance K_u for encoder (A, C) with feedback generator G_T.
Mat input_covariance(const GeneralCodingConfig& cfg, const Mat& g);

struct CpStructure {
  Mat K_r;  // (T+1) x (T+1) PSD
  Mat B_T;  // strictly lower triangular
};

// (A, C, G_T) -> (K_r, B_T): B = G Zinv (I - G Zinv)^{-1}, K_r = Gamma Gamma'.
CpStructure cp_convert(const GeneralCodingConfig& cfg, const Mat& g);

struct CpBackResult {
  Mat A;    // (T+1) x (T+1)
  RowVec C;
  Mat g;    // strictly lower triangular
};

// (K_r, B_T) -> (A, C, G_T) producing the same channel input covariance.
// Requires K_r positive definite.
CpBackResult cp_convert_back(const Mat& K_r, const Mat& B_T, const ChannelModel& ch);

// Input covariance directly from the CP parametrization:
// K_u = B Z Z' B' + (I + B) K_r (I + B)'.
Mat input_covariance_cp(const Mat& K_r, const Mat& B_T, const ChannelModel& ch);

// Innovation covariance K_e^{(T)} propagated analytically through the
// time-varying closed loop (no sampling).
Mat innovation_covariance(const GeneralCodingConfig& cfg);

// Analytic cross-covariances E[u_t e_tau] for tau < t, stacked in a strictly
// lower-triangular matrix; all entries are zero in exact arithmetic.
Mat input_innovation_cross(const GeneralCodingConfig& cfg);

}  // namespace feedcap
