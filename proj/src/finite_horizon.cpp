#include "feedcap/finite_horizon.hpp"

#include <cmath>

namespace feedcap {

namespace {

double logdet2_spd(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("logdet of a non-SPD matrix");
  }
  double acc = 0.0;
  for (int i = 0; i < m.rows(); ++i) acc += std::log2(llt.matrixL()(i, i));
  return 2.0 * acc;
}

}  // namespace

GeneralCodingConfig::GeneralCodingConfig(Mat a, RowVec c, int horizon, ChannelModel ch)
    : A(std::move(a)), C(std::move(c)), T(horizon), channel(std::move(ch)) {
  if (T < 0) throw DimensionError("GeneralCodingConfig: negative horizon");
  if (T > 256) {
    throw DimensionError("GeneralCodingConfig: dense-matrix oracles are capped at T = 256");
  }
  augment(channel, A, C);  // dimension, unit-circle and collision checks
  if (!is_observable(A, C)) {
    throw ValidationError("GeneralCodingConfig: (A, C) is not observable");
  }
}

Mat zinv_matrix(const GeneralCodingConfig& cfg) {
  return toeplitz_of(cfg.channel.inv_z, cfg.T).dense();
}

Mat gamma_matrix(const GeneralCodingConfig& cfg) {
  const int n1 = cfg.n() + 1;
  Mat gamma(cfg.T + 1, n1);
  RowVec row = cfg.C;
  for (int t = 0; t <= cfg.T; ++t) {
    gamma.row(t) = row;
    row = row * cfg.A;
  }
  return gamma;
}

double mutual_info_matrix_form(const GeneralCodingConfig& cfg) {
  const Mat mg = zinv_matrix(cfg) * gamma_matrix(cfg);
  const Mat ky = Mat::Identity(cfg.T + 1, cfg.T + 1) + mg * mg.transpose();
  return 0.5 * logdet2_spd(ky);
}

FiniteHorizonReport mmse_fisher_crb(const GeneralCodingConfig& cfg) {
  const int n1 = cfg.n() + 1;
  const Mat zinv = zinv_matrix(cfg);
  const Mat gamma = gamma_matrix(cfg);
  const Mat mg = zinv * gamma;  // (T+1) x (n+1)

  FiniteHorizonReport rep;
  rep.fisher_W = Mat::Identity(n1, n1) + mg.transpose() * mg;
  rep.mmse_W = rep.fisher_W.partialPivLu().inverse();
  rep.crb_W = rep.fisher_W.ldlt().solve(Mat::Identity(n1, n1));
  rep.mutual_info_bits = 0.5 * logdet2_spd(rep.fisher_W);
  rep.rate = rep.mutual_info_bits / (cfg.T + 1);

  // Input power from the sub-horizon MMSE matrices: u_t depends on
  // observations through t-1 only, so E u_t^2 = C A^t MMSE_{W|ybar^{t-1}} A^t' C'.
  double acc = 0.0;
  Mat apow = Mat::Identity(n1, n1);
  for (int t = 0; t <= cfg.T; ++t) {
    const Mat mg_t = mg.topRows(t);
    const Mat mmse_t =
        (Mat::Identity(n1, n1) + mg_t.transpose() * mg_t).ldlt().solve(
            Mat::Identity(n1, n1));
    const RowVec cat = cfg.C * apow;
    acc += (cat * mmse_t * cat.transpose())(0, 0);
    apow = cfg.A * apow;
  }
  rep.input_power = acc / (cfg.T + 1);

  const RiccatiTrajectory traj =
      riccati_trajectory(augment(cfg.channel, cfg.A, cfg.C), cfg.T);
  rep.ke_sequence = traj.ke;
  return rep;
}

FeedbackGenerators optimal_feedback_generator(const GeneralCodingConfig& cfg) {
  const int T = cfg.T;
  const int n1 = cfg.n() + 1;
  const int m = cfg.channel.order();
  const AugmentedPlant plant = augment(cfg.channel, cfg.A, cfg.C);
  const RiccatiTrajectory traj = riccati_trajectory(plant, std::max(T, 1));

  // ghat maps ybar -> rhat through the time-varying filter; build it one
  // basis vector at a time.
  Mat ghat = Mat::Zero(T + 1, T + 1);
  for (int j = 0; j < T; ++j) {
    Vec xhat = Vec::Zero(n1);
    Vec sbar = Vec::Zero(m);
    for (int t = 0; t <= T; ++t) {
      const double rhat = (cfg.C * xhat)(0);
      ghat(t, j) = rhat;
      if (t == T) break;
      const double ybar = (t == j) ? 1.0 : 0.0;
      const double e = ybar - (m > 0 ? (cfg.channel.H() * sbar)(0) : 0.0) - rhat;
      const Vec& L = traj.gains[t];
      xhat = cfg.A * xhat + L.head(n1) * e;
      if (m > 0) sbar = cfg.channel.F() * sbar + cfg.channel.G() * rhat + L.tail(m) * e;
    }
  }

  FeedbackGenerators out;
  out.ghat = ghat;
  const Mat zinv = zinv_matrix(cfg);
  Mat iminus = Mat::Identity(T + 1, T + 1) - zinv * ghat;
  out.g = -iminus.transpose()
               .triangularView<Eigen::Upper>()
               .solve(ghat.transpose())
               .transpose();
  return out;
}

Mat ghat_by_normal_equations(const GeneralCodingConfig& cfg) {
  const int T = cfg.T;
  const Mat mg = zinv_matrix(cfg) * gamma_matrix(cfg);
  const Mat gamma = gamma_matrix(cfg);
  Mat ghat = Mat::Zero(T + 1, T + 1);
  for (int t = 1; t <= T; ++t) {
    const Mat mt = mg.topRows(t);  // observations ybar_0..ybar_{t-1}
    const Mat gram = mt * mt.transpose() + Mat::Identity(t, t);
    const Vec rhs = mt * gamma.row(t).transpose();
    ghat.row(t).head(t) = gram.ldlt().solve(rhs).transpose();
  }
  return ghat;
}

double input_power_of_ghat(const GeneralCodingConfig& cfg, const Mat& ghat) {
  const Mat zinv = zinv_matrix(cfg);
  const Mat gamma = gamma_matrix(cfg);
  const Mat x = gamma - ghat * (zinv * gamma);
  return (x.squaredNorm() + ghat.squaredNorm()) / (cfg.T + 1);
}

Mat input_covariance(const GeneralCodingConfig& cfg, const Mat& g) {
  const int T = cfg.T;
  const Mat zinv = zinv_matrix(cfg);
  const Mat gamma = gamma_matrix(cfg);
  const Mat iminus = Mat::Identity(T + 1, T + 1) - zinv * g;
  const Mat resp = iminus.partialPivLu().inverse();  // y = resp (Zinv r + N)
  const Mat u_from_w = gamma + g * resp * zinv * gamma;
  const Mat u_from_n = g * resp;
  return u_from_w * u_from_w.transpose() + u_from_n * u_from_n.transpose();
}

CpStructure cp_convert(const GeneralCodingConfig& cfg, const Mat& g) {
  const int T = cfg.T;
  const Mat zinv = zinv_matrix(cfg);
  const Mat gz = g * zinv;   // strictly lower triangular
  const Mat iminus = Mat::Identity(T + 1, T + 1) - gz;
  CpStructure cp;
  cp.B_T = iminus.transpose()
               .triangularView<Eigen::Upper>()
               .solve(gz.transpose())
               .transpose();
  const Mat gamma = gamma_matrix(cfg);
  cp.K_r = gamma * gamma.transpose();
  return cp;
}

Mat input_covariance_cp(const Mat& K_r, const Mat& B_T, const ChannelModel& ch) {
  const int T = static_cast<int>(K_r.rows()) - 1;
  const Mat z = toeplitz_of(inverse_system(ch.inv_z), T).dense();
  const Mat bz = B_T * z;
  const Mat ib = Mat::Identity(T + 1, T + 1) + B_T;
  return bz * bz.transpose() + ib * K_r * ib.transpose();
}

CpBackResult cp_convert_back(const Mat& K_r, const Mat& B_T, const ChannelModel& ch) {
  const int T = static_cast<int>(K_r.rows()) - 1;
  if (K_r.rows() != K_r.cols() || B_T.rows() != K_r.rows() ||
      B_T.cols() != K_r.cols()) {
    throw DimensionError("cp_convert_back: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(K_r);
  if (es.eigenvalues()(0) <= 1e-10 * std::max(es.eigenvalues()(T), 1e-300)) {
    throw ValidationError("cp_convert_back: K_r must be positive definite");
  }
  const Mat gamma0 = es.operatorSqrt();

  Mat shift = Mat::Zero(T + 1, T + 1);  // last row free; zeros chosen
  shift.topRightCorner(T, T).setIdentity();

  CpBackResult out;
  out.A = gamma0.partialPivLu().solve(shift * gamma0);
  out.C = gamma0.row(0);
  const Mat z = toeplitz_of(inverse_system(ch.inv_z), T).dense();
  const Mat ib = Mat::Identity(T + 1, T + 1) + B_T;
  out.g = ib.partialPivLu().solve(B_T * z);
  return out;
}

namespace {

// Propagates E[X_t e_tau'] through the time-varying loop and reports
// row(t) = f(X_t-cross) entries for tau < t.
Mat cross_covariance(const GeneralCodingConfig& cfg, const RowVec& out_map) {
  const AugmentedPlant plant = augment(cfg.channel, cfg.A, cfg.C);
  const int T = cfg.T;
  const int d = plant.dim();
  const RiccatiTrajectory traj = riccati_trajectory(plant, T);

  Mat cross = Mat::Zero(T + 1, T + 1);
  std::vector<Vec> w;  // w[tau] = E[X_t e_tau] for the current t
  w.reserve(T);
  for (int t = 0; t < T; ++t) {
    const Mat acl = plant.Abb - traj.gains[t] * plant.Cbb;
    for (int tau = 0; tau < t; ++tau) w[tau] = acl * w[tau];
    w.push_back(acl * (traj.sigmas[t] * plant.Cbb.transpose()) - traj.gains[t]);
    for (int tau = 0; tau <= t; ++tau) {
      cross(t + 1, tau) = (out_map * w[tau])(0);
    }
  }
  (void)d;
  return cross;
}

}  // namespace

Mat innovation_covariance(const GeneralCodingConfig& cfg) {
  const AugmentedPlant plant = augment(cfg.channel, cfg.A, cfg.C);
  const RiccatiTrajectory traj = riccati_trajectory(plant, cfg.T);
  Mat ke = cross_covariance(cfg, plant.Cbb);
  ke = ke + ke.transpose().eval();
  for (int t = 0; t <= cfg.T; ++t) ke(t, t) = traj.ke[t];
  return ke;
}

Mat input_innovation_cross(const GeneralCodingConfig& cfg) {
  const AugmentedPlant plant = augment(cfg.channel, cfg.A, cfg.C);
  return cross_covariance(cfg, plant.Dbb);
}

}  // namespace feedcap
