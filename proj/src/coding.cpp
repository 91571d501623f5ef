#include "feedcap/coding.hpp"

#include <cmath>

namespace feedcap {

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

TransmissionTrace run_transmission(const EncoderDesign& design,
                                   const ChannelModel& ch, const Vec& w, int T,
                                   const Vec& noise) {
  const int n1 = design.n_star + 1;
  const int m = ch.order();
  if (w.size() != n1) throw DimensionError("run_transmission: W must have length n*+1");
  if (noise.size() < T + 1) throw DimensionError("run_transmission: noise too short");
  if (design.L2.size() != m) {
    throw DimensionError("run_transmission: design and channel orders differ");
  }

  const Mat a_inv = design.A_star.partialPivLu().inverse();

  TransmissionTrace tr;
  tr.u.resize(T + 1);
  tr.y.resize(T + 1);
  tr.x_hat_0.resize(T + 1, n1);
  tr.power_running_avg.resize(T + 1);

  Vec xtilde = w;           // x~_0 = W
  Vec s = Vec::Zero(m);     // channel state
  Vec shat = Vec::Zero(m);  // receiver copy of the channel-state filter
  Vec what = Vec::Zero(n1); // A^{-t-1} xhat_{t+1}, accumulated recursively
  Mat discount = a_inv;     // A^{-t-1}
  double energy = 0.0;

  for (int t = 0; t <= T; ++t) {
    const double u = (design.C_star * xtilde)(0);
    const double y = simulate_channel_step(ch, s, u, noise(t));
    const double e = y - (m > 0 ? (ch.H() * shat)(0) : 0.0);
    if (m > 0) shat = ch.F() * shat + design.L2 * e;
    what += discount * (design.L1 * e);
    xtilde = design.A_star * xtilde - design.L1 * e;
    discount = a_inv * discount;

    tr.u(t) = u;
    tr.y(t) = y;
    tr.x_hat_0.row(t) = what.transpose();
    energy += u * u;
    tr.power_running_avg(t) = energy / (t + 1);
  }
  return tr;
}

Codebook build_codebook(const EncoderDesign& design, int T, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("build_codebook: epsilon must be in (0, 1)");
  }
  if (T < 0) throw DimensionError("build_codebook: negative horizon");
  const int n1 = design.n_star + 1;

  const Mat a_inv = design.A_star.partialPivLu().inverse();
  Mat p = Mat::Identity(n1, n1);
  for (int k = 0; k <= T; ++k) p = a_inv * p;
  Mat cov = p * design.sigma_x_star * p.transpose();
  cov = 0.5 * (cov + cov.transpose());

  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  Codebook book;
  book.T = T;
  book.epsilon = epsilon;
  book.basis = es.eigenvectors();
  book.sigmas = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();

  // Deterministic eigenvector signs: largest-magnitude entry positive.
  for (int i = 0; i < n1; ++i) {
    int arg = 0;
    book.basis.col(i).cwiseAbs().maxCoeff(&arg);
    if (book.basis(arg, i) < 0) book.basis.col(i) = -book.basis.col(i);
  }

  book.segments.resize(n1);
  book.message_count = 1;
  for (int i = 0; i < n1; ++i) {
    const double s = book.sigmas(i);
    if (s >= 1.0) {
      throw HorizonError("build_codebook: sigma_{T," + std::to_string(i) +
                         "} = " + std::to_string(s) +
                         " >= 1; increase T or epsilon");
    }
    const double raw = std::floor(std::pow(s, -(1.0 - epsilon)));
    if (!(raw < 9.0e18)) {
      throw HorizonError("build_codebook: segment count overflows 64 bits");
    }
    const std::int64_t k =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(raw));
    book.segments[i] = k;
    if (book.message_count > (std::int64_t{1} << 62) / k) {
      throw HorizonError("build_codebook: message count overflows 64 bits");
    }
    book.message_count *= k;
  }
  return book;
}

Vec encode_message(const Codebook& book, std::int64_t index) {
  if (index < 0 || index >= book.message_count) {
    throw DimensionError("encode_message: index out of range");
  }
  const int n1 = static_cast<int>(book.segments.size());
  Vec alpha(n1);
  std::int64_t rem = index;
  std::int64_t stride = book.message_count;
  for (int i = 0; i < n1; ++i) {
    stride /= book.segments[i];
    const std::int64_t idx = rem / stride;
    rem %= stride;
    alpha(i) = (idx + 0.5) / book.segments[i] - 0.5;
  }
  return book.basis * alpha;
}

std::int64_t decode_message(const Codebook& book, const Vec& xhat0) {
  const int n1 = static_cast<int>(book.segments.size());
  if (xhat0.size() != n1) throw DimensionError("decode_message: wrong length");
  const Vec alpha = book.basis.transpose() * xhat0;
  std::int64_t index = 0;
  for (int i = 0; i < n1; ++i) {
    const std::int64_t k = book.segments[i];
    const double v = (alpha(i) + 0.5) * k;
    std::int64_t j = static_cast<std::int64_t>(std::floor(v));
    if (v == std::floor(v) && j >= 1) j -= 1;  // tie toward the lower index
    j = std::clamp<std::int64_t>(j, 0, k - 1);
    index = index * k + j;
  }
  return index;
}

namespace {

Mat mse_at(const EncoderDesign& design, const Mat& sigma_x_t1, int t) {
  const int n1 = design.n_star + 1;
  const Mat a_inv = design.A_star.partialPivLu().inverse();
  Mat p = Mat::Identity(n1, n1);
  for (int k = 0; k <= t; ++k) p = a_inv * p;
  Mat mse = p * sigma_x_t1 * p.transpose();
  return 0.5 * (mse + mse.transpose());
}

}  // namespace

Mat analog_mse(const EncoderDesign& design, const RiccatiTrajectory& traj, int t) {
  if (t < 0 || t + 1 >= static_cast<int>(traj.sigmas.size())) {
    throw DimensionError("analog_mse: trajectory too short");
  }
  const int n1 = design.n_star + 1;
  return mse_at(design, traj.sigmas[t + 1].topLeftCorner(n1, n1), t);
}

Mat analog_mse(const EncoderDesign& design, int t) {
  const RiccatiTrajectory traj = riccati_trajectory(design.plant(), t + 1);
  return analog_mse(design, traj, t);
}

Mat analog_mse_loop(const EncoderDesign& design, int t) {
  if (t < 0) throw DimensionError("analog_mse_loop: negative time");
  const AugmentedPlant plant = design.plant();
  const int n1 = design.n_star + 1;
  const Vec gain = (Vec(plant.dim()) << design.L1, design.L2).finished();
  const Mat phi = plant.Abb - gain * plant.Cbb;
  Mat p = riccati_initial_condition(design.n_star, plant.m());
  for (int k = 0; k <= t; ++k) {
    p = phi * p * phi.transpose() + gain * gain.transpose();
    p = 0.5 * (p + p.transpose()).eval();
  }
  return mse_at(design, p.topLeftCorner(n1, n1), t);
}

double theoretical_pe(const EncoderDesign& design, const RiccatiTrajectory& traj,
                      int T, double epsilon) {
  const Mat mse = analog_mse(design, traj, T);
  Eigen::SelfAdjointEigenSolver<Mat> es(mse);
  double correct = 1.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double s = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
    if (s <= 0.0) continue;
    correct *= std::max(0.0, 1.0 - 2.0 * gaussian_q(std::pow(s, -epsilon) / 2.0));
  }
  return std::clamp(1.0 - correct, 0.0, 1.0);
}

double theoretical_pe(const EncoderDesign& design, int T, double epsilon) {
  const RiccatiTrajectory traj = riccati_trajectory(design.plant(), T + 1);
  return theoretical_pe(design, traj, T, epsilon);
}

}  // namespace feedcap
