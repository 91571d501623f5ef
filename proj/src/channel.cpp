#include "feedcap/channel.hpp"

#include <cmath>

namespace feedcap {

StateSpaceSystem normalize_gain(const StateSpaceSystem& inv_z) {
  if (!inv_z.siso()) {
    throw ValidationError("channel: inverse filter must be SISO");
  }
  const double d = inv_z.D(0, 0);
  if (std::abs(d) < 1e-12) {
    throw ValidationError("channel: degenerate gain (feedthrough of Z^-1 is zero)");
  }
  StateSpaceSystem out = inv_z;
  out.C /= d;
  out.D /= d;
  out.D(0, 0) = 1.0;
  return out;
}

ChannelModel validate(const StateSpaceSystem& inv_z) {
  if (!inv_z.siso()) {
    throw ValidationError("channel: inverse filter must be SISO");
  }
  if (std::abs(inv_z.D(0, 0) - 1.0) > 1e-9) {
    throw ValidationError("channel: feedthrough of Z^-1 must be 1 (normalize first)");
  }
  const int m = inv_z.state_dim();
  if (m > 0) {
    const Spectrum sf = eigen_spectrum(inv_z.A);
    for (const Cplx& lam : sf.eigenvalues) {
      if (std::abs(lam) >= 1.0 - kCircleTol) {
        throw ValidationError("channel: F is not Schur-stable (Z not minimum-phase)");
      }
    }
    const Mat zeros_map = inv_z.A - inv_z.B * inv_z.C;  // zeros of Z^-1 for D = 1
    const Spectrum sz = eigen_spectrum(zeros_map);
    for (const Cplx& lam : sz.eigenvalues) {
      if (std::abs(lam) >= 1.0 - kCircleTol) {
        throw ValidationError("channel: F - G H is not Schur-stable (Z not stable)");
      }
    }
    if (!is_controllable(inv_z.A, inv_z.B.col(0))) {
      throw ValidationError("channel: realization (F, G) is not controllable");
    }
    if (!is_observable(inv_z.A, inv_z.C.row(0))) {
      throw ValidationError("channel: realization (F, H) is not observable");
    }
  }
  ChannelModel ch;
  ch.inv_z = inv_z;
  ch.gain_normalized = true;
  return ch;
}

ChannelModel make_channel(const StateSpaceSystem& inv_z) {
  return validate(normalize_gain(inv_z));
}

StateSpaceSystem rational_system(const Vec& num, const Vec& den) {
  if (den.size() < 1 || std::abs(den(0)) < 1e-12) {
    throw ValidationError("rational channel: den[0] must be nonzero");
  }
  if (num.size() < 1 || num.size() > den.size()) {
    throw ValidationError("rational channel: numerator order exceeds denominator order");
  }
  const int m = static_cast<int>(den.size()) - 1;
  Vec a = den / den(0);
  Vec b = Vec::Zero(m + 1);
  b.head(num.size()) = num / den(0);

  const double d = b(0);
  if (m == 0) return StateSpaceSystem::gain(d);

  Mat F = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) F(0, i) = -a(i + 1);
  F.bottomLeftCorner(m - 1, m - 1).setIdentity();
  Mat G = Mat::Zero(m, 1);
  G(0, 0) = 1.0;
  Mat H(1, m);
  for (int i = 0; i < m; ++i) H(0, i) = b(i + 1) - d * a(i + 1);
  return StateSpaceSystem(F, G, H, Mat::Constant(1, 1, d));
}

ChannelModel awgn_channel() {
  return validate(StateSpaceSystem::gain(1.0));
}

AugmentedPlant augment(const ChannelModel& ch, const Mat& A, const RowVec& C) {
  if (A.rows() != A.cols() || C.cols() != A.rows() || A.rows() < 1) {
    throw DimensionError("augment: C must be 1 x (n+1) matching A");
  }
  const Spectrum sa = eigen_spectrum(A);
  if (sa.unit_circle_count > 0) {
    throw ValidationError("augment: encoder A has an eigenvalue on the unit circle");
  }
  if (ch.order() > 0) {
    const Spectrum sf = eigen_spectrum(ch.F());
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1.0);
    for (const Cplx& la : sa.eigenvalues) {
      for (const Cplx& lf : sf.eigenvalues) {
        if (std::abs(la - lf) < 1e-8 * scale) {
          throw ValidationError("augment: lambda(A) collides with lambda(F)");
        }
      }
    }
  }
  return AugmentedPlant(A, C, ch.F(), ch.G(), ch.H());
}

double simulate_channel_step(const ChannelModel& ch, Vec& s, double u, double noise) {
  const int m = ch.order();
  if (s.size() != m) throw DimensionError("simulate_channel_step: state dimension");
  double y = u + noise;
  if (m > 0) {
    y += (ch.H() * s)(0);
    s = ch.F() * s + ch.G() * u;
  }
  return y;
}

}  // namespace feedcap
