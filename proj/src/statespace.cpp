#include "feedcap/statespace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace feedcap {

StateSpaceSystem::StateSpaceSystem(Mat a, Mat b, Mat c, Mat d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
  if (A.rows() != A.cols()) {
    throw DimensionError("state matrix A must be square");
  }
  if (B.rows() != A.rows()) {
    throw DimensionError("B row count must equal state dimension");
  }
  if (C.cols() != A.rows()) {
    throw DimensionError("C column count must equal state dimension");
  }
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw DimensionError("D must be output_dim x input_dim");
  }
}

StateSpaceSystem StateSpaceSystem::gain(double d) {
  StateSpaceSystem s;
  s.A = Mat(0, 0);
  s.B = Mat(0, 1);
  s.C = Mat(1, 0);
  s.D = Mat::Constant(1, 1, d);
  return s;
}

StateSpaceSystem inverse_system(const StateSpaceSystem& sys) {
  if (!sys.siso()) {
    throw DimensionError("inverse_system requires a SISO system");
  }
  const double d = sys.D(0, 0);
  if (std::abs(d) < 1e-14) {
    throw SingularEquationError("inverse_system: feedthrough is zero");
  }
  StateSpaceSystem inv;
  inv.A = sys.A - sys.B * sys.C / d;
  inv.B = sys.B / d;
  inv.C = -sys.C / d;
  inv.D = Mat::Constant(1, 1, 1.0 / d);
  return inv;
}

Spectrum eigen_spectrum(const Mat& m, double tol) {
  if (m.rows() != m.cols()) {
    throw DimensionError("eigen_spectrum requires a square matrix");
  }
  Spectrum s;
  if (m.rows() == 0) return s;
  Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  for (int i = 0; i < m.rows(); ++i) {
    const Cplx lam = es.eigenvalues()(i);
    s.eigenvalues.push_back(lam);
    const double mag = std::abs(lam);
    if (std::abs(mag - 1.0) <= tol) {
      ++s.unit_circle_count;
    } else if (mag > 1.0) {
      ++s.unstable_count;
    }
  }
  return s;
}

double degree_of_instability(const Mat& m, double tol) {
  const Spectrum s = eigen_spectrum(m, tol);
  double di = 1.0;
  for (const Cplx& lam : s.eigenvalues) {
    const double mag = std::abs(lam);
    if (std::abs(mag - 1.0) > tol && mag > 1.0) di *= mag;
  }
  return di;
}

Mat companion_form(double top_coeff, const Vec& a_f) {
  const int n = static_cast<int>(a_f.size());
  Mat a = Mat::Zero(n + 1, n + 1);
  a.topRightCorner(n, n).setIdentity();
  a(n, 0) = top_coeff;
  for (int i = 0; i < n; ++i) a(n, 1 + i) = a_f(i);
  return a;
}

Mat observability_matrix(const Mat& A, const RowVec& C, int rows) {
  if (rows < 1) throw DimensionError("observability_matrix: rows must be >= 1");
  if (A.rows() != A.cols() || C.cols() != A.rows()) {
    throw DimensionError("observability_matrix: inconsistent dimensions");
  }
  Mat obs(rows, A.cols());
  RowVec row = C;
  for (int i = 0; i < rows; ++i) {
    obs.row(i) = row;
    row = row * A;
  }
  return obs;
}

bool is_observable(const Mat& A, const RowVec& C, double tol) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) return true;
  const Mat obs = observability_matrix(A, C, n);
  Eigen::JacobiSVD<Mat> svd(obs);
  return svd.singularValues()(n - 1) > tol * svd.singularValues()(0) &&
         svd.singularValues()(0) > tol;
}

bool is_controllable(const Mat& A, const Vec& B, double tol) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) return true;
  Mat ctrb(n, n);
  Vec col = B;
  for (int i = 0; i < n; ++i) {
    ctrb.col(i) = col;
    col = A * col;
  }
  Eigen::JacobiSVD<Mat> svd(ctrb);
  return svd.singularValues()(n - 1) > tol * svd.singularValues()(0) &&
         svd.singularValues()(0) > tol;
}

Mat solve_sylvester(const Mat& F, const Mat& A, const Mat& Q) {
  const int m = static_cast<int>(F.rows());
  const int k = static_cast<int>(A.rows());
  if (F.rows() != F.cols() || A.rows() != A.cols() || Q.rows() != m ||
      Q.cols() != k) {
    throw DimensionError("solve_sylvester: inconsistent dimensions");
  }
  if (m == 0 || k == 0) return Mat::Zero(m, k);

  // Spectra must be disjoint or the equation is singular.
  const Spectrum sf = eigen_spectrum(F);
  const Spectrum sa = eigen_spectrum(A);
  const double scale = std::max({F.cwiseAbs().maxCoeff(), A.cwiseAbs().maxCoeff(), 1.0});
  for (const Cplx& lf : sf.eigenvalues) {
    for (const Cplx& la : sa.eigenvalues) {
      if (std::abs(lf - la) < 1e-10 * scale) {
        throw SingularEquationError(
            "solve_sylvester: lambda(F) and lambda(A) share an eigenvalue");
      }
    }
  }

  // vec(F*phi) = (I_k (x) F) vec(phi), vec(phi*A) = (A' (x) I_m) vec(phi).
  Mat K = Mat::Zero(m * k, m * k);
  for (int j = 0; j < k; ++j) {
    K.block(j * m, j * m, m, m) = F;
    for (int i = 0; i < k; ++i) {
      K.block(i * m, j * m, m, m) -= A(j, i) * Mat::Identity(m, m);
    }
  }
  Vec q(m * k);
  for (int j = 0; j < k; ++j) q.segment(j * m, m) = Q.col(j);
  const Vec x = K.partialPivLu().solve(q);

  Mat phi(m, k);
  for (int j = 0; j < k; ++j) phi.col(j) = x.segment(j * m, m);

  const double res = (F * phi - phi * A - Q).norm();
  const double bound = kSylvesterTol * (F.norm() + A.norm()) * std::max(phi.norm(), 1.0) +
                       kSylvesterTol * Q.norm();
  if (!(res <= std::max(bound, 1e-12))) {
    throw SingularEquationError("solve_sylvester: residual too large");
  }
  return phi;
}

ToeplitzOperator::ToeplitzOperator(Vec h, bool strict)
    : impulse(std::move(h)), strictly_causal(strict) {
  if (impulse.size() < 1) {
    throw DimensionError("ToeplitzOperator: empty impulse response");
  }
  if (strictly_causal && std::abs(impulse(0)) > 1e-14) {
    throw ValidationError("ToeplitzOperator: strictly causal but h_0 != 0");
  }
}

Vec ToeplitzOperator::apply(const Vec& u) const {
  if (u.size() != impulse.size()) {
    throw DimensionError("ToeplitzOperator::apply: length mismatch");
  }
  const int n = size();
  Vec y = Vec::Zero(n);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int k = 0; k <= t; ++k) acc += impulse(k) * u(t - k);
    y(t) = acc;
  }
  return y;
}

Mat ToeplitzOperator::dense() const {
  const int n = size();
  Mat m = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) m(i, j) = impulse(i - j);
  }
  return m;
}

ToeplitzOperator toeplitz_of(const StateSpaceSystem& sys, int T,
                             bool strictly_causal) {
  if (!sys.siso()) {
    throw DimensionError("toeplitz_of requires a SISO system");
  }
  if (T < 0) throw DimensionError("toeplitz_of: negative horizon");
  Vec h = Vec::Zero(T + 1);
  h(0) = sys.D(0, 0);
  if (sys.state_dim() > 0) {
    Vec col = sys.B.col(0);
    for (int t = 1; t <= T; ++t) {
      h(t) = (sys.C * col)(0, 0);
      col = sys.A * col;
    }
  }
  return ToeplitzOperator(h, strictly_causal);
}

Cplx transfer_at(const StateSpaceSystem& sys, const Cplx& z) {
  if (!sys.siso()) {
    throw DimensionError("transfer_at requires a SISO system");
  }
  const int n = sys.state_dim();
  if (n == 0) return Cplx(sys.D(0, 0), 0.0);

  const Spectrum s = eigen_spectrum(sys.A);
  for (const Cplx& lam : s.eigenvalues) {
    if (std::abs(lam - z) < 1e-12 * std::max(1.0, std::abs(z))) {
      throw SingularEquationError("transfer function evaluated at a pole");
    }
  }
  Eigen::MatrixXcd zi = z * Eigen::MatrixXcd::Identity(n, n) - sys.A.cast<Cplx>();
  Eigen::VectorXcd x = zi.partialPivLu().solve(sys.B.col(0).cast<Cplx>());
  Cplx val = sys.D(0, 0) + (sys.C.row(0).cast<Cplx>() * x)(0);
  return val;
}

Cplx frequency_response(const StateSpaceSystem& sys, double theta) {
  const Cplx z = std::polar(1.0, 2.0 * M_PI * theta);
  return transfer_at(sys, z);
}

double spectral_radius(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
  return r;
}

}  // namespace feedcap
