#include "rekf/numerics.hpp"

#include <cmath>

namespace rekf {

bool all_finite(const Eigen::Ref<const Matrix>& m) {
  return m.allFinite();
}

SpdMatrix::SpdMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SpdMatrix: matrix is " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) + ", expected square");
  }
  m_ = 0.5 * (m + m.transpose());
}

SpdMatrix SpdMatrix::identity(Eigen::Index n) {
  SpdMatrix s;
  s.m_ = Matrix::Identity(n, n);
  return s;
}

SpdMatrix SpdMatrix::scaled_identity(Eigen::Index n, double v) {
  SpdMatrix s;
  s.m_ = v * Matrix::Identity(n, n);
  return s;
}

SpdMatrix SpdMatrix::diagonal(const Vector& d) {
  SpdMatrix s;
  s.m_ = d.asDiagonal();
  return s;
}

SpdMatrix SpdMatrix::zero(Eigen::Index n) {
  SpdMatrix s;
  s.m_ = Matrix::Zero(n, n);
  return s;
}

Matrix spd_solve(const SpdMatrix& a, const Matrix& b) {
  if (a.size() != b.rows()) {
    throw DimensionMismatch("spd_solve: A is " + std::to_string(a.size()) +
                            "x" + std::to_string(a.size()) + " but B has " +
                            std::to_string(b.rows()) + " rows");
  }
  if (a.size() == 1) {
    const double d = a.mat()(0, 0);
    if (!(d > 0.0)) {
      throw NotPositiveDefinite("spd_solve: 1x1 operand is not positive");
    }
    return b / d;
  }
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("spd_solve: Cholesky factorization failed");
  }
  return llt.solve(b);
}

Vector spd_solve(const SpdMatrix& a, const Vector& b) {
  Matrix x = spd_solve(a, Matrix(b));
  return Vector(x.col(0));
}

SpdMatrix symmetrize(const Matrix& p) {
  return SpdMatrix(p);
}

Matrix finite_diff_jacobian(const VectorFn& f, const Vector& x, double h) {
  Vector xp = x;
  Vector xm = x;
  Matrix j;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    const Vector fp = f(xp);
    const Vector fm = f(xm);
    if (!fp.allFinite() || !fm.allFinite()) {
      throw NonFiniteEvaluation("finite_diff_jacobian: non-finite value at column " +
                                std::to_string(i));
    }
    if (j.size() == 0) {
      j.resize(fp.size(), x.size());
    }
    j.col(i) = (fp - fm) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  if (j.size() == 0) {
    j.resize(f(x).size(), 0);
  }
  return j;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

}  // namespace rekf
