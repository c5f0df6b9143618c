#ifndef REKF_NUMERICS_HPP
#define REKF_NUMERICS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace rekf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class HessianNotPD : public Error {
 public:
  using Error::Error;
};

class ZeroCurvature : public Error {
 public:
  using Error::Error;
};

class ZeroRegularization : public Error {
 public:
  using Error::Error;
};

class ConstantReference : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

bool all_finite(const Eigen::Ref<const Matrix>& m);

/// Square matrix kept exactly symmetric; meant to hold covariances and
/// other positive (semi)definite operands.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(const Matrix& m);

  static SpdMatrix identity(Eigen::Index n);
  static SpdMatrix scaled_identity(Eigen::Index n, double s);
  static SpdMatrix diagonal(const Vector& d);
  static SpdMatrix zero(Eigen::Index n);

  const Matrix& mat() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Solves A X = B through a Cholesky factorization. A 1x1 operand reduces
/// to plain scalar division so single-output paths stay division-exact.
Matrix spd_solve(const SpdMatrix& a, const Matrix& b);
Vector spd_solve(const SpdMatrix& a, const Vector& b);

/// (P + P') / 2. Idempotent at the bit level.
SpdMatrix symmetrize(const Matrix& p);

using VectorFn = std::function<Vector(const Vector&)>;

/// Central-difference Jacobian, the derivative oracle used by the tests.
Matrix finite_diff_jacobian(const VectorFn& f, const Vector& x, double h = 1e-6);

/// Deterministic random stream. The raw mt19937_64 sequence is fixed by the
/// standard and the uniform/normal transforms below are our own, so equal
/// seeds give equal draws on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

  std::uint64_t seed_for_child() { return next_u64(); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rekf

#endif  // REKF_NUMERICS_HPP
