#ifndef REKF_OBJECTIVES_HPP
#define REKF_OBJECTIVES_HPP

#include <functional>
#include <variant>
#include <vector>

#include "rekf/data.hpp"
#include "rekf/models.hpp"
#include "rekf/numerics.hpp"

namespace rekf {

/// Innovation and virtual measurement covariance derived from a loss at the
/// current prediction: Qy = (d2l/dy2)^-1 and e = -Qy * dl/dy.
struct LossTerms {
  Vector e;
  SpdMatrix q_y;
};

using LossValueFn = std::function<double(const Vector&, const Vector&)>;
using LossGradFn = std::function<Vector(const Vector&, const Vector&)>;
using LossHessFn = std::function<Matrix(const Vector&, const Vector&)>;

/// Strongly convex, twice differentiable penalty on the output prediction.
/// The mse and cross_entropy kinds use their closed forms for the filter
/// terms; custom losses go through the Hessian solve.
class Loss {
 public:
  enum class Kind { mse, cross_entropy, custom };

  static Loss mse(const SpdMatrix& w_y);
  static Loss mse_identity(Eigen::Index n_y);
  static Loss cross_entropy(double eps);
  static Loss custom(LossValueFn value, LossGradFn grad, LossHessFn hess);

  Kind kind() const { return kind_; }
  bool binary() const { return kind_ == Kind::cross_entropy; }
  double eps() const { return eps_; }
  const SpdMatrix& w_y() const { return w_y_; }

  double value(const Vector& y, const Vector& y_pred) const;
  Vector grad(const Vector& y, const Vector& y_pred) const;
  Matrix hess(const Vector& y, const Vector& y_pred) const;

  LossTerms terms(const Vector& y, const Vector& y_pred) const;

 private:
  Loss() = default;
  Kind kind_ = Kind::mse;
  SpdMatrix w_y_;
  SpdMatrix w_y_inv_;
  double eps_ = 0.0;
  LossValueFn value_fn_;
  LossGradFn grad_fn_;
  LossHessFn hess_fn_;
};

LossTerms loss_terms(const Loss& loss, const Vector& y, const Vector& y_pred);

/// Closed-form terms for the modified cross-entropy loss on binary outputs.
LossTerms ce_terms(double eps, const Vector& y, const Vector& y_pred);

struct L2Reg {
  double rho_theta = 0.0;
  double rho_x = 0.0;
};

struct PsiScalar {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// Separable penalty sum_i psi_i(theta_i); a single entry broadcasts over
/// every parameter.
struct SeparablePsiReg {
  std::vector<PsiScalar> psi;
};

struct L1Reg {
  double lambda = 0.0;
};

using Regularizer = std::variant<L2Reg, SeparablePsiReg, L1Reg>;
using RegList = std::vector<Regularizer>;

PsiScalar quadratic_psi(double rho_bar);

struct RegScalarTerms {
  double e;  // -psi' / psi''
  double q;  // 1 / psi''
};

RegScalarTerms reg_scalar_terms(const PsiScalar& psi, double theta_i);

double l2_rho_theta(const RegList& regs);
double l2_rho_x(const RegList& regs);
double l1_lambda(const RegList& regs);

double reg_theta_value(const RegList& regs, const Vector& theta);
double reg_x_value(const RegList& regs, const Vector& x0);

/// Gradient of the smooth regularizers (l2 + separable psi). Throws
/// ConfigError if an l1 term with positive weight is present.
Vector reg_theta_grad_smooth(const RegList& regs, const Vector& theta);

/// Full training objective: reg terms plus the averaged loss along the
/// open-loop simulation, summed over experiments.
double eval_objective(const Loss& loss, const RegList& regs, const Dataset& data,
                      const Model& model, const Vector& theta,
                      const std::vector<Vector>& x0s);

}  // namespace rekf

#endif  // REKF_OBJECTIVES_HPP
