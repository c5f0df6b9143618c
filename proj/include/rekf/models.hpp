#ifndef REKF_MODELS_HPP
#define REKF_MODELS_HPP

#include <string>
#include <variant>
#include <vector>

#include "rekf/numerics.hpp"

namespace rekf {

enum class Activation { identity, atan, sigmoid, tanh };

double activation_value(Activation a, double v);
double activation_deriv(Activation a, double v);
double activation_deriv2(Activation a, double v);

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

/// Feedforward stack of affine layers with elementwise activations between
/// them and an optional activation on the last layer. Parameters are stored
/// flat, per layer: weight matrix row-major, then bias.
struct LayerNet {
  std::vector<Eigen::Index> dims;  // [n_in, hidden..., n_out]
  std::vector<Activation> acts;    // one per hidden junction (layers() - 1)
  Activation out_act = Activation::identity;

  Eigen::Index layers() const { return static_cast<Eigen::Index>(dims.size()) - 1; }
  Eigen::Index n_in() const { return dims.front(); }
  Eigen::Index n_out() const { return dims.back(); }
  Eigen::Index n_params() const;
  void validate() const;

  Vector eval(Eigen::Ref<const Vector> theta, Eigen::Ref<const Vector> input) const;

  /// Analytic Jacobians of the net output with respect to the input vector
  /// and every parameter, laid out in flattening order. Null outputs are
  /// skipped; `value` receives the forward evaluation when non-null.
  void jacobian(Eigen::Ref<const Vector> theta, Eigen::Ref<const Vector> input,
                Matrix* j_input, Matrix* j_theta, Vector* value) const;

  /// Xavier-uniform weights scaled by `scale`, zero biases.
  Vector init_params(SeededRng& rng, double scale) const;
};

struct LayerParams {
  Matrix weight;
  Vector bias;
};

Vector flatten_layers(const std::vector<LayerParams>& layers);
std::vector<LayerParams> unflatten_net(const LayerNet& net, Eigen::Ref<const Vector> theta);

/// Layered state-space model: state update (2a) and output map (2b).
/// When strictly_causal, the input columns of the first output layer are
/// removed from the parameterization, so the output cannot depend on u.
struct RnnSpec {
  Eigen::Index n_u = 0;
  Eigen::Index n_y = 0;
  Eigen::Index n_x = 0;
  std::vector<Eigen::Index> hidden_x;
  std::vector<Eigen::Index> hidden_y;
  std::vector<Activation> act_x;
  std::vector<Activation> act_y;
  Activation out_act = Activation::identity;
  bool strictly_causal = false;

  LayerNet state_net() const;
  LayerNet output_net() const;
  Eigen::Index n_theta_x() const { return state_net().n_params(); }
  Eigen::Index n_theta_y() const { return output_net().n_params(); }
  void validate() const;
};

/// Single-layer LSTM with state [h; c] and a layered output head reading the
/// full state (plus u unless strictly causal). Gate parameters are stored as
/// W row-major then bias, in gate order: forget, input, output, candidate.
/// Each gate reads [h; u].
struct LstmSpec {
  Eigen::Index n_u = 0;
  Eigen::Index n_y = 0;
  Eigen::Index n_h = 0;
  std::vector<Eigen::Index> hidden_y;
  std::vector<Activation> act_y;
  Activation out_act = Activation::identity;
  bool strictly_causal = false;

  Eigen::Index n_x() const { return 2 * n_h; }
  Eigen::Index n_theta_x() const { return 4 * n_h * (n_h + n_u + 1); }
  LayerNet output_net() const;
  Eigen::Index n_theta_y() const { return output_net().n_params(); }
  void validate() const;
};

struct LstmParams {
  Matrix w_forget, w_input, w_output, w_cand;
  Vector b_forget, b_input, b_output, b_cand;
};

Vector flatten_lstm_gates(const LstmParams& p);
LstmParams unflatten_lstm_gates(const LstmSpec& spec, Eigen::Ref<const Vector> theta_x);

struct ModelJacobians {
  Matrix fx_x;        // n_x x n_x
  Matrix fx_theta_x;  // n_x x n_theta_x
  Matrix fy_x;        // n_y x n_x
  Matrix fy_theta_y;  // n_y x n_theta_y
  Vector x_next;      // f_x at the evaluation point
  Vector y;           // f_y at the evaluation point
};

struct ModelInputJacobians {
  Matrix fx_x, fx_u;
  Matrix fy_x, fy_u;
};

struct SimResult {
  Matrix states;       // N x n_x, row k = x(k)
  Matrix outputs;      // N x n_y, row k = y(k)
  Vector final_state;  // x(N)
};

/// One model family behind a single call surface; holds either an RnnSpec
/// or an LstmSpec.
class Model {
 public:
  Model() = default;
  explicit Model(RnnSpec spec);
  explicit Model(LstmSpec spec);

  Eigen::Index n_u() const;
  Eigen::Index n_y() const;
  Eigen::Index n_x() const;
  Eigen::Index n_theta_x() const;
  Eigen::Index n_theta_y() const;
  Eigen::Index n_theta() const { return n_theta_x() + n_theta_y(); }

  const RnnSpec* rnn() const { return std::get_if<RnnSpec>(&spec_); }
  const LstmSpec* lstm() const { return std::get_if<LstmSpec>(&spec_); }
  bool strictly_causal() const;

  Vector init_params(SeededRng& rng, double scale = 1.0) const;

  Vector state_update(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> u,
                      Eigen::Ref<const Vector> theta_x) const;
  Vector output(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> u,
                Eigen::Ref<const Vector> theta_y) const;

  ModelJacobians jacobians(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> u,
                           Eigen::Ref<const Vector> theta) const;
  ModelInputJacobians input_jacobians(Eigen::Ref<const Vector> x,
                                      Eigen::Ref<const Vector> u,
                                      Eigen::Ref<const Vector> theta) const;

  SimResult simulate(Eigen::Ref<const Vector> theta, Eigen::Ref<const Vector> x0,
                     const Matrix& inputs) const;

 private:
  std::variant<RnnSpec, LstmSpec> spec_;
};

Vector lstm_state_update(const LstmSpec& spec, Eigen::Ref<const Vector> hc,
                         Eigen::Ref<const Vector> u, Eigen::Ref<const Vector> theta_x);

}  // namespace rekf

#endif  // REKF_MODELS_HPP
