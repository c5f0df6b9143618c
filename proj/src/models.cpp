#include "rekf/models.hpp"

#include <cmath>
#include <utility>

namespace rekf {

namespace {

using RowMajorMap = Eigen::Map<
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": got " + std::to_string(got) +
                            ", expected " + std::to_string(want));
  }
}

}  // namespace

double activation_value(Activation a, double v) {
  switch (a) {
    case Activation::identity: return v;
    case Activation::atan: return std::atan(v);
    case Activation::sigmoid: return sigmoid(v);
    case Activation::tanh: return std::tanh(v);
  }
  return v;
}

double activation_deriv(Activation a, double v) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::atan: return 1.0 / (1.0 + v * v);
    case Activation::sigmoid: {
      const double s = sigmoid(v);
      return s * (1.0 - s);
    }
    case Activation::tanh: {
      const double t = std::tanh(v);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

double activation_deriv2(Activation a, double v) {
  switch (a) {
    case Activation::identity: return 0.0;
    case Activation::atan: {
      const double d = 1.0 + v * v;
      return -2.0 * v / (d * d);
    }
    case Activation::sigmoid: {
      const double s = sigmoid(v);
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case Activation::tanh: {
      const double t = std::tanh(v);
      return -2.0 * t * (1.0 - t * t);
    }
  }
  return 0.0;
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "atan") return Activation::atan;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + s + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::atan: return "atan";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "identity";
}

Eigen::Index LayerNet::n_params() const {
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(dims.size()); ++i) {
    n += dims[i + 1] * (dims[i] + 1);
  }
  return n;
}

void LayerNet::validate() const {
  if (dims.size() < 2) {
    throw ConfigError("LayerNet: needs at least one layer");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 0 || (dims[i] == 0 && i + 1 != dims.size() && i != 0)) {
      throw ConfigError("LayerNet: invalid layer width");
    }
  }
  if (static_cast<Eigen::Index>(acts.size()) != layers() - 1) {
    throw ConfigError("LayerNet: expected " + std::to_string(layers() - 1) +
                      " hidden activations, got " + std::to_string(acts.size()));
  }
}

Vector LayerNet::eval(Eigen::Ref<const Vector> theta, Eigen::Ref<const Vector> input) const {
  check_dim(theta.size(), n_params(), "LayerNet::eval theta");
  check_dim(input.size(), n_in(), "LayerNet::eval input");
  Vector a = input;
  Eigen::Index off = 0;
  const Eigen::Index nl = layers();
  for (Eigen::Index i = 0; i < nl; ++i) {
    const Eigen::Index nin = dims[i];
    const Eigen::Index nout = dims[i + 1];
    RowMajorMap w(theta.data() + off, nout, nin);
    off += nout * nin;
    Eigen::Map<const Vector> b(theta.data() + off, nout);
    off += nout;
    Vector v = w * a + b;
    if (i + 1 < nl) {
      const Activation act = acts[i];
      for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = activation_value(act, v(j));
      a = std::move(v);
    } else {
      if (out_act != Activation::identity) {
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = activation_value(out_act, v(j));
      }
      return v;
    }
  }
  return a;  // zero-layer nets are rejected by validate()
}

void LayerNet::jacobian(Eigen::Ref<const Vector> theta, Eigen::Ref<const Vector> input,
                        Matrix* j_input, Matrix* j_theta, Vector* value) const {
  check_dim(theta.size(), n_params(), "LayerNet::jacobian theta");
  check_dim(input.size(), n_in(), "LayerNet::jacobian input");
  const Eigen::Index nl = layers();
  const Eigen::Index nout_total = n_out();

  // Forward pass, caching layer inputs and pre-activations.
  std::vector<Vector> layer_in(nl);   // a_{i-1}, the input to layer i
  std::vector<Vector> pre(nl);        // v_i
  std::vector<Eigen::Index> off(nl);
  {
    Vector a = input;
    Eigen::Index o = 0;
    for (Eigen::Index i = 0; i < nl; ++i) {
      const Eigen::Index nin = dims[i];
      const Eigen::Index no = dims[i + 1];
      off[i] = o;
      RowMajorMap w(theta.data() + o, no, nin);
      o += no * nin;
      Eigen::Map<const Vector> b(theta.data() + o, no);
      o += no;
      layer_in[i] = a;
      pre[i] = w * a + b;
      if (i + 1 < nl) {
        a.resize(no);
        for (Eigen::Index j = 0; j < no; ++j) a(j) = activation_value(acts[i], pre[i](j));
      }
    }
  }

  if (value != nullptr) {
    Vector out = pre[nl - 1];
    if (out_act != Activation::identity) {
      for (Eigen::Index j = 0; j < out.size(); ++j) out(j) = activation_value(out_act, out(j));
    }
    *value = std::move(out);
  }

  // g = d(output) / d(v_i), walked backwards from the last layer.
  Matrix g;
  if (out_act == Activation::identity) {
    g = Matrix::Identity(nout_total, nout_total);
  } else {
    g = Matrix::Zero(nout_total, nout_total);
    for (Eigen::Index j = 0; j < nout_total; ++j) {
      g(j, j) = activation_deriv(out_act, pre[nl - 1](j));
    }
  }

  if (j_theta != nullptr) {
    j_theta->setZero(nout_total, n_params());
  }

  for (Eigen::Index i = nl - 1; i >= 0; --i) {
    const Eigen::Index nin = dims[i];
    const Eigen::Index no = dims[i + 1];
    if (j_theta != nullptr) {
      for (Eigen::Index r = 0; r < no; ++r) {
        j_theta->block(0, off[i] + r * nin, nout_total, nin).noalias() =
            g.col(r) * layer_in[i].transpose();
      }
      j_theta->block(0, off[i] + no * nin, nout_total, no) = g;
    }
    RowMajorMap w(theta.data() + off[i], no, nin);
    if (i > 0) {
      Matrix gw = g * w;
      for (Eigen::Index c = 0; c < nin; ++c) {
        gw.col(c) *= activation_deriv(acts[i - 1], pre[i - 1](c));
      }
      g = std::move(gw);
    } else if (j_input != nullptr) {
      j_input->noalias() = g * w;
    }
  }
}

Vector LayerNet::init_params(SeededRng& rng, double scale) const {
  Vector theta = Vector::Zero(n_params());
  Eigen::Index off = 0;
  for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(dims.size()); ++i) {
    const Eigen::Index nin = dims[i];
    const Eigen::Index nout = dims[i + 1];
    const double bound = scale * std::sqrt(6.0 / static_cast<double>(nin + nout));
    for (Eigen::Index k = 0; k < nout * nin; ++k) {
      theta(off + k) = rng.uniform(-bound, bound);
    }
    off += nout * nin + nout;  // biases stay zero
  }
  return theta;
}

Vector flatten_layers(const std::vector<LayerParams>& layers) {
  Eigen::Index n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  Vector theta(n);
  Eigen::Index off = 0;
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        theta(off++) = l.weight(r, c);
      }
    }
    theta.segment(off, l.bias.size()) = l.bias;
    off += l.bias.size();
  }
  return theta;
}

std::vector<LayerParams> unflatten_net(const LayerNet& net, Eigen::Ref<const Vector> theta) {
  check_dim(theta.size(), net.n_params(), "unflatten_net theta");
  std::vector<LayerParams> out;
  Eigen::Index off = 0;
  for (Eigen::Index i = 0; i < net.layers(); ++i) {
    const Eigen::Index nin = net.dims[i];
    const Eigen::Index nout = net.dims[i + 1];
    LayerParams p;
    p.weight.resize(nout, nin);
    for (Eigen::Index r = 0; r < nout; ++r) {
      for (Eigen::Index c = 0; c < nin; ++c) {
        p.weight(r, c) = theta(off++);
      }
    }
    p.bias = theta.segment(off, nout);
    off += nout;
    out.push_back(std::move(p));
  }
  return out;
}

LayerNet RnnSpec::state_net() const {
  LayerNet net;
  net.dims.push_back(n_x + n_u);
  for (auto h : hidden_x) net.dims.push_back(h);
  net.dims.push_back(n_x);
  net.acts = act_x;
  net.out_act = Activation::identity;
  return net;
}

LayerNet RnnSpec::output_net() const {
  LayerNet net;
  net.dims.push_back(strictly_causal ? n_x : n_x + n_u);
  for (auto h : hidden_y) net.dims.push_back(h);
  net.dims.push_back(n_y);
  net.acts = act_y;
  net.out_act = out_act;
  return net;
}

void RnnSpec::validate() const {
  if (n_u < 0 || n_x < 0 || n_y < 1) {
    throw ConfigError("RnnSpec: need n_u >= 0, n_x >= 0, n_y >= 1");
  }
  if (n_x + n_u < 1) {
    throw ConfigError("RnnSpec: model has no inputs or states");
  }
  if (act_x.size() != hidden_x.size() || act_y.size() != hidden_y.size()) {
    throw ConfigError("RnnSpec: one activation per hidden layer required");
  }
  for (auto h : hidden_x) {
    if (h < 1) throw ConfigError("RnnSpec: hidden_x widths must be positive");
  }
  for (auto h : hidden_y) {
    if (h < 1) throw ConfigError("RnnSpec: hidden_y widths must be positive");
  }
  if (strictly_causal && n_x == 0) {
    throw ConfigError("RnnSpec: strictly causal output needs n_x >= 1");
  }
  state_net().validate();
  output_net().validate();
}

LayerNet LstmSpec::output_net() const {
  LayerNet net;
  net.dims.push_back(strictly_causal ? n_x() : n_x() + n_u);
  for (auto h : hidden_y) net.dims.push_back(h);
  net.dims.push_back(n_y);
  net.acts = act_y;
  net.out_act = out_act;
  return net;
}

void LstmSpec::validate() const {
  if (n_h < 1 || n_y < 1 || n_u < 0) {
    throw ConfigError("LstmSpec: need n_h >= 1, n_y >= 1, n_u >= 0");
  }
  if (act_y.size() != hidden_y.size()) {
    throw ConfigError("LstmSpec: one activation per hidden layer required");
  }
  output_net().validate();
}

Vector flatten_lstm_gates(const LstmParams& p) {
  std::vector<LayerParams> layers{
      {p.w_forget, p.b_forget}, {p.w_input, p.b_input},
      {p.w_output, p.b_output}, {p.w_cand, p.b_cand}};
  return flatten_layers(layers);
}

LstmParams unflatten_lstm_gates(const LstmSpec& spec, Eigen::Ref<const Vector> theta_x) {
  check_dim(theta_x.size(), spec.n_theta_x(), "unflatten_lstm_gates theta_x");
  const Eigen::Index nh = spec.n_h;
  const Eigen::Index nin = spec.n_h + spec.n_u;
  LstmParams p;
  Eigen::Index off = 0;
  auto take = [&](Matrix& w, Vector& b) {
    w.resize(nh, nin);
    for (Eigen::Index r = 0; r < nh; ++r) {
      for (Eigen::Index c = 0; c < nin; ++c) w(r, c) = theta_x(off++);
    }
    b = theta_x.segment(off, nh);
    off += nh;
  };
  take(p.w_forget, p.b_forget);
  take(p.w_input, p.b_input);
  take(p.w_output, p.b_output);
  take(p.w_cand, p.b_cand);
  return p;
}

namespace {

struct LstmCache {
  Vector in;              // [h; u]
  Vector zf, zi, zo, zc;  // gate pre-activations
  Vector f, g_in, o, t;   // gate values; g_in is the input gate
  Vector c1, th, h1;
};

LstmCache lstm_forward(const LstmSpec& spec, const LstmParams& p,
                       Eigen::Ref<const Vector> hc, Eigen::Ref<const Vector> u) {
  const Eigen::Index nh = spec.n_h;
  LstmCache c;
  c.in.resize(nh + spec.n_u);
  c.in.head(nh) = hc.head(nh);
  c.in.tail(spec.n_u) = u;
  const Vector cell = hc.tail(nh);
  c.zf = p.w_forget * c.in + p.b_forget;
  c.zi = p.w_input * c.in + p.b_input;
  c.zo = p.w_output * c.in + p.b_output;
  c.zc = p.w_cand * c.in + p.b_cand;
  c.f = c.zf.unaryExpr([](double v) { return sigmoid(v); });
  c.g_in = c.zi.unaryExpr([](double v) { return sigmoid(v); });
  c.o = c.zo.unaryExpr([](double v) { return sigmoid(v); });
  c.t = c.zc.array().tanh();
  c.c1 = c.f.cwiseProduct(cell) + c.g_in.cwiseProduct(c.t);
  c.th = c.c1.array().tanh();
  c.h1 = c.o.cwiseProduct(c.th);
  return c;
}

void lstm_jacobian(const LstmSpec& spec, Eigen::Ref<const Vector> hc,
                   Eigen::Ref<const Vector> u, Eigen::Ref<const Vector> theta_x,
                   Matrix* j_state, Matrix* j_u, Matrix* j_theta, Vector* value) {
  const Eigen::Index nh = spec.n_h;
  const Eigen::Index nin = nh + spec.n_u;
  const LstmParams p = unflatten_lstm_gates(spec, theta_x);
  const LstmCache c = lstm_forward(spec, p, hc, u);
  const Vector cell = hc.tail(nh);

  if (value != nullptr) {
    value->resize(2 * nh);
    value->head(nh) = c.h1;
    value->tail(nh) = c.c1;
  }

  // Sensitivities of c1 to each gate pre-activation, and of h1 to c1.
  Vector sf(nh), si(nh), sc(nh), so(nh), m(nh);
  for (Eigen::Index j = 0; j < nh; ++j) {
    const double dsf = c.f(j) * (1.0 - c.f(j));
    const double dsi = c.g_in(j) * (1.0 - c.g_in(j));
    const double dso = c.o(j) * (1.0 - c.o(j));
    sf(j) = cell(j) * dsf;
    si(j) = c.t(j) * dsi;
    sc(j) = c.g_in(j) * (1.0 - c.t(j) * c.t(j));
    so(j) = c.th(j) * dso;
    m(j) = c.o(j) * (1.0 - c.th(j) * c.th(j));
  }

  if (j_state != nullptr || j_u != nullptr) {
    Matrix dc1_din = sf.asDiagonal() * p.w_forget + si.asDiagonal() * p.w_input +
                     sc.asDiagonal() * p.w_cand;
    Matrix dh1_din = m.asDiagonal() * dc1_din + so.asDiagonal() * p.w_output;
    if (j_state != nullptr) {
      j_state->setZero(2 * nh, 2 * nh);
      j_state->topLeftCorner(nh, nh) = dh1_din.leftCols(nh);
      j_state->bottomLeftCorner(nh, nh) = dc1_din.leftCols(nh);
      for (Eigen::Index j = 0; j < nh; ++j) {
        (*j_state)(j, nh + j) = m(j) * c.f(j);
        (*j_state)(nh + j, nh + j) = c.f(j);
      }
    }
    if (j_u != nullptr) {
      j_u->resize(2 * nh, spec.n_u);
      j_u->topRows(nh) = dh1_din.rightCols(spec.n_u);
      j_u->bottomRows(nh) = dc1_din.rightCols(spec.n_u);
    }
  }

  if (j_theta != nullptr) {
    j_theta->setZero(2 * nh, spec.n_theta_x());
    const Eigen::Index gate_stride = nh * nin + nh;
    // gate order: forget, input, output, candidate
    for (int gi = 0; gi < 4; ++gi) {
      const Eigen::Index base = gi * gate_stride;
      for (Eigen::Index r = 0; r < nh; ++r) {
        double dh, dc;
        switch (gi) {
          case 0: dh = m(r) * sf(r); dc = sf(r); break;
          case 1: dh = m(r) * si(r); dc = si(r); break;
          case 2: dh = so(r); dc = 0.0; break;
          default: dh = m(r) * sc(r); dc = sc(r); break;
        }
        j_theta->row(r).segment(base + r * nin, nin) = dh * c.in.transpose();
        j_theta->row(nh + r).segment(base + r * nin, nin) = dc * c.in.transpose();
        (*j_theta)(r, base + nh * nin + r) = dh;
        (*j_theta)(nh + r, base + nh * nin + r) = dc;
      }
    }
  }
}

Vector lstm_init_params(const LstmSpec& spec, SeededRng& rng, double scale) {
  const Eigen::Index nh = spec.n_h;
  const Eigen::Index nin = nh + spec.n_u;
  Vector theta = Vector::Zero(spec.n_theta_x());
  const double bound = scale * std::sqrt(6.0 / static_cast<double>(nin + nh));
  const Eigen::Index gate_stride = nh * nin + nh;
  for (int gi = 0; gi < 4; ++gi) {
    for (Eigen::Index k = 0; k < nh * nin; ++k) {
      theta(gi * gate_stride + k) = rng.uniform(-bound, bound);
    }
  }
  return theta;
}

}  // namespace

Vector lstm_state_update(const LstmSpec& spec, Eigen::Ref<const Vector> hc,
                         Eigen::Ref<const Vector> u, Eigen::Ref<const Vector> theta_x) {
  check_dim(hc.size(), spec.n_x(), "lstm_state_update state");
  check_dim(u.size(), spec.n_u, "lstm_state_update input");
  const LstmParams p = unflatten_lstm_gates(spec, theta_x);
  const LstmCache c = lstm_forward(spec, p, hc, u);
  Vector out(2 * spec.n_h);
  out.head(spec.n_h) = c.h1;
  out.tail(spec.n_h) = c.c1;
  return out;
}

Model::Model(RnnSpec spec) : spec_(std::move(spec)) {
  std::get<RnnSpec>(spec_).validate();
}

Model::Model(LstmSpec spec) : spec_(std::move(spec)) {
  std::get<LstmSpec>(spec_).validate();
}

Eigen::Index Model::n_u() const {
  return std::visit([](const auto& s) { return s.n_u; }, spec_);
}

Eigen::Index Model::n_y() const {
  return std::visit([](const auto& s) { return s.n_y; }, spec_);
}

Eigen::Index Model::n_x() const {
  if (const auto* r = rnn()) return r->n_x;
  return lstm()->n_x();
}

Eigen::Index Model::n_theta_x() const {
  return std::visit([](const auto& s) { return s.n_theta_x(); }, spec_);
}

Eigen::Index Model::n_theta_y() const {
  return std::visit([](const auto& s) { return s.n_theta_y(); }, spec_);
}

bool Model::strictly_causal() const {
  return std::visit([](const auto& s) { return s.strictly_causal; }, spec_);
}

Vector Model::init_params(SeededRng& rng, double scale) const {
  Vector theta(n_theta());
  if (const auto* r = rnn()) {
    theta.head(n_theta_x()) = r->state_net().init_params(rng, scale);
    theta.tail(n_theta_y()) = r->output_net().init_params(rng, scale);
  } else {
    theta.head(n_theta_x()) = lstm_init_params(*lstm(), rng, scale);
    theta.tail(n_theta_y()) = lstm()->output_net().init_params(rng, scale);
  }
  return theta;
}

namespace {

Vector stacked_input(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> u) {
  Vector in(x.size() + u.size());
  in.head(x.size()) = x;
  in.tail(u.size()) = u;
  return in;
}

}  // namespace

Vector Model::state_update(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> u,
                           Eigen::Ref<const Vector> theta_x) const {
  check_dim(x.size(), n_x(), "state_update state");
  check_dim(u.size(), n_u(), "state_update input");
  if (const auto* r = rnn()) {
    return r->state_net().eval(theta_x, stacked_input(x, u));
  }
  return lstm_state_update(*lstm(), x, u, theta_x);
}

Vector Model::output(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> u,
                     Eigen::Ref<const Vector> theta_y) const {
  check_dim(x.size(), n_x(), "output state");
  check_dim(u.size(), n_u(), "output input");
  const LayerNet net = std::visit([](const auto& s) { return s.output_net(); }, spec_);
  if (strictly_causal()) {
    return net.eval(theta_y, x);
  }
  return net.eval(theta_y, stacked_input(x, u));
}

ModelJacobians Model::jacobians(Eigen::Ref<const Vector> x, Eigen::Ref<const Vector> u,
                                Eigen::Ref<const Vector> theta) const {
  check_dim(theta.size(), n_theta(), "jacobians theta");
  ModelJacobians j;
  const auto theta_x = theta.head(n_theta_x());
  const auto theta_y = theta.tail(n_theta_y());
  if (const auto* r = rnn()) {
    Matrix jin;
    r->state_net().jacobian(theta_x, stacked_input(x, u), &jin, &j.fx_theta_x, &j.x_next);
    j.fx_x = jin.leftCols(n_x());
  } else {
    lstm_jacobian(*lstm(), x, u, theta_x, &j.fx_x, nullptr, &j.fx_theta_x, &j.x_next);
  }
  const LayerNet out_net = std::visit([](const auto& s) { return s.output_net(); }, spec_);
  if (strictly_causal()) {
    out_net.jacobian(theta_y, x, &j.fy_x, &j.fy_theta_y, &j.y);
  } else {
    Matrix jin;
    out_net.jacobian(theta_y, stacked_input(x, u), &jin, &j.fy_theta_y, &j.y);
    j.fy_x = jin.leftCols(n_x());
  }
  return j;
}

ModelInputJacobians Model::input_jacobians(Eigen::Ref<const Vector> x,
                                           Eigen::Ref<const Vector> u,
                                           Eigen::Ref<const Vector> theta) const {
  check_dim(theta.size(), n_theta(), "input_jacobians theta");
  ModelInputJacobians j;
  const auto theta_x = theta.head(n_theta_x());
  const auto theta_y = theta.tail(n_theta_y());
  if (const auto* r = rnn()) {
    Matrix jin;
    r->state_net().jacobian(theta_x, stacked_input(x, u), &jin, nullptr, nullptr);
    j.fx_x = jin.leftCols(n_x());
    j.fx_u = jin.rightCols(n_u());
  } else {
    lstm_jacobian(*lstm(), x, u, theta_x, &j.fx_x, &j.fx_u, nullptr, nullptr);
  }
  const LayerNet out_net = std::visit([](const auto& s) { return s.output_net(); }, spec_);
  if (strictly_causal()) {
    out_net.jacobian(theta_y, x, &j.fy_x, nullptr, nullptr);
    j.fy_u = Matrix::Zero(n_y(), n_u());
  } else {
    Matrix jin;
    out_net.jacobian(theta_y, stacked_input(x, u), &jin, nullptr, nullptr);
    j.fy_x = jin.leftCols(n_x());
    j.fy_u = jin.rightCols(n_u());
  }
  return j;
}

SimResult Model::simulate(Eigen::Ref<const Vector> theta, Eigen::Ref<const Vector> x0,
                          const Matrix& inputs) const {
  check_dim(theta.size(), n_theta(), "simulate theta");
  check_dim(x0.size(), n_x(), "simulate x0");
  check_dim(inputs.cols(), n_u(), "simulate input columns");
  const Eigen::Index n = inputs.rows();
  if (n < 1) {
    throw DimensionMismatch("simulate: need at least one input sample");
  }
  const auto theta_x = theta.head(n_theta_x());
  const auto theta_y = theta.tail(n_theta_y());
  SimResult res;
  res.states.resize(n, n_x());
  res.outputs.resize(n, n_y());
  Vector x = x0;
  for (Eigen::Index k = 0; k < n; ++k) {
    res.states.row(k) = x;
    const Vector u = inputs.row(k);
    const Vector y = output(x, u, theta_y);
    res.outputs.row(k) = y;
    x = state_update(x, u, theta_x);
    if (!x.allFinite() || !y.allFinite()) {
      throw NonFiniteState("simulate: trajectory diverged at sample " + std::to_string(k));
    }
  }
  res.final_state = x;
  return res;
}

}  // namespace rekf
