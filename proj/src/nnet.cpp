#include "strkm/nnet.hpp"

#include <cmath>

#include "strkm/errors.hpp"

namespace strkm {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::prelu: return "prelu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& s) {
  if (s == "linear") return Activation::linear;
  if (s == "prelu") return Activation::prelu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + s + "'");
}

bool is_smooth(Activation a) { return a != Activation::prelu; }

double activate(Activation a, double x, double prelu_alpha) {
  switch (a) {
    case Activation::linear: return x;
    case Activation::prelu: return x > 0.0 ? x : prelu_alpha * x;
    case Activation::sigmoid:
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      return std::exp(x) / (1.0 + std::exp(x));
    case Activation::tanh: return std::tanh(x);
  }
  return x;
}

double activate_derivative(Activation a, double x, double prelu_alpha) {
  switch (a) {
    case Activation::linear: return 1.0;
    case Activation::prelu: return x > 0.0 ? 1.0 : prelu_alpha;
    case Activation::sigmoid: {
      const double y = activate(a, x);
      return y * (1.0 - y);
    }
    case Activation::tanh: {
      const double y = std::tanh(x);
      return 1.0 - y * y;
    }
  }
  return 1.0;
}

Network::Network(std::vector<Layer> layers, double prelu_alpha)
    : layers_(std::move(layers)), prelu_alpha_(prelu_alpha) {
  validate();
}

void Network::validate() const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.bias.rows() != 1 || l.bias.cols() != l.weight.rows()) {
      throw ShapeError("layer " + std::to_string(i) + ": bias does not match weight rows");
    }
    if (i > 0 && layers_[i - 1].out_dim() != l.in_dim()) {
      throw ShapeError("layer " + std::to_string(i) + ": input dim does not chain");
    }
  }
}

Network Network::init(const NetworkSpec& spec, std::uint64_t seed) {
  if (spec.sizes.size() < 2 || spec.activations.size() != spec.sizes.size() - 1) {
    throw ConfigError("network spec needs >= 2 sizes and one activation per layer");
  }
  for (int s : spec.sizes) {
    if (s < 1) throw ConfigError("network layer sizes must be >= 1");
  }
  Rng rng(seed);
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < spec.sizes.size(); ++i) {
    const int fan_in = spec.sizes[i];
    const int fan_out = spec.sizes[i + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Layer l;
    l.weight.resize(fan_out, fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) l.weight.data()[k] = dist(rng.engine());
    l.bias = Mat::Zero(1, fan_out);
    l.activation = spec.activations[i];
    layers.push_back(std::move(l));
  }
  return Network(std::move(layers), spec.prelu_alpha);
}

Eigen::Index Network::input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }

Eigen::Index Network::output_dim() const {
  return layers_.empty() ? 0 : layers_.back().out_dim();
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Mat Network::forward_batch(const Mat& x) const {
  if (layers_.empty()) throw ContractError("forward on empty network");
  if (x.cols() != input_dim()) {
    throw ShapeError("forward: input has " + std::to_string(x.cols()) + " columns, expected " +
                     std::to_string(input_dim()));
  }
  Mat h = x;
  for (const auto& l : layers_) {
    Mat z = h * l.weight.transpose();
    z.rowwise() += l.bias.row(0);
    const double alpha = prelu_alpha_;
    const Activation act = l.activation;
    if (act != Activation::linear) {
      z = z.unaryExpr([act, alpha](double v) { return activate(act, v, alpha); });
    }
    h = std::move(z);
  }
  return h;
}

Vec Network::forward(const Vec& x) const {
  Mat row = x.transpose();
  return forward_batch(row).row(0).transpose();
}

Vec Network::jvp(const Vec& x, const Vec& v) const {
  if (x.size() != input_dim() || v.size() != input_dim()) {
    throw ShapeError("jvp: input/direction dimension mismatch");
  }
  Vec h = x;
  Vec dh = v;
  for (const auto& l : layers_) {
    Vec z = l.weight * h + l.bias.row(0).transpose();
    Vec dz = l.weight * dh;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      dz(i) *= activate_derivative(l.activation, z(i), prelu_alpha_);
      z(i) = activate(l.activation, z(i), prelu_alpha_);
    }
    h = std::move(z);
    dh = std::move(dz);
  }
  return dh;
}

std::vector<Mat*> Network::parameters() {
  std::vector<Mat*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Mat*> Network::parameters() const {
  std::vector<const Mat*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

NetworkVars bind(ad::Tape& tape, const Network& net, bool trainable) {
  NetworkVars vars;
  for (const Mat* p : net.parameters()) {
    vars.params.push_back(trainable ? tape.parameter(*p) : tape.constant(*p));
  }
  return vars;
}

ad::Var forward(const Network& net, const NetworkVars& vars, ad::Var x) {
  if (x.cols() != net.input_dim()) throw ShapeError("forward: input dimension mismatch");
  ad::Var h = x;
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    ad::Var z = ad::add_row(ad::matmul_nt(h, vars.params[2 * i]), vars.params[2 * i + 1]);
    switch (layers[i].activation) {
      case Activation::linear: h = z; break;
      case Activation::prelu: h = ad::prelu(z, net.prelu_alpha()); break;
      case Activation::sigmoid: h = ad::sigmoid(z); break;
      case Activation::tanh: h = ad::tanh(z); break;
    }
  }
  return h;
}

void adam_step(AdamState& state, std::span<Mat* const> params, std::span<const Mat> grads) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: params/grads count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != grads[i].rows() || params[i]->cols() != grads[i].cols()) {
      throw ShapeError("adam_step: gradient shape mismatch at parameter " + std::to_string(i));
    }
    if (!grads[i].allFinite()) {
      throw NumericError("adam_step: non-finite gradient at parameter " + std::to_string(i));
    }
  }
  if (state.first_moment.empty()) {
    for (Mat* p : params) {
      state.first_moment.push_back(Mat::Zero(p->rows(), p->cols()));
      state.second_moment.push_back(Mat::Zero(p->rows(), p->cols()));
    }
  } else if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: parameter count changed between steps");
  }

  state.step += 1;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat& m = state.first_moment[i];
    Mat& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * grads[i];
    v = c.beta2 * v + (1.0 - c.beta2) * grads[i].cwiseProduct(grads[i]);
    auto m_hat = m.array() / bc1;
    auto v_hat = v.array() / bc2;
    params[i]->array() -= c.lr * m_hat / (v_hat.sqrt() + c.eps);
  }
}

}  // namespace strkm
