#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "strkm/ndmath.hpp"
#include "strkm/tape.hpp"

namespace strkm {

// Stored as a single byte in checkpoints; values are part of the file format.
enum class Activation : std::uint8_t { linear = 0, prelu = 1, sigmoid = 2, tanh = 3 };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);
// True for activations with a continuous second derivative.
bool is_smooth(Activation a);

inline constexpr double kDefaultPreluAlpha = 0.2;

// Activation primitives on a scalar.
double activate(Activation a, double x, double prelu_alpha = kDefaultPreluAlpha);
double activate_derivative(Activation a, double x, double prelu_alpha = kDefaultPreluAlpha);

struct Layer {
  Mat weight;  // out x in
  Mat bias;    // 1 x out
  Activation activation = Activation::linear;

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

// Layer sizes [in, h1, ..., out] with one activation per weight layer.
struct NetworkSpec {
  std::vector<int> sizes;
  std::vector<Activation> activations;
  double prelu_alpha = kDefaultPreluAlpha;
};

// Dense feed-forward network. Rows of a batch matrix are samples.
class Network {
 public:
  Network() = default;
  Network(std::vector<Layer> layers, double prelu_alpha = kDefaultPreluAlpha);

  // Glorot-uniform weights, zero biases; deterministic per seed.
  static Network init(const NetworkSpec& spec, std::uint64_t seed);

  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;
  double prelu_alpha() const { return prelu_alpha_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }
  bool empty() const { return layers_.empty(); }
  std::size_t parameter_count() const;

  Vec forward(const Vec& x) const;
  Mat forward_batch(const Mat& x) const;

  // Exact directional derivative J(x) v by forward-mode propagation.
  Vec jvp(const Vec& x, const Vec& v) const;

  // Flat parameter list in the order W0, b0, W1, b1, ...
  std::vector<Mat*> parameters();
  std::vector<const Mat*> parameters() const;

 private:
  void validate() const;

  std::vector<Layer> layers_;
  double prelu_alpha_ = kDefaultPreluAlpha;
};

// Parameter leaves of a network bound to a tape, same order as parameters().
struct NetworkVars {
  std::vector<ad::Var> params;
};

// Binds the network's parameters as tape parameters (trainable) or constants.
NetworkVars bind(ad::Tape& tape, const Network& net, bool trainable);

// Taped forward pass of a batch (rows are samples).
ad::Var forward(const Network& net, const NetworkVars& vars, ad::Var x);

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  explicit AdamState(AdamConfig config = {}) : config(config) {}

  AdamConfig config;
  std::vector<Mat> first_moment;
  std::vector<Mat> second_moment;
  std::int64_t step = 0;
};

// One bias-corrected Adam update. Moments are lazily sized on the first
// call. A non-finite gradient throws NumericError and leaves params and
// state untouched.
void adam_step(AdamState& state, std::span<Mat* const> params, std::span<const Mat> grads);

}  // namespace strkm
