#pragma once

#include <functional>
#include <vector>

#include "strkm/ndmath.hpp"

// Reverse-mode differentiation over dense matrices.
//
// A Tape records primitive operations in execution order. Leaves are either
// constants or parameters; parameters are numbered by creation order (their
// "slot"). Nodes that do not depend on any parameter carry no backward work.
namespace strkm::ad {

class Tape;

// Handle to a node on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Mat& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  // Convenience for 1x1 nodes.
  double scalar() const;
};

using ParamSlot = int;

class Tape {
 public:
  // Receives the node's own id and its accumulated adjoint.
  using Backprop = std::function<void(Tape&, int self, const Mat& adjoint)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Mat value);
  Var parameter(Mat value);

  ParamSlot slot(Var v) const;
  int num_parameters() const { return static_cast<int>(param_nodes_.size()); }
  std::size_t size() const { return nodes_.size(); }

  const Mat& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool requires_grad(int id) const {
    return nodes_[static_cast<std::size_t>(id)].requires_grad;
  }

  // Records an op node. `parents` decide whether gradients flow through it.
  Var record(Mat value, std::initializer_list<Var> parents, Backprop backprop);

  // Adds `g` into the adjoint of node `id` (no-op for constant subgraphs).
  void accumulate(int id, const Mat& g);

  friend std::vector<Mat> grad(Tape& tape, Var output);

 private:
  struct Node {
    Mat value;
    Mat adjoint;
    bool requires_grad = false;
    Backprop backprop;
  };

  std::vector<Node> nodes_;
  std::vector<int> param_nodes_;
};

// Exact reverse-mode derivatives of a 1x1 output with respect to every
// parameter leaf, indexed by slot. Parameters the output does not depend on
// get a zero matrix. Throws ContractError for a non-scalar output.
std::vector<Mat> grad(Tape& tape, Var output);

Var matmul(Var a, Var b);
// a * b^T
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double c);
// Adds the 1xk row vector `row` to every row of the n x k matrix `a`.
Var add_row(Var a, Var row);
// Subtracts the column means (per-feature batch centering).
Var center_rows(Var a);
Var prelu(Var a, double alpha);
Var sigmoid(Var a);
Var tanh(Var a);
// Scalar reductions (1x1 results).
Var sum(Var a);
Var sum_squares(Var a);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(double c, Var a) { return scale(a, c); }

}  // namespace strkm::ad
