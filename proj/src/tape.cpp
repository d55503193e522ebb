#include "strkm/tape.hpp"

#include <cmath>
#include <string>

#include "strkm/errors.hpp"

namespace strkm::ad {

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

void require_same_tape(const Var& a, const Var& b) {
  if (a.tape != b.tape || a.tape == nullptr) throw ContractError("vars live on different tapes");
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Mat& Var::value() const { return tape->value(id); }

double Var::scalar() const {
  const Mat& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("Var::scalar on non-scalar node");
  return v(0, 0);
}

Var Tape::constant(Mat value) {
  nodes_.push_back(Node{std::move(value), Mat(), false, nullptr});
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

Var Tape::parameter(Mat value) {
  nodes_.push_back(Node{std::move(value), Mat(), true, nullptr});
  const int id = static_cast<int>(nodes_.size() - 1);
  param_nodes_.push_back(id);
  return Var{this, id};
}

ParamSlot Tape::slot(Var v) const {
  for (std::size_t i = 0; i < param_nodes_.size(); ++i) {
    if (param_nodes_[i] == v.id) return static_cast<ParamSlot>(i);
  }
  throw ContractError("Tape::slot: node is not a parameter");
}

Var Tape::record(Mat value, std::initializer_list<Var> parents, Backprop backprop) {
  bool needs = false;
  for (const Var& p : parents) {
    if (p.tape != this) throw ContractError("Tape::record: parent from another tape");
    needs = needs || requires_grad(p.id);
  }
  nodes_.push_back(Node{std::move(value), Mat(), needs, needs ? std::move(backprop) : nullptr});
  return Var{this, static_cast<int>(nodes_.size() - 1)};
}

void Tape::accumulate(int id, const Mat& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.requires_grad) return;
  if (n.adjoint.size() == 0) {
    n.adjoint = g;
  } else {
    n.adjoint += g;
  }
}

std::vector<Mat> grad(Tape& tape, Var output) {
  if (output.tape != &tape) throw ContractError("grad: output is not on this tape");
  const Mat& out = output.value();
  if (out.rows() != 1 || out.cols() != 1) {
    throw ContractError("grad: output must be a scalar node, got " + std::to_string(out.rows()) +
                        "x" + std::to_string(out.cols()));
  }
  for (auto& n : tape.nodes_) n.adjoint.resize(0, 0);
  tape.accumulate(output.id, Mat::Ones(1, 1));
  for (int id = output.id; id >= 0; --id) {
    auto& n = tape.nodes_[static_cast<std::size_t>(id)];
    if (n.backprop && n.adjoint.size() != 0) {
      const Mat adj = n.adjoint;
      n.backprop(tape, id, adj);
    }
  }
  std::vector<Mat> grads;
  grads.reserve(tape.param_nodes_.size());
  for (int id : tape.param_nodes_) {
    const auto& n = tape.nodes_[static_cast<std::size_t>(id)];
    grads.push_back(n.adjoint.size() != 0 ? n.adjoint : Mat::Zero(n.value.rows(), n.value.cols()));
  }
  return grads;
}

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
  Mat v = a.value() * b.value();
  const int ia = a.id, ib = b.id;
  return a.tape->record(std::move(v), {a, b}, [ia, ib](Tape& t, int, const Mat& adj) {
    if (t.requires_grad(ia)) t.accumulate(ia, adj * t.value(ib).transpose());
    if (t.requires_grad(ib)) t.accumulate(ib, t.value(ia).transpose() * adj);
  });
}

Var matmul_nt(Var a, Var b) {
  require_same_tape(a, b);
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: inner dimensions differ");
  Mat v = a.value() * b.value().transpose();
  const int ia = a.id, ib = b.id;
  return a.tape->record(std::move(v), {a, b}, [ia, ib](Tape& t, int, const Mat& adj) {
    if (t.requires_grad(ia)) t.accumulate(ia, adj * t.value(ib));
    if (t.requires_grad(ib)) t.accumulate(ib, adj.transpose() * t.value(ia));
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "add");
  Mat v = a.value() + b.value();
  const int ia = a.id, ib = b.id;
  return a.tape->record(std::move(v), {a, b}, [ia, ib](Tape& t, int, const Mat& adj) {
    t.accumulate(ia, adj);
    t.accumulate(ib, adj);
  });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "sub");
  Mat v = a.value() - b.value();
  const int ia = a.id, ib = b.id;
  return a.tape->record(std::move(v), {a, b}, [ia, ib](Tape& t, int, const Mat& adj) {
    t.accumulate(ia, adj);
    if (t.requires_grad(ib)) t.accumulate(ib, -adj);
  });
}

Var hadamard(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape(a, b, "hadamard");
  Mat v = a.value().cwiseProduct(b.value());
  const int ia = a.id, ib = b.id;
  return a.tape->record(std::move(v), {a, b}, [ia, ib](Tape& t, int, const Mat& adj) {
    if (t.requires_grad(ia)) t.accumulate(ia, adj.cwiseProduct(t.value(ib)));
    if (t.requires_grad(ib)) t.accumulate(ib, adj.cwiseProduct(t.value(ia)));
  });
}

Var scale(Var a, double c) {
  Mat v = c * a.value();
  const int ia = a.id;
  return a.tape->record(std::move(v), {a},
                        [ia, c](Tape& t, int, const Mat& adj) { t.accumulate(ia, c * adj); });
}

Var add_row(Var a, Var row) {
  require_same_tape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols()) throw ShapeError("add_row: bad row shape");
  Mat v = a.value();
  v.rowwise() += row.value().row(0);
  const int ia = a.id, ir = row.id;
  return a.tape->record(std::move(v), {a, row}, [ia, ir](Tape& t, int, const Mat& adj) {
    t.accumulate(ia, adj);
    if (t.requires_grad(ir)) t.accumulate(ir, adj.colwise().sum());
  });
}

Var center_rows(Var a) {
  Mat v = a.value();
  const Eigen::RowVectorXd mean = v.colwise().mean();
  v.rowwise() -= mean;
  const int ia = a.id;
  return a.tape->record(std::move(v), {a}, [ia](Tape& t, int, const Mat& adj) {
    // Centering is a symmetric projector, so its adjoint is centering again.
    Mat g = adj;
    const Eigen::RowVectorXd m = g.colwise().mean();
    g.rowwise() -= m;
    t.accumulate(ia, g);
  });
}

Var prelu(Var a, double alpha) {
  Mat v = a.value().unaryExpr([alpha](double x) { return x > 0.0 ? x : alpha * x; });
  const int ia = a.id;
  return a.tape->record(std::move(v), {a}, [ia, alpha](Tape& t, int, const Mat& adj) {
    const Mat& x = t.value(ia);
    Mat g = adj;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (!(x.data()[i] > 0.0)) g.data()[i] *= alpha;
    }
    t.accumulate(ia, g);
  });
}

Var sigmoid(Var a) {
  Mat v = a.value().unaryExpr([](double x) { return sigmoid_scalar(x); });
  const int ia = a.id;
  return a.tape->record(std::move(v), {a}, [ia](Tape& t, int self, const Mat& adj) {
    const Mat& y = t.value(self);
    t.accumulate(ia, adj.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
  });
}

Var tanh(Var a) {
  Mat v = a.value().unaryExpr([](double x) { return std::tanh(x); });
  const int ia = a.id;
  return a.tape->record(std::move(v), {a}, [ia](Tape& t, int self, const Mat& adj) {
    const Mat& y = t.value(self);
    t.accumulate(ia, adj.cwiseProduct((1.0 - y.array().square()).matrix()));
  });
}

Var sum(Var a) {
  Mat v(1, 1);
  v(0, 0) = a.value().sum();
  const int ia = a.id;
  const Eigen::Index r = a.rows(), c = a.cols();
  return a.tape->record(std::move(v), {a}, [ia, r, c](Tape& t, int, const Mat& adj) {
    t.accumulate(ia, Mat::Constant(r, c, adj(0, 0)));
  });
}

Var sum_squares(Var a) {
  Mat v(1, 1);
  v(0, 0) = a.value().squaredNorm();
  const int ia = a.id;
  return a.tape->record(std::move(v), {a}, [ia](Tape& t, int, const Mat& adj) {
    t.accumulate(ia, (2.0 * adj(0, 0)) * t.value(ia));
  });
}

}  // namespace strkm::ad
