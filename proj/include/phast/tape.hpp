#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace phast::ad {

using Matrix = Eigen::MatrixXd;

// Handle to a node on a Tape. Only meaningful for the tape that created it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode record over dense matrix operations. All values are 2-D
// (column vectors are N x 1, scalars 1 x 1). Adjoints are emitted as ordinary
// tape nodes, so a gradient obtained through grad() can be differentiated
// again; that is what lets a force-from-energy loss reach the parameters.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves. Constants never receive adjoints.
  Var constant(Matrix value);
  Var leaf(Matrix value, bool requires_grad);

  // Primitives.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var sum_rows(Var a);
  Var sum_cols(Var a);
  Var broadcast_rows(Var a, int n);
  Var broadcast_cols(Var a, int n);
  Var gather_rows(Var a, std::shared_ptr<const std::vector<int>> idx);
  Var segment_sum(Var a, std::shared_ptr<const std::vector<int>> ids, int num_segments);
  Var concat_cols(Var a, Var b);
  Var slice_cols(Var a, int start, int len);
  Var shifted_softplus(Var a);
  Var sigmoid(Var a);
  Var sqrt(Var a);
  Var clamp_min(Var a, double lo);
  Var gaussian_rbf(Var d, Eigen::VectorXd centers, double width);

  const Matrix& value(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Adjoint of `wrt` for the scalar `output`, built as tape nodes (usable
  // mid-recording, e.g. forces from an energy). With detach the result is
  // copied into a constant so nothing differentiates through it. Returns a
  // zero matrix when output does not depend on wrt.
  Var grad_of(Var output, Var wrt, bool detach);

  // Terminal backward pass for every grad-requiring leaf. One per recording;
  // a second call without a fresh tape throws.
  void backward(Var output);

  // Adjoint value of a leaf after backward(); zeros if it never contributed.
  Matrix grad(Var leaf) const;

 private:
  enum class Op : std::uint8_t {
    Leaf, Add, Sub, Mul, Div, Scale, AddScalar, MatMul, Transpose, SumRows, SumCols,
    BroadcastRows, BroadcastCols, GatherRows, SegmentSum, ConcatCols, SliceCols,
    Ssp, Sigmoid, Sqrt, ClampMin, Rbf,
  };

  struct Node {
    Op op = Op::Leaf;
    bool requires_grad = false;
    int a = -1, b = -1;
    double scalar = 0.0;
    int i0 = 0, i1 = 0;
    std::shared_ptr<const std::vector<int>> idx;
    std::shared_ptr<const Eigen::VectorXd> centers;
    Matrix value;
  };

  Var push(Node n);
  Var binary(Op op, Var a, Var b);
  Var unary(Op op, Var a, double scalar = 0.0);
  void check(Var v) const;

  // Builds adjoints for the ancestors of `output` that lie on a path from any
  // node flagged in `targets`; returns per-node adjoint vars (-1 where none).
  std::vector<int> build_adjoints(Var output, const std::vector<char>& targets);
  void accumulate(std::vector<int>& adj, int node, Var contribution);

  std::vector<Node> nodes_;
  std::vector<int> last_adjoints_;
  bool backward_done_ = false;
};

// Composite helpers expressed through the primitives above. They participate
// in higher-order differentiation automatically.

// Row-wise Euclidean norm, N x D -> N x 1. With eps > 0 the smoothed form
// sqrt(|x|^2 + eps^2) - eps is used, which is differentiable at zero rows.
Var vector_norm_rows(Tape& t, Var x, double eps = 0.0);

// Row-wise cosine similarity (a.b) / max(|a||b|, eps), N x D -> N x 1.
Var cosine_rows(Tape& t, Var a, Var b, double eps);

// x W + bias row, with bias broadcast over rows. bias is 1 x M.
Var linear(Tape& t, Var x, Var w, Var bias);

Var sum_all(Tape& t, Var x);   // 1 x 1
Var mean_all(Tape& t, Var x);  // 1 x 1

struct GradCheckReport {
  double max_rel_error = 0.0;
  int worst_coordinate = -1;
  double ad_value = 0.0, fd_value = 0.0;
  bool passed(double tol) const { return max_rel_error < tol; }
};

// Compares reverse-mode gradients against central finite differences for a
// scalar function of one matrix input. Steps are per-coordinate
// step * (1 + |x_i|).
GradCheckReport grad_check(const std::function<Var(Tape&, Var)>& f, const Matrix& x0,
                           double step, double tol);

}  // namespace phast::ad
