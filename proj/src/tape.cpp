#include "phast/tape.hpp"

#include <stdexcept>

#include "phast/kernels.hpp"

namespace phast::ad {

namespace k = kernels;

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check(Var v) const {
  if (!v.valid() || v.id >= static_cast<int>(nodes_.size()))
    throw std::logic_error("tape: invalid var handle");
}

Var Tape::constant(Matrix value) { return leaf(std::move(value), false); }

Var Tape::leaf(Matrix value, bool requires_grad) {
  Node n;
  n.op = Op::Leaf;
  n.requires_grad = requires_grad;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::binary(Op op, Var a, Var b) {
  check(a);
  check(b);
  Node n;
  n.op = op;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  const Matrix& va = nodes_[a.id].value;
  const Matrix& vb = nodes_[b.id].value;
  switch (op) {
    case Op::Add: n.value = k::add(va, vb); break;
    case Op::Sub: n.value = k::sub(va, vb); break;
    case Op::Mul: n.value = k::mul(va, vb); break;
    case Op::Div: n.value = k::div(va, vb); break;
    case Op::MatMul: n.value = k::matmul(va, vb); break;
    case Op::ConcatCols: n.value = k::concat_cols(va, vb); break;
    default: throw std::logic_error("tape: not a binary op");
  }
  return push(std::move(n));
}

Var Tape::unary(Op op, Var a, double scalar) {
  check(a);
  Node n;
  n.op = op;
  n.a = a.id;
  n.scalar = scalar;
  n.requires_grad = nodes_[a.id].requires_grad;
  const Matrix& va = nodes_[a.id].value;
  switch (op) {
    case Op::Scale: n.value = k::scale(va, scalar); break;
    case Op::AddScalar: n.value = k::add_scalar(va, scalar); break;
    case Op::Transpose: n.value = k::transpose(va); break;
    case Op::SumRows: n.value = k::sum_rows(va); break;
    case Op::SumCols: n.value = k::sum_cols(va); break;
    case Op::Ssp: n.value = k::shifted_softplus(va); break;
    case Op::Sigmoid: n.value = k::sigmoid(va); break;
    case Op::Sqrt: n.value = k::sqrt(va); break;
    case Op::ClampMin: n.value = k::clamp_min(va, scalar); break;
    default: throw std::logic_error("tape: not a unary op");
  }
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) { return binary(Op::Add, a, b); }
Var Tape::sub(Var a, Var b) { return binary(Op::Sub, a, b); }
Var Tape::mul(Var a, Var b) { return binary(Op::Mul, a, b); }
Var Tape::div(Var a, Var b) { return binary(Op::Div, a, b); }
Var Tape::matmul(Var a, Var b) { return binary(Op::MatMul, a, b); }
Var Tape::concat_cols(Var a, Var b) { return binary(Op::ConcatCols, a, b); }
Var Tape::scale(Var a, double c) { return unary(Op::Scale, a, c); }
Var Tape::add_scalar(Var a, double c) { return unary(Op::AddScalar, a, c); }
Var Tape::transpose(Var a) { return unary(Op::Transpose, a); }
Var Tape::sum_rows(Var a) { return unary(Op::SumRows, a); }
Var Tape::sum_cols(Var a) { return unary(Op::SumCols, a); }
Var Tape::shifted_softplus(Var a) { return unary(Op::Ssp, a); }
Var Tape::sigmoid(Var a) { return unary(Op::Sigmoid, a); }
Var Tape::sqrt(Var a) { return unary(Op::Sqrt, a); }
Var Tape::clamp_min(Var a, double lo) { return unary(Op::ClampMin, a, lo); }

Var Tape::broadcast_rows(Var a, int n) {
  check(a);
  Node node;
  node.op = Op::BroadcastRows;
  node.a = a.id;
  node.i0 = n;
  node.requires_grad = nodes_[a.id].requires_grad;
  node.value = k::broadcast_rows(nodes_[a.id].value, n);
  return push(std::move(node));
}

Var Tape::broadcast_cols(Var a, int n) {
  check(a);
  Node node;
  node.op = Op::BroadcastCols;
  node.a = a.id;
  node.i0 = n;
  node.requires_grad = nodes_[a.id].requires_grad;
  node.value = k::broadcast_cols(nodes_[a.id].value, n);
  return push(std::move(node));
}

Var Tape::gather_rows(Var a, std::shared_ptr<const std::vector<int>> idx) {
  check(a);
  Node node;
  node.op = Op::GatherRows;
  node.a = a.id;
  node.i0 = static_cast<int>(nodes_[a.id].value.rows());  // rows of the source
  node.idx = std::move(idx);
  node.requires_grad = nodes_[a.id].requires_grad;
  node.value = k::gather_rows(nodes_[a.id].value, *node.idx);
  return push(std::move(node));
}

Var Tape::segment_sum(Var a, std::shared_ptr<const std::vector<int>> ids, int num_segments) {
  check(a);
  Node node;
  node.op = Op::SegmentSum;
  node.a = a.id;
  node.i0 = num_segments;
  node.idx = std::move(ids);
  node.requires_grad = nodes_[a.id].requires_grad;
  node.value = k::segment_sum(nodes_[a.id].value, *node.idx, num_segments);
  return push(std::move(node));
}

Var Tape::slice_cols(Var a, int start, int len) {
  check(a);
  Node node;
  node.op = Op::SliceCols;
  node.a = a.id;
  node.i0 = start;
  node.i1 = len;
  node.requires_grad = nodes_[a.id].requires_grad;
  node.value = k::slice_cols(nodes_[a.id].value, start, len);
  return push(std::move(node));
}

Var Tape::gaussian_rbf(Var d, Eigen::VectorXd centers, double width) {
  check(d);
  Node node;
  node.op = Op::Rbf;
  node.a = d.id;
  node.scalar = width;
  node.centers = std::make_shared<const Eigen::VectorXd>(std::move(centers));
  node.requires_grad = nodes_[d.id].requires_grad;
  node.value = k::gaussian_rbf(nodes_[d.id].value, *node.centers, width);
  return push(std::move(node));
}

const Matrix& Tape::value(Var v) const {
  check(v);
  return nodes_[v.id].value;
}

bool Tape::requires_grad(Var v) const {
  check(v);
  return nodes_[v.id].requires_grad;
}

void Tape::accumulate(std::vector<int>& adj, int node, Var contribution) {
  if (adj[node] < 0)
    adj[node] = contribution.id;
  else
    adj[node] = add(Var{adj[node]}, contribution).id;
}

std::vector<int> Tape::build_adjoints(Var output, const std::vector<char>& targets) {
  check(output);
  if (nodes_[output.id].value.size() != 1)
    throw std::invalid_argument("backward: output must be a scalar (1x1)");

  const int limit = output.id;  // nodes appended during the sweep need no visit
  // useful[i]: node i depends on at least one target, so its adjoint matters.
  std::vector<char> useful(limit + 1, 0);
  for (int i = 0; i <= limit; ++i) {
    const Node& n = nodes_[i];
    char u = (i < static_cast<int>(targets.size())) ? targets[i] : 0;
    if (!u && n.a >= 0) u = useful[n.a];
    if (!u && n.b >= 0) u |= useful[n.b];
    useful[i] = u;
  }

  std::vector<int> adj(limit + 1, -1);
  if (!useful[limit]) return adj;
  adj[limit] = constant(Matrix::Ones(1, 1)).id;

  for (int id = limit; id >= 0; --id) {
    if (adj[id] < 0) continue;
    const Node n = nodes_[id];  // copy: nodes_ may reallocate while we append
    const Var g{adj[id]};
    auto want = [&](int input) { return input >= 0 && useful[input]; };
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Add:
        if (want(n.a)) accumulate(adj, n.a, g);
        if (want(n.b)) accumulate(adj, n.b, g);
        break;
      case Op::Sub:
        if (want(n.a)) accumulate(adj, n.a, g);
        if (want(n.b)) accumulate(adj, n.b, scale(g, -1.0));
        break;
      case Op::Mul:
        if (want(n.a)) accumulate(adj, n.a, mul(g, Var{n.b}));
        if (want(n.b)) accumulate(adj, n.b, mul(g, Var{n.a}));
        break;
      case Op::Div:
        // y = a / b: da = g / b, db = -g * y / b
        if (want(n.a)) accumulate(adj, n.a, div(g, Var{n.b}));
        if (want(n.b)) accumulate(adj, n.b, scale(mul(g, div(Var{id}, Var{n.b})), -1.0));
        break;
      case Op::Scale:
        if (want(n.a)) accumulate(adj, n.a, scale(g, n.scalar));
        break;
      case Op::AddScalar:
        if (want(n.a)) accumulate(adj, n.a, g);
        break;
      case Op::MatMul:
        if (want(n.a)) accumulate(adj, n.a, matmul(g, transpose(Var{n.b})));
        if (want(n.b)) accumulate(adj, n.b, matmul(transpose(Var{n.a}), g));
        break;
      case Op::Transpose:
        if (want(n.a)) accumulate(adj, n.a, transpose(g));
        break;
      case Op::SumRows:
        if (want(n.a)) accumulate(adj, n.a, broadcast_rows(g, static_cast<int>(nodes_[n.a].value.rows())));
        break;
      case Op::SumCols:
        if (want(n.a)) accumulate(adj, n.a, broadcast_cols(g, static_cast<int>(nodes_[n.a].value.cols())));
        break;
      case Op::BroadcastRows:
        if (want(n.a)) accumulate(adj, n.a, sum_rows(g));
        break;
      case Op::BroadcastCols:
        if (want(n.a)) accumulate(adj, n.a, sum_cols(g));
        break;
      case Op::GatherRows:
        if (want(n.a)) accumulate(adj, n.a, segment_sum(g, n.idx, n.i0));
        break;
      case Op::SegmentSum:
        if (want(n.a)) accumulate(adj, n.a, gather_rows(g, n.idx));
        break;
      case Op::ConcatCols:
        if (want(n.a)) accumulate(adj, n.a, slice_cols(g, 0, static_cast<int>(nodes_[n.a].value.cols())));
        if (want(n.b))
          accumulate(adj, n.b,
                     slice_cols(g, static_cast<int>(nodes_[n.a].value.cols()),
                                static_cast<int>(nodes_[n.b].value.cols())));
        break;
      case Op::SliceCols: {
        if (!want(n.a)) break;
        const int total = static_cast<int>(nodes_[n.a].value.cols());
        const long rows = nodes_[n.a].value.rows();
        Var padded = g;
        if (n.i0 > 0) padded = concat_cols(constant(Matrix::Zero(rows, n.i0)), padded);
        const int right = total - n.i0 - n.i1;
        if (right > 0) padded = concat_cols(padded, constant(Matrix::Zero(rows, right)));
        accumulate(adj, n.a, padded);
        break;
      }
      case Op::Ssp:
        if (want(n.a)) accumulate(adj, n.a, mul(g, sigmoid(Var{n.a})));
        break;
      case Op::Sigmoid: {
        // y (1 - y)
        if (!want(n.a)) break;
        const Var y{id};
        accumulate(adj, n.a, mul(g, mul(y, add_scalar(scale(y, -1.0), 1.0))));
        break;
      }
      case Op::Sqrt:
        // d sqrt(x) = g / (2 y)
        if (want(n.a)) accumulate(adj, n.a, div(scale(g, 0.5), Var{id}));
        break;
      case Op::ClampMin: {
        // Pass-through where the input is above the floor. The mask is a
        // constant; the derivative of clamp is piecewise constant anyway.
        if (!want(n.a)) break;
        Matrix mask = (nodes_[n.a].value.array() > n.scalar).cast<double>();
        accumulate(adj, n.a, mul(g, constant(std::move(mask))));
        break;
      }
      case Op::Rbf: {
        // d_i adjoint: -(1/w^2) sum_k g_ik y_ik (d_i - c_k)
        if (!want(n.a)) break;
        const long rows = nodes_[n.a].value.rows();
        const int kcount = static_cast<int>(n.centers->size());
        Var dmat = broadcast_cols(Var{n.a}, kcount);
        Matrix centers_rows = n.centers->transpose().replicate(rows, 1);
        Var diff = sub(dmat, constant(std::move(centers_rows)));
        Var contrib = sum_cols(mul(g, mul(Var{id}, diff)));
        accumulate(adj, n.a, scale(contrib, -1.0 / (n.scalar * n.scalar)));
        break;
      }
    }
  }
  return adj;
}

Var Tape::grad_of(Var output, Var wrt, bool detach) {
  check(wrt);
  std::vector<char> targets(nodes_.size(), 0);
  targets[wrt.id] = 1;
  auto adj = build_adjoints(output, targets);
  Var g = (wrt.id < static_cast<int>(adj.size()) && adj[wrt.id] >= 0)
              ? Var{adj[wrt.id]}
              : constant(Matrix::Zero(nodes_[wrt.id].value.rows(), nodes_[wrt.id].value.cols()));
  if (detach) return constant(nodes_[g.id].value);
  return g;
}

void Tape::backward(Var output) {
  if (backward_done_)
    throw std::logic_error("backward: tape already consumed; record a fresh forward pass");
  std::vector<char> targets(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    targets[i] = (nodes_[i].op == Op::Leaf && nodes_[i].requires_grad) ? 1 : 0;
  last_adjoints_ = build_adjoints(output, targets);
  backward_done_ = true;
}

Matrix Tape::grad(Var leaf) const {
  check(leaf);
  if (!backward_done_) throw std::logic_error("grad: backward has not run");
  if (leaf.id < static_cast<int>(last_adjoints_.size()) && last_adjoints_[leaf.id] >= 0)
    return nodes_[last_adjoints_[leaf.id]].value;
  return Matrix::Zero(nodes_[leaf.id].value.rows(), nodes_[leaf.id].value.cols());
}

Var vector_norm_rows(Tape& t, Var x, double eps) {
  Var ss = t.sum_cols(t.mul(x, x));
  if (eps > 0.0) {
    Var r = t.sqrt(t.add_scalar(ss, eps * eps));
    return t.add_scalar(r, -eps);
  }
  return t.sqrt(ss);
}

Var cosine_rows(Tape& t, Var a, Var b, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("cosine_rows: eps must be positive");
  Var dots = t.sum_cols(t.mul(a, b));
  Var na = t.sqrt(t.sum_cols(t.mul(a, a)));
  Var nb = t.sqrt(t.sum_cols(t.mul(b, b)));
  Var denom = t.clamp_min(t.mul(na, nb), eps);
  return t.div(dots, denom);
}

Var linear(Tape& t, Var x, Var w, Var bias) {
  Var y = t.matmul(x, w);
  const long rows = t.value(y).rows();
  return t.add(y, t.broadcast_rows(bias, static_cast<int>(rows)));
}

Var sum_all(Tape& t, Var x) { return t.sum_cols(t.sum_rows(x)); }

Var mean_all(Tape& t, Var x) {
  const auto& v = t.value(x);
  const double n = static_cast<double>(v.rows() * v.cols());
  return t.scale(sum_all(t, x), 1.0 / n);
}

GradCheckReport grad_check(const std::function<Var(Tape&, Var)>& f, const Matrix& x0,
                           double step, double tol) {
  Matrix analytic;
  {
    Tape t;
    Var x = t.leaf(x0, true);
    Var y = f(t, x);
    t.backward(y);
    analytic = t.grad(x);
  }
  auto eval = [&](const Matrix& x) {
    Tape t;
    Var xv = t.leaf(x, false);
    return t.value(f(t, xv))(0, 0);
  };
  GradCheckReport report;
  for (Eigen::Index i = 0; i < x0.rows(); ++i) {
    for (Eigen::Index j = 0; j < x0.cols(); ++j) {
      const double h = step * (1.0 + std::abs(x0(i, j)));
      Matrix xp = x0, xm = x0;
      xp(i, j) += h;
      xm(i, j) -= h;
      const double fd = (eval(xp) - eval(xm)) / (2.0 * h);
      const double ad = analytic(i, j);
      const double denom = std::max({std::abs(ad), std::abs(fd), 1e-6});
      const double rel = std::abs(ad - fd) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_coordinate = static_cast<int>(i * x0.cols() + j);
        report.ad_value = ad;
        report.fd_value = fd;
      }
    }
  }
  (void)tol;
  return report;
}

}  // namespace phast::ad
