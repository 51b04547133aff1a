// Copyright 2026 The mpcnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpcnet/autodiff.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

namespace mpcnet::ad {
namespace {

std::size_t Product(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void RequireFinite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string("numeric overflow: non-finite value in ") +
                         what);
    }
  }
}

[[noreturn]] void ShapeFail(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " +
                   ShapeToString(a) + " and " + ShapeToString(b));
}

// Finds the tape shared by the recorded inputs, if any.
Tape* CommonTape(std::initializer_list<const Tensor*> inputs,
                 const char* op) {
  Tape* tape = nullptr;
  for (const Tensor* t : inputs) {
    if (!t->recorded()) continue;
    if (tape != nullptr && tape != t->tape()) {
      throw Error(std::string(op) + ": inputs recorded on different tapes");
    }
    tape = t->tape();
  }
  return tape;
}

Tensor Emit(OpKind kind, std::vector<Tensor> inputs, Shape shape,
            std::vector<double> out, double scalar = 0.0,
            std::size_t begin = 0, std::size_t count = 0,
            bool squeeze = false) {
  RequireFinite(out, OpName(kind));
  Tensor value(std::move(shape), std::move(out));
  Tape* tape = nullptr;
  for (const Tensor& in : inputs) {
    if (in.recorded()) tape = in.tape();
  }
  if (tape == nullptr) return value;
  Node node;
  node.kind = kind;
  node.inputs = std::move(inputs);
  node.value = std::move(value);
  node.attr_scalar = scalar;
  node.attr_begin = begin;
  node.attr_count = count;
  node.attr_squeeze = squeeze;
  return tape->Record(std::move(node));
}

std::vector<double> Map(const Tensor& x, double (*fn)(double)) {
  std::vector<double> out(x.size());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(in[i]);
  return out;
}

}  // namespace

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor() : data_(std::make_shared<const std::vector<double>>(1, 0.0)) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)) {
  if (Product(shape_) != data.size()) {
    throw ShapeError("tensor: shape " + ShapeToString(shape_) + " holds " +
                     std::to_string(Product(shape_)) + " values, got " +
                     std::to_string(data.size()));
  }
  RequireFinite(data, "tensor data");
  data_ = std::make_shared<const std::vector<double>>(std::move(data));
}

Tensor Tensor::Scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::Vector(std::vector<double> v) {
  Shape s{v.size()};
  return Tensor(std::move(s), std::move(v));
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> data) {
  return Tensor({rows, cols}, std::move(data));
}

Tensor Tensor::Zeros(Shape shape) { return Filled(std::move(shape), 0.0); }

Tensor Tensor::Filled(Shape shape, double v) {
  std::size_t n = Product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, v));
}

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeError("item: tensor of shape " + ShapeToString(shape_) +
                     " is not a single value");
  }
  return (*data_)[0];
}

Tensor Tensor::Detached() const {
  Tensor t = *this;
  t.node_ = kNoNode;
  t.tape_ = nullptr;
  return t;
}

const char* OpName(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kAffine: return "affine";
    case OpKind::kTanh: return "tanh";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "elementwise-mul";
    case OpKind::kExp: return "exp";
    case OpKind::kNegate: return "negate";
    case OpKind::kScale: return "scale";
    case OpKind::kReduceSum: return "reduce-sum";
    case OpKind::kReduceSumLast: return "reduce-sum-last";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kDivide: return "divide";
    case OpKind::kReshape: return "reshape";
  }
  return "?";
}

const Tensor& GradMap::at(NodeId id) const {
  auto it = grads_.find(id);
  if (it == grads_.end()) {
    throw Error("gradient requested for node " + std::to_string(id) +
                " which is not a leaf of the differentiated tape");
  }
  return it->second;
}

Tensor Tape::Leaf(const Tensor& value) {
  Node node;
  node.kind = OpKind::kLeaf;
  node.value = value.Detached();
  Tensor t = Record(std::move(node));
  leaves_.push_back(t.node());
  return t;
}

Tensor Tape::Record(Node node) {
  const NodeId id = static_cast<NodeId>(nodes_.size());
  for (const Tensor& in : node.inputs) {
    if (in.recorded() && in.node() >= id) {
      throw Error("tape: input node does not precede its consumer");
    }
  }
  Tensor out = node.value;
  out.node_ = id;
  out.tape_ = this;
  nodes_.push_back(std::move(node));
  return out;
}

bool Tape::is_leaf(NodeId id) const {
  return id >= 0 && id < static_cast<NodeId>(nodes_.size()) &&
         nodes_[id].kind == OpKind::kLeaf;
}

std::size_t Tape::stored_values() const {
  std::size_t n = 0;
  for (const Node& node : nodes_) n += node.value.size();
  return n;
}

// ---- forward ops ----

Tensor Affine(const Tensor& w, const Tensor& x, const Tensor& b) {
  CommonTape({&w, &x, &b}, "affine");
  if (w.rank() != 2 || b.rank() != 1 || b.dim(0) != w.dim(0) ||
      (x.rank() != 1 && x.rank() != 2) ||
      x.shape().back() != w.dim(1)) {
    throw ShapeError("affine: W " + ShapeToString(w.shape()) + ", x " +
                     ShapeToString(x.shape()) + ", b " +
                     ShapeToString(b.shape()) +
                     " do not satisfy W[p x q], x[q] or [B x q], b[p]");
  }
  const std::size_t p = w.dim(0), q = w.dim(1);
  const std::size_t rows = x.rank() == 1 ? 1 : x.dim(0);
  std::vector<double> out(rows * p);
  const double* wd = w.data().data();
  const double* xd = x.data().data();
  const double* bd = b.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = xd + r * q;
    double* yr = out.data() + r * p;
    for (std::size_t i = 0; i < p; ++i) {
      const double* wi = wd + i * q;
      double acc = 0.0;
      for (std::size_t j = 0; j < q; ++j) acc += wi[j] * xr[j];
      yr[i] = acc + bd[i];
    }
  }
  Shape shape = x.rank() == 1 ? Shape{p} : Shape{rows, p};
  return Emit(OpKind::kAffine, {w, x, b}, std::move(shape), std::move(out));
}

Tensor Tanh(const Tensor& x) {
  return Emit(OpKind::kTanh, {x}, x.shape(),
              Map(x, [](double v) { return std::tanh(v); }));
}

Tensor Add(const Tensor& a, const Tensor& b) {
  CommonTape({&a, &b}, "add");
  if (a.shape() != b.shape()) ShapeFail("add", a.shape(), b.shape());
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return Emit(OpKind::kAdd, {a, b}, a.shape(), std::move(out));
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  CommonTape({&a, &b}, "elementwise-mul");
  if (a.shape() != b.shape()) ShapeFail("elementwise-mul", a.shape(), b.shape());
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return Emit(OpKind::kMul, {a, b}, a.shape(), std::move(out));
}

Tensor Exp(const Tensor& x) {
  return Emit(OpKind::kExp, {x}, x.shape(),
              Map(x, [](double v) { return std::exp(v); }));
}

Tensor Negate(const Tensor& x) {
  return Emit(OpKind::kNegate, {x}, x.shape(),
              Map(x, [](double v) { return -v; }));
}

Tensor Scale(const Tensor& x, double c) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i];
  return Emit(OpKind::kScale, {x}, x.shape(), std::move(out), c);
}

Tensor ReduceSum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return Emit(OpKind::kReduceSum, {x}, {}, {s});
}

Tensor ReduceSumLast(const Tensor& x) {
  if (x.rank() == 0) throw ShapeError("reduce-sum-last: scalar input");
  const std::size_t n = x.shape().back();
  Shape shape(x.shape().begin(), x.shape().end() - 1);
  const std::size_t rows = x.size() / std::max<std::size_t>(n, 1);
  std::vector<double> out(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += x[r * n + j];
    out[r] = s;
  }
  return Emit(OpKind::kReduceSumLast, {x}, std::move(shape), std::move(out));
}

Tensor Concat(const Tensor& a, const Tensor& b) {
  CommonTape({&a, &b}, "concat");
  if (a.rank() == 0 || a.rank() != b.rank() ||
      !std::equal(a.shape().begin(), a.shape().end() - 1, b.shape().begin())) {
    ShapeFail("concat", a.shape(), b.shape());
  }
  const std::size_t na = a.shape().back(), nb = b.shape().back();
  const std::size_t rows = a.size() / std::max<std::size_t>(na, 1);
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  for (std::size_t r = 0; r < rows; ++r) {
    auto ar = a.data().subspan(r * na, na);
    auto br = b.data().subspan(r * nb, nb);
    out.insert(out.end(), ar.begin(), ar.end());
    out.insert(out.end(), br.begin(), br.end());
  }
  Shape shape = a.shape();
  shape.back() = na + nb;
  return Emit(OpKind::kConcat, {a, b}, std::move(shape), std::move(out));
}

Tensor Slice(const Tensor& x, std::size_t begin, std::size_t count,
             bool squeeze) {
  if (x.rank() == 0 || begin + count > x.dim(0) || (squeeze && count != 1)) {
    throw ShapeError("slice: rows [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") of " +
                     ShapeToString(x.shape()));
  }
  const std::size_t stride = x.size() / x.dim(0);
  auto span = x.data().subspan(begin * stride, count * stride);
  Shape shape;
  if (!squeeze) shape.push_back(count);
  shape.insert(shape.end(), x.shape().begin() + 1, x.shape().end());
  return Emit(OpKind::kSlice, {x}, std::move(shape),
              std::vector<double>(span.begin(), span.end()), 0.0, begin, count,
              squeeze);
}

Tensor Divide(const Tensor& a, const Tensor& b) {
  CommonTape({&a, &b}, "divide");
  const bool scalar = b.size() == 1;
  if (!scalar && a.shape() != b.shape()) ShapeFail("divide", a.shape(), b.shape());
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a[i] / (scalar ? b[0] : b[i]);
  }
  return Emit(OpKind::kDivide, {a, b}, a.shape(), std::move(out));
}

Tensor Reshape(const Tensor& x, Shape shape) {
  if (Product(shape) != x.size()) ShapeFail("reshape", x.shape(), shape);
  return Emit(OpKind::kReshape, {x}, std::move(shape), x.ToVector());
}

// ---- reverse sweep ----

GradMap Backward(const Tape& tape, const Tensor& output) {
  if (!output.recorded() || output.tape() != &tape) {
    throw Error("backward: output is not recorded on this tape");
  }
  if (output.size() != 1) {
    throw ShapeError("backward: output must be a scalar, got shape " +
                     ShapeToString(output.shape()));
  }
  const NodeId root = output.node();
  std::vector<std::vector<double>> grads(root + 1);
  grads[root].assign(1, 1.0);

  auto accumulate = [&](const Tensor& in) -> double* {
    if (!in.recorded()) return nullptr;
    auto& g = grads[in.node()];
    if (g.empty()) g.assign(in.size(), 0.0);
    return g.data();
  };

  for (NodeId id = root; id >= 0; --id) {
    if (grads[id].empty()) continue;
    const Node& node = tape.node(id);
    const std::vector<double>& gy = grads[id];
    switch (node.kind) {
      case OpKind::kLeaf:
        break;
      case OpKind::kAffine: {
        const Tensor& w = node.inputs[0];
        const Tensor& x = node.inputs[1];
        const Tensor& b = node.inputs[2];
        const std::size_t p = w.dim(0), q = w.dim(1);
        const std::size_t rows = x.rank() == 1 ? 1 : x.dim(0);
        double* gw = accumulate(w);
        double* gx = accumulate(x);
        double* gb = accumulate(b);
        const double* wd = w.data().data();
        const double* xd = x.data().data();
        for (std::size_t r = 0; r < rows; ++r) {
          const double* gyr = gy.data() + r * p;
          const double* xr = xd + r * q;
          for (std::size_t i = 0; i < p; ++i) {
            const double g = gyr[i];
            if (gb) gb[i] += g;
            if (g == 0.0) continue;
            if (gw) {
              double* gwi = gw + i * q;
              for (std::size_t j = 0; j < q; ++j) gwi[j] += g * xr[j];
            }
            if (gx) {
              double* gxr = gx + r * q;
              const double* wi = wd + i * q;
              for (std::size_t j = 0; j < q; ++j) gxr[j] += g * wi[j];
            }
          }
        }
        break;
      }
      case OpKind::kTanh: {
        double* gx = accumulate(node.inputs[0]);
        if (!gx) break;
        for (std::size_t i = 0; i < gy.size(); ++i) {
          const double y = node.value[i];
          gx[i] += gy[i] * (1.0 - y * y);
        }
        break;
      }
      case OpKind::kAdd: {
        for (const Tensor& in : node.inputs) {
          double* g = accumulate(in);
          if (!g) continue;
          for (std::size_t i = 0; i < gy.size(); ++i) g[i] += gy[i];
        }
        break;
      }
      case OpKind::kMul: {
        const Tensor& a = node.inputs[0];
        const Tensor& b = node.inputs[1];
        if (double* ga = accumulate(a)) {
          for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i] * b[i];
        }
        if (double* gb = accumulate(b)) {
          for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i] * a[i];
        }
        break;
      }
      case OpKind::kExp: {
        double* gx = accumulate(node.inputs[0]);
        if (!gx) break;
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * node.value[i];
        break;
      }
      case OpKind::kNegate: {
        double* gx = accumulate(node.inputs[0]);
        if (!gx) break;
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] -= gy[i];
        break;
      }
      case OpKind::kScale: {
        double* gx = accumulate(node.inputs[0]);
        if (!gx) break;
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += node.attr_scalar * gy[i];
        break;
      }
      case OpKind::kReduceSum: {
        const Tensor& x = node.inputs[0];
        double* gx = accumulate(x);
        if (!gx) break;
        for (std::size_t i = 0; i < x.size(); ++i) gx[i] += gy[0];
        break;
      }
      case OpKind::kReduceSumLast: {
        const Tensor& x = node.inputs[0];
        double* gx = accumulate(x);
        if (!gx) break;
        const std::size_t n = x.shape().back();
        for (std::size_t i = 0; i < x.size(); ++i) gx[i] += gy[i / n];
        break;
      }
      case OpKind::kConcat: {
        const Tensor& a = node.inputs[0];
        const Tensor& b = node.inputs[1];
        const std::size_t na = a.shape().back(), nb = b.shape().back();
        const std::size_t rows = a.size() / std::max<std::size_t>(na, 1);
        double* ga = accumulate(a);
        double* gb = accumulate(b);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* src = gy.data() + r * (na + nb);
          if (ga) for (std::size_t j = 0; j < na; ++j) ga[r * na + j] += src[j];
          if (gb) for (std::size_t j = 0; j < nb; ++j) gb[r * nb + j] += src[na + j];
        }
        break;
      }
      case OpKind::kSlice: {
        const Tensor& x = node.inputs[0];
        double* gx = accumulate(x);
        if (!gx) break;
        const std::size_t stride = x.size() / x.dim(0);
        double* dst = gx + node.attr_begin * stride;
        for (std::size_t i = 0; i < gy.size(); ++i) dst[i] += gy[i];
        break;
      }
      case OpKind::kDivide: {
        const Tensor& a = node.inputs[0];
        const Tensor& b = node.inputs[1];
        const bool scalar = b.size() == 1;
        if (double* ga = accumulate(a)) {
          for (std::size_t i = 0; i < gy.size(); ++i) {
            ga[i] += gy[i] / (scalar ? b[0] : b[i]);
          }
        }
        if (double* gb = accumulate(b)) {
          for (std::size_t i = 0; i < gy.size(); ++i) {
            const double bi = scalar ? b[0] : b[i];
            gb[scalar ? 0 : i] -= gy[i] * node.value[i] / bi;
          }
        }
        break;
      }
      case OpKind::kReshape: {
        double* gx = accumulate(node.inputs[0]);
        if (!gx) break;
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
        break;
      }
    }
  }

  GradMap out;
  for (NodeId leaf : tape.leaves()) {
    if (leaf > root) continue;
    const Tensor& v = tape.node(leaf).value;
    std::vector<double> g = grads[leaf].empty()
                                ? std::vector<double>(v.size(), 0.0)
                                : std::move(grads[leaf]);
    RequireFinite(g, "gradient");
    out.grads_.emplace(leaf, Tensor(v.shape(), std::move(g)));
  }
  return out;
}

double GradCheck(const TapeFunction& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw Error("grad_check: step size must be positive");
  Tape tape;
  Tensor leaf = tape.Leaf(x);
  Tensor y = f(tape, leaf);
  if (!y.recorded()) {
    // Output does not depend on anything recorded: the gradient is zero.
    y = Add(y, Scale(ReduceSum(leaf), 0.0));
  }
  GradMap grads = Backward(tape, y);
  const Tensor& analytic = grads.at(leaf);

  std::vector<double> base = x.ToVector();
  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    auto eval = [&](double delta) {
      std::vector<double> v = base;
      v[i] += delta;
      Tape t;
      return f(t, t.Leaf(Tensor(x.shape(), std::move(v)))).item();
    };
    const double fd = (eval(h) - eval(-h)) / (2.0 * h);
    if (!std::isfinite(fd)) throw NumericError("grad_check: non-finite difference");
    worst = std::max(worst, std::abs(analytic[i] - fd) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

}  // namespace mpcnet::ad
