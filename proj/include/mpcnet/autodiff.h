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

#ifndef MPCNET_AUTODIFF_H_
#define MPCNET_AUTODIFF_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpcnet/errors.h"

// Dense fp64 tensors with a define-by-run reverse-mode tape.
//
// Tensors are immutable values. A tensor produced by an op whose inputs are
// all unrecorded (constants) is itself a constant; as soon as one input lives
// on a tape the result is appended to that tape. Shapes never broadcast,
// except that the bias of `affine` is added to every row of a batched input
// and `divide` accepts a scalar denominator.
namespace mpcnet::ad {

using Shape = std::vector<std::size_t>;
using NodeId = std::int64_t;
inline constexpr NodeId kNoNode = -1;

class Tape;

std::string ShapeToString(const Shape& shape);

class Tensor {
 public:
  // Scalar zero.
  Tensor();
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double v);
  static Tensor Vector(std::vector<double> v);
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> data);
  static Tensor Zeros(Shape shape);
  static Tensor Filled(Shape shape, double v);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_->size(); }
  std::span<const double> data() const { return *data_; }
  double operator[](std::size_t i) const { return (*data_)[i]; }
  // Value of a single-element tensor.
  double item() const;
  std::vector<double> ToVector() const { return *data_; }

  bool recorded() const { return node_ != kNoNode; }
  NodeId node() const { return node_; }
  Tape* tape() const { return tape_; }

  // Same values, detached from any tape.
  Tensor Detached() const;

 private:
  friend class Tape;
  Shape shape_;
  std::shared_ptr<const std::vector<double>> data_;
  NodeId node_ = kNoNode;
  Tape* tape_ = nullptr;
};

enum class OpKind {
  kLeaf,
  kAffine,
  kTanh,
  kAdd,
  kMul,
  kExp,
  kNegate,
  kScale,
  kReduceSum,
  kReduceSumLast,
  kConcat,
  kSlice,
  kDivide,
  kReshape,
};

const char* OpName(OpKind kind);

struct Node {
  OpKind kind = OpKind::kLeaf;
  // Input values with their tape handles (kNoNode for constants).
  std::vector<Tensor> inputs;
  Tensor value;
  double attr_scalar = 0.0;
  std::size_t attr_begin = 0;
  std::size_t attr_count = 0;
  bool attr_squeeze = false;
};

// Gradients of a scalar output with respect to the leaves of a tape.
class GradMap {
 public:
  bool contains(NodeId id) const { return grads_.count(id) != 0; }
  bool contains(const Tensor& leaf) const { return contains(leaf.node()); }
  const Tensor& at(NodeId id) const;
  const Tensor& at(const Tensor& leaf) const { return at(leaf.node()); }
  std::size_t size() const { return grads_.size(); }
  const std::unordered_map<NodeId, Tensor>& entries() const { return grads_; }

 private:
  friend GradMap Backward(const Tape& tape, const Tensor& output);
  std::unordered_map<NodeId, Tensor> grads_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers `value` as a differentiable leaf (parameter or input).
  Tensor Leaf(const Tensor& value);

  std::size_t num_nodes() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeId>& leaves() const { return leaves_; }
  bool is_leaf(NodeId id) const;
  // Number of doubles held as forward values across all nodes.
  std::size_t stored_values() const;

  // Appends a node; internal use by the op functions.
  Tensor Record(Node node);

 private:
  std::vector<Node> nodes_;
  std::vector<NodeId> leaves_;
};

// ---- ops ----
// W is [p x q]; x is [q] or [B x q]; b is [p]. Output [p] or [B x p].
Tensor Affine(const Tensor& w, const Tensor& x, const Tensor& b);
Tensor Tanh(const Tensor& x);
Tensor Add(const Tensor& a, const Tensor& b);
// Elementwise product.
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Exp(const Tensor& x);
Tensor Negate(const Tensor& x);
Tensor Scale(const Tensor& x, double c);
// Sum of every element; returns a scalar.
Tensor ReduceSum(const Tensor& x);
// Sum over the last axis; [.. x n] -> [..].
Tensor ReduceSumLast(const Tensor& x);
// Concatenation along the last axis; leading dimensions must agree.
Tensor Concat(const Tensor& a, const Tensor& b);
// Rows [begin, begin + count) along axis 0. With squeeze (count must be 1)
// the leading axis is dropped.
Tensor Slice(const Tensor& x, std::size_t begin, std::size_t count,
             bool squeeze = false);
inline Tensor Row(const Tensor& x, std::size_t i) {
  return Slice(x, i, 1, true);
}
// Elementwise a / b; b has a's shape or is a single element.
Tensor Divide(const Tensor& a, const Tensor& b);
Tensor Reshape(const Tensor& x, Shape shape);

// Convenience: a - b.
inline Tensor Sub(const Tensor& a, const Tensor& b) {
  return Add(a, Negate(b));
}

// Reverse sweep from a scalar recorded output.
GradMap Backward(const Tape& tape, const Tensor& output);

using TapeFunction = std::function<Tensor(Tape&, const Tensor&)>;

// Max over coordinates of |analytic - central difference| / max(1, |fd|).
double GradCheck(const TapeFunction& f, const Tensor& x, double h);

}  // namespace mpcnet::ad

#endif  // MPCNET_AUTODIFF_H_
