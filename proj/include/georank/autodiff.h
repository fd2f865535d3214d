/*
 * Copyright 2026 The georank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GEORANK_AUTODIFF_H_
#define GEORANK_AUTODIFF_H_

// Minimal reverse-mode automatic differentiation over dense double tensors.
//
// A Tape records every primitive applied to its Vars in creation order, which
// is already a topological order. Tape::Backward walks the records in reverse
// and visits each node once. There is no implicit broadcasting: shapes of
// element-wise operands must match exactly, and Broadcast() is the only way to
// expand a tensor.

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace georank::ad {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense row-major tensor with value semantics. A rank-0 tensor (shape {})
// holds a single scalar.
class Tensor {
 public:
  Tensor() : shape_{0} {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Scalar(double value) { return Tensor(Shape{}, {value}); }
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values) {
    return Tensor(Shape{rows, cols}, std::move(values));
  }
  static Tensor Identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  // Matrix helpers; only meaningful for rank-2 tensors.
  std::size_t rows() const { return shape_.at(0); }
  std::size_t cols() const { return shape_.at(1); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }
  // The single value of a one-element tensor.
  double item() const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives the node's forward value and the gradient flowing into it, and
  // must Accumulate() the gradient of each input.
  using BackwardFn = std::function<void(const Tensor& value,
                                        const Tensor& grad, Tape& tape)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Leaf(Tensor value, bool requires_grad = true);
  Var Constant(Tensor value) { return Leaf(std::move(value), false); }

  // Appends an operation result. The backward closure is dropped when none of
  // the inputs requires a gradient.
  Var Record(Tensor value, std::initializer_list<Var> inputs,
             BackwardFn backward);
  Var Record(Tensor value, std::span<const Var> inputs, BackwardFn backward);

  const Tensor& Value(Var v) const;
  bool RequiresGrad(Var v) const;
  // Gradient accumulated by Backward; zeros when nothing reached the node.
  Tensor Grad(Var v) const;

  // Seeds d(loss)/d(loss) = 1 and propagates. The loss must hold exactly one
  // element. A second call requires ZeroGrad() first.
  void Backward(Var loss);
  void ZeroGrad();

  void Accumulate(std::size_t id, const Tensor& grad);
  void Accumulate(Var v, const Tensor& grad) { Accumulate(v.id(), grad); }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  void CheckOwned(Var v) const;

  std::deque<Node> nodes_;
  bool backward_done_ = false;
};

// Element-wise operations on equally shaped operands.
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Div(Var a, Var b);

Var Neg(Var a);
Var Scale(Var a, double factor);
Var AddScalar(Var a, double offset);
Var Tanh(Var a);
Var Sigmoid(Var a);
Var Relu(Var a);  // derivative at 0 is 0
Var Softplus(Var a);
Var Exp2(Var a);
Var Log2(Var a);  // NumericalError on non-positive input
Var Square(Var a);
Var Abs(Var a);   // derivative at 0 is 0
Var ClampMin(Var a, double floor);

// Rank-2 linear algebra.
Var MatMul(Var a, Var b);
Var Transpose(Var a);

// Reductions. Sum and Mean return rank-0 tensors; SumAxis keeps the reduced
// axis with size 1.
Var Sum(Var a);
Var Mean(Var a);
Var SumAxis(Var a, std::size_t axis);

// Structural operations on rank-2 tensors (Gather also accepts rank 1).
Var Concat(std::span<const Var> parts, std::size_t axis);
Var Concat(std::initializer_list<Var> parts, std::size_t axis);
Var Slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);
Var Gather(Var a, std::span<const std::size_t> rows);
Var Reshape(Var a, Shape shape);
// Expands size-1 (or missing leading) axes to `shape`; backward sums them.
Var Broadcast(Var a, Shape shape);

inline Var operator+(Var a, Var b) { return Add(a, b); }
inline Var operator-(Var a, Var b) { return Sub(a, b); }
inline Var operator-(Var a) { return Neg(a); }

}  // namespace georank::ad

#endif  // GEORANK_AUTODIFF_H_
