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

#include "georank/autodiff.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "georank/errors.h"

namespace georank::ad {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

ConstMap AsMatrix(const Tensor& t) {
  return ConstMap(t.values().data(), static_cast<Eigen::Index>(t.rows()),
                  static_cast<Eigen::Index>(t.cols()));
}
MutMap AsMatrix(Tensor& t) {
  return MutMap(t.values().data(), static_cast<Eigen::Index>(t.rows()),
                static_cast<Eigen::Index>(t.cols()));
}

[[noreturn]] void ThrowShape(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": shape mismatch " + ShapeToString(a) +
                   " vs " + ShapeToString(b));
}

void RequireSameShape(const char* op, Var a, Var b) {
  if (a.shape() != b.shape()) ThrowShape(op, a.shape(), b.shape());
}

void RequireRank2(const char* op, Var a) {
  if (a.shape().size() != 2) {
    throw ShapeError(std::string(op) + ": expected a rank-2 tensor, got " +
                     ShapeToString(a.shape()));
  }
}

Tape& TapeOf(Var a) {
  if (!a.valid()) throw ConfigError("operation on an unbound Var");
  return *a.tape();
}

Tape& TapeOf(Var a, Var b) {
  Tape& tape = TapeOf(a);
  if (b.tape() != &tape) throw ConfigError("operands live on different tapes");
  return tape;
}

// Element-wise unary op. `derivative(x, y)` returns dy/dx.
template <typename Forward, typename Derivative>
Var Unary(Var a, Forward forward, Derivative derivative) {
  Tape& tape = TapeOf(a);
  Tensor out(a.shape());
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = forward(x[i]);
  return tape.Record(
      std::move(out), {a},
      [a, derivative](const Tensor& value, const Tensor& grad, Tape& t) {
        const Tensor& x = t.Value(a);
        Tensor dx(x.shape());
        for (std::size_t i = 0; i < x.size(); ++i) {
          dx[i] = grad[i] * derivative(x[i], value[i]);
        }
        t.Accumulate(a, dx);
      });
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(NumElements(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != NumElements(shape_)) {
    throw ShapeError("Tensor: " + std::to_string(data_.size()) +
                     " values do not fill shape " + ShapeToString(shape_));
  }
}

Tensor Tensor::Identity(std::size_t n) {
  Tensor t(Shape{n, n});
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ShapeError("Tensor::item on shape " + ShapeToString(shape_));
  }
  return data_[0];
}

const Tensor& Var::value() const {
  if (!tape_) throw ConfigError("Var::value on an unbound Var");
  return tape_->Value(*this);
}

void Tape::CheckOwned(Var v) const {
  if (v.tape() != this || v.id() >= nodes_.size()) {
    throw ConfigError("Var does not belong to this tape");
  }
}

Var Tape::Leaf(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), Tensor(), requires_grad, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::Record(Tensor value, std::initializer_list<Var> inputs,
                 BackwardFn backward) {
  return Record(std::move(value), std::span<const Var>(inputs.begin(),
                                                       inputs.size()),
                std::move(backward));
}

Var Tape::Record(Tensor value, std::span<const Var> inputs,
                 BackwardFn backward) {
  bool requires_grad = false;
  for (const Var& in : inputs) {
    CheckOwned(in);
    requires_grad = requires_grad || nodes_[in.id()].requires_grad;
  }
#ifndef NDEBUG
  for (double v : value.values()) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite value produced on tape at node " +
                           std::to_string(nodes_.size()));
    }
  }
#endif
  nodes_.push_back(Node{std::move(value), Tensor(), requires_grad,
                        requires_grad ? std::move(backward) : nullptr});
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::Value(Var v) const {
  CheckOwned(v);
  return nodes_[v.id()].value;
}

bool Tape::RequiresGrad(Var v) const {
  CheckOwned(v);
  return nodes_[v.id()].requires_grad;
}

Tensor Tape::Grad(Var v) const {
  CheckOwned(v);
  const Node& node = nodes_[v.id()];
  if (node.grad.empty() && !node.value.empty()) return Tensor(node.value.shape());
  return node.grad;
}

void Tape::Accumulate(std::size_t id, const Tensor& grad) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (grad.shape() != node.value.shape()) {
    ThrowShape("Accumulate", node.value.shape(), grad.shape());
  }
  if (node.grad.empty()) {
    node.grad = grad;
    return;
  }
  for (std::size_t i = 0; i < grad.size(); ++i) node.grad[i] += grad[i];
}

void Tape::Backward(Var loss) {
  CheckOwned(loss);
  if (nodes_[loss.id()].value.size() != 1) {
    throw ShapeError("Backward: loss must be scalar, got shape " +
                     ShapeToString(nodes_[loss.id()].value.shape()));
  }
  if (backward_done_) {
    throw ConfigError("Backward: gradients already computed; call ZeroGrad()");
  }
  backward_done_ = true;
  Node& root = nodes_[loss.id()];
  if (!root.requires_grad) return;
  root.grad = Tensor(root.value.shape(), 1.0);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.backward || node.grad.empty()) continue;
    node.backward(node.value, node.grad, *this);
  }
}

void Tape::ZeroGrad() {
  for (Node& node : nodes_) node.grad = Tensor();
  backward_done_ = false;
}

// ---------------------------------------------------------------------------
// Element-wise binary ops.

Var Add(Var a, Var b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape("Add", a, b);
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  return tape.Record(std::move(out), {a, b},
                     [a, b](const Tensor&, const Tensor& g, Tape& t) {
                       t.Accumulate(a, g);
                       t.Accumulate(b, g);
                     });
}

Var Sub(Var a, Var b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape("Sub", a, b);
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  return tape.Record(std::move(out), {a, b},
                     [a, b](const Tensor&, const Tensor& g, Tape& t) {
                       t.Accumulate(a, g);
                       if (t.RequiresGrad(b)) {
                         Tensor neg = g;
                         for (double& v : neg.values()) v = -v;
                         t.Accumulate(b, neg);
                       }
                     });
}

Var Mul(Var a, Var b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape("Mul", a, b);
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return tape.Record(
      std::move(out), {a, b}, [a, b](const Tensor&, const Tensor& g, Tape& t) {
        const Tensor& x = t.Value(a);
        const Tensor& y = t.Value(b);
        if (t.RequiresGrad(a)) {
          Tensor da(g.shape());
          for (std::size_t i = 0; i < g.size(); ++i) da[i] = g[i] * y[i];
          t.Accumulate(a, da);
        }
        if (t.RequiresGrad(b)) {
          Tensor db(g.shape());
          for (std::size_t i = 0; i < g.size(); ++i) db[i] = g[i] * x[i];
          t.Accumulate(b, db);
        }
      });
}

Var Div(Var a, Var b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape("Div", a, b);
  Tensor out = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= y[i];
  return tape.Record(
      std::move(out), {a, b},
      [a, b](const Tensor& value, const Tensor& g, Tape& t) {
        const Tensor& y = t.Value(b);
        if (t.RequiresGrad(a)) {
          Tensor da(g.shape());
          for (std::size_t i = 0; i < g.size(); ++i) da[i] = g[i] / y[i];
          t.Accumulate(a, da);
        }
        if (t.RequiresGrad(b)) {
          Tensor db(g.shape());
          for (std::size_t i = 0; i < g.size(); ++i) {
            db[i] = -g[i] * value[i] / y[i];
          }
          t.Accumulate(b, db);
        }
      });
}

// ---------------------------------------------------------------------------
// Element-wise unary ops.

Var Neg(Var a) {
  return Unary(a, [](double x) { return -x; },
               [](double, double) { return -1.0; });
}

Var Scale(Var a, double factor) {
  return Unary(a, [factor](double x) { return factor * x; },
               [factor](double, double) { return factor; });
}

Var AddScalar(Var a, double offset) {
  return Unary(a, [offset](double x) { return x + offset; },
               [](double, double) { return 1.0; });
}

Var Tanh(Var a) {
  return Unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(Var a) {
  return Unary(a, StableSigmoid,
               [](double, double y) { return y * (1.0 - y); });
}

Var Relu(Var a) {
  return Unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Softplus(Var a) {
  return Unary(
      a,
      [](double x) { return std::log1p(std::exp(-std::abs(x))) +
                            std::max(x, 0.0); },
      [](double x, double) { return StableSigmoid(x); });
}

Var Exp2(Var a) {
  return Unary(a, [](double x) { return std::exp2(x); },
               [](double, double y) { return y * std::numbers::ln2; });
}

Var Log2(Var a) {
  for (double x : a.value().values()) {
    if (!(x > 0.0)) {
      throw NumericalError("Log2: non-positive input " + std::to_string(x));
    }
  }
  return Unary(a, [](double x) { return std::log2(x); },
               [](double x, double) { return 1.0 / (x * std::numbers::ln2); });
}

Var Square(Var a) {
  return Unary(a, [](double x) { return x * x; },
               [](double x, double) { return 2.0 * x; });
}

Var Abs(Var a) {
  return Unary(a, [](double x) { return std::abs(x); },
               [](double x, double) {
                 return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
               });
}

Var ClampMin(Var a, double floor) {
  return Unary(a, [floor](double x) { return x > floor ? x : floor; },
               [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

// ---------------------------------------------------------------------------
// Linear algebra.

Var MatMul(Var a, Var b) {
  Tape& tape = TapeOf(a, b);
  RequireRank2("MatMul", a);
  RequireRank2("MatMul", b);
  if (a.shape()[1] != b.shape()[0]) ThrowShape("MatMul", a.shape(), b.shape());
  Tensor out(Shape{a.shape()[0], b.shape()[1]});
  AsMatrix(out).noalias() = AsMatrix(a.value()) * AsMatrix(b.value());
  return tape.Record(
      std::move(out), {a, b}, [a, b](const Tensor&, const Tensor& g, Tape& t) {
        if (t.RequiresGrad(a)) {
          Tensor da(t.Value(a).shape());
          AsMatrix(da).noalias() =
              AsMatrix(g) * AsMatrix(t.Value(b)).transpose();
          t.Accumulate(a, da);
        }
        if (t.RequiresGrad(b)) {
          Tensor db(t.Value(b).shape());
          AsMatrix(db).noalias() =
              AsMatrix(t.Value(a)).transpose() * AsMatrix(g);
          t.Accumulate(b, db);
        }
      });
}

Var Transpose(Var a) {
  Tape& tape = TapeOf(a);
  RequireRank2("Transpose", a);
  Tensor out(Shape{a.shape()[1], a.shape()[0]});
  AsMatrix(out) = AsMatrix(a.value()).transpose();
  return tape.Record(std::move(out), {a},
                     [a](const Tensor&, const Tensor& g, Tape& t) {
                       Tensor da(t.Value(a).shape());
                       AsMatrix(da) = AsMatrix(g).transpose();
                       t.Accumulate(a, da);
                     });
}

// ---------------------------------------------------------------------------
// Reductions.

Var Sum(Var a) {
  Tape& tape = TapeOf(a);
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  return tape.Record(Tensor::Scalar(total), {a},
                     [a](const Tensor&, const Tensor& g, Tape& t) {
                       t.Accumulate(a, Tensor(t.Value(a).shape(), g[0]));
                     });
}

Var Mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw ShapeError("Mean of an empty tensor");
  return Scale(Sum(a), 1.0 / static_cast<double>(n));
}

Var SumAxis(Var a, std::size_t axis) {
  Tape& tape = TapeOf(a);
  RequireRank2("SumAxis", a);
  if (axis > 1) throw ShapeError("SumAxis: axis must be 0 or 1");
  const std::size_t rows = a.shape()[0];
  const std::size_t cols = a.shape()[1];
  Tensor out(axis == 0 ? Shape{1, cols} : Shape{rows, 1});
  const Tensor& x = a.value();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out[axis == 0 ? c : r] += x.at(r, c);
    }
  }
  return tape.Record(std::move(out), {a},
                     [a, axis](const Tensor&, const Tensor& g, Tape& t) {
                       Tensor da(t.Value(a).shape());
                       for (std::size_t r = 0; r < da.rows(); ++r) {
                         for (std::size_t c = 0; c < da.cols(); ++c) {
                           da.at(r, c) = g[axis == 0 ? c : r];
                         }
                       }
                       t.Accumulate(a, da);
                     });
}

// ---------------------------------------------------------------------------
// Structural ops.

Var Concat(std::initializer_list<Var> parts, std::size_t axis) {
  return Concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var Concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("Concat: no inputs");
  if (axis > 1) throw ShapeError("Concat: axis must be 0 or 1");
  Tape& tape = TapeOf(parts[0]);
  std::size_t total = 0;
  for (const Var& p : parts) {
    TapeOf(parts[0], p);
    RequireRank2("Concat", p);
    if (p.shape()[1 - axis] != parts[0].shape()[1 - axis]) {
      ThrowShape("Concat", parts[0].shape(), p.shape());
    }
    total += p.shape()[axis];
  }
  const std::size_t rows = axis == 0 ? total : parts[0].shape()[0];
  const std::size_t cols = axis == 1 ? total : parts[0].shape()[1];
  Tensor out(Shape{rows, cols});
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    offsets.push_back(offset);
    const Tensor& x = p.value();
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        if (axis == 0) {
          out.at(offset + r, c) = x.at(r, c);
        } else {
          out.at(r, offset + c) = x.at(r, c);
        }
      }
    }
    offset += p.shape()[axis];
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return tape.Record(
      std::move(out), inputs,
      [inputs, offsets, axis](const Tensor&, const Tensor& g, Tape& t) {
        for (std::size_t k = 0; k < inputs.size(); ++k) {
          if (!t.RequiresGrad(inputs[k])) continue;
          Tensor dp(t.Value(inputs[k]).shape());
          for (std::size_t r = 0; r < dp.rows(); ++r) {
            for (std::size_t c = 0; c < dp.cols(); ++c) {
              dp.at(r, c) = axis == 0 ? g.at(offsets[k] + r, c)
                                      : g.at(r, offsets[k] + c);
            }
          }
          t.Accumulate(inputs[k], dp);
        }
      });
}

Var Slice(Var a, std::size_t axis, std::size_t begin, std::size_t end) {
  Tape& tape = TapeOf(a);
  RequireRank2("Slice", a);
  if (axis > 1 || begin > end || end > a.shape()[axis]) {
    throw ShapeError("Slice: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") invalid on axis " +
                     std::to_string(axis) + " of " + ShapeToString(a.shape()));
  }
  const Tensor& x = a.value();
  const std::size_t rows = axis == 0 ? end - begin : x.rows();
  const std::size_t cols = axis == 1 ? end - begin : x.cols();
  Tensor out(Shape{rows, cols});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.at(r, c) = axis == 0 ? x.at(begin + r, c) : x.at(r, begin + c);
    }
  }
  return tape.Record(
      std::move(out), {a},
      [a, axis, begin](const Tensor&, const Tensor& g, Tape& t) {
        Tensor da(t.Value(a).shape());
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) {
            if (axis == 0) {
              da.at(begin + r, c) = g.at(r, c);
            } else {
              da.at(r, begin + c) = g.at(r, c);
            }
          }
        }
        t.Accumulate(a, da);
      });
}

Var Gather(Var a, std::span<const std::size_t> rows) {
  Tape& tape = TapeOf(a);
  const Shape& shape = a.shape();
  if (shape.empty() || shape.size() > 2) {
    throw ShapeError("Gather: expected rank 1 or 2, got " +
                     ShapeToString(shape));
  }
  const std::size_t width = shape.size() == 2 ? shape[1] : 1;
  for (std::size_t r : rows) {
    if (r >= shape[0]) {
      throw ShapeError("Gather: row " + std::to_string(r) +
                       " out of range for " + ShapeToString(shape));
    }
  }
  Shape out_shape = shape;
  out_shape[0] = rows.size();
  Tensor out(out_shape);
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < width; ++c) {
      out[i * width + c] = x[rows[i] * width + c];
    }
  }
  std::vector<std::size_t> index(rows.begin(), rows.end());
  return tape.Record(
      std::move(out), {a},
      [a, index, width](const Tensor&, const Tensor& g, Tape& t) {
        Tensor da(t.Value(a).shape());
        for (std::size_t i = 0; i < index.size(); ++i) {
          for (std::size_t c = 0; c < width; ++c) {
            da[index[i] * width + c] += g[i * width + c];
          }
        }
        t.Accumulate(a, da);
      });
}

Var Reshape(Var a, Shape shape) {
  Tape& tape = TapeOf(a);
  if (NumElements(shape) != a.value().size()) {
    ThrowShape("Reshape", a.shape(), shape);
  }
  Tensor out(shape, std::vector<double>(a.value().values().begin(),
                                        a.value().values().end()));
  return tape.Record(std::move(out), {a},
                     [a](const Tensor&, const Tensor& g, Tape& t) {
                       Tensor da(t.Value(a).shape(),
                                 std::vector<double>(g.values().begin(),
                                                     g.values().end()));
                       t.Accumulate(a, da);
                     });
}

Var Broadcast(Var a, Shape shape) {
  Tape& tape = TapeOf(a);
  const Shape& src = a.shape();
  if (src.size() > shape.size()) ThrowShape("Broadcast", src, shape);
  // Source strides aligned to the trailing axes of the target; broadcast
  // axes get stride 0.
  const std::size_t lead = shape.size() - src.size();
  std::vector<std::size_t> strides(shape.size(), 0);
  std::size_t stride = 1;
  for (std::size_t k = src.size(); k-- > 0;) {
    const std::size_t target = shape[lead + k];
    if (src[k] != target && src[k] != 1) ThrowShape("Broadcast", src, shape);
    strides[lead + k] = src[k] == 1 ? 0 : stride;
    stride *= src[k];
  }
  const std::size_t total = NumElements(shape);
  std::vector<std::size_t> source_index(total);
  std::vector<std::size_t> counter(shape.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t s = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) s += counter[k] * strides[k];
    source_index[i] = s;
    for (std::size_t k = shape.size(); k-- > 0;) {
      if (++counter[k] < shape[k]) break;
      counter[k] = 0;
    }
  }
  Tensor out(shape);
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < total; ++i) out[i] = x[source_index[i]];
  return tape.Record(
      std::move(out), {a},
      [a, source_index](const Tensor&, const Tensor& g, Tape& t) {
        Tensor da(t.Value(a).shape());
        for (std::size_t i = 0; i < source_index.size(); ++i) {
          da[source_index[i]] += g[i];
        }
        t.Accumulate(a, da);
      });
}

}  // namespace georank::ad
