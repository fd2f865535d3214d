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

#include <cmath>
#include <numbers>
#include <string>

#include "georank/errors.h"
#include "georank/grad_check.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace georank::ad {
namespace {

using georank::testing::RandomTensor;

TEST(TensorTest, ShapeAndValues) {
  Tensor t(Shape{2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_EQ(t.at(1, 2), 1.5);
  EXPECT_THROW(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_EQ(Tensor::Scalar(4.0).item(), 4.0);
  EXPECT_EQ(ShapeToString(Shape{2, 3}), "[2,3]");
}

TEST(AutodiffTest, TanhAtZero) {
  Tape tape;
  const Var x = tape.Leaf(Tensor::Scalar(0.0));
  const Var y = Tanh(x);
  EXPECT_EQ(y.value().item(), 0.0);
  tape.Backward(y);
  EXPECT_DOUBLE_EQ(tape.Grad(x).item(), 1.0);
}

TEST(AutodiffTest, Exp2AtThree) {
  Tape tape;
  const Var x = tape.Leaf(Tensor::Scalar(3.0));
  const Var y = Exp2(x);
  EXPECT_DOUBLE_EQ(y.value().item(), 8.0);
  tape.Backward(y);
  EXPECT_NEAR(tape.Grad(x).item(), 8.0 * std::numbers::ln2, 1e-12);
  const auto report = GradCheck(
      [](Tape&, std::span<const Var> p) { return Exp2(p[0]); },
      {Tensor::Scalar(3.0)});
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_relative_error, 1e-8);
}

TEST(AutodiffTest, MatMulShapeMismatchNamesBothShapes) {
  Tape tape;
  const Var a = tape.Leaf(Tensor(Shape{2, 3}));
  const Var b = tape.Leaf(Tensor(Shape{4, 2}));
  try {
    MatMul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2,3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[4,2]"), std::string::npos) << msg;
  }
}

TEST(AutodiffTest, SumOfSquares) {
  Tape tape;
  const Var w = tape.Leaf(Tensor(Shape{2}, {1.0, 2.0}));
  tape.Backward(Sum(Mul(w, w)));
  const Tensor g = tape.Grad(w);
  EXPECT_EQ(g[0], 2.0);
  EXPECT_EQ(g[1], 4.0);
}

TEST(AutodiffTest, SigmoidAtZeroTimesConstant) {
  Tape tape;
  const double c = 3.0;
  const Var x = tape.Leaf(Tensor::Scalar(0.0));
  tape.Backward(Scale(Sigmoid(x), c));
  EXPECT_DOUBLE_EQ(tape.Grad(x).item(), 0.25 * c);
}

TEST(AutodiffTest, SecondBackwardWithoutResetFails) {
  Tape tape;
  const Var x = tape.Leaf(Tensor::Scalar(2.0));
  const Var y = Square(x);
  tape.Backward(y);
  EXPECT_THROW(tape.Backward(y), ConfigError);
  tape.ZeroGrad();
  tape.Backward(y);
  EXPECT_DOUBLE_EQ(tape.Grad(x).item(), 4.0);
}

TEST(AutodiffTest, NonScalarLossRejected) {
  Tape tape;
  const Var x = tape.Leaf(Tensor(Shape{2}, {1.0, 2.0}));
  EXPECT_THROW(tape.Backward(x), ShapeError);
}

TEST(AutodiffTest, Log2OfNonPositiveFails) {
  Tape tape;
  const Var x = tape.Leaf(Tensor(Shape{2}, {1.0, 0.0}));
  EXPECT_THROW(Log2(x), NumericalError);
}

TEST(AutodiffTest, KinkConventions) {
  Tape tape;
  const Var x = tape.Leaf(Tensor(Shape{3}, {0.0, 0.0, 0.0}));
  tape.Backward(Sum(Relu(x)) + Sum(Abs(x)) + Sum(ClampMin(x, 0.0)));
  const Tensor g = tape.Grad(x);
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(AutodiffTest, NoImplicitBroadcast) {
  Tape tape;
  const Var a = tape.Leaf(Tensor(Shape{2, 3}));
  const Var b = tape.Leaf(Tensor(Shape{1, 3}));
  EXPECT_THROW(Add(a, b), ShapeError);
  EXPECT_EQ(Add(a, Broadcast(b, Shape{2, 3})).shape(), (Shape{2, 3}));
}

// Every primitive against central differences at random points.
struct UnaryCase {
  const char* name;
  Var (*op)(Var);
  double lo, hi;
};

Var Exp2Op(Var x) { return Exp2(x); }
Var Log2Op(Var x) { return Log2(x); }
Var TanhOp(Var x) { return Tanh(x); }
Var SigmoidOp(Var x) { return Sigmoid(x); }
Var ReluOp(Var x) { return Relu(x); }
Var SoftplusOp(Var x) { return Softplus(x); }
Var SquareOp(Var x) { return Square(x); }
Var AbsOp(Var x) { return Abs(x); }
Var ClampOp(Var x) { return ClampMin(x, 0.1); }
Var NegOp(Var x) { return Neg(x); }
Var ScaleOp(Var x) { return Scale(x, -2.5); }
Var AddScalarOp(Var x) { return AddScalar(x, 0.7); }

TEST(AutodiffTest, UnaryPrimitivesMatchFiniteDifferences) {
  const UnaryCase cases[] = {
      {"exp2", Exp2Op, -2, 2},       {"log2", Log2Op, 0.2, 3},
      {"tanh", TanhOp, -2, 2},       {"sigmoid", SigmoidOp, -4, 4},
      {"relu", ReluOp, -1, 1},       {"softplus", SoftplusOp, -4, 4},
      {"square", SquareOp, -2, 2},   {"abs", AbsOp, -1, 1},
      {"clamp_min", ClampOp, -1, 1}, {"neg", NegOp, -1, 1},
      {"scale", ScaleOp, -1, 1},     {"add_scalar", AddScalarOp, -1, 1},
  };
  Rng rng(11);
  GradCheckOptions options;
  options.tolerance = 1e-6;
  for (const UnaryCase& c : cases) {
    std::size_t checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const Tensor x = RandomTensor(rng, Shape{10}, c.lo, c.hi);
      const auto report = GradCheck(
          [&](Tape&, std::span<const Var> p) {
            // Weighted sum so each coordinate has a distinct gradient.
            Tape& t = *p[0].tape();
            Tensor w(Shape{10});
            for (std::size_t i = 0; i < 10; ++i) w[i] = 1.0 + 0.1 * i;
            return Sum(Mul(c.op(p[0]), t.Constant(w)));
          },
          {x}, options);
      EXPECT_TRUE(report.passed) << c.name << " max rel err "
                                 << report.max_relative_error;
      checked += report.checked;
    }
    EXPECT_GE(checked, 100u) << c.name;
  }
}

TEST(AutodiffTest, BinaryAndStructuralPrimitivesMatchFiniteDifferences) {
  Rng rng(12);
  GradCheckOptions options;
  options.tolerance = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = RandomTensor(rng, Shape{3, 4});
    const Tensor b = RandomTensor(rng, Shape{3, 4}, 0.5, 2.0);
    const Tensor m = RandomTensor(rng, Shape{4, 2});
    const Tensor row = RandomTensor(rng, Shape{1, 4});
    const auto report = GradCheck(
        [](Tape&, std::span<const Var> p) {
          const Var prod = MatMul(Add(p[0], Broadcast(p[3], Shape{3, 4})),
                                  p[2]);                       // 3x2
          const Var q = Div(Sub(p[0], p[1]), p[1]);            // 3x4
          const Var cat = Concat({q, Mul(p[0], p[1])}, 0);      // 6x4
          const Var sl = Slice(cat, 1, 1, 3);                  // 6x2
          const std::size_t rows[] = {0, 2, 2, 5};
          const Var g = Gather(sl, rows);                      // 4x2
          const Var r = Reshape(g, Shape{2, 4});
          return Sum(Square(r)) + Mean(prod) + Sum(Exp2(Transpose(prod))) +
                 Sum(SumAxis(Tanh(prod), 0)) + Sum(SumAxis(q, 1));
        },
        {a, b, m, row}, options);
    EXPECT_TRUE(report.passed) << report.max_relative_error;
  }
}

TEST(AutodiffTest, ChainRuleComposition) {
  // d/dx tanh(x^2) = 2x (1 - tanh(x^2)^2)
  Tape tape;
  const double x0 = 0.7;
  const Var x = tape.Leaf(Tensor::Scalar(x0));
  tape.Backward(Tanh(Square(x)));
  const double th = std::tanh(x0 * x0);
  EXPECT_NEAR(tape.Grad(x).item(), 2 * x0 * (1 - th * th), 1e-14);
}

TEST(AutodiffTest, BackwardIsDeterministic) {
  Rng rng(5);
  const Tensor a = RandomTensor(rng, Shape{5, 5});
  auto run = [&] {
    Tape tape;
    const Var x = tape.Leaf(a);
    tape.Backward(Sum(Tanh(MatMul(x, Transpose(x)))));
    return tape.Grad(x);
  };
  EXPECT_EQ(run(), run());
}

TEST(AutodiffTest, BroadcastSumsGradient) {
  Tape tape;
  const Var x = tape.Leaf(Tensor(Shape{1, 2}, {1.0, 2.0}));
  tape.Backward(Sum(Broadcast(x, Shape{3, 2})));
  EXPECT_EQ(tape.Grad(x), Tensor(Shape{1, 2}, {3.0, 3.0}));
}

TEST(GradCheckTest, QuadraticIsAccurate) {
  Rng rng(1);
  const auto report = GradCheck(
      [](Tape&, std::span<const Var> p) { return Sum(Square(p[0])); },
      {RandomTensor(rng, Shape{6})});
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_relative_error, 1e-6);
}

TEST(GradCheckTest, ConstantFunctionHasZeroGradients) {
  const auto report = GradCheck(
      [](Tape& tape, std::span<const Var>) {
        return tape.Constant(Tensor::Scalar(3.0));
      },
      {Tensor(Shape{3}, 1.0)});
  EXPECT_TRUE(report.passed);
  for (const auto& c : report.coordinates) {
    EXPECT_EQ(c.analytic, 0.0);
    EXPECT_EQ(c.numeric, 0.0);
  }
}

TEST(GradCheckTest, ReluKinkIsFlaggedAndExcluded) {
  // relu at exactly 0: analytic 0, central difference 1/2.
  const auto report = GradCheck(
      [](Tape&, std::span<const Var> p) { return Sum(Relu(p[0])); },
      {Tensor(Shape{2}, {0.0, 1.0})});
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.excluded, 1u);
  EXPECT_TRUE(report.coordinates[0].nondifferentiable);
  EXPECT_FALSE(report.coordinates[1].nondifferentiable);
}

TEST(GradCheckTest, WrongGradientFails) {
  const auto report = GradCheck(
      [](Tape& tape, std::span<const Var> p) {
        // Forward x^2, backward claims 3x.
        const double x = p[0].value().item();
        return tape.Record(Tensor::Scalar(x * x), {p[0]},
                           [id = p[0].id(), x](const Tensor&, const Tensor& g,
                                               Tape& t) {
                             t.Accumulate(id, Tensor::Scalar(3 * x * g.item()));
                           });
      },
      {Tensor::Scalar(1.3)});
  EXPECT_FALSE(report.passed);
}

TEST(GradCheckTest, RejectsBadArguments) {
  GradCheckOptions bad;
  bad.eps = 0.0;
  EXPECT_THROW(GradCheck([](Tape&, std::span<const Var> p) { return Sum(p[0]); },
                         {Tensor(Shape{1})}, bad),
               ConfigError);
  EXPECT_THROW(GradCheck([](Tape&, std::span<const Var> p) { return p[0]; },
                         {Tensor(Shape{2})}),
               ShapeError);
}

}  // namespace
}  // namespace georank::ad
