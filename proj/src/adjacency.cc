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

#include "georank/adjacency.h"

#include <cmath>
#include <string>

#include "georank/errors.h"
#include "georank/io_util.h"

namespace georank {

using ad::Tensor;
using ad::Var;

Tensor PearsonStatic(std::span<const double> risk, std::size_t periods,
                     std::size_t locations) {
  if (periods < 2) {
    throw DataError("Pearson adjacency needs at least 2 training periods");
  }
  if (risk.size() < periods * locations) {
    throw ShapeError("Pearson adjacency: risk series too short");
  }
  const std::size_t S = locations;
  std::vector<double> centered(periods * S);
  std::vector<double> norm(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    double mean = 0.0;
    for (std::size_t t = 0; t < periods; ++t) mean += risk[t * S + s];
    mean /= static_cast<double>(periods);
    for (std::size_t t = 0; t < periods; ++t) {
      const double d = risk[t * S + s] - mean;
      centered[s * periods + t] = d;
      norm[s] += d * d;
    }
    norm[s] = std::sqrt(norm[s]);
  }
  Tensor out(ad::Shape{S, S}, 0.0);
  for (std::size_t i = 0; i < S; ++i) {
    if (norm[i] == 0.0) continue;
    out[i * S + i] = 1.0;
    for (std::size_t j = i + 1; j < S; ++j) {
      if (norm[j] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t t = 0; t < periods; ++t) {
        dot += centered[i * periods + t] * centered[j * periods + t];
      }
      const double a = dot / (norm[i] * norm[j]);
      out[i * S + j] = a;
      out[j * S + i] = a;
    }
  }
  return out;
}

Tensor PearsonStatic(const StGrid& grid, std::size_t train_end) {
  if (train_end > grid.periods()) {
    throw ConfigError("train_end exceeds the number of periods");
  }
  return PearsonStatic(grid.risk_data(), train_end, grid.locations());
}

Var DynamicAdjacency(const DynamicAdjacencyParams& params, Var f_st) {
  if (!(params.alpha > 0.0)) throw ConfigError("alpha must be > 0");
  const Var shift = ad::MatMul(f_st, params.proj);
  const Var z1 = ad::Tanh(
      ad::Scale(ad::MatMul(params.e1 + shift, params.w1), params.alpha));
  const Var z2 = ad::Tanh(
      ad::Scale(ad::MatMul(params.e2 + shift, params.w2), params.alpha));
  const Var m = ad::MatMul(z1, ad::Transpose(z2));
  return ad::Relu(ad::Tanh(ad::Scale(m - ad::Transpose(m), params.alpha)));
}

Var BlendWeight(Var f_t, Var w3) { return ad::Sigmoid(ad::MatMul(f_t, w3)); }

Var Blend(Var a_dynamic, Var a_static, Var beta) {
  if (beta.shape() != ad::Shape{1, 1}) {
    throw ShapeError("Blend: beta must be 1 x 1, got " +
                     ad::ShapeToString(beta.shape()));
  }
  const Var b = ad::Broadcast(beta, a_static.shape());
  return a_static + ad::Mul(b, a_dynamic - a_static);
}

Var Blend(Var a_dynamic, Var a_static, double beta) {
  return ad::Scale(a_dynamic, beta) + ad::Scale(a_static, 1.0 - beta);
}

void WriteAdjacencyCsv(const Tensor& adjacency,
                       const std::filesystem::path& path) {
  if (adjacency.rank() != 2 || adjacency.rows() != adjacency.cols()) {
    throw ShapeError("adjacency must be square, got " +
                     ad::ShapeToString(adjacency.shape()));
  }
  std::string out = "i,j,value\n";
  const std::size_t S = adjacency.rows();
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t j = 0; j < S; ++j) {
      out += std::to_string(i) + ',' + std::to_string(j) + ',' +
             FormatDouble(adjacency.at(i, j)) + '\n';
    }
  }
  WriteTextFile(path, out);
}

}  // namespace georank
