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

#ifndef GEORANK_ADJACENCY_H_
#define GEORANK_ADJACENCY_H_

#include <cstddef>
#include <filesystem>
#include <span>

#include "georank/autodiff.h"
#include "georank/st_data.h"

namespace georank {

// Pearson correlation between the risk series of every pair of locations
// over periods [0, periods). `risk` is laid out [t][s]. Zero-variance
// locations get an all-zero row and column, including the diagonal.
ad::Tensor PearsonStatic(std::span<const double> risk, std::size_t periods,
                         std::size_t locations);
ad::Tensor PearsonStatic(const StGrid& grid, std::size_t train_end);

struct DynamicAdjacencyParams {
  ad::Var e1;    // S x d_e
  ad::Var e2;    // S x d_e
  ad::Var w1;    // d_e x d_e
  ad::Var w2;    // d_e x d_e
  ad::Var w3;    // d_t x 1
  ad::Var proj;  // d_st x d_e
  double alpha = 3.0;
};

// relu(tanh(alpha (Z1 Z2^T - Z2 Z1^T))) with
// Z_i = tanh(alpha (E_i + F_ST proj) W_i). `f_st` is S x d_st.
ad::Var DynamicAdjacency(const DynamicAdjacencyParams& params, ad::Var f_st);

// sigmoid(F_T W3) as a 1 x 1 Var; `f_t` is 1 x d_t.
ad::Var BlendWeight(ad::Var f_t, ad::Var w3);

// beta A_dyn + (1 - beta) A_static with a 1 x 1 beta.
ad::Var Blend(ad::Var a_dynamic, ad::Var a_static, ad::Var beta);
ad::Var Blend(ad::Var a_dynamic, ad::Var a_static, double beta);

// Flat "i,j,value" rows.
void WriteAdjacencyCsv(const ad::Tensor& adjacency,
                       const std::filesystem::path& path);

}  // namespace georank

#endif  // GEORANK_ADJACENCY_H_
