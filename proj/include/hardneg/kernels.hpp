// Copyright 2026 The hardneg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hardneg::kernels {

/// Sparse vector with strictly increasing indices.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  bool operator==(const SparseVector&) const = default;
};

/// Read-only row-major matrix.
struct MatrixView {
  std::span<const double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t r) const { return data.subspan(r * cols, cols); }
};

// Every kernel has a serial reference and an OpenMP version. The parallel
// versions split work only across independent outputs, so their results are
// bitwise identical to the serial ones.

namespace serial {

/// out = W^T x, out has W.cols entries.
void project(MatrixView w, const SparseVector& x, std::span<double> out);

/// Row i of out (n x W.cols) = W^T xs[i].
void project_batch(MatrixView w, std::span<const SparseVector> xs, std::span<double> out);

/// out[i] = <query, docs row i>.
void dot_rows(std::span<const double> query, MatrixView docs, std::span<double> out);

}  // namespace serial

namespace parallel {

void project_batch(MatrixView w, std::span<const SparseVector> xs, std::span<double> out);
void dot_rows(std::span<const double> query, MatrixView docs, std::span<double> out);

}  // namespace parallel

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace hardneg::kernels
