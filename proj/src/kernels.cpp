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

#include "hardneg/kernels.hpp"

#include <algorithm>
#include <cassert>

namespace hardneg::kernels {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace serial {

void project(MatrixView w, const SparseVector& x, std::span<double> out) {
  assert(out.size() == w.cols);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const auto row = w.row(x.index[n]);
    const double v = x.value[n];
    for (std::size_t j = 0; j < w.cols; ++j) out[j] += v * row[j];
  }
}

void project_batch(MatrixView w, std::span<const SparseVector> xs, std::span<double> out) {
  assert(out.size() == xs.size() * w.cols);
  for (std::size_t i = 0; i < xs.size(); ++i) project(w, xs[i], out.subspan(i * w.cols, w.cols));
}

void dot_rows(std::span<const double> query, MatrixView docs, std::span<double> out) {
  assert(out.size() == docs.rows && query.size() == docs.cols);
  for (std::size_t i = 0; i < docs.rows; ++i) out[i] = dot(query, docs.row(i));
}

}  // namespace serial

namespace parallel {

void project_batch(MatrixView w, std::span<const SparseVector> xs, std::span<double> out) {
  assert(out.size() == xs.size() * w.cols);
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    serial::project(w, xs[u], out.subspan(u * w.cols, w.cols));
  }
}

void dot_rows(std::span<const double> query, MatrixView docs, std::span<double> out) {
  assert(out.size() == docs.rows && query.size() == docs.cols);
  const auto n = static_cast<std::ptrdiff_t>(docs.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = dot(query, docs.row(u));
  }
}

}  // namespace parallel
}  // namespace hardneg::kernels
