/* Copyright 2026 The Neural Transducer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "nt/kernels.hpp"

namespace nt::kernels {
namespace {

template <typename T>
T dot(std::size_t n, const T* a, const T* b) {
  T s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
void gemv_acc(std::size_t rows, std::size_t cols, const T* a, const T* x, T* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const T* row = a + i * cols;
    T s = 0;
    for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] += s;
  }
}

template <typename T>
void gemv_t_acc(std::size_t rows, std::size_t cols, const T* a, const T* x, T* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const T* row = a + i * cols;
    const T xi = x[i];
    if (xi == T(0)) continue;
    for (std::size_t j = 0; j < cols; ++j) y[j] += xi * row[j];
  }
}

template <typename T>
void ger_acc(std::size_t rows, std::size_t cols, const T* x, const T* y, T* a) {
  for (std::size_t i = 0; i < rows; ++i) {
    T* row = a + i * cols;
    const T xi = x[i];
    if (xi == T(0)) continue;
    for (std::size_t j = 0; j < cols; ++j) row[j] += xi * y[j];
  }
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void momentum_update(std::size_t n, T lr, T momentum, const T* g, T* v, T* w) {
  for (std::size_t i = 0; i < n; ++i) {
    const T mv = momentum * v[i];
    const T step = lr * g[i];
    v[i] = mv - step;
    w[i] += v[i];
  }
}

template <typename T>
Table<T> make_table() {
  return Table<T>{&dot<T>, &gemv_acc<T>, &gemv_t_acc<T>, &ger_acc<T>, &axpy<T>,
                  &momentum_update<T>};
}

}  // namespace

const Table<float>& scalar_f32() {
  static const Table<float> t = make_table<float>();
  return t;
}

const Table<double>& scalar_f64() {
  static const Table<double> t = make_table<double>();
  return t;
}

}  // namespace nt::kernels
