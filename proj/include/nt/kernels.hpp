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

#pragma once

// Dense inner loops used by the tape. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant. The variant is picked
// once at startup from CPUID; NT_KERNELS=scalar|avx2 in the environment (or
// kernels::select) overrides the choice.
//
// Matrices are row-major, `rows` x `cols`.

#include <cstddef>
#include <string_view>

namespace nt::kernels {

enum class Isa { kScalar, kAvx2 };

template <typename T>
struct Table {
  // sum_i a[i] * b[i]
  T (*dot)(std::size_t n, const T* a, const T* b);
  // y += A x
  void (*gemv_acc)(std::size_t rows, std::size_t cols, const T* a, const T* x, T* y);
  // y += A^T x
  void (*gemv_t_acc)(std::size_t rows, std::size_t cols, const T* a, const T* x, T* y);
  // A += x y^T
  void (*ger_acc)(std::size_t rows, std::size_t cols, const T* x, const T* y, T* a);
  // y += alpha * x
  void (*axpy)(std::size_t n, T alpha, const T* x, T* y);
  // v = momentum * v - lr * g; w += v. No fused multiply-add, so the result
  // is bit-identical across variants.
  void (*momentum_update)(std::size_t n, T lr, T momentum, const T* g, T* v, T* w);
};

const Table<float>& table_f32();
const Table<double>& table_f64();

template <typename T>
const Table<T>& table();
template <>
inline const Table<float>& table<float>() { return table_f32(); }
template <>
inline const Table<double>& table<double>() { return table_f64(); }

/// Reference implementations, always available.
const Table<float>& scalar_f32();
const Table<double>& scalar_f64();

/// AVX2 implementations; nullptr when not compiled in or not supported by
/// the running CPU.
const Table<float>* avx2_f32();
const Table<double>* avx2_f64();

bool cpu_has_avx2();

/// Forces a variant. Returns false (and leaves the selection unchanged) if
/// the requested variant is unavailable.
bool select(Isa isa);
Isa active();
std::string_view name(Isa isa);

}  // namespace nt::kernels
