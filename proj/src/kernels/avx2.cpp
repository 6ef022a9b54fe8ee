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

// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma
// -ffp-contract=off; nothing in it may run before dispatch has confirmed
// CPU support.

#include "nt/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace nt::kernels {
namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d high64 = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
}

// ---------------------------------------------------------------------------
// float, 8 lanes

float dot_f32(std::size_t n, const float* a, const float* b) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  }
  float s = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemv_acc_f32(std::size_t rows, std::size_t cols, const float* a, const float* x,
                  float* y) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    const float* r0 = a + i * cols;
    const float* r1 = r0 + cols;
    const float* r2 = r1 + cols;
    const float* r3 = r2 + cols;
    __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
    __m256 s2 = _mm256_setzero_ps(), s3 = _mm256_setzero_ps();
    std::size_t j = 0;
    for (; j + 8 <= cols; j += 8) {
      const __m256 xv = _mm256_loadu_ps(x + j);
      s0 = _mm256_fmadd_ps(_mm256_loadu_ps(r0 + j), xv, s0);
      s1 = _mm256_fmadd_ps(_mm256_loadu_ps(r1 + j), xv, s1);
      s2 = _mm256_fmadd_ps(_mm256_loadu_ps(r2 + j), xv, s2);
      s3 = _mm256_fmadd_ps(_mm256_loadu_ps(r3 + j), xv, s3);
    }
    float t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
    for (; j < cols; ++j) {
      t0 += r0[j] * x[j];
      t1 += r1[j] * x[j];
      t2 += r2[j] * x[j];
      t3 += r3[j] * x[j];
    }
    y[i] += t0;
    y[i + 1] += t1;
    y[i + 2] += t2;
    y[i + 3] += t3;
  }
  for (; i < rows; ++i) y[i] += dot_f32(cols, a + i * cols, x);
}

void gemv_t_acc_f32(std::size_t rows, std::size_t cols, const float* a, const float* x,
                    float* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const float xi = x[i];
    if (xi == 0.0f) continue;
    const float* row = a + i * cols;
    const __m256 xv = _mm256_set1_ps(xi);
    std::size_t j = 0;
    for (; j + 8 <= cols; j += 8) {
      _mm256_storeu_ps(y + j,
                       _mm256_fmadd_ps(xv, _mm256_loadu_ps(row + j), _mm256_loadu_ps(y + j)));
    }
    for (; j < cols; ++j) y[j] += xi * row[j];
  }
}

void ger_acc_f32(std::size_t rows, std::size_t cols, const float* x, const float* y,
                 float* a) {
  for (std::size_t i = 0; i < rows; ++i) {
    const float xi = x[i];
    if (xi == 0.0f) continue;
    float* row = a + i * cols;
    const __m256 xv = _mm256_set1_ps(xi);
    std::size_t j = 0;
    for (; j + 8 <= cols; j += 8) {
      _mm256_storeu_ps(row + j,
                       _mm256_fmadd_ps(xv, _mm256_loadu_ps(y + j), _mm256_loadu_ps(row + j)));
    }
    for (; j < cols; ++j) row[j] += xi * y[j];
  }
}

void axpy_f32(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void momentum_update_f32(std::size_t n, float lr, float momentum, const float* g, float* v,
                         float* w) {
  const __m256 lrv = _mm256_set1_ps(lr);
  const __m256 muv = _mm256_set1_ps(momentum);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 nv = _mm256_sub_ps(_mm256_mul_ps(muv, _mm256_loadu_ps(v + i)),
                                    _mm256_mul_ps(lrv, _mm256_loadu_ps(g + i)));
    _mm256_storeu_ps(v + i, nv);
    _mm256_storeu_ps(w + i, _mm256_add_ps(_mm256_loadu_ps(w + i), nv));
  }
  for (; i < n; ++i) {
    const float mv = momentum * v[i];
    const float step = lr * g[i];
    v[i] = mv - step;
    w[i] += v[i];
  }
}

// ---------------------------------------------------------------------------
// double, 4 lanes

double dot_f64(std::size_t n, const double* a, const double* b) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemv_acc_f64(std::size_t rows, std::size_t cols, const double* a, const double* x,
                  double* y) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    const double* r0 = a + i * cols;
    const double* r1 = r0 + cols;
    const double* r2 = r1 + cols;
    const double* r3 = r2 + cols;
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const __m256d xv = _mm256_loadu_pd(x + j);
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + j), xv, s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + j), xv, s1);
      s2 = _mm256_fmadd_pd(_mm256_loadu_pd(r2 + j), xv, s2);
      s3 = _mm256_fmadd_pd(_mm256_loadu_pd(r3 + j), xv, s3);
    }
    double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
    for (; j < cols; ++j) {
      t0 += r0[j] * x[j];
      t1 += r1[j] * x[j];
      t2 += r2[j] * x[j];
      t3 += r3[j] * x[j];
    }
    y[i] += t0;
    y[i + 1] += t1;
    y[i + 2] += t2;
    y[i + 3] += t3;
  }
  for (; i < rows; ++i) y[i] += dot_f64(cols, a + i * cols, x);
}

void gemv_t_acc_f64(std::size_t rows, std::size_t cols, const double* a, const double* x,
                    double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = a + i * cols;
    const __m256d xv = _mm256_set1_pd(xi);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(y + j,
                       _mm256_fmadd_pd(xv, _mm256_loadu_pd(row + j), _mm256_loadu_pd(y + j)));
    }
    for (; j < cols; ++j) y[j] += xi * row[j];
  }
}

void ger_acc_f64(std::size_t rows, std::size_t cols, const double* x, const double* y,
                 double* a) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    double* row = a + i * cols;
    const __m256d xv = _mm256_set1_pd(xi);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(row + j,
                       _mm256_fmadd_pd(xv, _mm256_loadu_pd(y + j), _mm256_loadu_pd(row + j)));
    }
    for (; j < cols; ++j) row[j] += xi * y[j];
  }
}

void axpy_f64(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void momentum_update_f64(std::size_t n, double lr, double momentum, const double* g,
                         double* v, double* w) {
  const __m256d lrv = _mm256_set1_pd(lr);
  const __m256d muv = _mm256_set1_pd(momentum);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d nv = _mm256_sub_pd(_mm256_mul_pd(muv, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(lrv, _mm256_loadu_pd(g + i)));
    _mm256_storeu_pd(v + i, nv);
    _mm256_storeu_pd(w + i, _mm256_add_pd(_mm256_loadu_pd(w + i), nv));
  }
  for (; i < n; ++i) {
    const double mv = momentum * v[i];
    const double step = lr * g[i];
    v[i] = mv - step;
    w[i] += v[i];
  }
}

}  // namespace

const Table<float>* avx2_f32_impl() {
  static const Table<float> t{&dot_f32,  &gemv_acc_f32, &gemv_t_acc_f32,
                              &ger_acc_f32, &axpy_f32,  &momentum_update_f32};
  return &t;
}

const Table<double>* avx2_f64_impl() {
  static const Table<double> t{&dot_f64,  &gemv_acc_f64, &gemv_t_acc_f64,
                               &ger_acc_f64, &axpy_f64,  &momentum_update_f64};
  return &t;
}

}  // namespace nt::kernels

#else

namespace nt::kernels {
const Table<float>* avx2_f32_impl() { return nullptr; }
const Table<double>* avx2_f64_impl() { return nullptr; }
}  // namespace nt::kernels

#endif
