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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "nt/kernels.hpp"

namespace nt::kernels {

const Table<float>* avx2_f32_impl();
const Table<double>* avx2_f64_impl();

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool has = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return has;
#else
  return false;
#endif
}

const Table<float>* avx2_f32() { return cpu_has_avx2() ? avx2_f32_impl() : nullptr; }
const Table<double>* avx2_f64() { return cpu_has_avx2() ? avx2_f64_impl() : nullptr; }

namespace {

struct Selection {
  std::atomic<const Table<float>*> f32;
  std::atomic<const Table<double>*> f64;
  std::atomic<Isa> isa;

  Selection() {
    Isa want = avx2_f32() != nullptr ? Isa::kAvx2 : Isa::kScalar;
    if (const char* env = std::getenv("NT_KERNELS")) {
      const std::string_view v(env);
      if (v == "scalar") want = Isa::kScalar;
    }
    store(want);
  }

  bool store(Isa want) {
    if (want == Isa::kAvx2) {
      const Table<float>* a32 = avx2_f32();
      const Table<double>* a64 = avx2_f64();
      if (a32 == nullptr || a64 == nullptr) return false;
      f32.store(a32);
      f64.store(a64);
    } else {
      f32.store(&scalar_f32());
      f64.store(&scalar_f64());
    }
    isa.store(want);
    return true;
  }
};

Selection& selection() {
  static Selection s;
  return s;
}

}  // namespace

const Table<float>& table_f32() { return *selection().f32.load(std::memory_order_relaxed); }
const Table<double>& table_f64() { return *selection().f64.load(std::memory_order_relaxed); }

bool select(Isa isa) { return selection().store(isa); }
Isa active() { return selection().isa.load(); }

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

}  // namespace nt::kernels
