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

// The numeric library is built twice: once with 32-bit reals (training and
// decoding) and once with 64-bit reals (gradient checks and exact oracles).
// Each build lives in its own inline namespace so both can be linked into a
// single binary. Translation units select a build with NT_DOUBLE_PRECISION.

#ifndef NT_DOUBLE_PRECISION
#define NT_DOUBLE_PRECISION 0
#endif

#if NT_DOUBLE_PRECISION
#define NT_ABI f64
#else
#define NT_ABI f32
#endif

namespace nt {
inline namespace NT_ABI {

#if NT_DOUBLE_PRECISION
using Real = double;
#else
using Real = float;
#endif

}  // namespace NT_ABI
}  // namespace nt
