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

#include <functional>
#include <map>
#include <string>

#include "nt/param_store.hpp"

namespace nt {
inline namespace NT_ABI {

using ScalarFn = std::function<double(ParamStore&)>;

/// Central differences (f(p + eps) - f(p - eps)) / (2 eps), one scalar
/// parameter at a time. Parameters are restored exactly afterwards.
/// Throws NonFiniteError if any evaluation is not finite.
std::map<std::string, Tensor> finite_diff_grad(const ScalarFn& f, ParamStore& params,
                                               double epsilon = 1e-4);

/// |a - n| / max(|a|, |n|, floor). The floor keeps entries whose true
/// gradient is ~0 from being judged on round-off alone.
double relative_error(double analytic, double numeric, double floor = 1e-3);

struct GradReport {
  double max_rel_err = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0;
  double worst_numeric = 0;
  std::size_t checked = 0;
};

/// Compares the grad slots of `params` against `numeric`.
GradReport compare_gradients(const ParamStore& params, const std::map<std::string, Tensor>& numeric,
                             double floor = 1e-3);

}  // namespace NT_ABI
}  // namespace nt
