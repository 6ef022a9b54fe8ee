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

#include "nt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "nt/errors.hpp"

namespace nt {
inline namespace NT_ABI {

std::map<std::string, Tensor> finite_diff_grad(const ScalarFn& f, ParamStore& params,
                                               double epsilon) {
  NT_CHECK(epsilon > 0, "finite_diff_grad: epsilon must be positive");
  auto eval = [&]() {
    const double v = f(params);
    if (!std::isfinite(v)) throw NonFiniteError("finite_diff_grad: non-finite evaluation");
    return v;
  };
  std::map<std::string, Tensor> out;
  for (auto& [name, e] : params) {
    Tensor g(e.value.dims());
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const Real saved = e.value[i];
      e.value[i] = static_cast<Real>(saved + epsilon);
      const double up = eval();
      e.value[i] = static_cast<Real>(saved - epsilon);
      const double down = eval();
      e.value[i] = saved;
      g[i] = static_cast<Real>((up - down) / (2 * epsilon));
    }
    out.emplace(name, std::move(g));
  }
  return out;
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradReport compare_gradients(const ParamStore& params, const std::map<std::string, Tensor>& numeric,
                             double floor) {
  GradReport r;
  for (const auto& [name, e] : params) {
    const auto it = numeric.find(name);
    NT_CHECK(it != numeric.end(), "compare_gradients: no numeric gradient for " + name);
    NT_CHECK(it->second.same_shape(e.grad), "compare_gradients: shape mismatch for " + name);
    for (std::size_t i = 0; i < e.grad.size(); ++i) {
      const double err = relative_error(e.grad[i], it->second[i], floor);
      ++r.checked;
      if (err > r.max_rel_err || r.worst_param.empty()) {
        if (err >= r.max_rel_err) {
          r.max_rel_err = err;
          r.worst_param = name;
          r.worst_index = i;
          r.worst_analytic = e.grad[i];
          r.worst_numeric = it->second[i];
        }
      }
    }
  }
  return r;
}

}  // namespace NT_ABI
}  // namespace nt
