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

// Self-checks on randomly generated tiny models, always run in double
// precision regardless of the caller's build.

#include <cstdint>
#include <string>
#include <vector>

namespace nt::verify {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::vector<Check> checks;

  bool ok() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return !checks.empty();
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

struct GradcheckOptions {
  std::size_t instances_per_kind = 20;
  std::uint64_t seed = 1;
  double epsilon = 1e-4;
  double tolerance = 1e-4;
};

/// Analytic vs central-difference gradients of the full sequence loss, for
/// every attention kind. One check per kind: gradcheck_{none,dot,mlp,lstm}.
SuiteResult run_gradcheck_suite(const GradcheckOptions& opt = {});

struct OracleOptions {
  std::size_t models = 50;
  std::size_t streaming_inputs = 100;
  std::uint64_t seed = 7;
};

/// Brute-force equivalences on tiny models. Checks: marginal_mass,
/// zero_weight_closed_form, dp_vs_exact, beam_vs_exhaustive, beam_monotone,
/// online_offline, prefix_stability.
SuiteResult run_oracle_suite(const OracleOptions& opt = {});

}  // namespace nt::verify
