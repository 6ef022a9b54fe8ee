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

#include "nt/param_store.hpp"

#include <cmath>

#include "nt/errors.hpp"
#include "nt/kernels.hpp"
#include "nt/rng.hpp"

namespace nt {
inline namespace NT_ABI {

ParamEntry& ParamStore::add(const std::string& name, std::vector<std::size_t> dims,
                            bool is_bias) {
  NT_CHECK(!contains(name), "duplicate parameter '" + name + "'");
  ParamEntry e;
  e.value = Tensor(dims);
  e.grad = Tensor(dims);
  e.velocity = Tensor(std::move(dims));
  e.is_bias = is_bias;
  return entries_.emplace(name, std::move(e)).first->second;
}

ParamEntry& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  NT_CHECK(it != entries_.end(), "unknown parameter '" + name + "'");
  return it->second;
}

const ParamEntry& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  NT_CHECK(it != entries_.end(), "unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, e] : entries_) n += e.value.size();
  return n;
}

void ParamStore::init_uniform(Real range) {
  Rng rng(seed_);
  for (auto& [name, e] : entries_) {
    if (e.is_bias) {
      e.value.fill(0);
    } else {
      for (Real& v : e.value.span()) v = static_cast<Real>(rng.uniform(-range, range));
    }
    e.velocity.fill(0);
    e.grad.fill(0);
  }
}

void ParamStore::zero_grads() {
  for (auto& [name, e] : entries_) e.grad.fill(0);
}

void ParamStore::zero_velocity() {
  for (auto& [name, e] : entries_) e.velocity.fill(0);
}

void ParamStore::copy_values_from(const ParamStore& other) {
  NT_CHECK(other.size() == size(), "copy_values_from: stores differ");
  for (auto& [name, e] : entries_) {
    const ParamEntry& src = other.at(name);
    NT_CHECK(src.value.same_shape(e.value), "copy_values_from: shape mismatch for " + name);
    e.value = src.value;
    e.velocity = src.velocity;
  }
}

void sgd_momentum_step(ParamStore& params, Real lr, Real momentum) {
  NT_CHECK(lr > 0, "sgd_momentum_step: lr must be positive");
  NT_CHECK(momentum >= 0 && momentum < 1, "sgd_momentum_step: momentum must be in [0, 1)");
  for (const auto& [name, e] : params) {
    if (!e.grad.all_finite()) throw NonFiniteError("non-finite gradient in '" + name + "'");
  }
  const auto& k = kernels::table<Real>();
  for (auto& [name, e] : params) {
    k.momentum_update(e.value.size(), lr, momentum, e.grad.data(), e.velocity.data(),
                      e.value.data());
    e.grad.fill(0);
  }
}

double global_grad_norm(const ParamStore& params) {
  double s = 0;
  for (const auto& [name, e] : params) {
    for (Real g : e.grad.span()) s += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(s);
}

double clip_grad_norm(ParamStore& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (std::isfinite(norm) && norm > max_norm && norm > 0) {
    const Real factor = static_cast<Real>(max_norm / norm);
    for (auto& [name, e] : params) {
      for (Real& g : e.grad.span()) g *= factor;
    }
  }
  return norm;
}

}  // namespace NT_ABI
}  // namespace nt
