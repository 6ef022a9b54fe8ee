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

#include "nt/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nt/errors.hpp"
#include "nt/kernels.hpp"

namespace nt {
inline namespace NT_ABI {
namespace {

const kernels::Table<Real>& K() { return kernels::table<Real>(); }

std::string shape_str(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

}  // namespace

const Tape::Node& Tape::node(Var v) const {
  NT_CHECK(v.id >= 0 && static_cast<std::size_t>(v.id) < nodes_.size(), "invalid tape variable");
  return nodes_[v.id];
}

std::size_t Tape::allocate(std::size_t n) {
  const std::size_t off = values_.size();
  values_.resize(off + n);
  return off;
}

Var Tape::push(Node n) {
  nodes_.push_back(n);
  return Var{static_cast<int>(nodes_.size() - 1)};
}

bool Tape::any_needs(std::initializer_list<int> ids) const {
  for (int id : ids) {
    if (id >= 0 && nodes_[id].needs_grad) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Leaves

Var Tape::input(std::span<const Real> values) {
  return input_matrix(values, values.size(), 1);
}

Var Tape::input_matrix(std::span<const Real> values, std::size_t rows, std::size_t cols) {
  NT_CHECK(rows * cols == values.size() && rows > 0 && cols > 0, "input shape mismatch");
  Node n{Op::kInput};
  n.rows = rows;
  n.cols = cols;
  n.offset = allocate(values.size());
  std::copy(values.begin(), values.end(), values_.begin() + n.offset);
  return push(n);
}

Var Tape::zeros(std::size_t len) {
  NT_CHECK(len > 0, "zeros: empty vector");
  Node n{Op::kInput};
  n.rows = len;
  n.cols = 1;
  n.offset = allocate(len);
  return push(n);
}

Var Tape::parameter(const Tensor& value, Tensor* grad) {
  NT_CHECK(grad == nullptr || grad->same_shape(value), "parameter grad shape mismatch");
  Node n{Op::kParam};
  n.rows = value.rows();
  n.cols = value.cols();
  n.ext_value = value.data();
  n.ext_grad = grad ? grad->data() : nullptr;
  n.needs_grad = grad != nullptr;
  return push(n);
}

// ---------------------------------------------------------------------------
// Primitives

Var Tape::affine(Var a, Var x, Var bias) {
  const Node& na = node(a);
  const Node& nx = node(x);
  if (nx.cols != 1 || nx.rows != na.cols) {
    throw InvariantError("affine: weight " + shape_str(na.rows, na.cols) + " vs input " +
                         shape_str(nx.rows, nx.cols));
  }
  if (bias.valid()) {
    const Node& nb = node(bias);
    if (nb.rows * nb.cols != na.rows) {
      throw InvariantError("affine: bias length " + std::to_string(nb.rows * nb.cols) +
                           " vs output " + std::to_string(na.rows));
    }
  }
  Node n{Op::kAffine};
  n.a = a.id;
  n.b = x.id;
  n.c = bias.id;
  n.rows = na.rows;
  n.cols = 1;
  n.needs_grad = any_needs({a.id, x.id, bias.id});
  const std::size_t m = na.rows, k = na.cols;
  n.offset = allocate(m);
  Real* y = out(n);
  if (bias.valid()) {
    const Real* b = val(nodes_[bias.id]);
    std::copy(b, b + m, y);
  }
  K().gemv_acc(m, k, val(nodes_[a.id]), val(nodes_[x.id]), y);
  return push(n);
}

Var Tape::matvec_t(Var a, Var x) {
  const Node& na = node(a);
  const Node& nx = node(x);
  if (nx.cols != 1 || nx.rows != na.rows) {
    throw InvariantError("matvec_t: matrix " + shape_str(na.rows, na.cols) + " vs vector " +
                         shape_str(nx.rows, nx.cols));
  }
  Node n{Op::kMatVecT};
  n.a = a.id;
  n.b = x.id;
  n.rows = na.cols;
  n.cols = 1;
  n.needs_grad = any_needs({a.id, x.id});
  n.offset = allocate(n.rows);
  K().gemv_t_acc(na.rows, na.cols, val(nodes_[a.id]), val(nodes_[x.id]), out(n));
  return push(n);
}

Var Tape::add(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  NT_CHECK(na.rows == nb.rows && na.cols == nb.cols, "add: shape mismatch");
  Node n{Op::kAdd};
  n.a = a.id;
  n.b = b.id;
  n.rows = na.rows;
  n.cols = na.cols;
  n.needs_grad = any_needs({a.id, b.id});
  n.offset = allocate(count(n));
  const Real* pa = val(nodes_[a.id]);
  const Real* pb = val(nodes_[b.id]);
  Real* y = out(n);
  for (std::size_t i = 0; i < count(n); ++i) y[i] = pa[i] + pb[i];
  return push(n);
}

Var Tape::mul(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  NT_CHECK(na.rows == nb.rows && na.cols == nb.cols, "mul: shape mismatch");
  Node n{Op::kMul};
  n.a = a.id;
  n.b = b.id;
  n.rows = na.rows;
  n.cols = na.cols;
  n.needs_grad = any_needs({a.id, b.id});
  n.offset = allocate(count(n));
  const Real* pa = val(nodes_[a.id]);
  const Real* pb = val(nodes_[b.id]);
  Real* y = out(n);
  for (std::size_t i = 0; i < count(n); ++i) y[i] = pa[i] * pb[i];
  return push(n);
}

Var Tape::add_rows(Var m, Var v) {
  const Node& nm = node(m);
  const Node& nv = node(v);
  NT_CHECK(nv.rows * nv.cols == nm.cols, "add_rows: vector length must equal matrix cols");
  Node n{Op::kAddRows};
  n.a = m.id;
  n.b = v.id;
  n.rows = nm.rows;
  n.cols = nm.cols;
  n.needs_grad = any_needs({m.id, v.id});
  n.offset = allocate(count(n));
  const Real* pm = val(nodes_[m.id]);
  const Real* pv = val(nodes_[v.id]);
  Real* y = out(n);
  for (std::size_t r = 0; r < n.rows; ++r) {
    for (std::size_t c = 0; c < n.cols; ++c) y[r * n.cols + c] = pm[r * n.cols + c] + pv[c];
  }
  return push(n);
}

Var Tape::sigmoid(Var a) {
  const Node& na = node(a);
  Node n{Op::kSigmoid};
  n.a = a.id;
  n.rows = na.rows;
  n.cols = na.cols;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(count(n));
  const Real* pa = val(nodes_[a.id]);
  Real* y = out(n);
  for (std::size_t i = 0; i < count(n); ++i) y[i] = Real(1) / (Real(1) + std::exp(-pa[i]));
  return push(n);
}

Var Tape::tanh(Var a) {
  const Node& na = node(a);
  Node n{Op::kTanh};
  n.a = a.id;
  n.rows = na.rows;
  n.cols = na.cols;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(count(n));
  const Real* pa = val(nodes_[a.id]);
  Real* y = out(n);
  for (std::size_t i = 0; i < count(n); ++i) y[i] = std::tanh(pa[i]);
  return push(n);
}

Var Tape::concat(std::span<const Var> parts) {
  NT_CHECK(!parts.empty(), "concat: no parts");
  Node n{Op::kConcat};
  std::size_t total = 0;
  n.args_offset = args_.size();
  n.args_count = parts.size();
  for (Var p : parts) {
    const Node& np = node(p);
    NT_CHECK(np.cols == 1, "concat: parts must be vectors");
    total += np.rows;
    n.needs_grad = n.needs_grad || np.needs_grad;
    args_.push_back(p.id);
  }
  n.rows = total;
  n.cols = 1;
  n.offset = allocate(total);
  Real* y = out(n);
  for (Var p : parts) {
    const Node& np = nodes_[p.id];
    const Real* src = val(np);
    y = std::copy(src, src + np.rows, y);
  }
  return push(n);
}

Var Tape::slice(Var a, std::size_t offset, std::size_t len) {
  const Node& na = node(a);
  NT_CHECK(len > 0 && offset + len <= count(na), "slice: out of range");
  Node n{Op::kSlice};
  n.a = a.id;
  n.aux = offset;
  n.rows = len;
  n.cols = 1;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(len);
  const Real* src = val(nodes_[a.id]) + offset;
  std::copy(src, src + len, out(n));
  return push(n);
}

Var Tape::stack(std::span<const Var> rows) {
  NT_CHECK(!rows.empty(), "stack: no rows");
  Node n{Op::kStack};
  const std::size_t width = node(rows[0]).rows * node(rows[0]).cols;
  n.args_offset = args_.size();
  n.args_count = rows.size();
  for (Var r : rows) {
    const Node& nr = node(r);
    NT_CHECK(nr.rows * nr.cols == width, "stack: rows differ in length");
    n.needs_grad = n.needs_grad || nr.needs_grad;
    args_.push_back(r.id);
  }
  n.rows = rows.size();
  n.cols = width;
  n.offset = allocate(count(n));
  Real* y = out(n);
  for (Var r : rows) {
    const Real* src = val(nodes_[r.id]);
    y = std::copy(src, src + width, y);
  }
  return push(n);
}

Var Tape::pad(Var a, std::size_t len) {
  const Node& na = node(a);
  NT_CHECK(na.cols == 1 && len >= na.rows, "pad: target shorter than input");
  Node n{Op::kPad};
  n.a = a.id;
  n.rows = len;
  n.cols = 1;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(len);
  const Real* src = val(nodes_[a.id]);
  std::copy(src, src + nodes_[a.id].rows, out(n));
  return push(n);
}

Var Tape::softmax(Var a) {
  const Node& na = node(a);
  NT_CHECK(count(na) > 0, "softmax: empty input");
  Node n{Op::kSoftmax};
  n.a = a.id;
  n.rows = count(na);
  n.cols = 1;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(n.rows);
  const Real* x = val(nodes_[a.id]);
  Real* y = out(n);
  const Real mx = *std::max_element(x, x + n.rows);
  Real z = 0;
  for (std::size_t i = 0; i < n.rows; ++i) {
    y[i] = std::exp(x[i] - mx);
    z += y[i];
  }
  for (std::size_t i = 0; i < n.rows; ++i) y[i] /= z;
  return push(n);
}

Var Tape::log_softmax(Var a) {
  const Node& na = node(a);
  NT_CHECK(count(na) > 0, "log_softmax: empty input");
  Node n{Op::kLogSoftmax};
  n.a = a.id;
  n.rows = count(na);
  n.cols = 1;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(n.rows);
  const Real* x = val(nodes_[a.id]);
  Real* y = out(n);
  const Real mx = *std::max_element(x, x + n.rows);
  Real z = 0;
  for (std::size_t i = 0; i < n.rows; ++i) z += std::exp(x[i] - mx);
  const Real lse = mx + std::log(z);
  for (std::size_t i = 0; i < n.rows; ++i) y[i] = x[i] - lse;
  return push(n);
}

Var Tape::pick(Var a, std::size_t index) {
  const Node& na = node(a);
  NT_CHECK(index < count(na), "pick: index out of range");
  Node n{Op::kPick};
  n.a = a.id;
  n.aux = index;
  n.rows = 1;
  n.cols = 1;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(1);
  *out(n) = val(nodes_[a.id])[index];
  return push(n);
}

Var Tape::row(Var m, std::size_t index) {
  const Node& nm = node(m);
  NT_CHECK(index < nm.rows, "row: index out of range");
  Node n{Op::kRow};
  n.a = m.id;
  n.aux = index;
  n.rows = nm.cols;
  n.cols = 1;
  n.needs_grad = nm.needs_grad;
  n.offset = allocate(n.rows);
  const Real* src = val(nodes_[m.id]) + index * nm.cols;
  std::copy(src, src + n.rows, out(n));
  return push(n);
}

Var Tape::sum(std::span<const Var> parts) {
  NT_CHECK(!parts.empty(), "sum: no parts");
  Node n{Op::kSum};
  const Node& first = node(parts[0]);
  n.rows = first.rows;
  n.cols = first.cols;
  n.args_offset = args_.size();
  n.args_count = parts.size();
  for (Var p : parts) {
    const Node& np = node(p);
    NT_CHECK(np.rows == n.rows && np.cols == n.cols, "sum: shape mismatch");
    n.needs_grad = n.needs_grad || np.needs_grad;
    args_.push_back(p.id);
  }
  n.offset = allocate(count(n));
  Real* y = out(n);
  for (Var p : parts) {
    const Real* src = val(nodes_[p.id]);
    for (std::size_t i = 0; i < count(n); ++i) y[i] += src[i];
  }
  return push(n);
}

Var Tape::scale(Var a, Real k) {
  const Node& na = node(a);
  Node n{Op::kScale};
  n.a = a.id;
  n.k = k;
  n.rows = na.rows;
  n.cols = na.cols;
  n.needs_grad = na.needs_grad;
  n.offset = allocate(count(n));
  const Real* x = val(nodes_[a.id]);
  Real* y = out(n);
  for (std::size_t i = 0; i < count(n); ++i) y[i] = k * x[i];
  return push(n);
}

// ---------------------------------------------------------------------------
// Accessors

std::span<const Real> Tape::value(Var v) const {
  const Node& n = node(v);
  return {val(n), count(n)};
}

Real Tape::scalar(Var v) const {
  const Node& n = node(v);
  NT_CHECK(count(n) == 1, "scalar: node is not a scalar");
  return *val(n);
}

std::size_t Tape::size(Var v) const { return count(node(v)); }
std::size_t Tape::rows(Var v) const { return node(v).rows; }
std::size_t Tape::cols(Var v) const { return node(v).cols; }
Tape::Op Tape::op(Var v) const { return node(v).op; }
bool Tape::needs_grad(Var v) const { return node(v).needs_grad; }

void Tape::clear() {
  nodes_.clear();
  values_.clear();
  grads_.clear();
  args_.clear();
}

// ---------------------------------------------------------------------------
// Backward

void Tape::backward(Var loss, const std::function<void(int)>& visit) {
  const Node& nl = node(loss);
  NT_CHECK(count(nl) == 1, "backward: loss must be a scalar");
  if (!nl.needs_grad) return;
  grads_.assign(values_.size(), Real(0));
  *grad(nl) += Real(1);

  const auto& k = K();
  for (int i = loss.id; i >= 0; --i) {
    const Node& n = nodes_[i];
    if (!n.needs_grad) continue;
    if (visit) visit(i);
    const Real* g = grad(n);
    switch (n.op) {
      case Op::kInput:
      case Op::kParam:
        break;
      case Op::kAffine: {
        const Node& na = nodes_[n.a];
        const Node& nx = nodes_[n.b];
        if (na.needs_grad) k.ger_acc(na.rows, na.cols, g, val(nx), grad(na));
        if (nx.needs_grad) k.gemv_t_acc(na.rows, na.cols, val(na), g, grad(nx));
        if (n.c >= 0 && nodes_[n.c].needs_grad) k.axpy(n.rows, Real(1), g, grad(nodes_[n.c]));
        break;
      }
      case Op::kMatVecT: {
        const Node& na = nodes_[n.a];
        const Node& nx = nodes_[n.b];
        if (na.needs_grad) k.ger_acc(na.rows, na.cols, val(nx), g, grad(na));
        if (nx.needs_grad) k.gemv_acc(na.rows, na.cols, val(na), g, grad(nx));
        break;
      }
      case Op::kAdd: {
        for (int id : {n.a, n.b}) {
          if (nodes_[id].needs_grad) k.axpy(count(n), Real(1), g, grad(nodes_[id]));
        }
        break;
      }
      case Op::kMul: {
        const Node& na = nodes_[n.a];
        const Node& nb = nodes_[n.b];
        const std::size_t len = count(n);
        if (na.needs_grad) {
          Real* ga = grad(na);
          const Real* vb = val(nb);
          for (std::size_t j = 0; j < len; ++j) ga[j] += g[j] * vb[j];
        }
        if (nb.needs_grad) {
          Real* gb = grad(nb);
          const Real* va = val(na);
          for (std::size_t j = 0; j < len; ++j) gb[j] += g[j] * va[j];
        }
        break;
      }
      case Op::kAddRows: {
        const Node& nm = nodes_[n.a];
        const Node& nv = nodes_[n.b];
        if (nm.needs_grad) k.axpy(count(n), Real(1), g, grad(nm));
        if (nv.needs_grad) {
          Real* gv = grad(nv);
          for (std::size_t r = 0; r < n.rows; ++r) k.axpy(n.cols, Real(1), g + r * n.cols, gv);
        }
        break;
      }
      case Op::kSigmoid: {
        Real* ga = grad(nodes_[n.a]);
        const Real* y = val(n);
        for (std::size_t j = 0; j < count(n); ++j) ga[j] += g[j] * y[j] * (Real(1) - y[j]);
        break;
      }
      case Op::kTanh: {
        Real* ga = grad(nodes_[n.a]);
        const Real* y = val(n);
        for (std::size_t j = 0; j < count(n); ++j) ga[j] += g[j] * (Real(1) - y[j] * y[j]);
        break;
      }
      case Op::kConcat:
      case Op::kStack: {
        const Real* src = g;
        for (std::size_t j = 0; j < n.args_count; ++j) {
          const Node& np = nodes_[args_[n.args_offset + j]];
          if (np.needs_grad) k.axpy(count(np), Real(1), src, grad(np));
          src += count(np);
        }
        break;
      }
      case Op::kSlice:
        k.axpy(n.rows, Real(1), g, grad(nodes_[n.a]) + n.aux);
        break;
      case Op::kPad:
        k.axpy(nodes_[n.a].rows, Real(1), g, grad(nodes_[n.a]));
        break;
      case Op::kSoftmax: {
        const Real* y = val(n);
        Real s = 0;
        for (std::size_t j = 0; j < n.rows; ++j) s += g[j] * y[j];
        Real* ga = grad(nodes_[n.a]);
        for (std::size_t j = 0; j < n.rows; ++j) ga[j] += y[j] * (g[j] - s);
        break;
      }
      case Op::kLogSoftmax: {
        const Real* y = val(n);
        Real s = 0;
        for (std::size_t j = 0; j < n.rows; ++j) s += g[j];
        Real* ga = grad(nodes_[n.a]);
        for (std::size_t j = 0; j < n.rows; ++j) ga[j] += g[j] - std::exp(y[j]) * s;
        break;
      }
      case Op::kPick:
        grad(nodes_[n.a])[n.aux] += g[0];
        break;
      case Op::kRow: {
        const Node& nm = nodes_[n.a];
        k.axpy(n.rows, Real(1), g, grad(nm) + n.aux * nm.cols);
        break;
      }
      case Op::kSum: {
        for (std::size_t j = 0; j < n.args_count; ++j) {
          const Node& np = nodes_[args_[n.args_offset + j]];
          if (np.needs_grad) k.axpy(count(n), Real(1), g, grad(np));
        }
        break;
      }
      case Op::kScale:
        k.axpy(count(n), n.k, g, grad(nodes_[n.a]));
        break;
    }
  }
  grads_.clear();
  grads_.shrink_to_fit();
}

}  // namespace NT_ABI
}  // namespace nt
