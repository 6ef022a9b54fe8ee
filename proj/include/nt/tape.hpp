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

// Reverse-mode tape over small dense vectors and matrices.
//
// Every primitive appends one node whose value lives in a single arena owned
// by the tape; a Var is an index into the node list, so copying a Var (or a
// whole recurrent state made of Vars) is free. Parameters are bound as leaf
// nodes that point at ParamStore memory rather than copying it; their
// gradients are accumulated straight into the store.
//
// Shapes are (rows, cols); a vector of length n is (n, 1).
//
// A Tape is single-threaded. Tapes on different threads may bind the same
// parameters read-only as long as none of them calls backward().

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "nt/precision.hpp"
#include "nt/tensor.hpp"

namespace nt {
inline namespace NT_ABI {

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
  friend bool operator==(Var, Var) = default;
};

class Tape {
 public:
  enum class Op : std::uint8_t {
    kInput,
    kParam,
    kAffine,    // A x (+ b)
    kMatVecT,   // A^T x
    kAdd,
    kMul,
    kAddRows,   // M + 1 v^T
    kSigmoid,
    kTanh,
    kConcat,
    kSlice,
    kStack,
    kPad,
    kSoftmax,
    kLogSoftmax,
    kPick,
    kRow,
    kSum,
    kScale,
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves.
  Var input(std::span<const Real> values);
  Var input_matrix(std::span<const Real> values, std::size_t rows, std::size_t cols);
  Var zeros(std::size_t n);
  /// Binds a parameter tensor without copying it. When `grad` is non-null,
  /// backward() accumulates d(loss)/d(param) into it.
  Var parameter(const Tensor& value, Tensor* grad);

  // Primitives. Each records one node.
  Var affine(Var a, Var x, Var bias = {});
  Var matvec_t(Var a, Var x);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var add_rows(Var m, Var v);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var concat(std::span<const Var> parts);
  Var concat(std::initializer_list<Var> parts) { return concat(std::span(parts.begin(), parts.size())); }
  Var slice(Var a, std::size_t offset, std::size_t len);
  Var stack(std::span<const Var> rows);
  /// Zero-pads a vector to length `len` (>= its size).
  Var pad(Var a, std::size_t len);
  Var softmax(Var a);
  Var log_softmax(Var a);
  Var pick(Var a, std::size_t index);
  Var row(Var m, std::size_t index);
  Var sum(std::span<const Var> parts);
  Var sum(std::initializer_list<Var> parts) { return sum(std::span(parts.begin(), parts.size())); }
  Var scale(Var a, Real k);

  std::span<const Real> value(Var v) const;
  Real scalar(Var v) const;
  std::size_t size(Var v) const;
  std::size_t rows(Var v) const;
  std::size_t cols(Var v) const;
  Op op(Var v) const;
  bool needs_grad(Var v) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t arena_size() const { return values_.size(); }

  /// Back-propagates from a scalar node. Visits nodes strictly in reverse
  /// recording order, calling `visit(node_id)` for each one that carries a
  /// gradient. Intermediate gradient storage is released on return.
  void backward(Var loss, const std::function<void(int)>& visit = {});

  /// Forgets all nodes; bound parameters must be re-bound.
  void clear();

 private:
  struct Node {
    Op op;
    bool needs_grad = false;
    int a = -1, b = -1, c = -1;
    std::size_t rows = 0, cols = 0;
    std::size_t offset = 0;        // into values_, unless external
    const Real* ext_value = nullptr;
    Real* ext_grad = nullptr;
    std::size_t aux = 0;           // slice offset, pick index, ...
    Real k = 0;                    // scale factor
    std::size_t args_offset = 0, args_count = 0;
  };

  Var push(Node n);
  std::size_t allocate(std::size_t n);
  const Node& node(Var v) const;
  const Real* val(const Node& n) const { return n.ext_value ? n.ext_value : values_.data() + n.offset; }
  Real* out(const Node& n) { return values_.data() + n.offset; }
  Real* grad(const Node& n) { return n.ext_grad ? n.ext_grad : grads_.data() + n.offset; }
  std::size_t count(const Node& n) const { return n.rows * n.cols; }
  bool any_needs(std::initializer_list<int> ids) const;

  std::vector<Node> nodes_;
  std::vector<Real> values_;
  std::vector<Real> grads_;
  std::vector<int> args_;
};

}  // namespace NT_ABI
}  // namespace nt
