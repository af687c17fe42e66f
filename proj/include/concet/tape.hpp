// Copyright 2026 The Concet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Reverse-mode tape over dense tensors.  One tape records one example's
// forward pass; backward() walks the nodes in reverse and pushes gradients
// into external sinks for leaf parameters.  Everything is 64-bit and
// single-threaded per tape, so runs are bitwise reproducible.

#ifndef CONCET_TAPE_HPP_
#define CONCET_TAPE_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "concet/tensor.hpp"

namespace concet {

struct Var {
  int id = -1;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Constant input; no gradient leaves the tape.
  Var constant(Tensor v);

  // Parameter leaf: `value` lives outside the tape; its gradient is added
  // into `grad_sink` (same shape) during backward when non-null.
  Var leaf(const Tensor& value, Tensor* grad_sink);

  const Tensor& val(Var v) const;

  // Row gather: out[i] = table[ids[i]]; ids equal to zero_id produce a zero
  // row and receive no gradient.  Out-of-range ids throw ShapeError.
  Var gather_rows(Var table, const std::vector<int>& ids, int zero_id = -1);

  // Reinterpret the buffer with a new (rows, cols); size must match.
  Var reshape(Var x, size_t rows, size_t cols);

  // Same-padded 1-D convolution over time.  x [n, cin], w [width*cin,
  // cout], b [cout] → [n, cout].  Left pad = (width-1)/2.
  Var conv1d(Var x, Var w, Var b, int width);

  Var relu(Var x);
  Var tanh_op(Var x);

  // Column-wise max over time: [n, c] → [c]; ties keep the earliest row.
  Var max_over_time(Var x);

  // Fused LSTM over the whole sequence.  x [n, d], wx [d, 4h], wh [h, 4h],
  // b [4h] → hidden states [n, h].  Gate order i, f, g, o.  With reverse,
  // time runs backward but outputs stay at their original positions.
  Var lstm(Var x, Var wx, Var wh, Var b, bool reverse);

  Var concat_cols(Var a, Var b);        // [n,da] ++ [n,db] → [n,da+db]
  Var matmul_op(Var a, Var b);          // [n,k] · [k,m] → [n,m]
  Var add_row(Var x, Var b);            // [n,d] + broadcast [d]
  Var matvec_op(Var x, Var v);          // [n,d] · [d] → [n]
  Var softmax_op(Var x);                // [n] → [n], sums to 1
  Var weighted_sum_rows(Var h, Var w);  // Σ_i w[i]·h[i] → [d]

  Var affine(Var x, Var w, Var b);      // [d], [d,m], [m] → [m]
  Var concat(const std::vector<Var>& parts);  // rank-1 pieces → one vector

  // Inverted dropout: keeps with probability 1-rate and scales by
  // 1/(1-rate).  rate <= 0 is a passthrough that draws nothing.
  Var dropout(Var x, double rate, uint64_t seed);

  // cos(a, b) as a length-1 tensor; 0 (with zero gradient) when either
  // norm underflows.
  Var cosine(Var a, Var b);

  // Scalar loss −ln softmax(logits)[label], computed via logsumexp.
  Var cross_entropy(Var logits, int label);

  // Seeds d(loss)=1 and propagates to every leaf sink.  The loss must be a
  // single-element tensor.
  void backward(Var loss);

  size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor val;                   // owned unless ext is set
    const Tensor* ext = nullptr;  // leaf value storage
    Tensor grad;                  // lazily allocated
    Tensor* sink = nullptr;       // leaf gradient accumulator
    std::function<void()> back;
  };

  const Tensor& value_of(int id) const {
    const Node& n = nodes_[static_cast<size_t>(id)];
    return n.ext != nullptr ? *n.ext : n.val;
  }
  Tensor& grad_of(int id);
  bool has_grad(int id) const {
    return !nodes_[static_cast<size_t>(id)].grad.empty();
  }
  int push(Tensor val);

  std::vector<Node> nodes_;
  bool ran_backward_ = false;
};

}  // namespace concet

#endif  // CONCET_TAPE_HPP_
