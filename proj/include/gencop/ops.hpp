#pragma once

#include <span>
#include <vector>

#include "gencop/tape.hpp"

// Closed set of differentiable operations. Every op checks its shapes, records
// a backward closure on the tape, and is covered by the finite-difference
// suite in tests/test_ops.cpp.
namespace gencop::ops {

// a [..., k] x b [k, n] -> [..., n]; leading dims of `a` are flattened into rows.
template <typename T>
Var matmul(Tape<T>& tape, Var a, Var b);

template <typename T>
Var add(Tape<T>& tape, Var a, Var b);

template <typename T>
Var scale(Tape<T>& tape, Var a, double factor);

// `factor` must hold exactly one value (e.g. a ReZero gate).
template <typename T>
Var scale(Tape<T>& tape, Var a, Var factor);

template <typename T>
Var elementwise_mul(Tape<T>& tape, Var a, Var b);

// Gradient at exactly 0 is 0.
template <typename T>
Var relu(Tape<T>& tape, Var a);

template <typename T>
Var concat_last_dim(Tape<T>& tape, Var a, Var b);

template <typename T>
Var reduce_sum(Tape<T>& tape, Var a);

template <typename T>
Var reshape(Tape<T>& tape, Var a, Shape shape);

// Softmax over every entry of `a`. `mask` is empty or holds one additive
// {0, -inf} entry per element.
template <typename T>
Var softmax_over_flat(Tape<T>& tape, Var a, std::span<const T> mask = {});

// Softmax over the last axis. `mask` holds additive {0, -inf} entries and
// either matches `a` exactly or covers its trailing rows, in which case it is
// broadcast over the leading dimensions. Masked entries come out exactly 0.
template <typename T>
Var masked_softmax(Tape<T>& tape, Var a, std::span<const T> mask);

template <typename T>
Var gather_rows(Tape<T>& tape, Var a, std::span<const int> rows);

// Per-head scores for generalized attention, laid out [H, N, M] (query-major):
// out[h, n, m] = scale * <k[m] + ek[m, n] | q[n] + eq[m, n]> restricted to the
// d = D / H channels of head h. q: [N, D], k: [M, D], eq/ek: [M, N, D] or
// invalid Vars for the vanilla form.
template <typename T>
Var attention_scores(Tape<T>& tape, Var q, Var k, Var eq, Var ek, int heads, double scale);

// weights [H, N, M], v [M, D] -> [N, D]; head h reads and writes channel
// block h of v and of the output.
template <typename T>
Var attention_mix(Tape<T>& tape, Var weights, Var v);

// -log of the probability mass a masked flat softmax of `logits` assigns to
// `targets` (flat indices). Targets must be unmasked.
template <typename T>
Var set_nll(Tape<T>& tape, Var logits, std::span<const T> mask, std::span<const int> targets);

}  // namespace gencop::ops
