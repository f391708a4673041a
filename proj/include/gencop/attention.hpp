#pragma once

#include <vector>

#include "gencop/ops.hpp"

namespace gencop {

enum class AttentionMode { vanilla, mixed };

struct AttentionOptions {
  AttentionMode mode = AttentionMode::mixed;
  // Divide scores by sqrt(d). Off reproduces the unscaled score formula.
  bool scale_scores = true;
};

// Projection matrices of all heads, bound to a tape. Head h owns channel block
// h (width d = D / H) of every projection; `wo` maps the concatenated head
// outputs back to D. Edge projections are invalid for vanilla blocks.
struct HeadParams {
  Var wq, wk, wv, wo;   // D x D
  Var wq_edge, wk_edge; // D̄ x D
  int heads = 1;
};

// Edge embeddings kept in factored form: codes [M, N, r] times lift [r, D̄].
// With no lift the codes are the embeddings themselves (r = D̄). Projections
// multiply the small factors first, which avoids materializing M*N*D̄ values.
struct EdgeEmbedding {
  Var codes;
  Var lift;

  template <typename T>
  Var project(Tape<T>& tape, Var w) const;
  template <typename T>
  Var materialize(Tape<T>& tape) const;
};

template <typename T>
struct AttentionInputs {
  Var queries;  // N x D
  Var keys;     // M x D
  Var values;   // M x D
  const EdgeEmbedding* edges = nullptr;  // (key, query, feature)
  std::vector<T> mask;                   // M x N, {0, -inf}; empty means none
};

double score_scale(int dim, int heads, bool scaled);

// Scores laid out [H, N, M]: entry (h, n, m) holds S_mn of head h.
template <typename T>
Var vanilla_scores(Tape<T>& tape, const AttentionInputs<T>& in, const HeadParams& p, bool scaled = true);

template <typename T>
Var mixed_scores(Tape<T>& tape, const AttentionInputs<T>& in, const HeadParams& p, bool scaled = true);

// r = sum_h softmax over keys (S_h + mask) applied to V_h, then W_O. Returns N x D.
template <typename T>
Var attention_forward(Tape<T>& tape, const AttentionInputs<T>& in, const HeadParams& p, AttentionOptions opt);

}  // namespace gencop
