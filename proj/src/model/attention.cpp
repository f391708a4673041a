#include "gencop/attention.hpp"

#include <cmath>

namespace gencop {

template <typename T>
Var EdgeEmbedding::project(Tape<T>& tape, Var w) const {
  if (!lift.valid()) return ops::matmul(tape, codes, w);
  return ops::matmul(tape, codes, ops::matmul(tape, lift, w));
}

template <typename T>
Var EdgeEmbedding::materialize(Tape<T>& tape) const {
  if (!lift.valid()) return codes;
  return ops::matmul(tape, codes, lift);
}

double score_scale(int dim, int heads, bool scaled) {
  if (heads <= 0 || dim % heads != 0) {
    throw ShapeError("attention: dimension " + std::to_string(dim) + " not divisible by " + std::to_string(heads) +
                     " heads");
  }
  return scaled ? 1.0 / std::sqrt(static_cast<double>(dim / heads)) : 1.0;
}

namespace {

template <typename T>
void check_inputs(const Tape<T>& tape, const AttentionInputs<T>& in) {
  const auto& q = tape.shape(in.queries);
  const auto& k = tape.shape(in.keys);
  const auto& v = tape.shape(in.values);
  if (q.size() != 2 || k.size() != 2 || v != k || q[1] != k[1] || q[0] == 0 || k[0] == 0) {
    throw ShapeError("attention: queries " + shape_str(q) + ", keys " + shape_str(k) + ", values " + shape_str(v) +
                     " do not conform");
  }
  if (!in.mask.empty() && in.mask.size() != q[0] * k[0]) {
    throw ShapeError("attention: mask has " + std::to_string(in.mask.size()) + " entries, expected M x N = " +
                     std::to_string(k[0] * q[0]));
  }
}

template <typename T>
Var projected(Tape<T>& tape, Var x, Var w) {
  return ops::matmul(tape, x, w);
}

}  // namespace

template <typename T>
Var vanilla_scores(Tape<T>& tape, const AttentionInputs<T>& in, const HeadParams& p, bool scaled) {
  check_inputs(tape, in);
  const int D = static_cast<int>(tape.shape(in.queries)[1]);
  Var q = projected(tape, in.queries, p.wq);
  Var k = projected(tape, in.keys, p.wk);
  return ops::attention_scores(tape, q, k, Var{}, Var{}, p.heads, score_scale(D, p.heads, scaled));
}

template <typename T>
Var mixed_scores(Tape<T>& tape, const AttentionInputs<T>& in, const HeadParams& p, bool scaled) {
  check_inputs(tape, in);
  if (!in.edges) throw ShapeError("mixed attention: edge embeddings required");
  if (!p.wq_edge.valid() || !p.wk_edge.valid()) throw ShapeError("mixed attention: edge projections missing");
  const auto N = tape.shape(in.queries)[0];
  const auto M = tape.shape(in.keys)[0];
  const auto& cs = tape.shape(in.edges->codes);
  if (cs.size() != 3 || cs[0] != M || cs[1] != N) {
    throw ShapeError("mixed attention: edge tensor " + shape_str(cs) + " is not M x N x F with M=" +
                     std::to_string(M) + ", N=" + std::to_string(N));
  }
  const int D = static_cast<int>(tape.shape(in.queries)[1]);
  Var q = projected(tape, in.queries, p.wq);
  Var k = projected(tape, in.keys, p.wk);
  Var eq = in.edges->project(tape, p.wq_edge);
  Var ek = in.edges->project(tape, p.wk_edge);
  return ops::attention_scores(tape, q, k, eq, ek, p.heads, score_scale(D, p.heads, scaled));
}

template <typename T>
Var attention_forward(Tape<T>& tape, const AttentionInputs<T>& in, const HeadParams& p, AttentionOptions opt) {
  Var s = opt.mode == AttentionMode::mixed ? mixed_scores(tape, in, p, opt.scale_scores)
                                           : vanilla_scores(tape, in, p, opt.scale_scores);
  const auto N = tape.shape(in.queries)[0];
  const auto M = tape.shape(in.keys)[0];
  // Scores are query-major, so the M x N mask is transposed before the
  // softmax over keys.
  std::vector<T> mask_t;
  if (!in.mask.empty()) {
    mask_t.resize(N * M);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t n = 0; n < N; ++n) mask_t[n * M + m] = in.mask[m * N + n];
  }
  Var a = ops::masked_softmax(tape, s, std::span<const T>(mask_t));
  Var v = projected(tape, in.values, p.wv);
  return ops::matmul(tape, ops::attention_mix(tape, a, v), p.wo);
}

template Var EdgeEmbedding::project<float>(Tape<float>&, Var) const;
template Var EdgeEmbedding::project<double>(Tape<double>&, Var) const;
template Var EdgeEmbedding::materialize<float>(Tape<float>&) const;
template Var EdgeEmbedding::materialize<double>(Tape<double>&) const;
template Var vanilla_scores<float>(Tape<float>&, const AttentionInputs<float>&, const HeadParams&, bool);
template Var vanilla_scores<double>(Tape<double>&, const AttentionInputs<double>&, const HeadParams&, bool);
template Var mixed_scores<float>(Tape<float>&, const AttentionInputs<float>&, const HeadParams&, bool);
template Var mixed_scores<double>(Tape<double>&, const AttentionInputs<double>&, const HeadParams&, bool);
template Var attention_forward<float>(Tape<float>&, const AttentionInputs<float>&, const HeadParams&,
                                      AttentionOptions);
template Var attention_forward<double>(Tape<double>&, const AttentionInputs<double>&, const HeadParams&,
                                       AttentionOptions);
template Var EdgeEmbedding::project<long double>(Tape<long double>&, Var) const;
template Var EdgeEmbedding::materialize<long double>(Tape<long double>&) const;
template Var vanilla_scores<long double>(Tape<long double>&, const AttentionInputs<long double>&, const HeadParams&,
                                         bool);
template Var mixed_scores<long double>(Tape<long double>&, const AttentionInputs<long double>&, const HeadParams&, bool);
template Var attention_forward<long double>(Tape<long double>&, const AttentionInputs<long double>&,
                                            const HeadParams&, AttentionOptions);

}  // namespace gencop
