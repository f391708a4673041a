#include "gencop/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gencop::ops {
namespace {

// Plain loops: every output entry accumulates over the inner index in a
// fixed order, so results do not depend on buffer alignment.
// c[r x n] += a[r x k] b[k x n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t r, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < r; ++i) {
    T* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      const T* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// c[r x k] += g[r x n] b[k x n]^T
template <typename T>
void gemm_nt(const T* g, const T* b, T* c, std::size_t r, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < r; ++i) {
    const T* gi = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T* bp = b + p * n;
      T s = 0;
      for (std::size_t j = 0; j < n; ++j) s += gi[j] * bp[j];
      c[i * k + p] += s;
    }
  }
}

// c[k x n] += a[r x k]^T g[r x n]
template <typename T>
void gemm_tn(const T* a, const T* g, T* c, std::size_t r, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < r; ++i) {
    const T* gi = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      T* cp = c + p * n;
      for (std::size_t j = 0; j < n; ++j) cp[j] += av * gi[j];
    }
  }
}

template <typename T>
void require_same_shape(const Tape<T>& tape, Var a, Var b, const char* op) {
  if (tape.shape(a) != tape.shape(b)) {
    throw ShapeError(std::string(op) + ": shapes " + shape_str(tape.shape(a)) + " and " + shape_str(tape.shape(b)) +
                     " differ");
  }
}

template <typename T>
bool any_grad(const Tape<T>& tape, std::initializer_list<Var> vars) {
  for (auto v : vars) {
    if (v.valid() && tape.needs_grad(v)) return true;
  }
  return false;
}

template <typename T>
void check_mask(std::span<const T> mask) {
  for (T m : mask) {
    if (!(m == T{0} || (std::isinf(m) && m < 0))) throw DataError("mask entries must be 0 or -inf");
  }
}

// Row-wise softmax with an additive mask whose rows repeat every `mask_rows`
// rows. Writes probabilities into `out`.
template <typename T>
void softmax_rows(std::span<const T> x, std::span<const T> mask, std::size_t len, std::span<T> out) {
  const std::size_t rows = x.size() / len;
  const std::size_t mask_rows = mask.empty() ? 0 : mask.size() / len;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.data() + r * len;
    const T* mr = mask_rows ? mask.data() + (r % mask_rows) * len : nullptr;
    T* o = out.data() + r * len;
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t i = 0; i < len; ++i) {
      T v = mr ? xr[i] + mr[i] : xr[i];
      if (std::isnan(v)) throw NumericalError("softmax: NaN score in row " + std::to_string(r));
      mx = std::max(mx, v);
    }
    if (std::isinf(mx) && mx < 0) throw DataError("softmax: every entry of a row is masked");
    T sum = 0;
    for (std::size_t i = 0; i < len; ++i) {
      T v = mr ? xr[i] + mr[i] : xr[i];
      o[i] = std::exp(v - mx);
      sum += o[i];
    }
    for (std::size_t i = 0; i < len; ++i) o[i] /= sum;
  }
}

template <typename T>
Var softmax_impl(Tape<T>& tape, Var a, std::span<const T> mask, std::size_t len) {
  auto x = tape.value(a);
  std::vector<T> out(x.size());
  softmax_rows<T>(x, mask, len, out);
  return tape.emit(tape.shape(a), std::move(out), tape.needs_grad(a), [a, len](Tape<T>& t, std::uint32_t self) {
    auto g = t.out_grad(self);
    auto y = t.value(Var{self});
    auto dx = t.grad_buffer(a);
    for (std::size_t r = 0; r < y.size() / len; ++r) {
      T dot = 0;
      for (std::size_t i = 0; i < len; ++i) dot += g[r * len + i] * y[r * len + i];
      for (std::size_t i = 0; i < len; ++i) dx[r * len + i] += y[r * len + i] * (g[r * len + i] - dot);
    }
  });
}

}  // namespace

template <typename T>
Var matmul(Tape<T>& tape, Var a, Var b) {
  const auto& sa = tape.shape(a);
  const auto& sb = tape.shape(b);
  if (sa.empty() || sb.size() != 2 || sa.back() != sb[0]) {
    throw ShapeError("matmul: shapes " + shape_str(sa) + " and " + shape_str(sb) + " do not conform");
  }
  const std::size_t k = sb[0], n = sb[1], rows = numel(sa) / sb[0];
  Shape out_shape = sa;
  out_shape.back() = sb[1];
  std::vector<T> out(rows * n, T{0});
  gemm_nn(tape.value(a).data(), tape.value(b).data(), out.data(), rows, k, n);
  return tape.emit(std::move(out_shape), std::move(out), any_grad(tape, {a, b}),
                   [a, b, rows, k, n](Tape<T>& t, std::uint32_t self) {
                     const T* g = t.out_grad(self).data();
                     if (t.needs_grad(a)) gemm_nt(g, t.value(b).data(), t.grad_buffer(a).data(), rows, n, k);
                     if (t.needs_grad(b)) gemm_tn(t.value(a).data(), g, t.grad_buffer(b).data(), rows, k, n);
                   });
}

template <typename T>
Var add(Tape<T>& tape, Var a, Var b) {
  require_same_shape(tape, a, b, "add");
  auto x = tape.value(a);
  auto y = tape.value(b);
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return tape.emit(tape.shape(a), std::move(out), any_grad(tape, {a, b}), [a, b](Tape<T>& t, std::uint32_t self) {
    auto g = t.out_grad(self);
    for (Var v : {a, b}) {
      if (!t.needs_grad(v)) continue;
      auto d = t.grad_buffer(v);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    }
  });
}

template <typename T>
Var scale(Tape<T>& tape, Var a, double factor) {
  const T c = static_cast<T>(factor);
  auto x = tape.value(a);
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i];
  return tape.emit(tape.shape(a), std::move(out), tape.needs_grad(a), [a, c](Tape<T>& t, std::uint32_t self) {
    auto g = t.out_grad(self);
    auto d = t.grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += c * g[i];
  });
}

template <typename T>
Var scale(Tape<T>& tape, Var a, Var factor) {
  if (tape.value(factor).size() != 1) {
    throw ShapeError("scale: factor must be a single value, got shape " + shape_str(tape.shape(factor)));
  }
  const T c = tape.value(factor)[0];
  auto x = tape.value(a);
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i];
  return tape.emit(tape.shape(a), std::move(out), any_grad(tape, {a, factor}),
                   [a, factor](Tape<T>& t, std::uint32_t self) {
                     auto g = t.out_grad(self);
                     auto x = t.value(a);
                     const T c = t.value(factor)[0];
                     if (t.needs_grad(a)) {
                       auto d = t.grad_buffer(a);
                       for (std::size_t i = 0; i < g.size(); ++i) d[i] += c * g[i];
                     }
                     if (t.needs_grad(factor)) {
                       T s = 0;
                       for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * x[i];
                       t.grad_buffer(factor)[0] += s;
                     }
                   });
}

template <typename T>
Var elementwise_mul(Tape<T>& tape, Var a, Var b) {
  require_same_shape(tape, a, b, "elementwise_mul");
  auto x = tape.value(a);
  auto y = tape.value(b);
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return tape.emit(tape.shape(a), std::move(out), any_grad(tape, {a, b}), [a, b](Tape<T>& t, std::uint32_t self) {
    auto g = t.out_grad(self);
    auto x = t.value(a);
    auto y = t.value(b);
    if (t.needs_grad(a)) {
      auto d = t.grad_buffer(a);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * y[i];
    }
    if (t.needs_grad(b)) {
      auto d = t.grad_buffer(b);
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * x[i];
    }
  });
}

template <typename T>
Var relu(Tape<T>& tape, Var a) {
  auto x = tape.value(a);
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] > T{0} ? x[i] : T{0};
  return tape.emit(tape.shape(a), std::move(out), tape.needs_grad(a), [a](Tape<T>& t, std::uint32_t self) {
    auto g = t.out_grad(self);
    auto x = t.value(a);
    auto d = t.grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x[i] > T{0}) d[i] += g[i];
    }
  });
}

template <typename T>
Var concat_last_dim(Tape<T>& tape, Var a, Var b) {
  const auto& sa = tape.shape(a);
  const auto& sb = tape.shape(b);
  if (sa.empty() || sa.size() != sb.size() || !std::equal(sa.begin(), sa.end() - 1, sb.begin())) {
    throw ShapeError("concat_last_dim: shapes " + shape_str(sa) + " and " + shape_str(sb) + " do not conform");
  }
  const std::size_t p = sa.back(), q = sb.back(), rows = numel(sa) / std::max<std::size_t>(p, 1);
  Shape out_shape = sa;
  out_shape.back() = p + q;
  auto x = tape.value(a);
  auto y = tape.value(b);
  std::vector<T> out(rows * (p + q));
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(x.data() + r * p, p, out.data() + r * (p + q));
    std::copy_n(y.data() + r * q, q, out.data() + r * (p + q) + p);
  }
  return tape.emit(std::move(out_shape), std::move(out), any_grad(tape, {a, b}),
                   [a, b, p, q, rows](Tape<T>& t, std::uint32_t self) {
                     auto g = t.out_grad(self);
                     if (t.needs_grad(a)) {
                       auto d = t.grad_buffer(a);
                       for (std::size_t r = 0; r < rows; ++r)
                         for (std::size_t i = 0; i < p; ++i) d[r * p + i] += g[r * (p + q) + i];
                     }
                     if (t.needs_grad(b)) {
                       auto d = t.grad_buffer(b);
                       for (std::size_t r = 0; r < rows; ++r)
                         for (std::size_t i = 0; i < q; ++i) d[r * q + i] += g[r * (p + q) + p + i];
                     }
                   });
}

template <typename T>
Var reduce_sum(Tape<T>& tape, Var a) {
  T s = 0;
  for (T v : tape.value(a)) s += v;
  return tape.emit(Shape{}, std::vector<T>{s}, tape.needs_grad(a), [a](Tape<T>& t, std::uint32_t self) {
    const T g = t.out_grad(self)[0];
    for (auto& d : t.grad_buffer(a)) d += g;
  });
}

template <typename T>
Var reshape(Tape<T>& tape, Var a, Shape shape) {
  if (numel(shape) != numel(tape.shape(a))) {
    throw ShapeError("reshape: cannot view " + shape_str(tape.shape(a)) + " as " + shape_str(shape));
  }
  auto x = tape.value(a);
  return tape.emit(std::move(shape), std::vector<T>(x.begin(), x.end()), tape.needs_grad(a),
                   [a](Tape<T>& t, std::uint32_t self) {
                     auto g = t.out_grad(self);
                     auto d = t.grad_buffer(a);
                     for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                   });
}

template <typename T>
Var softmax_over_flat(Tape<T>& tape, Var a, std::span<const T> mask) {
  const std::size_t n = numel(tape.shape(a));
  if (!mask.empty() && mask.size() != n) {
    throw ShapeError("softmax_over_flat: mask has " + std::to_string(mask.size()) + " entries for shape " +
                     shape_str(tape.shape(a)));
  }
  check_mask(mask);
  return softmax_impl(tape, a, mask, n);
}

template <typename T>
Var masked_softmax(Tape<T>& tape, Var a, std::span<const T> mask) {
  const auto& s = tape.shape(a);
  if (s.empty()) throw ShapeError("masked_softmax: scalar input");
  const std::size_t len = s.back();
  const std::size_t n = numel(s);
  if (!mask.empty() && (mask.size() % len != 0 || n % mask.size() != 0)) {
    throw ShapeError("masked_softmax: mask of " + std::to_string(mask.size()) + " entries does not broadcast to " +
                     shape_str(s));
  }
  check_mask(mask);
  return softmax_impl(tape, a, mask, len);
}

template <typename T>
Var gather_rows(Tape<T>& tape, Var a, std::span<const int> rows) {
  const auto& s = tape.shape(a);
  if (s.empty()) throw ShapeError("gather_rows: scalar input");
  const std::size_t width = numel(s) / std::max<std::size_t>(s[0], 1);
  auto x = tape.value(a);
  std::vector<int> idx(rows.begin(), rows.end());
  std::vector<T> out(idx.size() * width);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || static_cast<std::size_t>(idx[r]) >= s[0]) {
      throw ShapeError("gather_rows: row " + std::to_string(idx[r]) + " out of range for " + shape_str(s));
    }
    std::copy_n(x.data() + static_cast<std::size_t>(idx[r]) * width, width, out.data() + r * width);
  }
  Shape out_shape = s;
  out_shape[0] = idx.size();
  return tape.emit(std::move(out_shape), std::move(out), tape.needs_grad(a),
                   [a, idx = std::move(idx), width](Tape<T>& t, std::uint32_t self) {
                     auto g = t.out_grad(self);
                     auto d = t.grad_buffer(a);
                     for (std::size_t r = 0; r < idx.size(); ++r)
                       for (std::size_t i = 0; i < width; ++i)
                         d[static_cast<std::size_t>(idx[r]) * width + i] += g[r * width + i];
                   });
}

template <typename T>
Var attention_scores(Tape<T>& tape, Var q, Var k, Var eq, Var ek, int heads, double scale) {
  const auto& sq = tape.shape(q);
  const auto& sk = tape.shape(k);
  if (sq.size() != 2 || sk.size() != 2 || sq[1] != sk[1]) {
    throw ShapeError("attention_scores: queries " + shape_str(sq) + " and keys " + shape_str(sk) + " do not conform");
  }
  const std::size_t N = sq[0], M = sk[0], D = sq[1];
  if (heads <= 0 || D % static_cast<std::size_t>(heads) != 0) {
    throw ShapeError("attention_scores: dimension " + std::to_string(D) + " not divisible by " +
                     std::to_string(heads) + " heads");
  }
  const Shape edge_shape{M, N, D};
  for (Var e : {eq, ek}) {
    if (e.valid() && tape.shape(e) != edge_shape) {
      throw ShapeError("attention_scores: edge projection " + shape_str(tape.shape(e)) + ", expected " +
                       shape_str(edge_shape));
    }
  }
  const std::size_t H = static_cast<std::size_t>(heads), d = D / H;
  const T c = static_cast<T>(scale);
  auto qv = tape.value(q);
  auto kv = tape.value(k);
  const T* eqv = eq.valid() ? tape.value(eq).data() : nullptr;
  const T* ekv = ek.valid() ? tape.value(ek).data() : nullptr;
  std::vector<T> out(H * N * M);
  for (std::size_t h = 0; h < H; ++h) {
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t m = 0; m < M; ++m) {
        const std::size_t e0 = (m * N + n) * D;
        T acc = 0;
        for (std::size_t ch = h * d; ch < (h + 1) * d; ++ch) {
          T kk = kv[m * D + ch];
          T qq = qv[n * D + ch];
          if (ekv) kk += ekv[e0 + ch];
          if (eqv) qq += eqv[e0 + ch];
          acc += kk * qq;
        }
        out[(h * N + n) * M + m] = c * acc;
      }
    }
  }
  return tape.emit(Shape{H, N, M}, std::move(out), any_grad(tape, {q, k, eq, ek}),
                   [=](Tape<T>& t, std::uint32_t self) {
                     auto g = t.out_grad(self);
                     auto qv = t.value(q);
                     auto kv = t.value(k);
                     const T* eqv = eq.valid() ? t.value(eq).data() : nullptr;
                     const T* ekv = ek.valid() ? t.value(ek).data() : nullptr;
                     T* dq = t.needs_grad(q) ? t.grad_buffer(q).data() : nullptr;
                     T* dk = t.needs_grad(k) ? t.grad_buffer(k).data() : nullptr;
                     T* deq = eq.valid() && t.needs_grad(eq) ? t.grad_buffer(eq).data() : nullptr;
                     T* dek = ek.valid() && t.needs_grad(ek) ? t.grad_buffer(ek).data() : nullptr;
                     for (std::size_t h = 0; h < H; ++h) {
                       for (std::size_t n = 0; n < N; ++n) {
                         for (std::size_t m = 0; m < M; ++m) {
                           const T gs = c * g[(h * N + n) * M + m];
                           if (gs == T{0}) continue;
                           const std::size_t e0 = (m * N + n) * D;
                           for (std::size_t ch = h * d; ch < (h + 1) * d; ++ch) {
                             T kk = kv[m * D + ch];
                             T qq = qv[n * D + ch];
                             if (ekv) kk += ekv[e0 + ch];
                             if (eqv) qq += eqv[e0 + ch];
                             if (dq) dq[n * D + ch] += gs * kk;
                             if (deq) deq[e0 + ch] += gs * kk;
                             if (dk) dk[m * D + ch] += gs * qq;
                             if (dek) dek[e0 + ch] += gs * qq;
                           }
                         }
                       }
                     }
                   });
}

template <typename T>
Var attention_mix(Tape<T>& tape, Var weights, Var v) {
  const auto& sw = tape.shape(weights);
  const auto& sv = tape.shape(v);
  if (sw.size() != 3 || sv.size() != 2 || sw[2] != sv[0] || sv[1] % sw[0] != 0) {
    throw ShapeError("attention_mix: weights " + shape_str(sw) + " and values " + shape_str(sv) + " do not conform");
  }
  const std::size_t H = sw[0], N = sw[1], M = sw[2], D = sv[1], d = D / H;
  auto a = tape.value(weights);
  auto vv = tape.value(v);
  std::vector<T> out(N * D, T{0});
  for (std::size_t h = 0; h < H; ++h)
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < M; ++m) {
        const T w = a[(h * N + n) * M + m];
        for (std::size_t ch = h * d; ch < (h + 1) * d; ++ch) out[n * D + ch] += w * vv[m * D + ch];
      }
  return tape.emit(Shape{N, D}, std::move(out), any_grad(tape, {weights, v}), [=](Tape<T>& t, std::uint32_t self) {
    auto g = t.out_grad(self);
    auto a = t.value(weights);
    auto vv = t.value(v);
    T* da = t.needs_grad(weights) ? t.grad_buffer(weights).data() : nullptr;
    T* dv = t.needs_grad(v) ? t.grad_buffer(v).data() : nullptr;
    for (std::size_t h = 0; h < H; ++h)
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < M; ++m) {
          const T w = a[(h * N + n) * M + m];
          T acc = 0;
          for (std::size_t ch = h * d; ch < (h + 1) * d; ++ch) {
            acc += g[n * D + ch] * vv[m * D + ch];
            if (dv) dv[m * D + ch] += w * g[n * D + ch];
          }
          if (da) da[(h * N + n) * M + m] += acc;
        }
  });
}

template <typename T>
Var set_nll(Tape<T>& tape, Var logits, std::span<const T> mask, std::span<const int> targets) {
  auto x = tape.value(logits);
  const std::size_t n = x.size();
  if (!mask.empty() && mask.size() != n) throw ShapeError("set_nll: mask size does not match logits");
  check_mask(mask);
  if (targets.empty()) throw DataError("set_nll: empty target set");
  std::vector<char> is_target(n, 0);
  for (int i : targets) {
    if (i < 0 || static_cast<std::size_t>(i) >= n) throw DataError("set_nll: target index out of range");
    if (!mask.empty() && mask[static_cast<std::size_t>(i)] != T{0}) {
      throw DataError("set_nll: target action " + std::to_string(i) + " is masked");
    }
    is_target[static_cast<std::size_t>(i)] = 1;
  }
  auto allowed = [&](std::size_t i) { return mask.empty() || mask[i] == T{0}; };
  T mx = -std::numeric_limits<T>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (allowed(i)) mx = std::max(mx, x[i]);
  // p: softmax over allowed actions; q: softmax restricted to the targets.
  std::vector<T> p(n, T{0}), q(n, T{0});
  T zp = 0, zq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!allowed(i)) continue;
    p[i] = std::exp(x[i] - mx);
    zp += p[i];
    if (is_target[i]) {
      q[i] = p[i];
      zq += p[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    p[i] /= zp;
    q[i] /= zq;
  }
  const T loss = std::log(zp) - std::log(zq);
  return tape.emit(Shape{}, std::vector<T>{loss}, tape.needs_grad(logits),
                   [logits, p = std::move(p), q = std::move(q)](Tape<T>& t, std::uint32_t self) {
                     const T g = t.out_grad(self)[0];
                     auto d = t.grad_buffer(logits);
                     for (std::size_t i = 0; i < d.size(); ++i) d[i] += g * (p[i] - q[i]);
                   });
}

#define GENCOP_INSTANTIATE_OPS(T)                                                                 \
  template Var matmul<T>(Tape<T>&, Var, Var);                                                     \
  template Var add<T>(Tape<T>&, Var, Var);                                                        \
  template Var scale<T>(Tape<T>&, Var, double);                                                   \
  template Var scale<T>(Tape<T>&, Var, Var);                                                      \
  template Var elementwise_mul<T>(Tape<T>&, Var, Var);                                            \
  template Var relu<T>(Tape<T>&, Var);                                                            \
  template Var concat_last_dim<T>(Tape<T>&, Var, Var);                                            \
  template Var reduce_sum<T>(Tape<T>&, Var);                                                      \
  template Var reshape<T>(Tape<T>&, Var, Shape);                                                  \
  template Var softmax_over_flat<T>(Tape<T>&, Var, std::span<const T>);                           \
  template Var masked_softmax<T>(Tape<T>&, Var, std::span<const T>);                              \
  template Var gather_rows<T>(Tape<T>&, Var, std::span<const int>);                               \
  template Var attention_scores<T>(Tape<T>&, Var, Var, Var, Var, int, double);                    \
  template Var attention_mix<T>(Tape<T>&, Var, Var);                                              \
  template Var set_nll<T>(Tape<T>&, Var, std::span<const T>, std::span<const int>);

GENCOP_INSTANTIATE_OPS(float)
GENCOP_INSTANTIATE_OPS(double)
GENCOP_INSTANTIATE_OPS(long double)

#undef GENCOP_INSTANTIATE_OPS

}  // namespace gencop::ops
