// Copyright 2026 The vampdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include "vampdiff/numcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "vampdiff/error.hpp"
#include "vampdiff/numcore/dft.hpp"

namespace vampdiff::nc {

using detail::Node;

namespace {

Shape row_major_strides(const Shape& shape) {
  Shape strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

// ---------------------------------------------------------------- broadcasting

struct Broadcast {
  Shape out;
  Shape a_strides;
  Shape b_strides;
  bool same = false;
};

Shape aligned_strides(const Shape& in, const Shape& out) {
  const std::size_t offset = out.size() - in.size();
  const Shape natural = row_major_strides(in);
  Shape strides(out.size(), 0);
  for (std::size_t i = 0; i < in.size(); ++i) strides[offset + i] = in[i] == 1 ? 0 : natural[i];
  return strides;
}

Broadcast plan_broadcast(const Shape& a, const Shape& b, const char* op) {
  Broadcast bc;
  if (a == b) {
    bc.out = a;
    bc.same = true;
    return bc;
  }
  const std::size_t rank = std::max(a.size(), b.size());
  bc.out.assign(rank, 1);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::size_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw DimensionError(std::string(op) + ": cannot broadcast " + shape_str(a) + " with " + shape_str(b) +
                           " at axis " + std::to_string(i));
    }
    bc.out[i] = std::max(da, db);
  }
  bc.a_strides = aligned_strides(a, bc.out);
  bc.b_strides = aligned_strides(b, bc.out);
  return bc;
}

template <typename F>
void for_each_broadcast(const Broadcast& bc, F&& f) {
  const std::size_t n = shape_numel(bc.out);
  if (bc.same) {
    for (std::size_t i = 0; i < n; ++i) f(i, i, i);
    return;
  }
  const std::size_t rank = bc.out.size();
  const std::size_t last = bc.out[rank - 1];
  const std::size_t as = bc.a_strides[rank - 1];
  const std::size_t bs = bc.b_strides[rank - 1];
  std::vector<std::size_t> idx(rank, 0);
  std::size_t ai = 0;
  std::size_t bi = 0;
  for (std::size_t o = 0; o < n; o += last) {
    for (std::size_t j = 0; j < last; ++j) f(o + j, ai + j * as, bi + j * bs);
    for (std::size_t d = rank - 1; d-- > 0;) {
      ++idx[d];
      ai += bc.a_strides[d];
      bi += bc.b_strides[d];
      if (idx[d] < bc.out[d]) break;
      ai -= bc.a_strides[d] * bc.out[d];
      bi -= bc.b_strides[d] * bc.out[d];
      idx[d] = 0;
    }
  }
}

// fwd(x, y) -> value; da/db(x, y, out) -> partial derivative.
template <typename Fwd, typename Da, typename Db>
Tensor binary(const Tensor& a, const Tensor& b, const char* op, Fwd fwd, Da da, Db db) {
  auto bc = std::make_shared<Broadcast>(plan_broadcast(a.shape(), b.shape(), op));
  std::vector<double> out(shape_numel(bc->out));
  const auto av = a.data();
  const auto bv = b.data();
  for_each_broadcast(*bc, [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = fwd(av[i], bv[j]); });
  return make_result(
      bc->out, std::move(out), {a, b},
      [bc, da, db](Node& self) {
        Node& na = *self.inputs[0];
        Node& nb = *self.inputs[1];
        const bool ga = na.requires_grad;
        const bool gb = nb.requires_grad;
        for_each_broadcast(*bc, [&](std::size_t o, std::size_t i, std::size_t j) {
          const double g = self.grad[o];
          if (ga) na.grad[i] += g * da(na.value[i], nb.value[j], self.value[o]);
          if (gb) nb.grad[j] += g * db(na.value[i], nb.value[j], self.value[o]);
        });
      },
      op);
}

// fwd(x) -> y; deriv(x, y) -> dy/dx.
template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& a, const char* op, Fwd fwd, Deriv deriv) {
  const auto av = a.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  return make_result(
      a.shape(), std::move(out), {a},
      [deriv](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t i = 0; i < self.value.size(); ++i) in.grad[i] += self.grad[i] * deriv(in.value[i], self.value[i]);
      },
      op);
}

// ------------------------------------------------------------------ reductions

struct ReducePlan {
  Shape out_shape;
  std::vector<std::size_t> map;  // input flat index -> output flat index
  std::size_t count = 0;         // inputs per output
};

ReducePlan plan_reduce(const Shape& shape, std::vector<std::size_t> axes, bool keepdims, const char* op) {
  const std::size_t rank = shape.size();
  if (axes.empty()) {
    axes.resize(rank);
    std::iota(axes.begin(), axes.end(), 0);
  }
  std::vector<bool> reduced(rank, false);
  for (auto ax : axes) {
    if (ax >= rank) throw DimensionError(std::string(op) + ": axis " + std::to_string(ax) + " invalid for " + shape_str(shape));
    reduced[ax] = true;
  }
  ReducePlan plan;
  plan.count = 1;
  Shape kept_shape(rank, 1);
  for (std::size_t i = 0; i < rank; ++i) {
    if (reduced[i]) {
      plan.count *= shape[i];
    } else {
      kept_shape[i] = shape[i];
    }
  }
  if (plan.count == 0) throw DomainError(std::string(op) + ": empty reduction");
  const Shape kept_strides = row_major_strides(kept_shape);
  Shape strides(rank, 0);
  for (std::size_t i = 0; i < rank; ++i) strides[i] = reduced[i] ? 0 : kept_strides[i];
  const std::size_t n = shape_numel(shape);
  plan.map.resize(n);
  std::vector<std::size_t> idx(rank, 0);
  std::size_t out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    plan.map[i] = out;
    for (std::size_t d = rank; d-- > 0;) {
      ++idx[d];
      out += strides[d];
      if (idx[d] < shape[d]) break;
      out -= strides[d] * shape[d];
      idx[d] = 0;
    }
  }
  if (keepdims) {
    plan.out_shape = kept_shape;
  } else {
    for (std::size_t i = 0; i < rank; ++i) {
      if (!reduced[i]) plan.out_shape.push_back(shape[i]);
    }
    if (plan.out_shape.empty()) plan.out_shape.push_back(1);
  }
  return plan;
}

Tensor sum_like(const Tensor& a, std::vector<std::size_t> axes, bool keepdims, double factor, const char* op) {
  auto plan = std::make_shared<ReducePlan>(plan_reduce(a.shape(), std::move(axes), keepdims, op));
  std::vector<double> out(shape_numel(plan->out_shape), 0.0);
  const auto av = a.data();
  for (std::size_t i = 0; i < av.size(); ++i) out[plan->map[i]] += av[i];
  if (factor != 1.0) {
    for (auto& v : out) v *= factor;
  }
  return make_result(
      plan->out_shape, std::move(out), {a},
      [plan, factor](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t i = 0; i < in.value.size(); ++i) in.grad[i] += factor * self.grad[plan->map[i]];
      },
      op);
}

Tensor extreme(const Tensor& a, std::vector<std::size_t> axes, bool keepdims, bool take_max, const char* op) {
  auto plan = std::make_shared<ReducePlan>(plan_reduce(a.shape(), std::move(axes), keepdims, op));
  const std::size_t n_out = shape_numel(plan->out_shape);
  std::vector<double> out(n_out, 0.0);
  auto arg = std::make_shared<std::vector<std::size_t>>(n_out, std::numeric_limits<std::size_t>::max());
  const auto av = a.data();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const std::size_t o = plan->map[i];
    auto& best = (*arg)[o];
    // Strict comparison keeps the lowest flat index among ties.
    if (best == std::numeric_limits<std::size_t>::max() || (take_max ? av[i] > out[o] : av[i] < out[o])) {
      best = i;
      out[o] = av[i];
    }
  }
  return make_result(
      plan->out_shape, std::move(out), {a},
      [arg](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t o = 0; o < arg->size(); ++o) in.grad[(*arg)[o]] += self.grad[o];
      },
      op);
}

void check_rank(const Tensor& t, std::size_t rank, const char* op, const char* what) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": " + what + " must have rank " + std::to_string(rank) + ", got " +
                         shape_str(t.shape()));
  }
}

}  // namespace

// ------------------------------------------------------------ elementwise ops

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
      [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  for (double v : b.data()) {
    if (v == 0.0) throw DomainError("div: zero denominator");
  }
  return binary(
      a, b, "div", [](double x, double y) { return x / y; }, [](double, double y, double) { return 1.0 / y; },
      [](double, double y, double out) { return -out / y; });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, "scale", [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return unary(
      a, "add_scalar", [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& a) {
  return unary(
      a, "negate", [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor square(const Tensor& a) {
  return unary(
      a, "square", [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor sqrt(const Tensor& a) {
  for (double v : a.data()) {
    if (v < 0.0) throw DomainError("sqrt: negative input " + std::to_string(v));
  }
  return unary(
      a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary(
      a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  for (double v : a.data()) {
    if (v <= 0.0) throw DomainError("log: non-positive input " + std::to_string(v));
  }
  return unary(
      a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor log1p(const Tensor& a) {
  for (double v : a.data()) {
    if (v < -1.0) throw DomainError("log1p: input below -1: " + std::to_string(v));
  }
  return unary(
      a, "log1p", [](double x) { return std::log1p(x); }, [](double x, double) { return 1.0 / (1.0 + x); });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, "sigmoid", [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor silu(const Tensor& a) {
  return unary(
      a, "silu", [](double x) { return x / (1.0 + std::exp(-x)); },
      [](double x, double) {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 + x * (1.0 - s));
      });
}

Tensor smooth_l1_elem(const Tensor& a) {
  return unary(
      a, "smooth_l1",
      [](double x) {
        const double m = std::abs(x);
        return m < 1.0 ? 0.5 * x * x : m - 0.5;
      },
      [](double x, double) { return std::abs(x) < 1.0 ? x : (x > 0.0 ? 1.0 : -1.0); });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw ParameterError("clamp: lo > hi");
  return unary(
      a, "clamp", [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

// -------------------------------------------------------------- reductions

Tensor sum(const Tensor& a, std::vector<std::size_t> axes, bool keepdims) {
  return sum_like(a, std::move(axes), keepdims, 1.0, "sum");
}

Tensor mean(const Tensor& a, std::vector<std::size_t> axes, bool keepdims) {
  const auto plan = plan_reduce(a.shape(), axes, keepdims, "mean");
  return sum_like(a, std::move(axes), keepdims, 1.0 / static_cast<double>(plan.count), "mean");
}

Tensor max(const Tensor& a, std::vector<std::size_t> axes, bool keepdims) {
  return extreme(a, std::move(axes), keepdims, true, "max");
}

Tensor min(const Tensor& a, std::vector<std::size_t> axes, bool keepdims) {
  return extreme(a, std::move(axes), keepdims, false, "min");
}

Tensor std_dev(const Tensor& a, std::vector<std::size_t> axes, bool keepdims) {
  auto plan = std::make_shared<ReducePlan>(plan_reduce(a.shape(), std::move(axes), keepdims, "std"));
  const std::size_t n_out = shape_numel(plan->out_shape);
  const double inv_count = 1.0 / static_cast<double>(plan->count);
  auto mu = std::make_shared<std::vector<double>>(n_out, 0.0);
  const auto av = a.data();
  for (std::size_t i = 0; i < av.size(); ++i) (*mu)[plan->map[i]] += av[i];
  for (auto& m : *mu) m *= inv_count;
  std::vector<double> var(n_out, 0.0);
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - (*mu)[plan->map[i]];
    var[plan->map[i]] += d * d;
  }
  std::vector<double> out(n_out);
  for (std::size_t o = 0; o < n_out; ++o) out[o] = std::sqrt(var[o] * inv_count);
  return make_result(
      plan->out_shape, std::move(out), {a},
      [plan, mu, inv_count](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t i = 0; i < in.value.size(); ++i) {
          const std::size_t o = plan->map[i];
          const double s = self.value[o];
          if (s > 0.0) in.grad[i] += self.grad[o] * (in.value[i] - (*mu)[o]) * inv_count / s;
        }
      },
      "std");
}

Tensor logsumexp(const Tensor& a, std::size_t axis, bool keepdims) {
  auto plan = std::make_shared<ReducePlan>(plan_reduce(a.shape(), {axis}, keepdims, "logsumexp"));
  const std::size_t n_out = shape_numel(plan->out_shape);
  const auto av = a.data();
  std::vector<double> peak(n_out, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < av.size(); ++i) peak[plan->map[i]] = std::max(peak[plan->map[i]], av[i]);
  std::vector<double> acc(n_out, 0.0);
  for (std::size_t i = 0; i < av.size(); ++i) acc[plan->map[i]] += std::exp(av[i] - peak[plan->map[i]]);
  std::vector<double> out(n_out);
  for (std::size_t o = 0; o < n_out; ++o) out[o] = peak[o] + std::log(acc[o]);
  return make_result(
      plan->out_shape, std::move(out), {a},
      [plan](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t i = 0; i < in.value.size(); ++i) {
          const std::size_t o = plan->map[i];
          in.grad[i] += self.grad[o] * std::exp(in.value[i] - self.value[o]);
        }
      },
      "logsumexp");
}

// ------------------------------------------------------------------- shape

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw DimensionError("reshape: " + shape_str(a.shape()) + " -> " + shape_str(shape) + " changes element count");
  }
  return make_result(
      std::move(shape), a.to_vector(), {a},
      [](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i];
      },
      "reshape");
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Shape& shape = a.shape();
  if (axis >= shape.size()) throw DimensionError("slice: axis " + std::to_string(axis) + " invalid for " + shape_str(shape));
  if (begin >= end || end > shape[axis]) {
    throw DimensionError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) + ") invalid for axis " +
                         std::to_string(axis) + " of " + shape_str(shape));
  }
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t extent = shape[axis];
  const std::size_t width = end - begin;
  Shape out_shape = shape;
  out_shape[axis] = width;
  std::vector<double> out(outer * width * inner);
  const auto av = a.data();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(av.begin() + static_cast<std::ptrdiff_t>((o * extent + begin) * inner), width * inner,
                out.begin() + static_cast<std::ptrdiff_t>(o * width * inner));
  }
  return make_result(
      std::move(out_shape), std::move(out), {a},
      [outer, extent, begin, width, inner](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t o = 0; o < outer; ++o) {
          const double* g = self.grad.data() + o * width * inner;
          double* dst = in.grad.data() + (o * extent + begin) * inner;
          for (std::size_t j = 0; j < width * inner; ++j) dst[j] += g[j];
        }
      },
      "slice");
}

// ------------------------------------------------------------------ conv1d

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, const Conv1dOptions& opt) {
  if (kernel < 1 || opt.stride < 1 || opt.dilation < 1) {
    throw ParameterError("conv1d: kernel, stride and dilation must be >= 1");
  }
  const std::size_t span = opt.dilation * (kernel - 1) + 1;
  if (length + 2 * opt.padding < span) {
    throw DimensionError("conv1d: padded length " + std::to_string(length + 2 * opt.padding) +
                         " shorter than dilated kernel span " + std::to_string(span));
  }
  return (length + 2 * opt.padding - span) / opt.stride + 1;
}

namespace {

// C[M,N] += A[M,K] * B[K,N], all row-major with the given leading strides.
void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda, const double* b,
              std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * ldc;
    const double* ai = a + i * lda;
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      const double a0 = ai[p];
      const double a1 = ai[p + 1];
      const double a2 = ai[p + 2];
      const double a3 = ai[p + 3];
      const double* b0 = b + p * ldb;
      const double* b1 = b0 + ldb;
      const double* b2 = b1 + ldb;
      const double* b3 = b2 + ldb;
      for (std::size_t j = 0; j < n; ++j) ci[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
    }
    for (; p < k; ++p) {
      const double ap = ai[p];
      const double* bp = b + p * ldb;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ap * bp[j];
    }
  }
}

struct ConvGeometry {
  std::size_t c_in;
  std::size_t length;
  std::size_t k_len;
  std::size_t out_len;
  std::size_t stride;
  std::size_t dilation;
  std::ptrdiff_t padding;

  std::size_t rows() const { return c_in * k_len; }
  // Input position feeding output o through tap k, or -1 when it falls in the padding.
  std::ptrdiff_t source(std::size_t o, std::size_t k) const {
    const auto pos = static_cast<std::ptrdiff_t>(o * stride + k * dilation) - padding;
    return pos >= 0 && pos < static_cast<std::ptrdiff_t>(length) ? pos : -1;
  }
};

// col[(ci*K + k), o] = x[ci, o*stride + k*dilation - padding].
void im2col(const ConvGeometry& g, const double* x, double* col) {
  for (std::size_t ci = 0; ci < g.c_in; ++ci) {
    for (std::size_t k = 0; k < g.k_len; ++k) {
      double* row = col + (ci * g.k_len + k) * g.out_len;
      const double* xr = x + ci * g.length;
      for (std::size_t o = 0; o < g.out_len; ++o) {
        const auto pos = g.source(o, k);
        row[o] = pos >= 0 ? xr[pos] : 0.0;
      }
    }
  }
}

// Transposed layout colT[o, (ci*K + k)].
void im2col_t(const ConvGeometry& g, const double* x, double* colt) {
  const std::size_t rows = g.rows();
  for (std::size_t ci = 0; ci < g.c_in; ++ci) {
    const double* xr = x + ci * g.length;
    for (std::size_t k = 0; k < g.k_len; ++k) {
      const std::size_t r = ci * g.k_len + k;
      for (std::size_t o = 0; o < g.out_len; ++o) {
        const auto pos = g.source(o, k);
        colt[o * rows + r] = pos >= 0 ? xr[pos] : 0.0;
      }
    }
  }
}

void col2im_acc(const ConvGeometry& g, const double* col, double* gx) {
  for (std::size_t ci = 0; ci < g.c_in; ++ci) {
    for (std::size_t k = 0; k < g.k_len; ++k) {
      const double* row = col + (ci * g.k_len + k) * g.out_len;
      double* gr = gx + ci * g.length;
      for (std::size_t o = 0; o < g.out_len; ++o) {
        const auto pos = g.source(o, k);
        if (pos >= 0) gr[pos] += row[o];
      }
    }
  }
}

}  // namespace

Tensor conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias, const Conv1dOptions& opt) {
  check_rank(input, 3, "conv1d", "input");
  check_rank(kernel, 3, "conv1d", "kernel");
  const std::size_t batch = input.dim(0);
  const std::size_t c_in = input.dim(1);
  const std::size_t length = input.dim(2);
  const std::size_t c_out = kernel.dim(0);
  const std::size_t k_len = kernel.dim(2);
  if (kernel.dim(1) != c_in) {
    throw DimensionError("conv1d: input channels (axis 1 of input) = " + std::to_string(c_in) +
                         " but kernel axis 1 = " + std::to_string(kernel.dim(1)));
  }
  const bool has_bias = bias.defined();
  if (has_bias && (bias.rank() != 1 || bias.dim(0) != c_out)) {
    throw DimensionError("conv1d: bias shape " + shape_str(bias.shape()) + " does not match kernel axis 0 = " +
                         std::to_string(c_out));
  }
  const std::size_t out_len = conv1d_output_length(length, k_len, opt);
  const ConvGeometry geo{c_in, length, k_len, out_len, opt.stride, opt.dilation,
                         static_cast<std::ptrdiff_t>(opt.padding)};
  const std::size_t rows = geo.rows();

  std::vector<double> out(batch * c_out * out_len, 0.0);
  std::vector<double> col(rows * out_len);
  const double* x = input.data().data();
  const double* w = kernel.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    double* y = out.data() + b * c_out * out_len;
    if (has_bias) {
      for (std::size_t co = 0; co < c_out; ++co) std::fill(y + co * out_len, y + (co + 1) * out_len, bias.data()[co]);
    }
    im2col(geo, x + b * c_in * length, col.data());
    gemm_acc(c_out, out_len, rows, w, rows, col.data(), out_len, y, out_len);
  }

  std::vector<Tensor> inputs{input, kernel};
  if (has_bias) inputs.push_back(bias);
  return make_result(
      {batch, c_out, out_len}, std::move(out), std::move(inputs),
      [=](Node& self) {
        Node& nx = *self.inputs[0];
        Node& nw = *self.inputs[1];
        Node* nb = has_bias ? self.inputs[2].get() : nullptr;
        const double* g = self.grad.data();
        std::vector<double> wt;
        if (nx.requires_grad) {
          wt.resize(rows * c_out);
          for (std::size_t co = 0; co < c_out; ++co) {
            for (std::size_t r = 0; r < rows; ++r) wt[r * c_out + co] = nw.value[co * rows + r];
          }
        }
        std::vector<double> buf(rows * out_len);
        for (std::size_t b = 0; b < batch; ++b) {
          const double* gy = g + b * c_out * out_len;
          if (nb && nb->requires_grad) {
            for (std::size_t co = 0; co < c_out; ++co) {
              double acc = 0.0;
              for (std::size_t o = 0; o < out_len; ++o) acc += gy[co * out_len + o];
              nb->grad[co] += acc;
            }
          }
          if (nw.requires_grad) {
            im2col_t(geo, nx.value.data() + b * c_in * length, buf.data());
            gemm_acc(c_out, rows, out_len, gy, out_len, buf.data(), rows, nw.grad.data(), rows);
          }
          if (nx.requires_grad) {
            std::fill(buf.begin(), buf.end(), 0.0);
            gemm_acc(rows, out_len, c_out, wt.data(), c_out, gy, out_len, buf.data(), out_len);
            col2im_acc(geo, buf.data(), nx.grad.data() + b * c_in * length);
          }
        }
      },
      "conv1d");
}

// ------------------------------------------------------------------ linear

Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  check_rank(input, 2, "linear", "input");
  check_rank(weight, 2, "linear", "weight");
  const std::size_t batch = input.dim(0);
  const std::size_t n_in = input.dim(1);
  const std::size_t n_out = weight.dim(0);
  if (weight.dim(1) != n_in) {
    throw DimensionError("linear: input axis 1 = " + std::to_string(n_in) + " but weight axis 1 = " +
                         std::to_string(weight.dim(1)));
  }
  const bool has_bias = bias.defined();
  if (has_bias && (bias.rank() != 1 || bias.dim(0) != n_out)) {
    throw DimensionError("linear: bias shape " + shape_str(bias.shape()) + " does not match weight axis 0 = " +
                         std::to_string(n_out));
  }
  std::vector<double> out(batch * n_out);
  const double* x = input.data().data();
  const double* w = weight.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t m = 0; m < n_out; ++m) {
      double acc = has_bias ? bias.data()[m] : 0.0;
      const double* xr = x + b * n_in;
      const double* wr = w + m * n_in;
      for (std::size_t n = 0; n < n_in; ++n) acc += xr[n] * wr[n];
      out[b * n_out + m] = acc;
    }
  }
  std::vector<Tensor> inputs{input, weight};
  if (has_bias) inputs.push_back(bias);
  return make_result(
      {batch, n_out}, std::move(out), std::move(inputs),
      [=](Node& self) {
        Node& nx = *self.inputs[0];
        Node& nw = *self.inputs[1];
        Node* nb = has_bias ? self.inputs[2].get() : nullptr;
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t m = 0; m < n_out; ++m) {
            const double g = self.grad[b * n_out + m];
            if (g == 0.0) continue;
            if (nb && nb->requires_grad) nb->grad[m] += g;
            const double* xr = nx.value.data() + b * n_in;
            const double* wr = nw.value.data() + m * n_in;
            if (nw.requires_grad) {
              double* gw = nw.grad.data() + m * n_in;
              for (std::size_t n = 0; n < n_in; ++n) gw[n] += g * xr[n];
            }
            if (nx.requires_grad) {
              double* gx = nx.grad.data() + b * n_in;
              for (std::size_t n = 0; n < n_in; ++n) gx[n] += g * wr[n];
            }
          }
        }
      },
      "linear");
}

// --------------------------------------------------------------- groupnorm

Tensor groupnorm(const Tensor& input, std::size_t groups, const Tensor& gamma, const Tensor& beta, double eps) {
  check_rank(input, 3, "groupnorm", "input");
  const std::size_t batch = input.dim(0);
  const std::size_t channels = input.dim(1);
  const std::size_t length = input.dim(2);
  if (groups == 0 || channels % groups != 0) {
    throw ParameterError("groupnorm: " + std::to_string(channels) + " channels not divisible by " +
                         std::to_string(groups) + " groups");
  }
  if (gamma.numel() != channels || beta.numel() != channels) {
    throw DimensionError("groupnorm: gamma/beta must have " + std::to_string(channels) + " entries");
  }
  const std::size_t per_group = channels / groups;
  const std::size_t group_size = per_group * length;
  auto xhat = std::make_shared<std::vector<double>>(input.numel());
  auto inv_std = std::make_shared<std::vector<double>>(batch * groups);
  std::vector<double> out(input.numel());
  const auto x = input.data();
  const auto gm = gamma.data();
  const auto bt = beta.data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t base = (b * channels + g * per_group) * length;
      double mu = 0.0;
      for (std::size_t i = 0; i < group_size; ++i) mu += x[base + i];
      mu /= static_cast<double>(group_size);
      double var = 0.0;
      for (std::size_t i = 0; i < group_size; ++i) {
        const double d = x[base + i] - mu;
        var += d * d;
      }
      var /= static_cast<double>(group_size);
      const double is = 1.0 / std::sqrt(var + eps);
      (*inv_std)[b * groups + g] = is;
      for (std::size_t c = 0; c < per_group; ++c) {
        const std::size_t ch = g * per_group + c;
        for (std::size_t l = 0; l < length; ++l) {
          const std::size_t i = base + c * length + l;
          const double xh = (x[i] - mu) * is;
          (*xhat)[i] = xh;
          out[i] = gm[ch] * xh + bt[ch];
        }
      }
    }
  }
  return make_result(
      input.shape(), std::move(out), {input, gamma, beta},
      [=](Node& self) {
        Node& nx = *self.inputs[0];
        Node& ng = *self.inputs[1];
        Node& nb = *self.inputs[2];
        const double inv_n = 1.0 / static_cast<double>(group_size);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t base = (b * channels + g * per_group) * length;
            double sum_dxh = 0.0;
            double sum_dxh_xh = 0.0;
            for (std::size_t c = 0; c < per_group; ++c) {
              const std::size_t ch = g * per_group + c;
              double acc_g = 0.0;
              double acc_b = 0.0;
              for (std::size_t l = 0; l < length; ++l) {
                const std::size_t i = base + c * length + l;
                const double gy = self.grad[i];
                const double xh = (*xhat)[i];
                acc_g += gy * xh;
                acc_b += gy;
                const double dxh = gy * ng.value[ch];
                sum_dxh += dxh;
                sum_dxh_xh += dxh * xh;
              }
              if (ng.requires_grad) ng.grad[ch] += acc_g;
              if (nb.requires_grad) nb.grad[ch] += acc_b;
            }
            if (!nx.requires_grad) continue;
            const double is = (*inv_std)[b * groups + g];
            const double mean_dxh = sum_dxh * inv_n;
            const double mean_dxh_xh = sum_dxh_xh * inv_n;
            for (std::size_t c = 0; c < per_group; ++c) {
              const std::size_t ch = g * per_group + c;
              for (std::size_t l = 0; l < length; ++l) {
                const std::size_t i = base + c * length + l;
                const double dxh = self.grad[i] * ng.value[ch];
                nx.grad[i] += is * (dxh - mean_dxh - (*xhat)[i] * mean_dxh_xh);
              }
            }
          }
        }
      },
      "groupnorm");
}

// -------------------------------------------------------------------- rdft

Spectrum rdft(const Tensor& input) {
  check_rank(input, 2, "rdft", "input");
  const std::size_t batch = input.dim(0);
  const std::size_t length = input.dim(1);
  if (length < 2) throw DimensionError("rdft: length must be >= 2");
  const std::size_t bins = dft::num_bins(length);
  // Packed as [B, 2, F]: real then imaginary parts.
  std::vector<double> packed(batch * 2 * bins);
  const auto x = input.data();
  for (std::size_t b = 0; b < batch; ++b) {
    std::span<double> re(packed.data() + b * 2 * bins, bins);
    std::span<double> im(packed.data() + b * 2 * bins + bins, bins);
    dft::forward_real(x.subspan(b * length, length), re, im);
  }
  Tensor both = make_result(
      {batch, 2, bins}, std::move(packed), {input},
      [batch, length, bins](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t b = 0; b < batch; ++b) {
          std::span<const double> gre(self.grad.data() + b * 2 * bins, bins);
          std::span<const double> gim(self.grad.data() + b * 2 * bins + bins, bins);
          dft::adjoint_real(gre, gim, std::span<double>(in.grad.data() + b * length, length));
        }
      },
      "rdft");
  Spectrum spec;
  spec.real = reshape(slice(both, 1, 0, 1), {batch, bins});
  spec.imag = reshape(slice(both, 1, 1, 2), {batch, bins});
  return spec;
}

// --------------------------------------------------------- resample_linear

Tensor resample_linear(const Tensor& input, std::size_t out_len) {
  check_rank(input, 3, "resample_linear", "input");
  if (out_len < 1) throw ParameterError("resample_linear: output length must be >= 1");
  const std::size_t rows = input.dim(0) * input.dim(1);
  const std::size_t in_len = input.dim(2);
  Shape out_shape{input.dim(0), input.dim(1), out_len};
  if (out_len == in_len) {
    return make_result(
        std::move(out_shape), input.to_vector(), {input},
        [](Node& self) {
          Node& in = *self.inputs[0];
          for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i];
        },
        "resample_linear");
  }
  auto left = std::make_shared<std::vector<std::size_t>>(out_len);
  auto frac = std::make_shared<std::vector<double>>(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    double pos = 0.0;
    if (out_len > 1) pos = static_cast<double>(i) * static_cast<double>(in_len - 1) / static_cast<double>(out_len - 1);
    auto i0 = static_cast<std::size_t>(std::floor(pos));
    if (i0 >= in_len - 1) i0 = in_len >= 2 ? in_len - 2 : 0;
    (*left)[i] = i0;
    (*frac)[i] = in_len >= 2 ? pos - static_cast<double>(i0) : 0.0;
  }
  std::vector<double> out(rows * out_len);
  const auto x = input.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * in_len;
    for (std::size_t i = 0; i < out_len; ++i) {
      const std::size_t i0 = (*left)[i];
      const double f = (*frac)[i];
      const double hi = in_len >= 2 ? xr[i0 + 1] : xr[i0];
      out[r * out_len + i] = (1.0 - f) * xr[i0] + f * hi;
    }
  }
  return make_result(
      std::move(out_shape), std::move(out), {input},
      [rows, in_len, out_len, left, frac](Node& self) {
        Node& in = *self.inputs[0];
        for (std::size_t r = 0; r < rows; ++r) {
          double* gx = in.grad.data() + r * in_len;
          for (std::size_t i = 0; i < out_len; ++i) {
            const double g = self.grad[r * out_len + i];
            const std::size_t i0 = (*left)[i];
            const double f = (*frac)[i];
            gx[i0] += (1.0 - f) * g;
            if (in_len >= 2) gx[i0 + 1] += f * g;
          }
        }
      },
      "resample_linear");
}

}  // namespace vampdiff::nc
