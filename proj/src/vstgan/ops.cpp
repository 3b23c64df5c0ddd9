/* Copyright (c) 2026 The vstgan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "vstgan/ops.hpp"

#include <Eigen/Core>
#include <cmath>
#include <memory>

namespace vst {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

Graph& graph_of(Var v) {
  if (v.graph == nullptr) throw Error(ErrorKind::kInvalidArgument, "unbound variable");
  return *v.graph;
}

// Folds the branch taken by each element (two bits, 32 per word) into the
// graph's signature.
template <class B>
void note_branches(Var x, B branch) {
  Graph& g = graph_of(x);
  std::uint64_t word = 0;
  std::size_t filled = 0;
  for (double v : x.value().data()) {
    word = (word << 2) | static_cast<std::uint64_t>(branch(v));
    if (++filled == 32) {
      g.note_branch(word);
      word = 0;
      filled = 0;
    }
  }
  g.note_branch(word ^ (static_cast<std::uint64_t>(filled) << 62));
}

template <class F, class DF>
Var unary(const char* name, Var x, F f, DF df) {
  const Tensor& xv = x.value();
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) y[i] = f(xv[i]);
  return graph_of(x).record(name, std::move(y), {x}, [x, df](const Graph::BackwardContext& ctx) {
    Tensor* gx = ctx.inputs[0];
    if (gx == nullptr) return;
    const Tensor& xv = x.value();
    for (std::size_t i = 0; i < xv.size(); ++i) (*gx)[i] += ctx.grad[i] * df(xv[i]);
  });
}

void require_same(Var a, Var b, const char* op) {
  if (a.graph != b.graph) throw Error(ErrorKind::kInvalidArgument, std::string(op) + ": operands from different graphs");
  require_same_shape(a.value(), b.value(), op);
}

// Geometry of a forward convolution from an image [n, in, h, w] to [n, out, oh, ow].
struct ConvGeometry {
  std::size_t n, in, h, w, out, k, stride, pad, oh, ow;
  std::size_t patch() const { return in * k * k; }
  std::size_t pixels() const { return oh * ow; }
};

ConvGeometry make_geometry(const Shape& image, const Shape& weight, std::size_t stride, const char* op) {
  if (image.size() != 4) {
    throw Error(ErrorKind::kShapeMismatch, std::string(op) + ": expected NCHW image, got " + to_string(image));
  }
  if (weight.size() != 4 || weight[2] != weight[3] || weight[2] % 2 == 0) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(op) + ": kernel must be [out, in, k, k] with odd k, got " + to_string(weight));
  }
  if (stride == 0) throw Error(ErrorKind::kInvalidArgument, std::string(op) + ": stride must be >= 1");
  ConvGeometry g{};
  g.n = image[0];
  g.in = image[1];
  g.h = image[2];
  g.w = image[3];
  g.out = weight[0];
  g.k = weight[2];
  g.stride = stride;
  g.pad = g.k / 2;
  g.oh = conv_output_extent(g.h, g.k, stride);
  g.ow = conv_output_extent(g.w, g.k, stride);
  if (weight[1] != g.in) {
    throw Error(ErrorKind::kShapeMismatch, std::string(op) + ": image channels " + std::to_string(g.in) +
                                               " != kernel in-channels " + std::to_string(weight[1]));
  }
  return g;
}

void im2col(const double* image, const ConvGeometry& g, double* col) {
  const std::size_t pixels = g.pixels();
  for (std::size_t c = 0; c < g.in; ++c) {
    for (std::size_t di = 0; di < g.k; ++di) {
      for (std::size_t dj = 0; dj < g.k; ++dj) {
        double* dst = col + ((c * g.k + di) * g.k + dj) * pixels;
        for (std::size_t i = 0; i < g.oh; ++i) {
          const long ii = static_cast<long>(i * g.stride + di) - static_cast<long>(g.pad);
          double* row = dst + i * g.ow;
          if (ii < 0 || ii >= static_cast<long>(g.h)) {
            std::fill(row, row + g.ow, 0.0);
            continue;
          }
          const double* src = image + (c * g.h + static_cast<std::size_t>(ii)) * g.w;
          for (std::size_t j = 0; j < g.ow; ++j) {
            const long jj = static_cast<long>(j * g.stride + dj) - static_cast<long>(g.pad);
            row[j] = (jj < 0 || jj >= static_cast<long>(g.w)) ? 0.0 : src[jj];
          }
        }
      }
    }
  }
}

// Adjoint of im2col; accumulates into `image`.
void col2im(const double* col, const ConvGeometry& g, double* image) {
  const std::size_t pixels = g.pixels();
  for (std::size_t c = 0; c < g.in; ++c) {
    for (std::size_t di = 0; di < g.k; ++di) {
      for (std::size_t dj = 0; dj < g.k; ++dj) {
        const double* src = col + ((c * g.k + di) * g.k + dj) * pixels;
        for (std::size_t i = 0; i < g.oh; ++i) {
          const long ii = static_cast<long>(i * g.stride + di) - static_cast<long>(g.pad);
          if (ii < 0 || ii >= static_cast<long>(g.h)) continue;
          double* dst = image + (c * g.h + static_cast<std::size_t>(ii)) * g.w;
          const double* row = src + i * g.ow;
          for (std::size_t j = 0; j < g.ow; ++j) {
            const long jj = static_cast<long>(j * g.stride + dj) - static_cast<long>(g.pad);
            if (jj >= 0 && jj < static_cast<long>(g.w)) dst[jj] += row[j];
          }
        }
      }
    }
  }
}

void check_bias(const Tensor* bias, std::size_t channels, const char* op) {
  if (bias != nullptr && (bias->rank() != 1 || bias->dim(0) != channels)) {
    throw Error(ErrorKind::kShapeMismatch, std::string(op) + ": bias must be [" + std::to_string(channels) +
                                               "], got " + to_string(bias->shape()));
  }
}

// y[n] = W * im2col(x[n]) (+ b)
void conv_forward_into(const Tensor& x, const Tensor& weight, const Tensor* bias, const ConvGeometry& g,
                       Tensor& y) {
  std::vector<double> col(g.patch() * g.pixels());
  const ConstMatMap wm(weight.raw(), g.out, g.patch());
  for (std::size_t n = 0; n < g.n; ++n) {
    im2col(x.raw() + n * g.in * g.h * g.w, g, col.data());
    MatMap ym(y.raw() + n * g.out * g.pixels(), g.out, g.pixels());
    ym.noalias() = wm * ConstMatMap(col.data(), g.patch(), g.pixels());
    if (bias != nullptr) {
      for (std::size_t o = 0; o < g.out; ++o) ym.row(o).array() += (*bias)[o];
    }
  }
}

// image[n] += col2im(W^T * y[n])
void conv_adjoint_into(const Tensor& y, const Tensor& weight, const ConvGeometry& g, Tensor& image) {
  std::vector<double> col(g.patch() * g.pixels());
  const ConstMatMap wm(weight.raw(), g.out, g.patch());
  for (std::size_t n = 0; n < g.n; ++n) {
    MatMap cm(col.data(), g.patch(), g.pixels());
    cm.noalias() = wm.transpose() * ConstMatMap(y.raw() + n * g.out * g.pixels(), g.out, g.pixels());
    col2im(col.data(), g, image.raw() + n * g.in * g.h * g.w);
  }
}

// dW += sum_n y[n] * im2col(image[n])^T
void conv_weight_grad(const Tensor& image, const Tensor& y, const ConvGeometry& g, Tensor& dw) {
  std::vector<double> col(g.patch() * g.pixels());
  MatMap dwm(dw.raw(), g.out, g.patch());
  for (std::size_t n = 0; n < g.n; ++n) {
    im2col(image.raw() + n * g.in * g.h * g.w, g, col.data());
    dwm.noalias() += ConstMatMap(y.raw() + n * g.out * g.pixels(), g.out, g.pixels()) *
                     ConstMatMap(col.data(), g.patch(), g.pixels()).transpose();
  }
}

void channel_sum_into(const Tensor& t, Tensor& out) {
  const std::size_t n = t.dim(0), c = t.dim(1), plane = t.dim(2) * t.dim(3);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* p = t.raw() + (b * c + ch) * plane;
      double s = 0.0;
      for (std::size_t i = 0; i < plane; ++i) s += p[i];
      out[ch] += s;
    }
  }
}

std::pair<std::size_t, std::size_t> outer_inner(const Shape& s, std::size_t axis) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  return {outer, inner};
}

}  // namespace

Var add(Var a, Var b) {
  require_same(a, b, "add");
  Tensor y = a.value();
  y += b.value();
  return graph_of(a).record("add", std::move(y), {a, b}, [](const Graph::BackwardContext& ctx) {
    if (ctx.inputs[0]) *ctx.inputs[0] += ctx.grad;
    if (ctx.inputs[1]) *ctx.inputs[1] += ctx.grad;
  });
}

Var sub(Var a, Var b) {
  require_same(a, b, "subtract");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] - bv[i];
  return graph_of(a).record("subtract", std::move(y), {a, b}, [](const Graph::BackwardContext& ctx) {
    if (ctx.inputs[0]) *ctx.inputs[0] += ctx.grad;
    if (Tensor* gb = ctx.inputs[1]) {
      for (std::size_t i = 0; i < gb->size(); ++i) (*gb)[i] -= ctx.grad[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same(a, b, "multiply");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  Tensor y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] * bv[i];
  return graph_of(a).record("multiply", std::move(y), {a, b}, [a, b](const Graph::BackwardContext& ctx) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (Tensor* ga = ctx.inputs[0]) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += ctx.grad[i] * bv[i];
    }
    if (Tensor* gb = ctx.inputs[1]) {
      for (std::size_t i = 0; i < gb->size(); ++i) (*gb)[i] += ctx.grad[i] * av[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tensor y = a.value();
  y *= factor;
  return graph_of(a).record("scalar-multiply", std::move(y), {a}, [factor](const Graph::BackwardContext& ctx) {
    if (Tensor* ga = ctx.inputs[0]) {
      for (std::size_t i = 0; i < ga->size(); ++i) (*ga)[i] += factor * ctx.grad[i];
    }
  });
}

Var add_scalar(Var a, double offset) {
  Tensor y = a.value();
  for (double& v : y.data()) v += offset;
  return graph_of(a).record("add", std::move(y), {a}, [](const Graph::BackwardContext& ctx) {
    if (ctx.inputs[0]) *ctx.inputs[0] += ctx.grad;
  });
}

Var abs(Var x) {
  note_branches(x, [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? 2 : 0); });
  return unary(
      "abs", x, [](double v) { return std::abs(v); },
      [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Var square(Var x) {
  return unary(
      "square", x, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
}

Var sqrt(Var x) {
  for (double v : x.value().data()) {
    if (v < 0.0) throw Error(ErrorKind::kNonFinite, "op 'sqrt' received a negative input");
  }
  return unary(
      "sqrt", x, [](double v) { return std::sqrt(v); }, [](double v) { return 0.5 / std::sqrt(v); });
}

Var exp(Var x) {
  return unary(
      "exp", x, [](double v) { return std::exp(v); }, [](double v) { return std::exp(v); });
}

Var tanh(Var x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); },
      [](double v) {
        const double t = std::tanh(v);
        return 1.0 - t * t;
      });
}

namespace {
double logistic(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}
}  // namespace

Var sigmoid(Var x) {
  return unary("sigmoid", x, logistic, [](double v) {
    const double s = logistic(v);
    return s * (1.0 - s);
  });
}

Var relu(Var x) {
  note_branches(x, [](double v) { return v > 0.0 ? 1 : 0; });
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(Var x, double slope) {
  note_branches(x, [](double v) { return v > 0.0 ? 1 : 0; });
  return unary(
      "leaky-relu", x, [slope](double v) { return v > 0.0 ? v : slope * v; },
      [slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

namespace {
double accumulate(const Tensor& t) {
  long double s = 0.0L;
  for (double v : t.data()) s += v;
  return static_cast<double>(s);
}
}  // namespace

Var sum(Var x) {
  const double s = accumulate(x.value());
  return graph_of(x).record("sum", Tensor::scalar(s), {x}, [](const Graph::BackwardContext& ctx) {
    if (Tensor* gx = ctx.inputs[0]) {
      for (double& v : gx->data()) v += ctx.grad[0];
    }
  });
}

Var mean(Var x) {
  const double n = static_cast<double>(x.value().size());
  const double s = accumulate(x.value());
  return graph_of(x).record("mean", Tensor::scalar(s / n), {x}, [n](const Graph::BackwardContext& ctx) {
    if (Tensor* gx = ctx.inputs[0]) {
      const double g = ctx.grad[0] / n;
      for (double& v : gx->data()) v += g;
    }
  });
}

std::size_t conv_output_extent(std::size_t extent, std::size_t kernel, std::size_t stride) {
  const std::size_t pad = kernel / 2;
  return (extent + 2 * pad - kernel) / stride + 1;
}

Tensor conv2d_forward(const Tensor& x, const Tensor& weight, const Tensor* bias, std::size_t stride) {
  const ConvGeometry g = make_geometry(x.shape(), weight.shape(), stride, "conv2d");
  check_bias(bias, g.out, "conv2d");
  Tensor y(Shape{g.n, g.out, g.oh, g.ow});
  conv_forward_into(x, weight, bias, g, y);
  return y;
}

Tensor conv2d_transpose_forward(const Tensor& x, const Tensor& weight, const Tensor* bias, std::size_t stride,
                                std::size_t out_h, std::size_t out_w) {
  if (x.rank() != 4) {
    throw Error(ErrorKind::kShapeMismatch, "conv2d-transpose: expected NCHW input, got " + to_string(x.shape()));
  }
  const ConvGeometry g =
      make_geometry(Shape{x.dim(0), weight.rank() == 4 ? weight.dim(1) : 0, out_h, out_w}, weight.shape(), stride,
                    "conv2d-transpose");
  if (x.dim(1) != g.out || x.dim(2) != g.oh || x.dim(3) != g.ow) {
    throw Error(ErrorKind::kShapeMismatch, "conv2d-transpose: input " + to_string(x.shape()) +
                                               " does not match kernel " + to_string(weight.shape()) +
                                               " for output " + std::to_string(out_h) + "x" +
                                               std::to_string(out_w));
  }
  check_bias(bias, g.in, "conv2d-transpose");
  Tensor y(Shape{g.n, g.in, g.h, g.w});
  conv_adjoint_into(x, weight, g, y);
  if (bias != nullptr) {
    const std::size_t plane = g.h * g.w;
    for (std::size_t n = 0; n < g.n; ++n) {
      for (std::size_t c = 0; c < g.in; ++c) {
        double* p = y.raw() + (n * g.in + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) p[i] += (*bias)[c];
      }
    }
  }
  return y;
}

Var conv2d(Var x, Var weight, std::optional<Var> bias, std::size_t stride) {
  Tensor y = conv2d_forward(x.value(), weight.value(), bias ? &bias->value() : nullptr, stride);
  std::vector<Var> inputs{x, weight};
  if (bias) inputs.push_back(*bias);
  return graph_of(x).record("conv2d", std::move(y), std::move(inputs), [x, weight, stride](const Graph::BackwardContext& ctx) {
    const Tensor& xv = x.value();
    const Tensor& wv = weight.value();
    const ConvGeometry g = make_geometry(xv.shape(), wv.shape(), stride, "conv2d");
    if (Tensor* gx = ctx.inputs[0]) conv_adjoint_into(ctx.grad, wv, g, *gx);
    if (Tensor* gw = ctx.inputs[1]) conv_weight_grad(xv, ctx.grad, g, *gw);
    if (ctx.inputs.size() > 2 && ctx.inputs[2]) channel_sum_into(ctx.grad, *ctx.inputs[2]);
  });
}

Var conv2d_transpose(Var x, Var weight, std::optional<Var> bias, std::size_t stride, std::size_t out_h,
                     std::size_t out_w) {
  Tensor y = conv2d_transpose_forward(x.value(), weight.value(), bias ? &bias->value() : nullptr, stride, out_h,
                                      out_w);
  std::vector<Var> inputs{x, weight};
  if (bias) inputs.push_back(*bias);
  return graph_of(x).record(
      "conv2d-transpose", std::move(y), std::move(inputs), [x, weight, stride](const Graph::BackwardContext& ctx) {
        const Tensor& xv = x.value();
        const Tensor& wv = weight.value();
        const ConvGeometry g = make_geometry(ctx.grad.shape(), wv.shape(), stride, "conv2d-transpose");
        if (Tensor* gx = ctx.inputs[0]) {
          const Tensor back = conv2d_forward(ctx.grad, wv, nullptr, stride);
          *gx += back;
        }
        if (Tensor* gw = ctx.inputs[1]) conv_weight_grad(ctx.grad, xv, g, *gw);
        if (ctx.inputs.size() > 2 && ctx.inputs[2]) channel_sum_into(ctx.grad, *ctx.inputs[2]);
      });
}

Var batch_norm(Var x, Var gamma, Var beta, double eps) {
  const Tensor& xv = x.value();
  if (xv.rank() != 4) throw Error(ErrorKind::kShapeMismatch, "batch-norm: expected NCHW input, got " + to_string(xv.shape()));
  const std::size_t n = xv.dim(0), c = xv.dim(1), plane = xv.dim(2) * xv.dim(3);
  const Shape per_channel{c};
  if (gamma.value().shape() != per_channel || beta.value().shape() != per_channel) {
    throw Error(ErrorKind::kShapeMismatch, "batch-norm: gamma/beta must be [" + std::to_string(c) + "], got " +
                                               to_string(gamma.value().shape()) + " and " +
                                               to_string(beta.value().shape()));
  }
  const double count = static_cast<double>(n * plane);
  auto x_hat = std::make_shared<Tensor>(xv.shape());
  auto inv_std = std::make_shared<std::vector<double>>(c);
  Tensor y(xv.shape());
  for (std::size_t ch = 0; ch < c; ++ch) {
    double mu = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const double* p = xv.raw() + (b * c + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i) mu += p[i];
    }
    mu /= count;
    double var = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const double* p = xv.raw() + (b * c + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i) var += (p[i] - mu) * (p[i] - mu);
    }
    var /= count;
    const double inv = 1.0 / std::sqrt(var + eps);
    (*inv_std)[ch] = inv;
    const double g = gamma.value()[ch], bt = beta.value()[ch];
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        const double h = (xv[off + i] - mu) * inv;
        (*x_hat)[off + i] = h;
        y[off + i] = g * h + bt;
      }
    }
  }
  return graph_of(x).record(
      "batch-norm", std::move(y), {x, gamma, beta}, [x_hat, inv_std, gamma, n, c, plane, count](const Graph::BackwardContext& ctx) {
        const Tensor& gy = ctx.grad;
        for (std::size_t ch = 0; ch < c; ++ch) {
          double sum_g = 0.0, sum_gh = 0.0;
          for (std::size_t b = 0; b < n; ++b) {
            const std::size_t off = (b * c + ch) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
              sum_g += gy[off + i];
              sum_gh += gy[off + i] * (*x_hat)[off + i];
            }
          }
          if (Tensor* gg = ctx.inputs[1]) (*gg)[ch] += sum_gh;
          if (Tensor* gb = ctx.inputs[2]) (*gb)[ch] += sum_g;
          if (Tensor* gx = ctx.inputs[0]) {
            const double k = gamma.value()[ch] * (*inv_std)[ch] / count;
            for (std::size_t b = 0; b < n; ++b) {
              const std::size_t off = (b * c + ch) * plane;
              for (std::size_t i = 0; i < plane; ++i) {
                (*gx)[off + i] += k * (count * gy[off + i] - sum_g - (*x_hat)[off + i] * sum_gh);
              }
            }
          }
        }
      });
}

Var reshape(Var x, Shape shape) {
  Tensor y = x.value().reshaped(std::move(shape));
  return graph_of(x).record("reshape", std::move(y), {x}, [](const Graph::BackwardContext& ctx) {
    if (Tensor* gx = ctx.inputs[0]) {
      for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += ctx.grad[i];
    }
  });
}

Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t count) {
  const Tensor& xv = x.value();
  if (axis >= xv.rank()) {
    throw Error(ErrorKind::kShapeMismatch, "slice: axis " + std::to_string(axis) + " out of range for " +
                                               to_string(xv.shape()));
  }
  const std::size_t extent = xv.dim(axis);
  if (count == 0 || begin + count > extent) {
    throw Error(ErrorKind::kShapeMismatch, "slice: range [" + std::to_string(begin) + ", " +
                                               std::to_string(begin + count) + ") exceeds axis " +
                                               std::to_string(axis) + " extent " + std::to_string(extent));
  }
  const auto [outer, inner] = outer_inner(xv.shape(), axis);
  Shape out_shape = xv.shape();
  out_shape[axis] = count;
  Tensor y(out_shape);
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = xv.raw() + (o * extent + begin) * inner;
    std::copy(src, src + count * inner, y.raw() + o * count * inner);
  }
  return graph_of(x).record("slice", std::move(y), {x},
                            [outer, inner, extent, begin, count](const Graph::BackwardContext& ctx) {
                              Tensor* gx = ctx.inputs[0];
                              if (gx == nullptr) return;
                              for (std::size_t o = 0; o < outer; ++o) {
                                double* dst = gx->raw() + (o * extent + begin) * inner;
                                const double* src = ctx.grad.raw() + o * count * inner;
                                for (std::size_t i = 0; i < count * inner; ++i) dst[i] += src[i];
                              }
                            });
}

Var concat(const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) throw Error(ErrorKind::kInvalidArgument, "concat: no inputs");
  const Shape& first = parts.front().value().shape();
  if (axis >= first.size()) {
    throw Error(ErrorKind::kShapeMismatch, "concat: axis " + std::to_string(axis) + " out of range for " +
                                               to_string(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> extents;
  for (const Var& p : parts) {
    const Shape& s = p.value().shape();
    for (std::size_t d = 0; d < first.size(); ++d) {
      if (s.size() != first.size() || (d != axis && s[d] != first[d])) {
        throw Error(ErrorKind::kShapeMismatch, "concat: part shape " + to_string(s) + " incompatible with " +
                                                   to_string(first) + " along axis " + std::to_string(axis));
      }
    }
    extents.push_back(s[axis]);
    out_shape[axis] += s[axis];
  }
  const auto [outer, inner] = outer_inner(first, axis);
  const std::size_t total = out_shape[axis];
  Tensor y(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& pv = parts[k].value();
    for (std::size_t o = 0; o < outer; ++o) {
      const double* src = pv.raw() + o * extents[k] * inner;
      std::copy(src, src + extents[k] * inner, y.raw() + (o * total + offset) * inner);
    }
    offset += extents[k];
  }
  return graph_of(parts.front())
      .record("concat", std::move(y), parts, [extents, outer, inner, total](const Graph::BackwardContext& ctx) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < extents.size(); ++k) {
          if (Tensor* gk = ctx.inputs[k]) {
            for (std::size_t o = 0; o < outer; ++o) {
              const double* src = ctx.grad.raw() + (o * total + offset) * inner;
              double* dst = gk->raw() + o * extents[k] * inner;
              for (std::size_t i = 0; i < extents[k] * inner; ++i) dst[i] += src[i];
            }
          }
          offset += extents[k];
        }
      });
}

}  // namespace vst
