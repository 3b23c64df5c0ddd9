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

// Brute-force reference implementations used by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vstgan/tensor.hpp"

namespace oracle {

// Direct zero-padded cross-correlation, NCHW input, [out, in, k, k] weight.
inline vst::Tensor conv2d(const vst::Tensor& x, const vst::Tensor& w, std::size_t stride) {
  const std::size_t n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t co = w.dim(0), k = w.dim(2);
  const long pad = static_cast<long>(k / 2);
  const std::size_t oh = (h + stride - 1) / stride, ow = (wd + stride - 1) / stride;
  vst::Tensor out({n, co, oh, ow});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t o = 0; o < co; ++o)
      for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
          double acc = 0.0;
          for (std::size_t c = 0; c < ci; ++c)
            for (std::size_t u = 0; u < k; ++u)
              for (std::size_t v = 0; v < k; ++v) {
                const long y = static_cast<long>(i * stride + u) - pad;
                const long xx = static_cast<long>(j * stride + v) - pad;
                if (y < 0 || xx < 0 || y >= static_cast<long>(h) || xx >= static_cast<long>(wd)) continue;
                acc += x[((b * ci + c) * h + y) * wd + xx] * w[((o * ci + c) * k + u) * k + v];
              }
          out[((b * co + o) * oh + i) * ow + j] = acc;
        }
  return out;
}

inline double sq_dist(const vst::Tensor& a, std::size_t i, const vst::Tensor& b, std::size_t j) {
  const std::size_t d = a.dim(1);
  double s = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double t = a[i * d + c] - b[j * d + c];
    s += t * t;
  }
  return s;
}

// Median of the nonzero pairwise distances among the pooled rows; 1 if none.
inline double median_bandwidth(const vst::Tensor& a, const vst::Tensor& b) {
  std::vector<const vst::Tensor*> owner;
  std::vector<std::size_t> row;
  for (std::size_t i = 0; i < a.dim(0); ++i) owner.push_back(&a), row.push_back(i);
  for (std::size_t i = 0; i < b.dim(0); ++i) owner.push_back(&b), row.push_back(i);
  std::vector<double> dists;
  for (std::size_t p = 0; p < owner.size(); ++p)
    for (std::size_t q = p + 1; q < owner.size(); ++q) {
      const double d = std::sqrt(sq_dist(*owner[p], row[p], *owner[q], row[q]));
      if (d > 0.0) dists.push_back(d);
    }
  if (dists.empty()) return 1.0;
  std::sort(dists.begin(), dists.end());
  const std::size_t m = dists.size();
  return m % 2 ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
}

// Biased squared MMD by explicit double loops over the kernel sums.
inline double mmd2(const vst::Tensor& a, const vst::Tensor& b, double bw) {
  auto k = [bw](double d2) { return std::exp(-d2 / (2.0 * bw * bw)); };
  const std::size_t n = a.dim(0), m = b.dim(0);
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) xx += k(sq_dist(a, i, a, j));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) yy += k(sq_dist(b, i, b, j));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) xy += k(sq_dist(a, i, b, j));
  return xx / double(n * n) + yy / double(m * m) - 2.0 * xy / double(n * m);
}

// Two-pass population standardization of the whole matrix.
inline std::vector<double> standardize(const std::vector<double>& x, double eps = 1e-8) {
  double mu = 0.0;
  for (double v : x) mu += v;
  mu /= double(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mu) * (v - mu);
  const double sigma = std::sqrt(var / double(x.size()));
  std::vector<double> out;
  for (double v : x) out.push_back((v - mu) / (sigma + eps));
  return out;
}

}  // namespace oracle
