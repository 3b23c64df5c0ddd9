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

#include "vstgan/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace vst {
namespace {

using Color = std::array<double, 3>;

Color random_color(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

// Vertical gradient between two colors with a square of a third color.
Tensor square_frame(Rng& rng, std::size_t size) {
  const Color top = random_color(rng, 0.1, 0.5);
  const Color bottom = random_color(rng, 0.1, 0.5);
  const Color fill = random_color(rng, 0.6, 0.95);
  const std::size_t side = std::max<std::size_t>(2, size / 4);
  std::uniform_int_distribution<std::size_t> pos(0, size - side);
  const std::size_t r0 = pos(rng), c0 = pos(rng);
  Tensor f(Shape{3, size, size});
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < size; ++i) {
      const double t = size > 1 ? static_cast<double>(i) / static_cast<double>(size - 1) : 0.0;
      for (std::size_t j = 0; j < size; ++j) {
        const bool inside = i >= r0 && i < r0 + side && j >= c0 && j < c0 + side;
        f[(c * size + i) * size + j] = inside ? fill[c] : (1.0 - t) * top[c] + t * bottom[c];
      }
    }
  }
  return f;
}

// Sum of three random plane waves per channel, mapped into [0.1, 0.9].
Tensor texture_frame(Rng& rng, std::size_t size) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> freq(1, 3);
  Tensor f(Shape{3, size, size});
  const double n = static_cast<double>(size);
  for (std::size_t c = 0; c < 3; ++c) {
    std::array<double, 3> fx{}, fy{}, ph{};
    for (int k = 0; k < 3; ++k) {
      fx[k] = freq(rng);
      fy[k] = freq(rng);
      ph[k] = phase(rng);
    }
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) v += std::sin(2.0 * std::numbers::pi * (fx[k] * j + fy[k] * i) / n + ph[k]);
        f[(c * size + i) * size + j] = 0.5 + 0.4 * v / 3.0;
      }
    }
  }
  return f;
}

}  // namespace

FixtureKind parse_fixture_kind(std::string_view name) {
  if (name == "translating-square") return FixtureKind::kTranslatingSquare;
  if (name == "translating-texture") return FixtureKind::kTranslatingTexture;
  if (name == "static-plus-noise") return FixtureKind::kStaticPlusNoise;
  throw Error(ErrorKind::kInvalidArgument, "unknown fixture kind '" + std::string(name) +
                                               "' (expected translating-square, translating-texture or static-plus-noise)");
}

std::string_view fixture_kind_name(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::kTranslatingSquare: return "translating-square";
    case FixtureKind::kTranslatingTexture: return "translating-texture";
    case FixtureKind::kStaticPlusNoise: return "static-plus-noise";
  }
  return "?";
}

Tensor shift_frame(const Tensor& frame, std::size_t shift) {
  const std::size_t ch = frame.dim(0), h = frame.dim(1), w = frame.dim(2);
  Tensor out(frame.shape());
  for (std::size_t c = 0; c < ch; ++c) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) out[(c * h + i) * w + (j + shift) % w] = frame[(c * h + i) * w + j];
    }
  }
  return out;
}

VideoSequence make_fixture(FixtureKind kind, std::uint64_t seed, std::size_t frames, std::size_t size,
                           double noise_sigma) {
  if (frames < 4) throw Error(ErrorKind::kInvalidArgument, "fixture needs >= 4 frames, got " + std::to_string(frames));
  if (size < 4) throw Error(ErrorKind::kInvalidArgument, "fixture size must be >= 4, got " + std::to_string(size));
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "fixture noise sigma must be >= 0");
  Rng rng(seed);
  VideoSequence video;
  video.id = std::string(fixture_kind_name(kind)) + "-" + std::to_string(seed);
  switch (kind) {
    case FixtureKind::kTranslatingSquare:
    case FixtureKind::kTranslatingTexture: {
      const Tensor first = kind == FixtureKind::kTranslatingSquare ? square_frame(rng, size) : texture_frame(rng, size);
      for (std::size_t t = 0; t < frames; ++t) video.frames.push_back(shift_frame(first, t % size));
      break;
    }
    case FixtureKind::kStaticPlusNoise: {
      const Tensor base = square_frame(rng, size);
      std::normal_distribution<double> noise(0.0, noise_sigma);
      for (std::size_t t = 0; t < frames; ++t) {
        Tensor f = base;
        if (noise_sigma > 0.0) {
          for (double& v : f.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
        }
        video.frames.push_back(std::move(f));
      }
      break;
    }
  }
  return video;
}

VideoSequence add_noise(const VideoSequence& video, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "noise sigma must be >= 0");
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  VideoSequence out = video;
  out.id = video.id + "+noise";
  for (Tensor& f : out.frames) {
    for (double& v : f.data()) v = std::clamp(v + (sigma > 0.0 ? noise(rng) : 0.0), 0.0, 1.0);
  }
  return out;
}

Tensor make_style_image(std::uint64_t seed, std::size_t size) {
  if (size < 4) throw Error(ErrorKind::kInvalidArgument, "style image size must be >= 4");
  Rng rng(seed);
  std::array<Color, 3> palette{random_color(rng, 0.0, 1.0), random_color(rng, 0.0, 1.0), random_color(rng, 0.0, 1.0)};
  for (Color& col : palette) {
    // push toward saturated hues
    const double lo = *std::min_element(col.begin(), col.end());
    const double hi = *std::max_element(col.begin(), col.end());
    for (double& v : col) v = hi > lo ? (v - lo) / (hi - lo) * 0.8 + 0.1 : 0.5;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double period = std::max(3.0, static_cast<double>(size) / (3.0 + 3.0 * u(rng)));
  const double tilt = 0.5 + u(rng);
  struct Blob {
    double r, c, radius;
    std::size_t color;
  };
  std::vector<Blob> blobs;
  const std::size_t nblobs = 4 + size / 8;
  for (std::size_t k = 0; k < nblobs; ++k) {
    blobs.push_back({u(rng) * size, u(rng) * size, 1.0 + u(rng) * size / 10.0, k % 3});
  }
  Tensor img(Shape{3, size, size});
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const double band = std::fmod(j + tilt * i, period) / period;
      std::size_t idx = band < 0.5 ? 0 : 1;
      for (const Blob& b : blobs) {
        const double dr = i - b.r, dc = j - b.c;
        if (dr * dr + dc * dc <= b.radius * b.radius) idx = 2 - (b.color % 2);
      }
      for (std::size_t c = 0; c < 3; ++c) img[(c * size + i) * size + j] = palette[idx][c];
    }
  }
  return img;
}

}  // namespace vst
