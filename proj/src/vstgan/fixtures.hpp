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

#pragma once

#include <cstdint>
#include <string_view>

#include "vstgan/video.hpp"

namespace vst {

enum class FixtureKind { kTranslatingSquare, kTranslatingTexture, kStaticPlusNoise };

FixtureKind parse_fixture_kind(std::string_view name);
std::string_view fixture_kind_name(FixtureKind kind);

inline constexpr double kFixtureNoiseSigma = 0.05;

// Deterministic synthetic video of `frames` (>= 4) square frames. The
// translating kinds shift frame 0 circularly by t pixels to the right at
// frame t; static-plus-noise adds iid N(0, sigma) to a fixed frame.
VideoSequence make_fixture(FixtureKind kind, std::uint64_t seed, std::size_t frames, std::size_t size,
                           double noise_sigma = kFixtureNoiseSigma);

// Adds seeded iid N(0, sigma) noise and clamps to [0, 1].
VideoSequence add_noise(const VideoSequence& video, double sigma, std::uint64_t seed);

// Seeded synthetic painting: saturated diagonal bands with scattered blobs.
Tensor make_style_image(std::uint64_t seed, std::size_t size);

// Frame circularly shifted right by `shift` pixels.
Tensor shift_frame(const Tensor& frame, std::size_t shift);

}  // namespace vst
