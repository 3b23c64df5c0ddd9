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
#include <filesystem>

#include "vstgan/video.hpp"

namespace vst {

// round(clamp(v, 0, 1) * 255), halves rounded up.
std::uint8_t quantize(double v);

Tensor load_image(const std::filesystem::path& png);
void save_image(const Tensor& frame, const std::filesystem::path& png);

// Reads frame_%05d.png files whose indices are 0, stride, 2 * stride, ...
// without gaps. The sequence id is the directory name.
VideoSequence load_frames(const std::filesystem::path& dir, std::size_t stride = 1);
// Writes frame k as frame_%05d.png with index k * stride.
void save_frames(const VideoSequence& video, const std::filesystem::path& dir, std::size_t stride = 1);

std::string frame_file_name(std::size_t index);

}  // namespace vst
