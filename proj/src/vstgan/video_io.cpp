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

#include "vstgan/video_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <regex>

namespace vst {

namespace fs = std::filesystem;

std::uint8_t quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05zu.png", index);
  return buf;
}

Tensor load_image(const fs::path& png) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, png.string().c_str())) {
    throw Error(ErrorKind::kIo, "cannot read PNG " + png.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorKind::kIo, "cannot decode PNG " + png.string() + ": " + image.message);
  }
  const std::size_t h = image.height, w = image.width;
  Tensor frame(Shape{3, h, w});
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t c = 0; c < 3; ++c) frame[(c * h + i) * w + j] = buf[(i * w + j) * 3 + c] / 255.0;
    }
  }
  return frame;
}

void save_image(const Tensor& frame, const fs::path& png) {
  if (frame.rank() != 3 || frame.dim(0) != 3) {
    throw Error(ErrorKind::kShapeMismatch, "save_image expects a [3xHxW] frame, got " + to_string(frame.shape()));
  }
  const std::size_t h = frame.dim(1), w = frame.dim(2);
  std::vector<png_byte> buf(h * w * 3);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t c = 0; c < 3; ++c) buf[(i * w + j) * 3 + c] = quantize(frame[(c * h + i) * w + j]);
    }
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, png.string().c_str(), 0, buf.data(), 0, nullptr)) {
    throw Error(ErrorKind::kIo, "cannot write PNG " + png.string() + ": " + image.message);
  }
}

VideoSequence load_frames(const fs::path& dir, std::size_t stride) {
  if (stride == 0) throw Error(ErrorKind::kInvalidArgument, "frame stride must be >= 1");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::kIo, "not a frame directory: " + dir.string());
  static const std::regex pattern(R"(frame_(\d{5})\.png)");
  std::map<std::size_t, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, pattern)) found.emplace(std::stoul(m[1].str()), entry.path());
  }
  if (found.empty()) throw Error(ErrorKind::kIo, "no frame_%05d.png files in " + dir.string());
  for (const auto& [index, path] : found) {
    if (index % stride != 0) {
      throw Error(ErrorKind::kInvalidArgument, "unexpected frame " + std::to_string(index) + " (indices must be multiples of " +
                                                   std::to_string(stride) + ")");
    }
  }
  const std::size_t last = found.rbegin()->first;
  VideoSequence video;
  video.id = fs::absolute(dir).lexically_normal().filename().string();
  if (video.id.empty()) video.id = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  for (std::size_t index = 0; index <= last; index += stride) {
    auto it = found.find(index);
    if (it == found.end()) throw Error(ErrorKind::kIo, "missing frame " + std::to_string(index));
    Tensor frame = load_image(it->second);
    if (!video.frames.empty() && frame.shape() != video.frames.front().shape()) {
      throw Error(ErrorKind::kShapeMismatch, "frame " + std::to_string(index) + " has dimensions " +
                                                 to_string(frame.shape()) + ", expected " +
                                                 to_string(video.frames.front().shape()));
    }
    video.frames.push_back(std::move(frame));
  }
  return video;
}

void save_frames(const VideoSequence& video, const fs::path& dir, std::size_t stride) {
  if (stride == 0) throw Error(ErrorKind::kInvalidArgument, "frame stride must be >= 1");
  video.validate(false);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
  for (std::size_t k = 0; k < video.size(); ++k) save_image(video.frames[k], dir / frame_file_name(k * stride));
}

}  // namespace vst
