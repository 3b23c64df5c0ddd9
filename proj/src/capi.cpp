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

#include "vstgan/vstgan.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vstgan/checkpoint.hpp"
#include "vstgan/config.hpp"
#include "vstgan/evolvesync.hpp"
#include "vstgan/fixtures.hpp"
#include "vstgan/generator.hpp"
#include "vstgan/mdan.hpp"
#include "vstgan/verification.hpp"
#include "vstgan/video_io.hpp"

struct vst_config {
  vst::TrainConfig value;
};

struct vst_video {
  vst::VideoSequence value;
};

struct vst_image {
  vst::Tensor value;
};

struct vst_real_set {
  vst::RealSampleSet value;
};

struct vst_model {
  vst::Model value;
};

struct vst_gradcheck_report {
  vst::GradCheckReport value;
};

namespace {

thread_local std::string last_error;

vst_status status_of(vst::ErrorKind kind) {
  switch (kind) {
    case vst::ErrorKind::kInvalidArgument: return VST_ERR_INVALID_ARGUMENT;
    case vst::ErrorKind::kShapeMismatch: return VST_ERR_SHAPE;
    case vst::ErrorKind::kNonFinite: return VST_ERR_NON_FINITE;
    case vst::ErrorKind::kIo: return VST_ERR_IO;
    case vst::ErrorKind::kFormat: return VST_ERR_FORMAT;
    case vst::ErrorKind::kDiverged: return VST_ERR_DIVERGED;
  }
  return VST_ERR_INTERNAL;
}

template <class F>
vst_status guarded(F&& fn) {
  try {
    fn();
    return VST_OK;
  } catch (const vst::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return VST_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return VST_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw vst::Error(vst::ErrorKind::kInvalidArgument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Numbers and booleans keep their type; everything else stays a string.
nlohmann::json typed(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (!v.empty() && *end == '\0') return i;
  const double d = std::strtod(v.c_str(), &end);
  if (!v.empty() && *end == '\0') return d;
  return v;
}

nlohmann::json config_json(const vst::TrainConfig& cfg) {
  nlohmann::json out = nlohmann::json::object();
  std::istringstream in(vst::to_config_text(cfg));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      out[section] = nlohmann::json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    out[section][line.substr(0, eq)] = typed(line.substr(eq + 3));
  }
  return out;
}

void fill_record(vst_log_record& r, const char* phase, const vst::IterationLog& log) {
  r = vst_log_record{};
  r.phase = phase;
  r.segment = log.segment;
  r.iteration = log.iteration;
  r.total = log.total;
  r.style = log.style;
  r.content = log.content;
  r.evolve_sync = log.evolve_sync;
  r.smoothness = log.smoothness;
  r.d_objective = log.d_objective;
}

}  // namespace

extern "C" {

const char* vst_version(void) { return "0.1.0"; }

const char* vst_status_name(vst_status status) {
  switch (status) {
    case VST_OK: return "ok";
    case VST_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case VST_ERR_SHAPE: return "shape-mismatch";
    case VST_ERR_NON_FINITE: return "non-finite";
    case VST_ERR_IO: return "io";
    case VST_ERR_FORMAT: return "format";
    case VST_ERR_DIVERGED: return "diverged";
    case VST_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* vst_last_error(void) { return last_error.c_str(); }

void vst_string_free(char* s) { std::free(s); }

vst_status vst_config_create(vst_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new vst_config{};
  });
}

vst_status vst_config_load(vst_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    cfg->value = vst::load_config(path, cfg->value);
  });
}

vst_status vst_config_set(vst_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    vst::TrainConfig next = cfg->value;
    vst::set_config_value(next, key, value);
    next.validate();
    cfg->value = next;
  });
}

vst_status vst_config_text(const vst_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = copy_string(vst::to_config_text(cfg->value));
  });
}

vst_status vst_config_json(const vst_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = copy_string(config_json(cfg->value).dump());
  });
}

uint64_t vst_config_seed(const vst_config* cfg) { return cfg ? cfg->value.seed : 0; }

void vst_config_free(vst_config* cfg) { delete cfg; }

vst_status vst_video_load(const char* dir, size_t stride, vst_video** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new vst_video{vst::load_frames(dir, stride)};
  });
}

vst_status vst_video_save(const vst_video* video, const char* dir, size_t stride) {
  return guarded([&] {
    require(video, "video");
    require(dir, "dir");
    vst::save_frames(video->value, dir, stride);
  });
}

vst_status vst_video_fixture(const char* kind, uint64_t seed, size_t frames, size_t size, double noise_sigma,
                             vst_video** out) {
  return guarded([&] {
    require(kind, "kind");
    require(out, "out");
    *out = new vst_video{vst::make_fixture(vst::parse_fixture_kind(kind), seed, frames, size, noise_sigma)};
  });
}

vst_status vst_video_add_noise(const vst_video* video, double sigma, uint64_t seed, vst_video** out) {
  return guarded([&] {
    require(video, "video");
    require(out, "out");
    *out = new vst_video{vst::add_noise(video->value, sigma, seed)};
  });
}

vst_status vst_video_info(const vst_video* video, size_t* frames, size_t* height, size_t* width) {
  return guarded([&] {
    require(video, "video");
    video->value.validate(false);
    if (frames) *frames = video->value.size();
    if (height) *height = video->value.height();
    if (width) *width = video->value.width();
  });
}

vst_status vst_video_frame(const vst_video* video, size_t index, double* pixels) {
  return guarded([&] {
    require(video, "video");
    require(pixels, "pixels");
    if (index >= video->value.size()) {
      throw vst::Error(vst::ErrorKind::kInvalidArgument, "frame index " + std::to_string(index) + " out of range (" +
                                                             std::to_string(video->value.size()) + " frames)");
    }
    const vst::Tensor& f = video->value.frames[index];
    std::memcpy(pixels, f.raw(), f.size() * sizeof(double));
  });
}

const char* vst_video_id(const vst_video* video) { return video ? video->value.id.c_str() : ""; }

void vst_video_free(vst_video* video) { delete video; }

vst_status vst_image_load(const char* png, vst_image** out) {
  return guarded([&] {
    require(png, "png");
    require(out, "out");
    *out = new vst_image{vst::load_image(png)};
  });
}

vst_status vst_image_save(const vst_image* image, const char* png) {
  return guarded([&] {
    require(image, "image");
    require(png, "png");
    vst::save_image(image->value, png);
  });
}

vst_status vst_image_style_fixture(uint64_t seed, size_t size, vst_image** out) {
  return guarded([&] {
    require(out, "out");
    *out = new vst_image{vst::make_style_image(seed, size)};
  });
}

void vst_image_free(vst_image* image) { delete image; }

vst_status vst_gen_real(const vst_video* video, const vst_image* style, const vst_config* cfg, vst_log_fn log,
                        void* user, vst_real_set** out) {
  return guarded([&] {
    require(video, "video");
    require(style, "style");
    require(cfg, "config");
    require(out, "out");
    const vst::EncoderSpec spec = vst::build_encoder(cfg->value.encoder_seed);
    vst::IterationObserver observer;
    if (log) {
      observer = [log, user](const vst::IterationLog& it) {
        vst_log_record r;
        fill_record(r, "gen-real", it);
        log(&r, user);
      };
    }
    *out = new vst_real_set{vst::synthesize_real_samples(video->value, style->value, cfg->value, spec, observer)};
  });
}

size_t vst_real_set_segments(const vst_real_set* set) { return set ? set->value.segments.size() : 0; }

vst_status vst_real_set_segment(const vst_real_set* set, size_t k, vst_log_record* initial, vst_log_record* final_) {
  return guarded([&] {
    require(set, "real set");
    if (k >= set->value.segments.size()) {
      throw vst::Error(vst::ErrorKind::kInvalidArgument, "segment " + std::to_string(k) + " out of range");
    }
    if (initial) fill_record(*initial, "gen-real", set->value.segments[k].initial);
    if (final_) fill_record(*final_, "gen-real", set->value.segments[k].final);
  });
}

vst_status vst_real_set_save(const vst_real_set* set, const char* dir) {
  return guarded([&] {
    require(set, "real set");
    require(dir, "dir");
    vst::VideoSequence frames;
    frames.frames = set->value.frames;
    for (std::size_t k = 0; k < set->value.indices.size(); ++k) {
      if (set->value.indices[k] != 2 * k) {
        throw vst::Error(vst::ErrorKind::kInvalidArgument, "real set index " + std::to_string(set->value.indices[k]) +
                                                               " is not the even frame " + std::to_string(2 * k));
      }
    }
    vst::save_frames(frames, dir, 2);
  });
}

vst_status vst_real_set_load(const char* dir, vst_real_set** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    vst::VideoSequence frames = vst::load_frames(dir, 2);
    auto set = new vst_real_set{};
    for (std::size_t k = 0; k < frames.size(); ++k) set->value.indices.push_back(2 * k);
    set->value.frames = std::move(frames.frames);
    *out = set;
  });
}

vst_status vst_real_set_video(const vst_real_set* set, vst_video** out) {
  return guarded([&] {
    require(set, "real set");
    require(out, "out");
    auto v = new vst_video{};
    v->value.id = "real-samples";
    v->value.frames = set->value.frames;
    *out = v;
  });
}

void vst_real_set_free(vst_real_set* set) { delete set; }

vst_status vst_train(const vst_video* video, const vst_real_set* real, const vst_image* style, const vst_config* cfg,
                     vst_log_fn log, void* user, vst_model** out) {
  return guarded([&] {
    require(video, "video");
    require(real, "real set");
    require(style, "style");
    require(cfg, "config");
    require(out, "out");
    vst::Model model;
    model.config = cfg->value;
    model.encoder = vst::build_encoder(cfg->value.encoder_seed);
    vst::GanObserver observer;
    if (log) {
      observer = [log, user](const vst::GanLog& it) {
        vst_log_record r{};
        r.phase = "train";
        r.iteration = it.iteration;
        r.window_start = it.window_start;
        r.total = it.total;
        r.style = it.style;
        r.content = it.content;
        r.evolve_sync = it.evolve_sync;
        r.smoothness = it.smoothness;
        r.d_objective = it.d_objective;
        log(&r, user);
      };
    }
    model.generator = vst::train_gan(video->value, real->value, style->value, cfg->value, model.encoder, observer).params;
    *out = new vst_model{std::move(model)};
  });
}

vst_status vst_model_save(const vst_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    vst::save_checkpoint(vst::to_checkpoint(model->value), path);
  });
}

vst_status vst_model_load(const char* path, vst_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new vst_model{vst::from_checkpoint(vst::load_checkpoint(path))};
  });
}

vst_status vst_model_bytes(const vst_model* model, uint8_t** bytes, size_t* size) {
  return guarded([&] {
    require(model, "model");
    require(bytes, "bytes");
    require(size, "size");
    const std::vector<std::uint8_t> data = vst::serialize_checkpoint(vst::to_checkpoint(model->value));
    auto* buf = static_cast<uint8_t*>(std::malloc(data.empty() ? 1 : data.size()));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, data.data(), data.size());
    *bytes = buf;
    *size = data.size();
  });
}

void vst_bytes_free(uint8_t* bytes) { std::free(bytes); }

vst_status vst_model_config(const vst_model* model, vst_config** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = new vst_config{model->value.config};
  });
}

vst_status vst_stylize(const vst_model* model, const vst_video* video, vst_video** out) {
  return guarded([&] {
    require(model, "model");
    require(video, "video");
    require(out, "out");
    *out = new vst_video{vst::stylize(video->value, model->value.generator, model->value.encoder)};
  });
}

void vst_model_free(vst_model* model) { delete model; }

vst_status vst_aesl(const vst_video* source, const vst_video* synth, const vst_config* cfg, const int* orders,
                    size_t count, double* values) {
  return guarded([&] {
    require(source, "source video");
    require(synth, "synthesized video");
    require(cfg, "config");
    require(orders, "orders");
    require(values, "values");
    const vst::EncoderSpec spec = vst::build_encoder(cfg->value.encoder_seed);
    const std::vector<double> out = vst::aesl(source->value, synth->value, std::span<const int>(orders, count),
                                              cfg->value.loss, spec, cfg->value.kernel);
    std::copy(out.begin(), out.end(), values);
  });
}

vst_status vst_gradcheck(const char* target, uint64_t seed, vst_gradcheck_report** out) {
  return guarded([&] {
    require(target, "target");
    require(out, "out");
    *out = new vst_gradcheck_report{vst::run_gradcheck(target, seed)};
  });
}

size_t vst_gradcheck_count(const vst_gradcheck_report* report) { return report ? report->value.checks.size() : 0; }

vst_status vst_gradcheck_entry_at(const vst_gradcheck_report* report, size_t k, vst_gradcheck_entry* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (k >= report->value.checks.size()) {
      throw vst::Error(vst::ErrorKind::kInvalidArgument, "check " + std::to_string(k) + " out of range");
    }
    const vst::CheckOutcome& c = report->value.checks[k];
    out->target = c.target.c_str();
    out->name = c.name.c_str();
    out->max_rel_error = c.max_rel_error;
    out->tolerance = c.tolerance;
    out->norm_rel_error = c.norm_rel_error;
    out->coordinates = c.coordinates;
    out->excluded = c.excluded;
    out->worst = c.worst.c_str();
    out->passed = c.passed ? 1 : 0;
  });
}

int vst_gradcheck_passed(const vst_gradcheck_report* report) { return report && report->value.passed() ? 1 : 0; }

double vst_gradcheck_seconds(const vst_gradcheck_report* report) { return report ? report->value.seconds : 0.0; }

void vst_gradcheck_free(vst_gradcheck_report* report) { delete report; }

}  // extern "C"
