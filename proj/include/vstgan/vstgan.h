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

/*
 * vstgan C interface.
 *
 * Every object is an opaque handle released with its matching *_free call.
 * Functions return a vst_status; on failure vst_last_error() holds a
 * message for the calling thread until its next failing call.
 */
#ifndef VSTGAN_VSTGAN_H
#define VSTGAN_VSTGAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VSTGAN_BUILDING_LIBRARY)
#    define VSTGAN_API __declspec(dllexport)
#  else
#    define VSTGAN_API __declspec(dllimport)
#  endif
#else
#  define VSTGAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vst_status {
  VST_OK = 0,
  VST_ERR_INVALID_ARGUMENT = 1,
  VST_ERR_SHAPE = 2,
  VST_ERR_NON_FINITE = 3,
  VST_ERR_IO = 4,
  VST_ERR_FORMAT = 5,
  VST_ERR_DIVERGED = 6,
  VST_ERR_INTERNAL = 7
} vst_status;

VSTGAN_API const char* vst_version(void);
VSTGAN_API const char* vst_status_name(vst_status status);
VSTGAN_API const char* vst_last_error(void);
VSTGAN_API void vst_string_free(char* s);

/* Configuration */

typedef struct vst_config vst_config;

/* Defaults for every setting. */
VSTGAN_API vst_status vst_config_create(vst_config** out);
/* Applies a `[section]` / `key = value` file on top of `cfg`. */
VSTGAN_API vst_status vst_config_load(vst_config* cfg, const char* path);
/* key is "section.name", e.g. "mdan.iterations". */
VSTGAN_API vst_status vst_config_set(vst_config* cfg, const char* key, const char* value);
VSTGAN_API vst_status vst_config_text(const vst_config* cfg, char** out);
/* Nested JSON object, one member per section. */
VSTGAN_API vst_status vst_config_json(const vst_config* cfg, char** out);
VSTGAN_API uint64_t vst_config_seed(const vst_config* cfg);
VSTGAN_API void vst_config_free(vst_config* cfg);

/* Videos and images. Pixel buffers are planar RGB doubles in [0, 1]. */

typedef struct vst_video vst_video;
typedef struct vst_image vst_image;

/* Reads frame_%05d.png files with indices 0, stride, 2*stride, ... */
VSTGAN_API vst_status vst_video_load(const char* dir, size_t stride, vst_video** out);
VSTGAN_API vst_status vst_video_save(const vst_video* video, const char* dir, size_t stride);
/* kind: translating-square, translating-texture or static-plus-noise. */
VSTGAN_API vst_status vst_video_fixture(const char* kind, uint64_t seed, size_t frames, size_t size,
                                        double noise_sigma, vst_video** out);
VSTGAN_API vst_status vst_video_add_noise(const vst_video* video, double sigma, uint64_t seed, vst_video** out);
VSTGAN_API vst_status vst_video_info(const vst_video* video, size_t* frames, size_t* height, size_t* width);
/* Copies frame `index` into `pixels` (3 * height * width values). */
VSTGAN_API vst_status vst_video_frame(const vst_video* video, size_t index, double* pixels);
VSTGAN_API const char* vst_video_id(const vst_video* video);
VSTGAN_API void vst_video_free(vst_video* video);

VSTGAN_API vst_status vst_image_load(const char* png, vst_image** out);
VSTGAN_API vst_status vst_image_save(const vst_image* image, const char* png);
/* Seeded synthetic painting for fixtures. */
VSTGAN_API vst_status vst_image_style_fixture(uint64_t seed, size_t size, vst_image** out);
VSTGAN_API void vst_image_free(vst_image* image);

/* Progress records */

typedef struct vst_log_record {
  const char* phase; /* "gen-real" or "train" */
  size_t segment;    /* gen-real only */
  int iteration;
  size_t window_start; /* train only */
  double total;
  double style;
  double content;
  double evolve_sync;
  double smoothness;
  double d_objective;
} vst_log_record;

typedef void (*vst_log_fn)(const vst_log_record* record, void* user);

/* Step (i): real samples on the even frames of a video */

typedef struct vst_real_set vst_real_set;

VSTGAN_API vst_status vst_gen_real(const vst_video* video, const vst_image* style, const vst_config* cfg,
                                   vst_log_fn log, void* user, vst_real_set** out);
VSTGAN_API size_t vst_real_set_segments(const vst_real_set* set);
/* Objective terms at the start and end of segment `k`. */
VSTGAN_API vst_status vst_real_set_segment(const vst_real_set* set, size_t k, vst_log_record* initial,
                                           vst_log_record* final_);
/* PNGs named by source frame index (frame_00000, frame_00002, ...). */
VSTGAN_API vst_status vst_real_set_save(const vst_real_set* set, const char* dir);
VSTGAN_API vst_status vst_real_set_load(const char* dir, vst_real_set** out);
VSTGAN_API vst_status vst_real_set_video(const vst_real_set* set, vst_video** out);
VSTGAN_API void vst_real_set_free(vst_real_set* set);

/* Step (ii): generator training, checkpoints and inference */

typedef struct vst_model vst_model;

VSTGAN_API vst_status vst_train(const vst_video* video, const vst_real_set* real, const vst_image* style,
                                const vst_config* cfg, vst_log_fn log, void* user, vst_model** out);
VSTGAN_API vst_status vst_model_save(const vst_model* model, const char* path);
VSTGAN_API vst_status vst_model_load(const char* path, vst_model** out);
/* Serialized checkpoint bytes; release with vst_bytes_free. */
VSTGAN_API vst_status vst_model_bytes(const vst_model* model, uint8_t** bytes, size_t* size);
VSTGAN_API void vst_bytes_free(uint8_t* bytes);
VSTGAN_API vst_status vst_model_config(const vst_model* model, vst_config** out);
VSTGAN_API vst_status vst_stylize(const vst_model* model, const vst_video* video, vst_video** out);
VSTGAN_API void vst_model_free(vst_model* model);

/* Metric */

/* AESL of `synth` against `source` for each order; `values` has `count` slots. */
VSTGAN_API vst_status vst_aesl(const vst_video* source, const vst_video* synth, const vst_config* cfg,
                               const int* orders, size_t count, double* values);

/* Gradient checks */

typedef struct vst_gradcheck_report vst_gradcheck_report;

typedef struct vst_gradcheck_entry {
  const char* target;
  const char* name;
  double max_rel_error;
  double tolerance;
  double norm_rel_error;
  size_t coordinates;
  size_t excluded;
  const char* worst;
  int passed;
} vst_gradcheck_entry;

/* target: "ops", "eq4" or "eq7". */
VSTGAN_API vst_status vst_gradcheck(const char* target, uint64_t seed, vst_gradcheck_report** out);
VSTGAN_API size_t vst_gradcheck_count(const vst_gradcheck_report* report);
VSTGAN_API vst_status vst_gradcheck_entry_at(const vst_gradcheck_report* report, size_t k, vst_gradcheck_entry* out);
VSTGAN_API int vst_gradcheck_passed(const vst_gradcheck_report* report);
VSTGAN_API double vst_gradcheck_seconds(const vst_gradcheck_report* report);
VSTGAN_API void vst_gradcheck_free(vst_gradcheck_report* report);

#ifdef __cplusplus
}
#endif

#endif
