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

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "vstgan/vstgan.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / (std::string("vstgan_capi_") + name);
  fs::remove_all(p);
  return p;
}

struct Counter {
  int records = 0;
};

void count_record(const vst_log_record*, void* user) { ++static_cast<Counter*>(user)->records; }

}  // namespace

TEST(CApi, StatusNamesAndVersion) {
  EXPECT_STREQ(vst_status_name(VST_OK), "ok");
  EXPECT_GT(std::strlen(vst_version()), 0u);
}

TEST(CApi, NullArgumentsRejected) {
  EXPECT_EQ(vst_config_create(nullptr), VST_ERR_INVALID_ARGUMENT);
  EXPECT_GT(std::strlen(vst_last_error()), 0u);
  EXPECT_EQ(vst_video_load(nullptr, 1, nullptr), VST_ERR_INVALID_ARGUMENT);
  vst_config_free(nullptr);
  vst_video_free(nullptr);
}

TEST(CApi, ConfigSetAndEcho) {
  vst_config* cfg = nullptr;
  ASSERT_EQ(vst_config_create(&cfg), VST_OK);
  EXPECT_EQ(vst_config_set(cfg, "gan.iterations", "7"), VST_OK);
  EXPECT_EQ(vst_config_set(cfg, "run.seed", "9"), VST_OK);
  EXPECT_EQ(vst_config_seed(cfg), 9u);
  EXPECT_EQ(vst_config_set(cfg, "gan.nope", "1"), VST_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(vst_last_error()).find("gan.nope"), std::string::npos);
  char* text = nullptr;
  ASSERT_EQ(vst_config_json(cfg, &text), VST_OK);
  EXPECT_NE(std::string(text).find("\"iterations\":7"), std::string::npos) << text;
  vst_string_free(text);
  vst_config_free(cfg);
}

TEST(CApi, FixtureFramesAndErrors) {
  vst_video* v = nullptr;
  ASSERT_EQ(vst_video_fixture("translating-square", 1, 5, 8, 0.05, &v), VST_OK);
  size_t n = 0, h = 0, w = 0;
  ASSERT_EQ(vst_video_info(v, &n, &h, &w), VST_OK);
  EXPECT_EQ(n, 5u);
  EXPECT_EQ(h, 8u);
  std::vector<double> px(3 * h * w);
  EXPECT_EQ(vst_video_frame(v, 4, px.data()), VST_OK);
  EXPECT_EQ(vst_video_frame(v, 5, px.data()), VST_ERR_INVALID_ARGUMENT);
  vst_video_free(v);
  EXPECT_EQ(vst_video_fixture("spiral", 1, 5, 8, 0.05, &v), VST_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(vst_last_error()).find("spiral"), std::string::npos);
}

TEST(CApi, PipelineRoundTrip) {
  const fs::path root = scratch("pipeline");
  vst_config* cfg = nullptr;
  ASSERT_EQ(vst_config_create(&cfg), VST_OK);
  ASSERT_EQ(vst_config_set(cfg, "mdan.iterations", "2"), VST_OK);
  ASSERT_EQ(vst_config_set(cfg, "gan.iterations", "2"), VST_OK);
  vst_video* x = nullptr;
  vst_image* s = nullptr;
  ASSERT_EQ(vst_video_fixture("translating-square", 1, 6, 8, 0.05, &x), VST_OK);
  ASSERT_EQ(vst_image_style_fixture(1, 16, &s), VST_OK);

  Counter c;
  vst_real_set* real = nullptr;
  ASSERT_EQ(vst_gen_real(x, s, cfg, count_record, &c, &real), VST_OK) << vst_last_error();
  EXPECT_GT(c.records, 0);
  EXPECT_EQ(vst_real_set_segments(real), 1u);
  ASSERT_EQ(vst_real_set_save(real, (root / "real").c_str()), VST_OK);
  EXPECT_TRUE(fs::exists(root / "real" / "frame_00004.png"));
  vst_real_set* loaded = nullptr;
  ASSERT_EQ(vst_real_set_load((root / "real").c_str(), &loaded), VST_OK) << vst_last_error();

  vst_model* m = nullptr;
  ASSERT_EQ(vst_train(x, loaded, s, cfg, nullptr, nullptr, &m), VST_OK) << vst_last_error();
  ASSERT_EQ(vst_model_save(m, (root / "m.vstg").c_str()), VST_OK);
  vst_model* m2 = nullptr;
  ASSERT_EQ(vst_model_load((root / "m.vstg").c_str(), &m2), VST_OK);
  uint8_t *b1 = nullptr, *b2 = nullptr;
  size_t n1 = 0, n2 = 0;
  ASSERT_EQ(vst_model_bytes(m, &b1, &n1), VST_OK);
  ASSERT_EQ(vst_model_bytes(m2, &b2, &n2), VST_OK);
  ASSERT_EQ(n1, n2);
  EXPECT_EQ(std::memcmp(b1, b2, n1), 0);
  vst_bytes_free(b1);
  vst_bytes_free(b2);

  vst_video* y = nullptr;
  ASSERT_EQ(vst_stylize(m2, x, &y), VST_OK);
  size_t ny = 0;
  vst_video_info(y, &ny, nullptr, nullptr);
  EXPECT_EQ(ny, 6u);
  const int orders[] = {2, 4};
  double values[2] = {-1, -1};
  ASSERT_EQ(vst_aesl(x, x, cfg, orders, 2, values), VST_OK);
  EXPECT_LT(values[0], 1e-10);
  EXPECT_LT(values[1], 1e-10);

  vst_video_free(y);
  vst_model_free(m);
  vst_model_free(m2);
  vst_real_set_free(real);
  vst_real_set_free(loaded);
  vst_image_free(s);
  vst_video_free(x);
  vst_config_free(cfg);
  fs::remove_all(root);
}

TEST(CApi, TrainRejectsMisalignedRealSet) {
  const fs::path root = scratch("misaligned");
  vst_video* x = nullptr;
  ASSERT_EQ(vst_video_fixture("translating-square", 1, 6, 8, 0.05, &x), VST_OK);
  ASSERT_EQ(vst_video_save(x, root.c_str(), 1), VST_OK);
  vst_real_set* r = nullptr;
  EXPECT_NE(vst_real_set_load(root.c_str(), &r), VST_OK);
  EXPECT_NE(std::string(vst_last_error()).find("frame 1"), std::string::npos) << vst_last_error();
  vst_video_free(x);
  fs::remove_all(root);
}

TEST(CApi, GradcheckReport) {
  vst_gradcheck_report* r = nullptr;
  ASSERT_EQ(vst_gradcheck("ops", 1, &r), VST_OK);
  ASSERT_GT(vst_gradcheck_count(r), 10u);
  vst_gradcheck_entry e{};
  ASSERT_EQ(vst_gradcheck_entry_at(r, 0, &e), VST_OK);
  EXPECT_STREQ(e.target, "ops");
  EXPECT_GT(e.coordinates, 0u);
  EXPECT_EQ(vst_gradcheck_entry_at(r, 10000, &e), VST_ERR_INVALID_ARGUMENT);
  vst_gradcheck_free(r);
  EXPECT_EQ(vst_gradcheck("bogus", 1, &r), VST_ERR_INVALID_ARGUMENT);
}
