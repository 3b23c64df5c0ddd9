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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vstgan/checkpoint.hpp"
#include "vstgan/config.hpp"
#include "vstgan/fixtures.hpp"
#include "vstgan/generator.hpp"
#include "vstgan/video_io.hpp"

using namespace vst;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vstgan_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Quantize, RoundHalfUp) {
  EXPECT_EQ(quantize(0.5), 128);
  EXPECT_EQ(quantize(0.0), 0);
  EXPECT_EQ(quantize(1.0), 255);
  EXPECT_EQ(quantize(-0.3), 0);
  EXPECT_EQ(quantize(1.7), 255);
  EXPECT_EQ(quantize(100.5 / 255.0), 101);
}

TEST(Frames, RoundTripWithinOneQuantum) {
  TempDir tmp;
  const VideoSequence v = make_fixture(FixtureKind::kTranslatingTexture, 3, 4, 12);
  save_frames(v, tmp.path);
  const VideoSequence back = load_frames(tmp.path);
  ASSERT_EQ(back.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_LE(max_abs_diff(back.frames[t], v.frames[t]), 0.5 / 255.0 + 1e-12);
  EXPECT_EQ(back.id, tmp.path.filename().string());
}

TEST(Frames, BlackFrameStaysBlack) {
  TempDir tmp;
  save_image(Tensor({3, 4, 4}, 0.0), tmp.path / "black.png");
  EXPECT_EQ(load_image(tmp.path / "black.png"), Tensor(Shape{3, 4, 4}, 0.0));
}

TEST(Frames, GapIsReportedByIndex) {
  TempDir tmp;
  const Tensor f({3, 4, 4}, 0.5);
  save_image(f, tmp.path / frame_file_name(0));
  save_image(f, tmp.path / frame_file_name(2));
  const std::string msg = error_of([&] { load_frames(tmp.path); });
  EXPECT_NE(msg.find("missing frame 1"), std::string::npos) << msg;
}

TEST(Frames, MixedDimensionsRejected) {
  TempDir tmp;
  save_image(Tensor({3, 4, 4}, 0.5), tmp.path / frame_file_name(0));
  save_image(Tensor({3, 5, 4}, 0.5), tmp.path / frame_file_name(1));
  EXPECT_NE(error_of([&] { load_frames(tmp.path); }).find("frame 1"), std::string::npos);
}

TEST(Frames, StridedDirectory) {
  TempDir tmp;
  const VideoSequence v = make_fixture(FixtureKind::kTranslatingSquare, 1, 4, 8);
  save_frames(v, tmp.path, 2);
  EXPECT_TRUE(fs::exists(tmp.path / "frame_00006.png"));
  EXPECT_EQ(load_frames(tmp.path, 2).size(), 4u);
  EXPECT_FALSE(error_of([&] { load_frames(tmp.path, 1); }).empty());
}

TEST(Frames, MissingDirectoryIsIoError) {
  try {
    load_frames("/nonexistent/dir");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Checkpoint, RoundTripIsBitIdentical) {
  Rng rng(5);
  Checkpoint c;
  c.seed = 77;
  c.config_text = "[run]\nseed = 77\n";
  c.tensors["b"] = Tensor::randn({3, 2}, rng);
  c.tensors["a.x"] = Tensor::randn({4}, rng);
  c.tensors["z"] = Tensor::randn({1, 2, 3, 2}, rng);
  const std::vector<std::uint8_t> bytes = serialize_checkpoint(c);
  const Checkpoint back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.config_text, c.config_text);
  EXPECT_EQ(back.tensors, c.tensors);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
}

TEST(Checkpoint, LayoutAndManifestOrder) {
  Checkpoint c;
  c.seed = 1;
  c.tensors["beta"] = Tensor({1}, 2.0);
  c.tensors["alpha"] = Tensor({2}, 1.0);
  const std::vector<std::uint8_t> b = serialize_checkpoint(c);
  ASSERT_GE(b.size(), 4u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "VSTG");
  EXPECT_EQ(b[4], kCheckpointVersion);
  const std::string text(b.begin(), b.end());
  EXPECT_LT(text.find("alpha"), text.find("beta"));
  // header 4+4+8+8 + count 4 + two manifest entries + 3 f64 payloads
  const std::size_t manifest = (4 + 5 + 1 + 4 + 8) + (4 + 4 + 1 + 4 + 8);
  EXPECT_EQ(b.size(), 24u + 4u + manifest + 3 * 8u);
}

TEST(Checkpoint, Rejections) {
  Checkpoint c;
  c.tensors["w"] = Tensor({4}, 1.0);
  std::vector<std::uint8_t> b = serialize_checkpoint(c);

  std::vector<std::uint8_t> bad = b;
  bad[0] = 'X';
  EXPECT_NE(error_of([&] { deserialize_checkpoint(bad); }).find("not a checkpoint"), std::string::npos);

  bad = b;
  bad[4] = 9;
  const std::string version = error_of([&] { deserialize_checkpoint(bad); });
  EXPECT_NE(version.find("9"), std::string::npos);
  EXPECT_NE(version.find("1"), std::string::npos);

  bad.assign(b.begin(), b.end() - 5);
  EXPECT_NE(error_of([&] { deserialize_checkpoint(bad); }).find("length mismatch"), std::string::npos);

  bad.assign(b.begin(), b.begin() + 10);
  EXPECT_FALSE(error_of([&] { deserialize_checkpoint(bad); }).empty());
}

TEST(Checkpoint, ModelRoundTrip) {
  TempDir tmp;
  Model m;
  m.config.seed = 9;
  m.config.gan.iterations = 12;
  m.encoder = build_encoder(m.config.encoder_seed);
  m.generator = init_generator(3);
  save_checkpoint(to_checkpoint(m), tmp.path / "m.vstg");
  const Model back = from_checkpoint(load_checkpoint(tmp.path / "m.vstg"));
  EXPECT_EQ(back.generator, m.generator);
  EXPECT_EQ(back.config.gan.iterations, 12);
  EXPECT_EQ(back.config.seed, 9u);
  EXPECT_EQ(encoder_tensors(back.encoder), encoder_tensors(m.encoder));
}

TEST(Config, Defaults) {
  const TrainConfig c;
  EXPECT_EQ(c.gan.iterations, 20000);
  EXPECT_EQ(c.gan.batch, 3);
  EXPECT_DOUBLE_EQ(c.adam.lr, 0.02);
  EXPECT_DOUBLE_EQ(c.adam.beta1, 0.5);
  EXPECT_EQ(c.mdan.segment, 3);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParseOverridesAndRoundTrip) {
  const TrainConfig c = parse_config("# comment\n[gan]\niterations = 500\n\n[loss]\nalpha_macro = 50 # inline\n");
  EXPECT_EQ(c.gan.iterations, 500);
  EXPECT_DOUBLE_EQ(c.loss.alpha_macro, 50.0);
  const TrainConfig again = parse_config(to_config_text(c));
  EXPECT_EQ(to_config_text(again), to_config_text(c));
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config("[gan]\niteratons = 5\n"), Error);
  EXPECT_THROW(parse_config("[nope]\nx = 1\n"), Error);
  EXPECT_THROW(parse_config("iterations = 5\n"), Error);
  TrainConfig c;
  EXPECT_THROW(set_config_value(c, "gan.batch", "three"), Error);
}

TEST(Config, DerivedSeedsDiffer) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
}

TEST(Fixture, TranslationIsCircularShift) {
  for (FixtureKind k : {FixtureKind::kTranslatingSquare, FixtureKind::kTranslatingTexture}) {
    const VideoSequence v = make_fixture(k, 4, 10, 8);
    for (std::size_t t = 0; t < v.size(); ++t) {
      const Tensor& f0 = v.frames[0];
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < 8; ++i)
          for (std::size_t j = 0; j < 8; ++j)
            ASSERT_EQ(v.frames[t][(c * 8 + i) * 8 + (j + t) % 8], f0[(c * 8 + i) * 8 + j]) << "t " << t;
    }
  }
}

TEST(Fixture, DeterministicPerSeed) {
  for (FixtureKind k : {FixtureKind::kTranslatingSquare, FixtureKind::kTranslatingTexture, FixtureKind::kStaticPlusNoise}) {
    EXPECT_EQ(make_fixture(k, 5, 4, 8).frames, make_fixture(k, 5, 4, 8).frames);
  }
  EXPECT_NE(make_fixture(FixtureKind::kStaticPlusNoise, 5, 4, 8).frames,
            make_fixture(FixtureKind::kStaticPlusNoise, 6, 4, 8).frames);
}

TEST(Fixture, StaticPlusNoiseSigma) {
  const VideoSequence a = make_fixture(FixtureKind::kStaticPlusNoise, 5, 4, 32, 0.0);
  EXPECT_EQ(a.frames[1], a.frames[0]);
  const VideoSequence b = make_fixture(FixtureKind::kStaticPlusNoise, 5, 4, 32, 0.05);
  EXPECT_NE(b.frames[1], b.frames[0]);
}

TEST(Fixture, Rejections) {
  EXPECT_THROW(parse_fixture_kind("spiral"), Error);
  EXPECT_THROW(make_fixture(FixtureKind::kTranslatingSquare, 1, 3, 8), Error);
  EXPECT_EQ(parse_fixture_kind("translating-square"), FixtureKind::kTranslatingSquare);
}

TEST(Fixture, NoiseIsClampedAndSeeded) {
  const VideoSequence v = make_fixture(FixtureKind::kTranslatingSquare, 1, 4, 8);
  const VideoSequence n = add_noise(v, 0.5, 3);
  EXPECT_EQ(n.frames, add_noise(v, 0.5, 3).frames);
  for (const Tensor& f : n.frames)
    for (double x : f.data()) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
}
