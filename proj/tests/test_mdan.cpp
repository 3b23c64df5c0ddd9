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

#include "vstgan/config.hpp"
#include "vstgan/fixtures.hpp"
#include "vstgan/gradcheck.hpp"
#include "vstgan/mdan.hpp"
#include "vstgan/ops.hpp"

using namespace vst;

namespace {

Tensor features(std::uint64_t seed, std::size_t hw = 8) {
  Rng rng(seed);
  return Tensor::uniform({1, 32, hw, hw}, rng, 0.0, 2.0);
}

}  // namespace

TEST(Discriminator, OneScorePerFeatureLocation) {
  Graph g;
  const BoundParams d = bind_params(g, init_discriminator(1), false);
  const Var s = d_score(g.input(features(1, 16)), d);
  EXPECT_EQ(s.shape(), (Shape{1, 1, 16, 16}));
}

TEST(Discriminator, DeterministicPerSeed) {
  auto run = [](std::uint64_t seed) {
    Graph g;
    const BoundParams d = bind_params(g, init_discriminator(seed), false);
    return d_score(g.input(features(2)), d).value();
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5), run(6));
}

TEST(Discriminator, RejectsWrongTap) {
  Graph g;
  const BoundParams d = bind_params(g, init_discriminator(1), false);
  Rng rng(1);
  EXPECT_THROW(d_score(g.input(Tensor::uniform({1, 64, 4, 4}, rng, 0, 1)), d), Error);
}

TEST(Discriminator, FeatureGradientMatchesFiniteDifferences) {
  const DiscriminatorParams d = init_discriminator(3);
  Rng rng(4);
  const Tensor r = Tensor::randn({1, 1, 4, 4}, rng);
  const Objective f = [&](Graph& g, std::span<const Var> in) {
    const BoundParams b = bind_params(g, d, false);
    return sum(mul(d_score(in[0], b), g.constant(r)));
  };
  const std::vector<Tensor> point{features(5, 4)};
  const GradCheckResult res = grad_check(f, point, 1e-4, true);
  EXPECT_GT(res.coordinates, 0u);
  EXPECT_LT(res.max_rel_error, 1e-5);
}

TEST(StyleLoss, HingeExamples) {
  EXPECT_DOUBLE_EQ(style_loss(Tensor({1, 1, 2, 2}, 1.0), Label::kReal), 0.0);
  EXPECT_DOUBLE_EQ(style_loss(Tensor({1, 1, 2, 2}, 0.0), Label::kReal), 1.0);
  EXPECT_NEAR(style_loss(Tensor({1, 1, 1, 3}, std::vector<double>{-1, 0.5, 2}), Label::kReal), 2.5 / 3.0, 1e-15);
  EXPECT_NEAR(style_loss(Tensor({1, 1, 1, 3}, std::vector<double>{-1, 0.5, 2}), Label::kFake), 4.5 / 3.0, 1e-15);
}

TEST(ContentLoss, Examples) {
  Rng rng(1);
  const Tensor a = Tensor::uniform({1, 4, 3, 3}, rng, 0, 1);
  EXPECT_EQ(content_loss(a, a), 0.0);
  Tensor b = a;
  for (double& v : b.data()) v += 0.5;
  EXPECT_NEAR(content_loss(a, b), 0.25, 1e-15);
  EXPECT_THROW(content_loss(a, Tensor({1, 4, 3, 2})), Error);
}

TEST(TvPrior, Examples) {
  EXPECT_EQ(tv_prior(Tensor({1, 3, 4, 4}, 0.7)), 0.0);
  EXPECT_DOUBLE_EQ(tv_prior(Tensor({1, 1, 2, 2}, std::vector<double>{0, 1, 0, 1})), 2.0);
}

TEST(DUpdate, ZeroLearningRateLeavesParams) {
  DiscriminatorParams d = init_discriminator(1);
  const DiscriminatorParams before = d;
  AdamState st(AdamSettings{0.0, 0.5, 0.999, 1e-8});
  const Tensor real[] = {features(1)}, fake[] = {features(2)};
  d_update(real, fake, d, st);
  EXPECT_EQ(d, before);
}

TEST(DUpdate, SmallStepDescends) {
  int descended = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    DiscriminatorParams d = init_discriminator(100 + s);
    AdamState st(AdamSettings{1e-3, 0.5, 0.999, 1e-8});
    const Tensor real[] = {features(200 + s)}, fake[] = {features(300 + s)};
    const double before = d_update(real, fake, d, st);
    EXPECT_EQ(before, d_objective(real, fake, init_discriminator(100 + s)));
    if (d_objective(real, fake, d) < before) ++descended;
  }
  EXPECT_GE(descended, 9);
}

TEST(RealSamples, EvenFrameSelection) {
  EXPECT_EQ(paired_indices(6), (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(paired_indices(7), (std::vector<std::size_t>{0, 2, 4, 6}));
}

TEST(RealSamples, SegmentPartition) {
  const auto parts = segment_partition(6, 3);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0], (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(parts[1], (std::vector<std::size_t>{3, 4, 5}));
  EXPECT_EQ(segment_partition(7, 3).back(), (std::vector<std::size_t>{6}));
}

TEST(RealSamples, SixFramesGiveThreeSamples) {
  TrainConfig cfg;
  cfg.mdan.iterations = 2;
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingSquare, 1, 6, 8);
  const RealSampleSet r = synthesize_real_samples(x, make_style_image(1, 16), cfg, build_encoder(cfg.encoder_seed));
  EXPECT_EQ(r.indices, (std::vector<std::size_t>{0, 2, 4}));
  ASSERT_EQ(r.frames.size(), 3u);
  for (const Tensor& f : r.frames) {
    EXPECT_EQ(f.shape(), (Shape{3, 8, 8}));
    for (double v : f.data()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(RealSamples, SecondSegmentAnchorsOnPreviousFrames) {
  TrainConfig cfg;
  cfg.mdan.iterations = 1;
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingSquare, 1, 12, 8);
  const RealSampleSet r = synthesize_real_samples(x, make_style_image(1, 16), cfg, build_encoder(cfg.encoder_seed));
  ASSERT_EQ(r.segments.size(), 2u);
  EXPECT_EQ(r.segments[0].indices, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_TRUE(r.segments[0].anchor_indices.empty());
  EXPECT_EQ(r.segments[1].indices, (std::vector<std::size_t>{6, 8, 10}));
  EXPECT_EQ(r.segments[1].anchor_indices, (std::vector<std::size_t>{2, 4}));
}

TEST(RealSamples, DeterministicPerSeed) {
  TrainConfig cfg;
  cfg.mdan.iterations = 3;
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingSquare, 1, 4, 8);
  const Tensor s = make_style_image(2, 16);
  const EncoderSpec spec = build_encoder(cfg.encoder_seed);
  EXPECT_EQ(synthesize_real_samples(x, s, cfg, spec).frames, synthesize_real_samples(x, s, cfg, spec).frames);
}

TEST(RealSamples, EmptyVideoRejected) {
  TrainConfig cfg;
  EXPECT_THROW(synthesize_real_samples(VideoSequence{}, make_style_image(1, 16), cfg, build_encoder(1)), Error);
}
