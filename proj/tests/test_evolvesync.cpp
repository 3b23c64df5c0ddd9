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

#include "oracles.hpp"
#include "vstgan/evolvesync.hpp"
#include "vstgan/fixtures.hpp"
#include "vstgan/gradcheck.hpp"
#include "vstgan/ops.hpp"

using namespace vst;

namespace {

Tensor matrix(std::size_t r, std::size_t c, std::vector<double> v) { return Tensor({r, c}, std::move(v)); }

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng) { return Tensor::randn({r, c}, rng); }

}  // namespace

TEST(Standardize, ConstantMatrixIsZero) {
  const Tensor z = standardize(matrix(2, 2, {1, 1, 1, 1}));
  for (double v : z.data()) EXPECT_EQ(v, 0.0);
}

TEST(Standardize, WorkedExample) {
  const Tensor z = standardize(matrix(2, 2, {0, 2, 4, 6}));
  const std::vector<double> want = oracle::standardize({0, 2, 4, 6});
  const double hand[] = {-1.3416, -0.4472, 0.4472, 1.3416};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(z[i], want[i], 1e-15);
    EXPECT_NEAR(z[i], hand[i], 1e-4);
  }
}

TEST(Standardize, IdempotentOnStandardizedData) {
  const Tensor z = standardize(matrix(1, 4, {-1, -1, 1, 1}));
  EXPECT_NEAR(z[0], -1.0, 1e-7);
  EXPECT_NEAR(z[3], 1.0, 1e-7);
}

TEST(Evolvement, IdenticalFramesGiveZeros) {
  Graph g;
  const EncoderSpec spec = build_encoder(1);
  Rng rng(1);
  const Var f = g.input(Tensor::uniform({1, 3, 8, 8}, rng, 0, 1));
  for (Tap level : {Tap::kMicro, Tap::kMacro}) {
    const SampleSet s = evolvement(g, f, f, level, spec);
    for (double v : s.samples.value().data()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Evolvement, SymmetricInArguments) {
  Graph g;
  const EncoderSpec spec = build_encoder(1);
  Rng rng(2);
  const Var a = g.input(Tensor::uniform({1, 3, 8, 8}, rng, 0, 1));
  const Var b = g.input(Tensor::uniform({1, 3, 8, 8}, rng, 0, 1));
  for (Tap level : {Tap::kMicro, Tap::kMacro}) {
    EXPECT_EQ(evolvement(g, a, b, level, spec).samples.value(), evolvement(g, b, a, level, spec).samples.value());
  }
}

TEST(Evolvement, SinglePixelChangeAtMicroLevel) {
  Graph g;
  const EncoderSpec spec = build_encoder(1);
  Tensor fa({1, 3, 2, 2}, 0.3);
  Tensor fb = fa;
  fb[0] += 0.4;  // red channel, top-left pixel
  const SampleSet s = evolvement(g, g.input(fa), g.input(fb), Tap::kMicro, spec);
  // red row |diff| = {0.4, 0, 0, 0}: mean 0.1, sigma sqrt(0.03)
  const double sigma = std::sqrt(0.03);
  const double want[] = {0.3 / sigma, -0.1 / sigma, -0.1 / sigma, -0.1 / sigma};
  const Tensor& v = s.samples.value();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(v[i], want[i], 1e-6);
  EXPECT_NEAR(v[0], std::sqrt(3.0), 1e-6);
  for (int i = 4; i < 12; ++i) EXPECT_EQ(v[i], 0.0);
}

TEST(Mmd, SingletonOracle) {
  const KernelSpec k{1.0};
  const double got = mmd2(matrix(1, 2, {0, 0}), matrix(1, 2, {1, 0}), k);
  EXPECT_NEAR(got, 2.0 - 2.0 * std::exp(-0.5), 1e-9);
  EXPECT_NEAR(got, 0.7869387, 1e-7);
}

TEST(Mmd, IdentityAndSymmetry) {
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const Tensor a = random_matrix(6, 5, rng), b = random_matrix(4, 5, rng);
    for (const KernelSpec& k : {KernelSpec{}, KernelSpec{0.7}}) {
      EXPECT_LT(std::abs(mmd2(a, a, k)), 1e-12);
      EXPECT_EQ(mmd2(a, b, k), mmd2(b, a, k));
      EXPECT_GE(mmd2(a, b, k), -1e-12);
    }
  }
}

TEST(Mmd, MatchesDoubleLoopOracle) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 7, m = 1 + (t * 3) % 5, d = 1 + t % 4;
    const Tensor a = random_matrix(n, d, rng), b = random_matrix(m, d, rng);
    const double bw = oracle::median_bandwidth(a, b);
    EXPECT_NEAR(mmd2(a, b, KernelSpec{}), std::max(0.0, oracle::mmd2(a, b, bw)), 1e-9) << "pair " << t;
    EXPECT_NEAR(mmd2(a, b, KernelSpec{1.3}), std::max(0.0, oracle::mmd2(a, b, 1.3)), 1e-9) << "pair " << t;
  }
}

TEST(Mmd, EmptySetRejected) {
  EXPECT_THROW(mmd2(Tensor({0, 2}), matrix(1, 2, {0, 0}), KernelSpec{}), Error);
}

TEST(MedianBandwidth, Examples) {
  EXPECT_DOUBLE_EQ(median_bandwidth(matrix(2, 1, {0, 1}), matrix(1, 1, {3})), 2.0);
  EXPECT_DOUBLE_EQ(median_bandwidth(matrix(2, 2, {5, 5, 5, 5}), matrix(1, 2, {5, 5})), 1.0);
  EXPECT_DOUBLE_EQ(median_bandwidth(matrix(1, 2, {0, 0}), matrix(1, 2, {3, 4})), 5.0);
}

TEST(EvolveSync, ZeroForIdenticalVideos) {
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const VideoSequence x = make_fixture(FixtureKind::kTranslatingTexture, s, 6, 16);
    const EncoderSpec spec = build_encoder(s * 11);
    EXPECT_LT(evolve_sync_loss(x, x, LossWeights{}, spec, KernelSpec{}), 1e-10);
  }
}

TEST(EvolveSync, RejectsBadVideos) {
  const EncoderSpec spec = build_encoder(1);
  const VideoSequence a = make_fixture(FixtureKind::kTranslatingSquare, 1, 6, 8);
  VideoSequence b = make_fixture(FixtureKind::kTranslatingSquare, 1, 5, 8);
  EXPECT_THROW(evolve_sync_loss(a, b, LossWeights{}, spec, KernelSpec{}), Error);
  VideoSequence one = a;
  one.frames.resize(1);
  EXPECT_THROW(evolve_sync_loss(one, one, LossWeights{}, spec, KernelSpec{}), Error);
}

TEST(EvolveSync, PositiveForDifferentMotion) {
  const EncoderSpec spec = build_encoder(1);
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingSquare, 1, 6, 16);
  const VideoSequence y = add_noise(x, 0.1, 2);
  EXPECT_GT(evolve_sync_loss(x, y, LossWeights{}, spec, KernelSpec{}), 0.0);
}

TEST(EvolveSync, PixelGradientMatchesFiniteDifferencesAtStep1em4) {
  const EncoderSpec spec = build_encoder(2);
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingTexture, 3, 4, 8);
  const VideoSequence y = add_noise(x, 0.1, 4);
  const Objective f = [&](Graph& g, std::span<const Var> in) {
    const BoundEncoder enc(g, spec);
    std::vector<EncodedFrame> xe, ye;
    for (int t = 0; t < 2; ++t) {
      xe.push_back(enc.run(g.constant(as_batch(x.frames[t])), Tap::kMacro));
      ye.push_back(enc.run(in[t], Tap::kMacro));
    }
    return evolve_sync_loss(g, xe, ye, LossWeights{}, KernelSpec{});
  };
  const std::vector<Tensor> point{as_batch(y.frames[0]), as_batch(y.frames[1])};
  const GradCheckResult r = grad_check(f, point, 1e-4, true);
  EXPECT_GT(r.coordinates, 300u);
  EXPECT_LT(r.max_rel_error, 1e-4) << "excluded " << r.excluded;
}

TEST(Aesl, ZeroForIdenticalVideos) {
  const EncoderSpec spec = build_encoder(1);
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingSquare, 2, 8, 16);
  for (int k : kAeslOrders) EXPECT_LT(aesl(x, x, k, LossWeights{}, spec, KernelSpec{}), 1e-10);
}

TEST(Aesl, MonotoneInOrder) {
  const EncoderSpec spec = build_encoder(1);
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingSquare, 2, 8, 16);
  const std::vector<double> v = aesl(x, add_noise(x, 0.1, 3), kAeslOrders, LossWeights{}, spec, KernelSpec{});
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GE(v[i], v[i - 1]);
}

TEST(Aesl, RejectsOrderBelowTwo) {
  const EncoderSpec spec = build_encoder(1);
  const VideoSequence x = make_fixture(FixtureKind::kTranslatingSquare, 2, 4, 8);
  EXPECT_THROW(aesl(x, x, 1, LossWeights{}, spec, KernelSpec{}), Error);
}

TEST(LossWeights, Validation) {
  LossWeights w;
  w.delta = 1;
  EXPECT_THROW(w.validate(), Error);
  w = LossWeights{};
  w.alpha_macro = -1;
  EXPECT_THROW(w.validate(), Error);
  EXPECT_THROW((KernelSpec{0.0}).validate(), Error);
}
