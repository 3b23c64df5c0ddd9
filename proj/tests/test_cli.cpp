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

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;  // stdout and stderr
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(VSTGAN_CLI_PATH) + " " + args + " 2>&1";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root = fs::temp_directory_path() /
           ("vstgan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  void TearDown() override { fs::remove_all(root); }
  std::string at(const std::string& name) const { return (root / name).string(); }

  // 6-frame 8x8 fixture plus a style image.
  void make_inputs() {
    ASSERT_EQ(run("make-fixture --kind translating-square --seed 2 --frames 6 --size 8 --quiet --out " + at("x") +
                  " --style-out " + at("style.png")).code, 0);
  }

  fs::path root;
};

}  // namespace

TEST_F(Cli, MakeFixtureWritesFrames) {
  const Outcome r = run("make-fixture --kind translating-texture --frames 5 --size 8 --out " + at("x"));
  ASSERT_EQ(r.code, 0) << r.out;
  for (int t = 0; t < 5; ++t) EXPECT_TRUE(fs::exists(root / "x" / ("frame_0000" + std::to_string(t) + ".png")));
  const auto first = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(first["event"], "config");
}

TEST_F(Cli, UnknownFixtureKindFails) {
  const Outcome r = run("make-fixture --kind spiral --out " + at("x"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("video-io"), std::string::npos) << r.out;
}

TEST_F(Cli, PipelineIsDeterministic) {
  make_inputs();
  const std::string common = " --video " + at("x") + " --style " + at("style.png") + " --quiet --seed 4";
  Outcome r = run("gen-real --iterations 3 --out " + at("real") + common);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(root / "real" / "frame_00004.png"));
  EXPECT_FALSE(fs::exists(root / "real" / "frame_00001.png"));
  EXPECT_TRUE(fs::exists(root / "real" / "log.jsonl"));

  for (const char* out : {"m1", "m2"}) {
    r = run("train --iterations 3 --real " + at("real") + " --out " + at(out) + common);
    ASSERT_EQ(r.code, 0) << r.out;
  }
  const std::string a = slurp(root / "m1" / "checkpoint.vstg"), b = slurp(root / "m2" / "checkpoint.vstg");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);

  r = run("stylize --quiet --video " + at("x") + " --checkpoint " + at("m1/checkpoint.vstg") + " --out " + at("y"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(root / "y" / "frame_00005.png"));

  r = run("aesl --quiet --video " + at("x") + " --synth " + at("x") + " --csv " + at("a.csv") + " --label same");
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(root / "a.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "video_id,method_label,order,value");
  EXPECT_NE(csv.find("x,same,2,0\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("x,same,12,0\n"), std::string::npos) << csv;
}

TEST_F(Cli, FlagsOverrideConfigFile) {
  make_inputs();
  {
    std::ofstream cfg(root / "c.ini");
    cfg << "[mdan]\niterations = 9\nsegment = 2\n";
  }
  const Outcome r = run("gen-real --config " + at("c.ini") + " --iterations 1 --video " + at("x") + " --style " +
                    at("style.png") + " --out " + at("real"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto first = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(first["config"]["mdan"]["iterations"], 1);
  EXPECT_EQ(first["config"]["mdan"]["segment"], 2);
  EXPECT_EQ(first["config"]["gan"]["iterations"], 20000);
}

TEST_F(Cli, TrainEchoesDefaults) {
  make_inputs();
  ASSERT_EQ(run("gen-real --quiet --iterations 1 --video " + at("x") + " --style " + at("style.png") + " --out " +
                at("real")).code, 0);
  const Outcome r = run("train --iterations 0 --video " + at("x") + " --real " + at("real") + " --style " +
                    at("style.png") + " --out " + at("m"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto cfg = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')))["config"];
  EXPECT_EQ(cfg["gan"]["batch"], 3);
  EXPECT_EQ(cfg["adam"]["lr"], 0.02);
  EXPECT_EQ(cfg["adam"]["beta1"], 0.5);
  EXPECT_TRUE(fs::exists(root / "m" / "checkpoint.vstg"));
}

TEST_F(Cli, TrainRejectsResumeAndMisalignment) {
  make_inputs();
  Outcome r = run("train --resume --video " + at("x") + " --real " + at("x") + " --style " + at("style.png") +
              " --out " + at("m"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("--resume"), std::string::npos) << r.out;

  fs::create_directories(root / "short");
  fs::copy_file(root / "x" / "frame_00000.png", root / "short" / "frame_00000.png");
  fs::copy_file(root / "x" / "frame_00002.png", root / "short" / "frame_00002.png");
  r = run("train --quiet --video " + at("x") + " --real " + at("short") + " --style " + at("style.png") + " --out " +
          at("m"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("frame 4"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("generator"), std::string::npos) << r.out;
}

TEST_F(Cli, MissingInputNamesComponent) {
  const Outcome r = run("aesl --video " + at("none") + " --synth " + at("none") + " --csv " + at("a.csv"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("video-io"), std::string::npos) << r.out;
}

TEST_F(Cli, GradcheckOpsReportsWorstCoordinate) {
  const Outcome r = run("gradcheck --target ops --seed 1");
  std::istringstream lines(r.out);
  std::string line;
  int checks = 0;
  bool summary = false;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    if (j["event"] == "check") {
      ++checks;
      EXPECT_FALSE(j["worst"].get<std::string>().empty());
    }
    if (j["event"] == "summary") {
      summary = true;
      EXPECT_EQ(r.code, j["passed"].get<bool>() ? 0 : 1);
    }
  }
  EXPECT_GT(checks, 10);
  EXPECT_TRUE(summary);
}

TEST_F(Cli, BadTargetIsUsageError) { EXPECT_NE(run("gradcheck --target nope").code, 0); }
