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

// vstgan command-line front end. Uses only the C interface.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vstgan/vstgan.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Failure of a C call, tagged with the component that raised it.
struct Failure {
  std::string component;
  vst_status status;
  std::string message;
};

void check(vst_status s, const std::string& component) {
  if (s != VST_OK) throw Failure{component, s, vst_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<vst_config, Deleter<vst_config, vst_config_free>>;
using Video = std::unique_ptr<vst_video, Deleter<vst_video, vst_video_free>>;
using Image = std::unique_ptr<vst_image, Deleter<vst_image, vst_image_free>>;
using RealSet = std::unique_ptr<vst_real_set, Deleter<vst_real_set, vst_real_set_free>>;
using Model = std::unique_ptr<vst_model, Deleter<vst_model, vst_model_free>>;
using Report = std::unique_ptr<vst_gradcheck_report, Deleter<vst_gradcheck_report, vst_gradcheck_free>>;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
  std::vector<std::string> sets;
};

// JSON-lines sink: stdout unless quiet, plus an optional log file.
class Log {
 public:
  explicit Log(bool quiet) : quiet_(quiet) {}
  void open(const fs::path& path) {
    file_.open(path, std::ios::trunc);
    if (!file_) throw Failure{"log", VST_ERR_IO, "cannot open " + path.string()};
  }
  void write(const json& j) {
    const std::string line = j.dump();
    if (!quiet_) std::cout << line << '\n' << std::flush;
    if (file_) file_ << line << '\n';
  }

 private:
  bool quiet_;
  std::ofstream file_;
};

std::string take_string(char* s) {
  std::string out = s ? s : "";
  vst_string_free(s);
  return out;
}

// defaults < config file < --set entries < dedicated flags
Config resolve_config(const Common& c, const std::vector<std::pair<std::string, std::string>>& flags) {
  vst_config* raw = nullptr;
  check(vst_config_create(&raw), "config");
  Config cfg(raw);
  if (!c.config_path.empty()) check(vst_config_load(cfg.get(), c.config_path.c_str()), "config");
  for (const std::string& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Failure{"config", VST_ERR_INVALID_ARGUMENT, "--set expects key=value, got '" + s + "'"};
    check(vst_config_set(cfg.get(), s.substr(0, eq).c_str(), s.substr(eq + 1).c_str()), "config");
  }
  if (c.seed) check(vst_config_set(cfg.get(), "run.seed", std::to_string(*c.seed).c_str()), "config");
  for (const auto& [key, value] : flags) check(vst_config_set(cfg.get(), key.c_str(), value.c_str()), "config");
  return cfg;
}

json config_json(const vst_config* cfg) {
  char* text = nullptr;
  check(vst_config_json(cfg, &text), "config");
  return json::parse(take_string(text));
}

void log_start(Log& log, const std::string& command, const vst_config* cfg, json inputs) {
  json j;
  j["event"] = "config";
  j["command"] = command;
  if (cfg) j["config"] = config_json(cfg);
  j["inputs"] = std::move(inputs);
  log.write(j);
}

json record_json(const vst_log_record& r) {
  json j;
  j["event"] = "iteration";
  j["phase"] = r.phase;
  if (std::string(r.phase) == "gen-real") {
    j["segment"] = r.segment;
  } else {
    j["window_start"] = r.window_start;
  }
  j["iteration"] = r.iteration;
  j["total"] = r.total;
  j["style"] = r.style;
  j["content"] = r.content;
  j["evolve_sync"] = r.evolve_sync;
  j["smoothness"] = r.smoothness;
  j["d_objective"] = r.d_objective;
  return j;
}

void on_record(const vst_log_record* r, void* user) { static_cast<Log*>(user)->write(record_json(*r)); }

fs::path require_out(const Common& c, const std::string& command) {
  if (c.out.empty()) throw Failure{command, VST_ERR_INVALID_ARGUMENT, "--out is required"};
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw Failure{command, VST_ERR_IO, "cannot create " + c.out + ": " + ec.message()};
  return c.out;
}

Video load_video(const std::string& dir, std::size_t stride = 1) {
  vst_video* v = nullptr;
  check(vst_video_load(dir.c_str(), stride, &v), "video-io");
  return Video(v);
}

Image load_style(const std::string& png) {
  vst_image* s = nullptr;
  check(vst_image_load(png.c_str(), &s), "video-io");
  return Image(s);
}

std::size_t frame_count(const vst_video* v) {
  std::size_t n = 0;
  check(vst_video_info(v, &n, nullptr, nullptr), "video-io");
  return n;
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> orders;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      orders.push_back(v);
    } catch (const std::exception&) {
      throw Failure{"aesl", VST_ERR_INVALID_ARGUMENT, "bad order '" + item + "' in --orders"};
    }
  }
  if (orders.empty()) throw Failure{"aesl", VST_ERR_INVALID_ARGUMENT, "--orders is empty"};
  return orders;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video style transfer with the evolve-sync loss"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Configuration file ([section] key = value)");
    sub->add_option("--seed", common.seed, "Base seed (overrides run.seed)");
    sub->add_option("--out", common.out, "Output directory");
    sub->add_flag("--quiet", common.quiet, "Suppress JSON-lines output on stdout");
    sub->add_option("--set", common.sets, "Override a setting, e.g. --set mdan.iterations=300");
  };

  std::string video, style, real, synth, checkpoint, csv, kind = "translating-square", target = "ops";
  std::string orders_text = "2,4,6,8,10,12", label = "vst-gan", style_out;
  std::optional<int> iterations;
  bool no_recurrent = false, resume = false;
  std::size_t frames = 16, size = 32;
  double noise = 0.05;

  auto* gen_real = app.add_subcommand("gen-real", "Synthesize real samples on the even frames of a video");
  add_common(gen_real);
  gen_real->add_option("--video", video, "Source frame directory")->required();
  gen_real->add_option("--style", style, "Style image (PNG)")->required();
  gen_real->add_option("--iterations", iterations, "Pixel iterations per segment (mdan.iterations)");

  auto* train = app.add_subcommand("train", "Train the generator against real samples");
  add_common(train);
  train->add_option("--video", video, "Source frame directory")->required();
  train->add_option("--real", real, "Real-sample directory written by gen-real")->required();
  train->add_option("--style", style, "Style image (PNG)")->required();
  train->add_option("--iterations", iterations, "Generator iterations (gan.iterations)");
  train->add_flag("--no-recurrent", no_recurrent, "Hold the recurrent weight W_h at zero");
  train->add_flag("--resume", resume, "Not supported");

  auto* stylize = app.add_subcommand("stylize", "Run a trained generator over a video");
  add_common(stylize);
  stylize->add_option("--video", video, "Source frame directory")->required();
  stylize->add_option("--checkpoint", checkpoint, "Checkpoint written by train")->required();

  auto* aesl = app.add_subcommand("aesl", "Averaging evolve-sync loss of a synthesized video");
  add_common(aesl);
  aesl->add_option("--video", video, "Source frame directory")->required();
  aesl->add_option("--synth", synth, "Synthesized frame directory")->required();
  aesl->add_option("--orders", orders_text, "Comma-separated orders");
  aesl->add_option("--csv", csv, "CSV output path (default OUT/aesl.csv)");
  aesl->add_option("--label", label, "method_label column value");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  add_common(gradcheck);
  gradcheck->add_option("--target", target, "ops, eq4, eq7 or all")
      ->check(CLI::IsMember({"ops", "eq4", "eq7", "all"}));

  auto* fixture = app.add_subcommand("make-fixture", "Write a synthetic video");
  add_common(fixture);
  fixture->add_option("--kind", kind, "translating-square, translating-texture or static-plus-noise");
  fixture->add_option("--frames", frames, "Frame count (>= 4)");
  fixture->add_option("--size", size, "Frame width and height");
  fixture->add_option("--noise", noise, "Noise sigma for static-plus-noise");
  fixture->add_option("--style-out", style_out, "Also write a synthetic style image to this PNG");

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  Log log(common.quiet);
  try {
    if (command == "gen-real") {
      std::vector<std::pair<std::string, std::string>> flags;
      if (iterations) flags.emplace_back("mdan.iterations", std::to_string(*iterations));
      Config cfg = resolve_config(common, flags);
      const fs::path out = require_out(common, command);
      log.open(out / "log.jsonl");
      log_start(log, command, cfg.get(), {{"video", video}, {"style", style}, {"out", out.string()}});
      Video x = load_video(video);
      Image s = load_style(style);
      vst_real_set* raw = nullptr;
      check(vst_gen_real(x.get(), s.get(), cfg.get(), on_record, &log, &raw), "mdan");
      RealSet set(raw);
      check(vst_real_set_save(set.get(), out.string().c_str()), "video-io");
      for (std::size_t k = 0; k < vst_real_set_segments(set.get()); ++k) {
        vst_log_record first{}, last{};
        check(vst_real_set_segment(set.get(), k, &first, &last), "mdan");
        log.write({{"event", "segment"}, {"segment", k}, {"initial", record_json(first)}, {"final", record_json(last)}});
      }
      log.write({{"event", "done"}, {"command", command}, {"frames", (frame_count(x.get()) + 1) / 2}});
    } else if (command == "train") {
      if (resume) throw Failure{"train", VST_ERR_INVALID_ARGUMENT, "--resume is not supported: training always starts from scratch"};
      std::vector<std::pair<std::string, std::string>> flags;
      if (iterations) flags.emplace_back("gan.iterations", std::to_string(*iterations));
      if (no_recurrent) flags.emplace_back("gan.recurrent", "false");
      Config cfg = resolve_config(common, flags);
      const fs::path out = require_out(common, command);
      log.open(out / "log.jsonl");
      log_start(log, command, cfg.get(),
                {{"video", video}, {"real", real}, {"style", style}, {"out", out.string()}});
      Video x = load_video(video);
      Image s = load_style(style);
      vst_real_set* raw_set = nullptr;
      check(vst_real_set_load(real.c_str(), &raw_set), "video-io");
      RealSet set(raw_set);
      vst_model* raw_model = nullptr;
      check(vst_train(x.get(), set.get(), s.get(), cfg.get(), on_record, &log, &raw_model), "generator");
      Model model(raw_model);
      const fs::path ckpt = out / "checkpoint.vstg";
      check(vst_model_save(model.get(), ckpt.string().c_str()), "checkpoint");
      log.write({{"event", "done"}, {"command", command}, {"checkpoint", ckpt.string()}});
    } else if (command == "stylize") {
      vst_model* raw_model = nullptr;
      check(vst_model_load(checkpoint.c_str(), &raw_model), "checkpoint");
      Model model(raw_model);
      vst_config* raw_cfg = nullptr;
      check(vst_model_config(model.get(), &raw_cfg), "checkpoint");
      Config cfg(raw_cfg);
      const fs::path out = require_out(common, command);
      log_start(log, command, cfg.get(), {{"video", video}, {"checkpoint", checkpoint}, {"out", out.string()}});
      Video x = load_video(video);
      vst_video* raw_y = nullptr;
      check(vst_stylize(model.get(), x.get(), &raw_y), "generator");
      Video y(raw_y);
      check(vst_video_save(y.get(), out.string().c_str(), 1), "video-io");
      log.write({{"event", "done"}, {"command", command}, {"frames", frame_count(y.get())}});
    } else if (command == "aesl") {
      Config cfg = resolve_config(common, {});
      const std::vector<int> orders = parse_orders(orders_text);
      fs::path csv_path = csv;
      if (csv_path.empty()) csv_path = require_out(common, command) / "aesl.csv";
      log_start(log, command, cfg.get(),
                {{"video", video}, {"synth", synth}, {"orders", orders}, {"csv", csv_path.string()}});
      Video x = load_video(video);
      Video y = load_video(synth);
      std::vector<double> values(orders.size());
      check(vst_aesl(x.get(), y.get(), cfg.get(), orders.data(), orders.size(), values.data()), "evolvesync");
      std::ofstream out(csv_path, std::ios::trunc);
      if (!out) throw Failure{"aesl", VST_ERR_IO, "cannot write " + csv_path.string()};
      out << "video_id,method_label,order,value\n";
      for (std::size_t k = 0; k < orders.size(); ++k) {
        out << vst_video_id(x.get()) << ',' << label << ',' << orders[k] << ',' << format_value(values[k]) << '\n';
        log.write({{"event", "aesl"}, {"order", orders[k]}, {"value", values[k]}});
      }
      if (!out) throw Failure{"aesl", VST_ERR_IO, "failed writing " + csv_path.string()};
    } else if (command == "gradcheck") {
      Config cfg = resolve_config(common, {});
      const std::uint64_t seed = vst_config_seed(cfg.get());
      log_start(log, command, cfg.get(), {{"target", target}, {"seed", seed}});
      const std::vector<std::string> targets =
          target == "all" ? std::vector<std::string>{"ops", "eq4", "eq7"} : std::vector<std::string>{target};
      bool all_passed = true;
      for (const std::string& t : targets) {
        vst_gradcheck_report* raw = nullptr;
        check(vst_gradcheck(t.c_str(), seed, &raw), "gradcheck");
        Report report(raw);
        for (std::size_t k = 0; k < vst_gradcheck_count(report.get()); ++k) {
          vst_gradcheck_entry e{};
          check(vst_gradcheck_entry_at(report.get(), k, &e), "gradcheck");
          log.write({{"event", "check"},          {"target", e.target},
                     {"name", e.name},            {"max_rel_error", e.max_rel_error},
                     {"tolerance", e.tolerance},  {"norm_rel_error", e.norm_rel_error},
                     {"coordinates", e.coordinates}, {"excluded", e.excluded},
                     {"worst", e.worst},          {"passed", e.passed != 0}});
        }
        const bool passed = vst_gradcheck_passed(report.get()) != 0;
        all_passed = all_passed && passed;
        log.write({{"event", "summary"}, {"target", t}, {"passed", passed},
                   {"seconds", vst_gradcheck_seconds(report.get())}});
        if (common.quiet) std::cout << t << ": " << (passed ? "PASS" : "FAIL") << '\n';
      }
      if (!all_passed) {
        std::cerr << "vstgan gradcheck: gradient check failed (see report)\n";
        return 1;
      }
    } else if (command == "make-fixture") {
      Config cfg = resolve_config(common, {});
      const std::uint64_t seed = vst_config_seed(cfg.get());
      const fs::path out = require_out(common, command);
      log_start(log, command, nullptr,
                {{"kind", kind}, {"seed", seed}, {"frames", frames}, {"size", size}, {"noise", noise},
                 {"out", out.string()}});
      vst_video* raw = nullptr;
      check(vst_video_fixture(kind.c_str(), seed, frames, size, noise, &raw), "video-io");
      Video v(raw);
      check(vst_video_save(v.get(), out.string().c_str(), 1), "video-io");
      if (!style_out.empty()) {
        vst_image* raw_s = nullptr;
        check(vst_image_style_fixture(seed, size, &raw_s), "video-io");
        Image s(raw_s);
        check(vst_image_save(s.get(), style_out.c_str()), "video-io");
      }
      log.write({{"event", "done"}, {"command", command}, {"frames", frames}});
    }
  } catch (const Failure& f) {
    std::cerr << "vstgan " << command << ": " << f.component << " (" << vst_status_name(f.status)
              << "): " << f.message << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vstgan " << command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
