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

#include "vstgan/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace vst {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorKind::kInvalidArgument, "'" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "'" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorKind::kInvalidArgument, "'" + std::string(key) + "' expects true/false, got '" + std::string(v) + "'");
}

using Setter = std::function<void(TrainConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"run.seed", [](TrainConfig& c, auto k, auto v) { c.seed = parse_u64(k, v); }},
      {"run.encoder_seed", [](TrainConfig& c, auto k, auto v) { c.encoder_seed = parse_u64(k, v); }},
      {"loss.delta", [](TrainConfig& c, auto k, auto v) { c.loss.delta = parse_int(k, v); }},
      {"loss.alpha_micro", [](TrainConfig& c, auto k, auto v) { c.loss.alpha_micro = parse_double(k, v); }},
      {"loss.alpha_macro", [](TrainConfig& c, auto k, auto v) { c.loss.alpha_macro = parse_double(k, v); }},
      {"loss.omega", [](TrainConfig& c, auto k, auto v) { c.loss.omega = parse_double(k, v); }},
      {"kernel.bandwidth",
       [](TrainConfig& c, auto k, auto v) {
         if (v == "median") {
           c.kernel.bandwidth.reset();
         } else {
           c.kernel.bandwidth = parse_double(k, v);
         }
       }},
      {"adam.lr", [](TrainConfig& c, auto k, auto v) { c.adam.lr = parse_double(k, v); }},
      {"adam.beta1", [](TrainConfig& c, auto k, auto v) { c.adam.beta1 = parse_double(k, v); }},
      {"adam.beta2", [](TrainConfig& c, auto k, auto v) { c.adam.beta2 = parse_double(k, v); }},
      {"adam.eps", [](TrainConfig& c, auto k, auto v) { c.adam.eps = parse_double(k, v); }},
      {"mdan.iterations", [](TrainConfig& c, auto k, auto v) { c.mdan.iterations = parse_int(k, v); }},
      {"mdan.segment", [](TrainConfig& c, auto k, auto v) { c.mdan.segment = parse_int(k, v); }},
      {"mdan.anchors", [](TrainConfig& c, auto k, auto v) { c.mdan.anchors = parse_int(k, v); }},
      {"mdan.d_steps", [](TrainConfig& c, auto k, auto v) { c.mdan.d_steps = parse_int(k, v); }},
      {"gan.iterations", [](TrainConfig& c, auto k, auto v) { c.gan.iterations = parse_int(k, v); }},
      {"gan.batch", [](TrainConfig& c, auto k, auto v) { c.gan.batch = parse_int(k, v); }},
      {"gan.d_steps", [](TrainConfig& c, auto k, auto v) { c.gan.d_steps = parse_int(k, v); }},
      {"gan.recurrent", [](TrainConfig& c, auto k, auto v) { c.gan.recurrent = parse_bool(k, v); }},
  };
  return table;
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void TrainConfig::validate() const {
  loss.validate();
  kernel.validate();
  if (!(adam.lr >= 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
      !(adam.eps > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid ADAM settings");
  }
  if (mdan.iterations < 0) throw Error(ErrorKind::kInvalidArgument, "mdan.iterations must be >= 0");
  if (mdan.segment < 1) throw Error(ErrorKind::kInvalidArgument, "mdan.segment must be >= 1");
  if (mdan.anchors < 0) throw Error(ErrorKind::kInvalidArgument, "mdan.anchors must be >= 0");
  if (mdan.d_steps < 0) throw Error(ErrorKind::kInvalidArgument, "mdan.d_steps must be >= 0");
  if (gan.iterations < 0) throw Error(ErrorKind::kInvalidArgument, "gan.iterations must be >= 0");
  if (gan.batch < 2) throw Error(ErrorKind::kInvalidArgument, "gan.batch must be >= 2");
  if (gan.d_steps < 0) throw Error(ErrorKind::kInvalidArgument, "gan.d_steps must be >= 0");
}

void set_config_value(TrainConfig& config, std::string_view dotted_key, std::string_view value) {
  const auto& table = setters();
  auto it = table.find(dotted_key);
  if (it == table.end()) throw Error(ErrorKind::kInvalidArgument, "unknown config key '" + std::string(dotted_key) + "'");
  it->second(config, dotted_key, trim(value));
}

TrainConfig parse_config(std::string_view text, const TrainConfig& base) {
  TrainConfig config = base;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::kInvalidArgument, where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::kInvalidArgument, where + "expected 'key = value'");
    if (section.empty()) throw Error(ErrorKind::kInvalidArgument, where + "key outside of a [section]");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    try {
      set_config_value(config, key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    }
  }
  config.validate();
  return config;
}

TrainConfig load_config(const std::filesystem::path& path, const TrainConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string to_config_text(const TrainConfig& c) {
  std::ostringstream os;
  os << "[run]\n"
     << "seed = " << c.seed << "\n"
     << "encoder_seed = " << c.encoder_seed << "\n\n"
     << "[loss]\n"
     << "delta = " << c.loss.delta << "\n"
     << "alpha_micro = " << format_double(c.loss.alpha_micro) << "\n"
     << "alpha_macro = " << format_double(c.loss.alpha_macro) << "\n"
     << "omega = " << format_double(c.loss.omega) << "\n\n"
     << "[kernel]\n"
     << "bandwidth = " << (c.kernel.bandwidth ? format_double(*c.kernel.bandwidth) : std::string("median")) << "\n\n"
     << "[adam]\n"
     << "lr = " << format_double(c.adam.lr) << "\n"
     << "beta1 = " << format_double(c.adam.beta1) << "\n"
     << "beta2 = " << format_double(c.adam.beta2) << "\n"
     << "eps = " << format_double(c.adam.eps) << "\n\n"
     << "[mdan]\n"
     << "iterations = " << c.mdan.iterations << "\n"
     << "segment = " << c.mdan.segment << "\n"
     << "anchors = " << c.mdan.anchors << "\n"
     << "d_steps = " << c.mdan.d_steps << "\n\n"
     << "[gan]\n"
     << "iterations = " << c.gan.iterations << "\n"
     << "batch = " << c.gan.batch << "\n"
     << "d_steps = " << c.gan.d_steps << "\n"
     << "recurrent = " << (c.gan.recurrent ? "true" : "false") << "\n";
  return os.str();
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace vst
