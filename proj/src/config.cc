// Copyright 2026 The Transcriptor Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "transcriptor/error.h"
#include "transcriptor/pipeline.h"

namespace transcriptor::pipeline {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kConfigError,
                "bad value for " + std::string(key) + ": '" + std::string(value) + "'",
                std::string(key));
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  std::string_view name;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
Field field(std::string_view name, T PipelineConfig::*member) {
  Field f;
  f.name = name;
  f.set = [member, name](PipelineConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, std::string>) {
      c.*member = std::string(v);
    } else {
      c.*member = parse_number<T>(name, v);
    }
  };
  f.get = [member](const PipelineConfig& c) -> std::string {
    if constexpr (std::is_same_v<T, std::string>) {
      return c.*member;
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_double(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  return f;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      field("id_column", &PipelineConfig::id_column),
      field("score_column", &PipelineConfig::score_column),
      field("header_rows", &PipelineConfig::header_rows),
      field("blur_sigma", &PipelineConfig::blur_sigma),
      field("blur_radius", &PipelineConfig::blur_radius),
      field("deskew_max_angle", &PipelineConfig::deskew_max_angle),
      field("deskew_coarse_step", &PipelineConfig::deskew_coarse_step),
      field("deskew_fine_step", &PipelineConfig::deskew_fine_step),
      field("h_min_len_frac", &PipelineConfig::h_min_len_frac),
      field("v_min_len_frac", &PipelineConfig::v_min_len_frac),
      field("hough_theta_window", &PipelineConfig::hough_theta_window),
      field("hough_theta_step", &PipelineConfig::hough_theta_step),
      field("hough_rho_step", &PipelineConfig::hough_rho_step),
      field("hough_vote_frac", &PipelineConfig::hough_vote_frac),
      field("merge_rho_tol", &PipelineConfig::merge_rho_tol),
      field("inset", &PipelineConfig::inset),
      field("beam_width", &PipelineConfig::beam_width),
      field("blank_ink_frac", &PipelineConfig::blank_ink_frac),
      field("review_confidence", &PipelineConfig::review_confidence),
      field("ocr_command", &PipelineConfig::ocr_command),
      field("id_recognizer", &PipelineConfig::id_recognizer),
      field("class_id_template", &PipelineConfig::class_id_template),
      field("class_id_min_score", &PipelineConfig::class_id_min_score),
      field("class_id_region_width", &PipelineConfig::class_id_region_width),
      field("threads", &PipelineConfig::threads),
  };
  return all;
}

void fail(const std::string& message) { throw Error(ErrorCode::kConfigError, message); }

}  // namespace

void PipelineConfig::validate() const {
  if (id_column < 0 || score_column < 0) fail("column indices must be nonnegative");
  if (id_column == score_column) fail("id_column and score_column must differ");
  if (header_rows < 0) fail("header_rows must be >= 0");
  if (!(blur_sigma > 0.0) || blur_radius < 1) fail("blur needs sigma > 0 and radius >= 1");
  if (inset < 0) fail("inset must be >= 0");
  if (beam_width < 1) fail("beam_width must be >= 1");
  if (id_recognizer != "crnn" && id_recognizer != "external") {
    fail("id_recognizer must be 'crnn' or 'external'");
  }
  if (id_recognizer == "external" && ocr_command.empty()) {
    fail("id_recognizer=external needs ocr_command");
  }
  if (class_id_region_width < 1) fail("class_id_region_width must be >= 1");
}

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& all = fields();
    const auto it = std::find_if(all.begin(), all.end(),
                                 [key](const Field& f) { return f.name == key; });
    if (it == all.end()) {
      throw Error(ErrorCode::kConfigError, "unknown config key '" + std::string(key) + "'",
                  std::string(key));
    }
    it->set(config, value);
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "cannot open config " + path.string(), path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  PipelineConfig config = parse_config(buffer.str());
  // A relative template path names a file next to the config.
  if (!config.class_id_template.empty() &&
      std::filesystem::path(config.class_id_template).is_relative()) {
    config.class_id_template = (path.parent_path() / config.class_id_template).string();
  }
  return config;
}

std::string format_config(const PipelineConfig& config) {
  std::string out;
  for (const Field& f : fields()) {
    out += std::string(f.name) + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace transcriptor::pipeline
