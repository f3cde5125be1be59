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

// Command-line front end: extract, eval, synth and fixture.
//
// Exit status is 0 on success, 1 when any document fails and 2 when the
// invocation itself is unusable (bad flags, config or weights).

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "transcriptor/crnn.h"
#include "transcriptor/error.h"
#include "transcriptor/pipeline.h"
#include "transcriptor/synth.h"

namespace fs = std::filesystem;
using namespace transcriptor;

namespace {

constexpr int kOk = 0;
constexpr int kDocumentError = 1;
constexpr int kUsageError = 2;

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

std::vector<fs::path> collect_inputs(const fs::path& input) {
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.is_regular_file() && is_image(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct ExtractArgs {
  std::string input, weights, config, format = "csv", out, debug_dir;
};

int run_extract(const ExtractArgs& args) {
  pipeline::PipelineConfig config;
  crnn::ModelWeights weights;
  try {
    config = pipeline::load_config(args.config);
    weights = crnn::load_weights(args.weights);
    weights.require_complete();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  if (!fs::exists(args.input)) {
    std::cerr << "error: input not found: " << args.input << "\n";
    return kUsageError;
  }

  std::vector<pipeline::TranscriptResult> results;
  int failures = 0;
  for (const fs::path& file : collect_inputs(args.input)) {
    try {
      pipeline::DebugSink sink{args.debug_dir, file.stem().string()};
      results.push_back(pipeline::process_transcript(file, config, weights,
                                                     args.debug_dir.empty() ? nullptr : &sink));
    } catch (const Error& e) {
      std::cerr << file.string() << ": " << e.what() << "\n";
      ++failures;
    }
  }
  try {
    if (args.format == "json") {
      pipeline::emit_json(results, args.out);
    } else {
      pipeline::emit_csv(results, args.out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDocumentError;
  }
  return failures > 0 ? kDocumentError : kOk;
}

int run_eval(const std::string& pred_path, const std::string& truth_path) {
  try {
    std::ifstream in(pred_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + pred_path, pred_path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto metrics =
        pipeline::evaluate(pipeline::results_from_json(text), pipeline::load_truths(truth_path));
    std::printf("vertical_line_acc   %.4f (%lld/%lld)\n", metrics.vertical_line_acc(),
                static_cast<long long>(metrics.vertical_correct),
                static_cast<long long>(metrics.vertical_total));
    std::printf("horizontal_line_acc %.4f (%lld/%lld)\n", metrics.horizontal_line_acc(),
                static_cast<long long>(metrics.horizontal_correct),
                static_cast<long long>(metrics.horizontal_total));
    std::printf("id_seq_acc          %.4f (%lld/%lld)\n", metrics.id_seq_acc(),
                static_cast<long long>(metrics.id_correct),
                static_cast<long long>(metrics.id_total));
    std::printf("score_seq_acc       %.4f (%lld/%lld)\n", metrics.score_seq_acc(),
                static_cast<long long>(metrics.score_correct),
                static_cast<long long>(metrics.score_total));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDocumentError;
  }
  return kOk;
}

struct SynthArgs {
  std::uint64_t seed = 1;
  int rows = 30;
  int count = 1;
  double skew = 0.0;
  double noise = 0.0;
  std::string out;
};

int run_synth(const SynthArgs& args) {
  try {
    for (int i = 0; i < args.count; ++i) {
      const auto files = synth::synth_transcript(args.seed + static_cast<std::uint64_t>(i),
                                                 args.rows, args.skew, args.noise, args.out);
      std::cout << files.image.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidParam ? kUsageError : kDocumentError;
  }
  return kOk;
}

int run_fixture(std::uint64_t seed, const std::string& out) {
  try {
    crnn::save_weights(crnn::random_weights(seed), out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDocumentError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score transcript digitizer"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto* ex = app.add_subcommand("extract", "Transcribe page images to CSV or JSON");
  ex->add_option("--input", extract.input, "Image file or directory")->required();
  ex->add_option("--weights", extract.weights, "CRNW1 weight file")->required();
  ex->add_option("--config", extract.config, "Pipeline config file")->required();
  ex->add_option("--format", extract.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  ex->add_option("--out", extract.out, "Output path")->required();
  ex->add_option("--debug-dir", extract.debug_dir, "Directory for intermediate images");

  std::string pred, truth;
  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  ev->add_option("--pred", pred, "Results JSON from extract")->required();
  ev->add_option("--truth", truth, "Truth file or directory of *.truth.json")->required();

  SynthArgs synth_args;
  auto* sy = app.add_subcommand("synth", "Render synthetic transcripts with ground truth");
  sy->add_option("--seed", synth_args.seed, "First seed");
  sy->add_option("--rows", synth_args.rows, "Data rows per page");
  sy->add_option("--count", synth_args.count, "Number of pages")->check(CLI::PositiveNumber);
  sy->add_option("--skew", synth_args.skew, "Rotation in degrees, counterclockwise");
  sy->add_option("--noise", synth_args.noise, "Gaussian pixel noise sigma");
  sy->add_option("--out", synth_args.out, "Output directory")->required();

  std::uint64_t fixture_seed = 0;
  std::string fixture_out;
  auto* fx = app.add_subcommand("fixture", "Write seeded random CRNW1 weights");
  fx->add_option("--seed", fixture_seed, "Seed")->required();
  fx->add_option("--out", fixture_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (ex->parsed()) return run_extract(extract);
  if (ev->parsed()) return run_eval(pred, truth);
  if (sy->parsed()) return run_synth(synth_args);
  return run_fixture(fixture_seed, fixture_out);
}
