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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "transcriptor/error.h"
#include "transcriptor/pipeline.h"

namespace transcriptor::pipeline {
namespace {

using Json = nlohmann::ordered_json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string normalized_score(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    if (c == ',') c = '.';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string(), path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string(), path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidFormat, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string to_csv(const std::vector<TranscriptResult>& results) {
  std::string out = "class_id,student_id,score,confidence\n";
  char conf[32];
  for (const TranscriptResult& r : results) {
    for (const ScoreRecord& rec : r.records) {
      std::snprintf(conf, sizeof(conf), "%.4f", rec.confidence);
      out += csv_field(r.class_id.value_or("")) + "," + csv_field(rec.student_id) + "," +
             csv_field(normalized_score(rec.score_text)) + "," + conf + "\n";
    }
  }
  return out;
}

std::string to_json(const std::vector<TranscriptResult>& results) {
  Json doc;
  doc["results"] = Json::array();
  for (const TranscriptResult& r : results) {
    Json page;
    page["source"] = r.source;
    page["class_id"] = r.class_id ? Json(*r.class_id) : Json(nullptr);
    page["deskew_angle"] = r.deskew_angle;
    page["header_rows"] = r.header_rows;
    page["grid"] = {{"rows", r.grid.rows},
                    {"cols", r.grid.cols},
                    {"h_positions", r.grid.h_positions},
                    {"v_positions", r.grid.v_positions}};
    Json records = Json::array();
    for (const ScoreRecord& rec : r.records) {
      records.push_back({{"row", rec.row},
                         {"student_id", rec.student_id},
                         {"id_confidence", rec.id_confidence},
                         {"score_text", rec.score_text},
                         {"score", rec.score_value ? Json(*rec.score_value) : Json(nullptr)},
                         {"confidence", rec.confidence},
                         {"flagged", rec.flagged}});
    }
    page["records"] = std::move(records);
    doc["results"].push_back(std::move(page));
  }
  return doc.dump(2) + "\n";
}

std::vector<TranscriptResult> results_from_json(std::string_view text) {
  const Json doc = parse_json(text);
  std::vector<TranscriptResult> out;
  try {
    for (const Json& page : doc.at("results")) {
      TranscriptResult r;
      r.source = page.at("source").get<std::string>();
      if (!page.at("class_id").is_null()) r.class_id = page.at("class_id").get<std::string>();
      r.deskew_angle = page.at("deskew_angle").get<double>();
      r.header_rows = page.at("header_rows").get<int>();
      const Json& g = page.at("grid");
      r.grid = {g.at("rows").get<int>(), g.at("cols").get<int>(),
                g.at("h_positions").get<std::vector<int>>(),
                g.at("v_positions").get<std::vector<int>>()};
      for (const Json& j : page.at("records")) {
        ScoreRecord rec;
        rec.row = j.at("row").get<int>();
        rec.student_id = j.at("student_id").get<std::string>();
        rec.id_confidence = j.at("id_confidence").get<double>();
        rec.score_text = j.at("score_text").get<std::string>();
        if (!j.at("score").is_null()) rec.score_value = j.at("score").get<double>();
        rec.confidence = j.at("confidence").get<double>();
        rec.flagged = j.at("flagged").get<bool>();
        r.records.push_back(std::move(rec));
      }
      out.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidFormat, std::string("bad results document: ") + e.what());
  }
  return out;
}

void emit_csv(const std::vector<TranscriptResult>& results, const std::filesystem::path& path) {
  write_text(path, to_csv(results));
}

void emit_json(const std::vector<TranscriptResult>& results, const std::filesystem::path& path) {
  write_text(path, to_json(results));
}

std::string truth_to_json(const PageTruth& truth) {
  Json doc;
  doc["image"] = truth.image;
  doc["class_id"] = truth.class_id ? Json(*truth.class_id) : Json(nullptr);
  doc["header_rows"] = truth.header_rows;
  doc["id_column"] = truth.id_column;
  doc["score_column"] = truth.score_column;
  doc["h_positions"] = truth.h_positions;
  doc["v_positions"] = truth.v_positions;
  Json rows = Json::array();
  for (const auto& [id, score] : truth.rows) rows.push_back(Json::array({id, score}));
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

PageTruth truth_from_json(std::string_view text) {
  const Json doc = parse_json(text);
  PageTruth t;
  try {
    t.image = doc.at("image").get<std::string>();
    if (doc.contains("class_id") && !doc.at("class_id").is_null()) {
      t.class_id = doc.at("class_id").get<std::string>();
    }
    t.header_rows = doc.value("header_rows", 0);
    t.id_column = doc.value("id_column", 1);
    t.score_column = doc.value("score_column", 5);
    t.h_positions = doc.at("h_positions").get<std::vector<int>>();
    t.v_positions = doc.at("v_positions").get<std::vector<int>>();
    for (const Json& row : doc.at("rows")) {
      if (!row.is_array() || row.size() != 2) {
        throw Error(ErrorCode::kInvalidFormat, "truth rows must be [student_id, score] pairs");
      }
      t.rows.emplace_back(row[0].get<std::string>(), row[1].get<std::string>());
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidFormat, std::string("bad truth document: ") + e.what());
  }
  return t;
}

PageTruth load_truth(const std::filesystem::path& path) {
  return truth_from_json(read_text(path));
}

std::vector<PageTruth> load_truths(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) return {load_truth(path)};
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".truth.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PageTruth> out;
  for (const auto& f : files) out.push_back(load_truth(f));
  return out;
}

}  // namespace transcriptor::pipeline
