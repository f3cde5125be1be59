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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <string>
#include <vector>

#include "transcriptor/crnn.h"
#include "transcriptor/ctc.h"
#include "transcriptor/error.h"
#include "transcriptor/grid.h"
#include "transcriptor/image.h"
#include "transcriptor/pipeline.h"
#include "transcriptor/preprocess.h"
#include "transcriptor/synth.h"

namespace py = pybind11;
using namespace transcriptor;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const U8Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D uint8 array");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  GrayImage img(w, h);
  std::memcpy(img.data().data(), a.data(), img.data().size());
  return img;
}

U8Array to_array(const GrayImage& img) {
  U8Array out({img.height(), img.width()});
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size());
  return out;
}

F32Array tensor_array(const nn::Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  F32Array out(shape);
  std::memcpy(out.mutable_data(), t.data(), t.size() * sizeof(float));
  return out;
}

nn::Tensor array_tensor(const F32Array& a) {
  nn::Shape shape(a.shape(), a.shape() + a.ndim());
  return nn::Tensor(shape, std::vector<float>(a.data(), a.data() + a.size()));
}

ctc::LogitsSequence to_logits(const F64Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a (steps, classes) array");
  return {static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
          std::vector<double>(a.data(), a.data() + a.size())};
}

F64Array logits_array(const ctc::LogitsSequence& lp) {
  F64Array out({lp.steps(), lp.classes()});
  std::memcpy(out.mutable_data(), lp.values().data(), lp.values().size() * sizeof(double));
  return out;
}

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

pipeline::PipelineConfig config_from(const py::object& config) {
  if (config.is_none()) return {};
  if (py::isinstance<py::str>(config)) return pipeline::parse_config(config.cast<std::string>());
  std::string text;
  for (const auto& [key, value] : config.cast<py::dict>()) {
    text += py::str(key).cast<std::string>() + " = " + py::str(value).cast<std::string>() + "\n";
  }
  return pipeline::parse_config(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Score transcript digitizer core";

  // Messages start with the error code name, e.g. "BadMagic: ...".
  py::register_exception<Error>(m, "TranscriptorError", PyExc_RuntimeError);

  // Raster.
  m.def("load_image", [](const std::filesystem::path& p) { return to_array(load_image(p)); },
        py::arg("path"));
  m.def("save_image", [](const U8Array& a, const std::filesystem::path& p) {
    save_image(to_image(a), p);
  }, py::arg("image"), py::arg("path"));

  // Preprocessing.
  m.def("otsu_threshold", [](const U8Array& a) { return preprocess::otsu_threshold(to_image(a)); });
  m.def("binarize", [](const U8Array& a, int t) {
    return to_array(preprocess::binarize(to_image(a), t));
  });
  m.def("gaussian_blur", [](const U8Array& a, double sigma, int radius) {
    return to_array(preprocess::gaussian_blur(to_image(a), sigma, radius));
  }, py::arg("image"), py::arg("sigma") = 1.0, py::arg("radius") = 2);
  m.def("rotate", [](const U8Array& a, double angle, int background) {
    return to_array(preprocess::rotate(to_image(a), angle, static_cast<std::uint8_t>(background)));
  }, py::arg("image"), py::arg("angle"), py::arg("background") = 255);
  m.def("deskew", [](const U8Array& mask, double max_angle, double coarse, double fine) {
    const auto r = preprocess::deskew(to_image(mask), {max_angle, coarse, fine});
    return py::make_tuple(r.report.applied_angle, r.report.score_curve, to_array(r.image));
  }, py::arg("mask"), py::arg("max_angle") = 5.0, py::arg("coarse_step") = 0.5,
     py::arg("fine_step") = 0.05);

  // Grid.
  m.def("detect_grid", [](const U8Array& a, const py::object& config) {
    const auto det = pipeline::detect_grid(to_image(a), config_from(config));
    py::dict out;
    out["deskew_angle"] = det.deskew_angle;
    out["threshold"] = det.threshold;
    out["h_positions"] = det.grid.h_positions();
    out["v_positions"] = det.grid.v_positions();
    return out;
  }, py::arg("image"), py::arg("config") = py::none());
  m.def("template_match_ncc", [](const U8Array& img, const U8Array& templ) {
    const auto r = grid::template_match_ncc(to_image(img), to_image(templ));
    return py::make_tuple(r.x, r.y, r.score);
  });

  // CTC.
  m.def("collapse_path", [](const std::vector<int>& path, int blank) {
    return ctc::collapse_path(path, blank);
  }, py::arg("path"), py::arg("blank") = 12);
  m.def("greedy_decode", [](const F64Array& lp) {
    const auto d = ctc::greedy_decode(to_logits(lp), ctc::Alphabet());
    return py::make_tuple(d.text, d.log_prob);
  });
  m.def("beam_decode", [](const F64Array& lp, std::size_t width) {
    const auto d = ctc::beam_decode(to_logits(lp), ctc::Alphabet(), width);
    return py::make_tuple(d.text, d.log_prob);
  }, py::arg("logprobs"), py::arg("width") = 8);
  m.def("ctc_loss", [](const F64Array& lp, const std::string& target) {
    return ctc::ctc_loss(to_logits(lp), ctc::Alphabet().encode(target));
  });

  // CRNN.
  py::class_<crnn::ModelWeights>(m, "ModelWeights")
      .def("names", [](const crnn::ModelWeights& w) {
        std::vector<std::string> names;
        for (const auto& spec : crnn::manifest().tensor_specs()) {
          if (w.contains(spec.name)) names.push_back(spec.name);
        }
        return names;
      })
      .def("__getitem__", [](const crnn::ModelWeights& w, const std::string& name) {
        return tensor_array(w.at(name));
      })
      .def("__setitem__", [](crnn::ModelWeights& w, const std::string& name, const F32Array& a) {
        w.set(name, array_tensor(a));
      })
      .def("__len__", &crnn::ModelWeights::size)
      .def("missing", &crnn::ModelWeights::missing)
      .def("complete", &crnn::ModelWeights::complete)
      .def("identical", &crnn::ModelWeights::identical)
      .def("to_bytes", [](const crnn::ModelWeights& w) {
        const auto bytes = crnn::serialize_weights(w);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      })
      .def_static("from_bytes", [](const py::bytes& b) {
        const std::string s = b;
        return crnn::parse_weights(
            {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
      });
  m.def("manifest_tensors", [] {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
    for (const auto& spec : crnn::manifest().tensor_specs())
      out.emplace_back(spec.name, spec.shape);
    return out;
  });
  m.def("random_weights", &crnn::random_weights, py::arg("seed"));
  m.def("load_weights", &crnn::load_weights, py::arg("path"));
  m.def("save_weights", &crnn::save_weights, py::arg("weights"), py::arg("path"));
  m.def("preprocess_cell", [](const U8Array& a) {
    return tensor_array(crnn::preprocess_cell(to_image(a)));
  });
  m.def("forward", [](const crnn::ModelWeights& w, const F32Array& x) {
    ctc::LogitsSequence lp;
    const nn::Tensor input = array_tensor(x);
    {
      py::gil_scoped_release release;
      lp = crnn::forward(w, input);
    }
    return logits_array(lp);
  }, py::arg("weights"), py::arg("input"));

  // Pipeline.
  m.def("parse_score", [](const std::string& text) { return pipeline::parse_score(text).value; });
  m.def("recognize_cell", [](const U8Array& cell, const crnn::ModelWeights& w, std::size_t beam) {
    const auto r = pipeline::recognize_cell(to_image(cell), w, beam);
    return py::make_tuple(r.text, r.confidence);
  }, py::arg("cell"), py::arg("weights"), py::arg("beam_width") = 8);
  m.def("process_image", [](const U8Array& a, const crnn::ModelWeights& w,
                            const py::object& config, const std::string& source) {
    const GrayImage img = to_image(a);
    const auto cfg = config_from(config);
    pipeline::TranscriptResult r;
    {
      py::gil_scoped_release release;
      r = pipeline::process_image(img, source, cfg, w);
    }
    // Materialize before the parsed document goes out of scope.
    const py::object doc = json_loads(pipeline::to_json({r}));
    return py::object(doc["results"][py::int_(0)]);
  }, py::arg("image"), py::arg("weights"), py::arg("config") = py::none(),
     py::arg("source") = "");
  m.def("synthesize", [](std::uint64_t seed, int rows, double skew, double noise) {
    const auto page = synth::synthesize({seed, rows, skew, noise});
    return py::make_tuple(to_array(page.image), json_loads(pipeline::truth_to_json(page.truth)));
  }, py::arg("seed"), py::arg("rows") = 30, py::arg("skew") = 0.0, py::arg("noise") = 0.0);
  m.def("class_anchor", [] { return to_array(synth::class_anchor()); });
}
