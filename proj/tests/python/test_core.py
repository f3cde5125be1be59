# Copyright 2026 The Transcriptor Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the Python bindings."""

import math

import numpy as np
import pytest

import transcriptor as tr


@pytest.fixture(scope="module")
def weights():
    return tr.random_weights(42)


def test_image_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(17, 23), dtype=np.uint8)
    tr.save_image(img, tmp_path / "a.pgm")
    back = tr.load_image(tmp_path / "a.pgm")
    assert back.dtype == np.uint8
    np.testing.assert_array_equal(back, img)


def test_missing_file_raises():
    with pytest.raises(tr.TranscriptorError, match="MissingFile"):
        tr.load_image("/nonexistent/page.pgm")


def test_otsu_splits_two_levels():
    img = np.full((10, 10), 200, dtype=np.uint8)
    img[:, :5] = 40
    t = tr.otsu_threshold(img)
    assert 40 <= t < 200
    mask = tr.binarize(img, t)
    assert mask[:, :5].all() and not mask[:, 5:].any()


def test_deskew_recovers_synthetic_skew():
    page, _ = tr.synthesize(3, rows=12, skew=2.0)
    blurred = tr.gaussian_blur(page)
    angle, curve, _ = tr.deskew(tr.binarize(blurred, tr.otsu_threshold(blurred)))
    assert abs(angle + 2.0) <= 0.25
    assert len(curve) == 41


def test_detect_grid_matches_truth():
    page, truth = tr.synthesize(1, rows=30)
    grid = tr.detect_grid(page, {"header_rows": 0})
    assert grid["h_positions"] == truth["h_positions"]
    assert grid["v_positions"] == truth["v_positions"]


def test_template_match_finds_anchor():
    page, _ = tr.synthesize(2, rows=4)
    x, y, score = tr.template_match_ncc(page[:300], tr.class_anchor())
    assert score > 0.9
    assert 60 <= x < 100


def test_ctc_decoders_and_loss():
    assert tr.collapse_path([1, 1, 12, 1, 12, 12]) == [1, 1]
    probs = np.full((4, 13), 0.05)
    probs[:, 12] = 0.4  # blank
    lp = np.log(probs)
    text, logp = tr.greedy_decode(lp)
    assert text == "" and logp == pytest.approx(4 * math.log(0.4))
    assert tr.beam_decode(lp, width=1)[0] == text
    assert tr.ctc_loss(lp, "") == pytest.approx(-4 * math.log(0.4))
    probs[1, 3] = 0.9
    assert tr.greedy_decode(np.log(probs))[0] == "3"


def test_weights_round_trip(tmp_path, weights):
    assert weights.complete() and not weights.missing()
    assert len(weights) == len(tr.manifest_tensors())
    tr.save_weights(weights, str(tmp_path / "w.crnw"))
    assert tr.load_weights(str(tmp_path / "w.crnw")).identical(weights)
    assert tr.ModelWeights.from_bytes(weights.to_bytes()).identical(weights)
    with pytest.raises(tr.TranscriptorError, match="BadMagic"):
        tr.ModelWeights.from_bytes(b"XXXX" + weights.to_bytes()[4:])


def test_forward_contract(weights):
    x = tr.preprocess_cell(np.full((30, 150), 255, dtype=np.uint8))
    out = tr.forward(weights, x)
    assert out.shape == (25, 13)
    np.testing.assert_allclose(np.exp(out).sum(axis=1), 1.0, atol=1e-5)
    np.testing.assert_array_equal(out, tr.forward(weights, x))


def test_parse_score():
    assert tr.parse_score("9,25") == 9.25
    with pytest.raises(tr.TranscriptorError, match="OutOfRange"):
        tr.parse_score("11")
    with pytest.raises(tr.TranscriptorError, match="InvalidFormat"):
        tr.parse_score("8..5")


def test_recognize_blank_cell(weights):
    assert tr.recognize_cell(np.full((30, 150), 255, dtype=np.uint8), weights) == ("", 1.0)


def test_process_image_structure(weights):
    page, truth = tr.synthesize(4, rows=16)
    result = tr.process_image(page, weights, {"header_rows": 0}, source="p.pgm")
    assert result["source"] == "p.pgm"
    assert result["grid"]["rows"] == 16
    assert result["grid"]["h_positions"] == truth["h_positions"]
    assert len(result["records"]) == 16
    assert [r["row"] for r in result["records"]] == list(range(16))
