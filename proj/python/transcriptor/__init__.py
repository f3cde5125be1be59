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

"""Score transcript digitizer: grid detection and CRNN/CTC digit recognition."""

from ._core import (
    ModelWeights,
    TranscriptorError,
    beam_decode,
    binarize,
    class_anchor,
    collapse_path,
    ctc_loss,
    deskew,
    detect_grid,
    forward,
    gaussian_blur,
    greedy_decode,
    load_image,
    load_weights,
    manifest_tensors,
    otsu_threshold,
    parse_score,
    preprocess_cell,
    process_image,
    random_weights,
    recognize_cell,
    rotate,
    save_image,
    save_weights,
    synthesize,
    template_match_ncc,
)

__all__ = [name for name in dir() if not name.startswith("_")]
