# tests/python/test_smoke.py

# Copyright 2026 The ssdscreen Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import ssdscreen


def test_lpr_inverts_sigmoid():
    xs = np.linspace(-10, 10, 101)
    for x in xs:
        assert abs(ssdscreen.lpr(ssdscreen.sigmoid(x)) - x) < 1e-9
    assert ssdscreen.lpr(0.5) == 0.0
    frames = ssdscreen.lpr_frames(np.array([[0.5, 0.9], [0.1, 1.0]]))
    assert frames[0, 0] == 0.0
    assert frames[0, 1] == pytest.approx(math.log(9.0))
    assert frames[1, 1] == pytest.approx(math.log((1 - 1e-6) / 1e-6))


def test_lpr_rejects_bad_probability():
    with pytest.raises(ssdscreen.Error):
        ssdscreen.lpr(1.5)


def test_evaluate_hand_example():
    m = ssdscreen.evaluate([1, 1, 1, 0, 0, 0, 0, 0, 0, 1], [1, 1, 1, 1, 1, 0, 0, 0, 0, 0])
    assert (m["tp"], m["fn"], m["tn"], m["fp"]) == (3, 2, 4, 1)
    assert m["uar"] == pytest.approx(0.7)


def test_synth_and_crossval(tmp_path):
    ssdscreen.synth(str(tmp_path), n_td=6, n_ssd=6, words=5, dim=8, seed=1)
    cfg = tmp_path / "experiment.cfg"
    small = {"ivector.components": 4, "ivector.rank": 3, "ivector.tv_iters": 2,
             "posterior.epochs": 10}
    a = ssdscreen.crossval(cfg, small)
    b = ssdscreen.crossval(cfg, small)
    assert a == b
    assert len(a["folds"]) == 5
    assert 0.0 <= a["mean_uar"] <= 1.0
    assert a["config_hash"] == format(ssdscreen.config_hash(str(cfg), {k: str(v) for k, v in small.items()}), "016x")
    with pytest.raises(ssdscreen.Error):
        ssdscreen.crossval(cfg, {"no.such": 1})


def test_extract_ivector_missing_model(tmp_path):
    with pytest.raises(ssdscreen.Error):
        ssdscreen.extract_ivector(str(tmp_path / "absent.bin"), np.zeros((3, 2)))
