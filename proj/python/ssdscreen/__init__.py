# python/ssdscreen/__init__.py

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

"""Subject-level speech sound disorder screening."""

import json

from ._ssdscreen import (
    Error,
    config_hash,
    crossval_json,
    evaluate,
    extract_ivector,
    lpr,
    lpr_frames,
    sigmoid,
    synth,
)

__all__ = [
    "Error",
    "config_hash",
    "crossval",
    "crossval_json",
    "evaluate",
    "extract_ivector",
    "lpr",
    "lpr_frames",
    "sigmoid",
    "synth",
]


def crossval(config, overrides=None):
    """Runs speaker-disjoint cross-validation and returns the report as a dict."""
    sets = {k: str(v) for k, v in (overrides or {}).items()}
    return json.loads(crossval_json(str(config), sets))
