"""Geometry-based parcellation of short association bundles."""

import json

from ._core import (
    DEFAULT_RESAMPLE_POINTS,
    Atlas,
    GeolabError,
    GeometryError,
    InputError,
    arc_length,
    bundle_adjacency,
    confusion_scores,
    load_atlas,
    mdf,
    mmea,
    plane_normal,
    quickbundles,
    read_tck,
    resample,
    shape_angle,
    write_tck,
)
from . import _core


def _config(config):
    return "" if config is None else json.dumps(config)


def build_atlas(bundles, config=None):
    """Build an atlas from {bundle id: [(n, 3) arrays]}."""
    return _core._build_atlas(sorted(bundles.items()), _config(config))


def parcellate(atlas, subject, config=None):
    """Label a list of (n, 3) streamlines. Returns {"labels": {id: indices}, ...}."""
    return _core._parcellate(atlas, list(subject), _config(config))


def generate_scene(spec):
    """Synthetic scene from a spec dict, as written by `geolab synth`."""
    return _core._generate_scene(json.dumps(spec))


__all__ = [
    "DEFAULT_RESAMPLE_POINTS",
    "Atlas",
    "GeolabError",
    "GeometryError",
    "InputError",
    "arc_length",
    "build_atlas",
    "bundle_adjacency",
    "confusion_scores",
    "generate_scene",
    "load_atlas",
    "mdf",
    "mmea",
    "parcellate",
    "plane_normal",
    "quickbundles",
    "read_tck",
    "resample",
    "shape_angle",
    "write_tck",
]
