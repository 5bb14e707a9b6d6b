"""
Procedural multi-identity face generator with ground-truth semantics.
"""

from .config import SynthConfig
from .dataset import (
    GRID_LEVELS,
    MANIFEST_NAME,
    SyntheticDataset,
    build_dataset,
    correspondence_grid,
    generate_dataset,
    generate_identity_images,
    load_dataset,
    read_manifest,
    write_dataset,
)
from .keypoints import KEYPOINT_DIM, LANDMARKS, keypoints_from, semantic_gain
from .render import render
from .style import IdentityStyle, blend_styles, identity_style, identity_styles

__all__ = [
    "GRID_LEVELS",
    "KEYPOINT_DIM",
    "LANDMARKS",
    "MANIFEST_NAME",
    "IdentityStyle",
    "SynthConfig",
    "SyntheticDataset",
    "blend_styles",
    "build_dataset",
    "correspondence_grid",
    "generate_dataset",
    "generate_identity_images",
    "identity_style",
    "identity_styles",
    "keypoints_from",
    "load_dataset",
    "read_manifest",
    "render",
    "semantic_gain",
    "write_dataset",
]
