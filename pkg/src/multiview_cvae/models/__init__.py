"""
Image CVAE, keypoint branches, the identity classifier and the inference procedures.
"""

from .classifier import IdentityClassifier
from .config import ModelConfig, normalize_variant
from .image_cvae import ImageCVAE
from .keypoint_cvae import KeypointCVAE, KeypointHead
from .multiview import MultiViewModel, build_model
from .networks import (
    MLP,
    ConvDecoder,
    ConvEncoder,
    IdentityEmbedding,
    decoder_output_shape,
    decoder_specs,
    encoder_output_shape,
    encoder_specs,
)
from .procedures import (
    encode_means,
    interpolate,
    interpolation_strip,
    reconstruct,
    regress_new_identity,
    retarget,
    retarget_keypoints,
    retarget_to_soft_identity,
)

__all__ = [
    "MLP",
    "ConvDecoder",
    "ConvEncoder",
    "IdentityClassifier",
    "IdentityEmbedding",
    "ImageCVAE",
    "KeypointCVAE",
    "KeypointHead",
    "ModelConfig",
    "MultiViewModel",
    "build_model",
    "decoder_output_shape",
    "decoder_specs",
    "encode_means",
    "encoder_output_shape",
    "encoder_specs",
    "interpolate",
    "interpolation_strip",
    "normalize_variant",
    "reconstruct",
    "regress_new_identity",
    "retarget",
    "retarget_keypoints",
    "retarget_to_soft_identity",
]
