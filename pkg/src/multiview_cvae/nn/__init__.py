from .init import normal_init, xavier_bound, xavier_init, zeros_init
from .layers import (
    Activation,
    Conv2d,
    ConvTranspose2d,
    Layer,
    LayerSpec,
    Linear,
    Module,
    Sequential,
    activate,
    build_layer,
)
from .losses import (
    LOGVAR_MAX,
    LOGVAR_MIN,
    clamp_logvar,
    cross_entropy,
    kl_standard_normal,
    l1_loss,
    one_hot,
    reparameterize,
    softmax,
)
from .optim import Adam, AdamState, adam_step

__all__ = [
    "Activation",
    "Adam",
    "AdamState",
    "Conv2d",
    "ConvTranspose2d",
    "LOGVAR_MAX",
    "LOGVAR_MIN",
    "Layer",
    "LayerSpec",
    "Linear",
    "Module",
    "Sequential",
    "activate",
    "adam_step",
    "build_layer",
    "clamp_logvar",
    "cross_entropy",
    "kl_standard_normal",
    "l1_loss",
    "normal_init",
    "one_hot",
    "reparameterize",
    "softmax",
    "xavier_bound",
    "xavier_init",
    "zeros_init",
]
