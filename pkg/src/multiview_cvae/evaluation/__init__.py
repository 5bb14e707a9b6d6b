"""
Metrics, latent probes, embedding export and the lambda_z sweep.
"""

from .ablation import LambdaZResult, mean_latent_distance, sweep_lambda_z
from .config import EvaluationConfig
from .evaluator import Evaluator
from .metrics import (
    Translations,
    ae_error,
    classification_error,
    correspondence_l2_error,
    pair_errors,
    translate_pairs,
)
from .probes import (
    fit_with_adam,
    latent_probes,
    linear_probe_r2,
    posterior_means,
    softmax_probe_accuracy,
    split_indices,
)
from .projection import PCAResult, export_embeddings, pca, pca_project
from .reference_models import (
    IdentityVAEs,
    ReferenceModels,
    classifier_accuracy,
    identity_vae_config,
    load_reference_models,
    require_classifier_accuracy,
    save_reference_models,
    train_identity_classifier,
    train_identity_vaes,
)

__all__ = [
    "EvaluationConfig",
    "Evaluator",
    "IdentityVAEs",
    "LambdaZResult",
    "PCAResult",
    "ReferenceModels",
    "Translations",
    "ae_error",
    "classification_error",
    "classifier_accuracy",
    "correspondence_l2_error",
    "export_embeddings",
    "fit_with_adam",
    "identity_vae_config",
    "latent_probes",
    "linear_probe_r2",
    "load_reference_models",
    "mean_latent_distance",
    "pair_errors",
    "pca",
    "pca_project",
    "posterior_means",
    "require_classifier_accuracy",
    "save_reference_models",
    "softmax_probe_accuracy",
    "split_indices",
    "sweep_lambda_z",
    "train_identity_classifier",
    "train_identity_vaes",
    "translate_pairs",
]
