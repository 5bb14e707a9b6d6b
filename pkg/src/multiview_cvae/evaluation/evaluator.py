"""
Evaluation pipeline producing a MetricsReport for one trained model.
"""

from __future__ import annotations

import numpy as np

from ..common import IdentityBreakdown, MetricsReport, TelemetryService
from ..models import MultiViewModel
from ..synthgen import SyntheticDataset
from .config import EvaluationConfig
from .metrics import (
    ae_error,
    classification_error,
    correspondence_images,
    cross_entropies,
    pair_errors,
    translate_pairs,
)
from .probes import latent_probes
from .reference_models import (
    ReferenceModels,
    require_classifier_accuracy,
    train_identity_classifier,
    train_identity_vaes,
)


class Evaluator:
    """
    Computes the AE, classification and correspondence metrics plus the latent probes.

    Reference models are trained once per evaluator (or injected) and reused across
    every model evaluated against the same dataset. Evaluation never mutates the model.
    """

    def __init__(
        self,
        config: EvaluationConfig,
        telemetry: TelemetryService,
        references: ReferenceModels | None = None,
    ) -> None:
        self._config = config
        self._logger = telemetry
        self._references = references

    @property
    def references(self) -> ReferenceModels | None:
        return self._references

    def prepare(self, dataset: SyntheticDataset, model: MultiViewModel) -> ReferenceModels:
        if self._references is None:
            self._logger.info(
                "Training reference models identities=%d vae_epochs=%d classifier_epochs=%d",
                dataset.num_identities,
                self._config.vae_epochs,
                self._config.classifier_epochs,
            )
            vaes = train_identity_vaes(dataset, model.config, self._config, self._logger)
            classifier, accuracy = train_identity_classifier(dataset, self._config, self._logger)
            self._references = ReferenceModels(vaes, classifier, accuracy)
        return self._references

    def evaluate(self, model: MultiViewModel, dataset: SyntheticDataset) -> MetricsReport:
        cfg = self._config
        with self._logger.start_span(
            "evaluate", {"variant": model.config.variant, "identities": dataset.num_identities}
        ):
            refs = self.prepare(dataset, model)
            require_classifier_accuracy(refs.classifier_accuracy, cfg.min_classifier_accuracy)

            translations = translate_pairs(model, dataset, cfg.threads)
            by_target = translations.by_target()
            images = np.concatenate([translations.images[p] for p in translations.pairs])
            targets = np.concatenate(
                [np.full(len(translations.images[p]), p[1]) for p in translations.pairs]
            )
            rows = pair_errors(translations)
            count = sum(row["count"] for row in rows)

            report = MetricsReport(
                ae_error=ae_error(by_target, refs.vaes),
                classification_error=classification_error(
                    images,
                    targets,
                    refs.classifier,
                    refs.classifier_accuracy,
                    cfg.min_classifier_accuracy,
                ),
                correspondence_l2=float(sum(r["l2"] * r["count"] for r in rows) / count),
                id_probe_accuracy=0.0,
                semantic_probe_r2=0.0,
                per_pair=rows,
            )
            report.id_probe_accuracy, report.semantic_probe_r2 = latent_probes(model, dataset, cfg)

            gt = {j: correspondence_images(dataset, j) for j in range(dataset.num_identities)}
            report.ground_truth_ae_error = ae_error(gt, refs.vaes)
            gt_images = np.concatenate([gt[j] for j in sorted(gt)])
            gt_targets = np.concatenate([np.full(len(gt[j]), j) for j in sorted(gt)])
            report.ground_truth_classification_error = float(
                cross_entropies(gt_images, gt_targets, refs.classifier).mean()
            )
            report.classifier_accuracy = refs.classifier_accuracy

            ce = cross_entropies(images, targets, refs.classifier)
            for j, translated in by_target.items():
                pair_rows = [r for r in rows if r["target"] == j]
                report.per_identity[j] = IdentityBreakdown(
                    ae_error=float(refs.vaes.reconstruction_errors(translated, j).mean()),
                    classification_error=float(ce[targets == j].mean()),
                    correspondence_l2=float(np.mean([r["l2"] for r in pair_rows])),
                )

        for name in (
            "ae_error",
            "classification_error",
            "correspondence_l2",
            "id_probe_accuracy",
            "semantic_probe_r2",
        ):
            self._logger.record_metric(name, getattr(report, name), {"variant": model.config.variant})
        self._logger.info(
            "Evaluated variant=%s ae_error=%.4f classification_error=%.4f correspondence_l2=%.5f "
            "id_probe_accuracy=%.3f semantic_probe_r2=%.3f",
            model.config.variant,
            report.ae_error,
            report.classification_error,
            report.correspondence_l2,
            report.id_probe_accuracy,
            report.semantic_probe_r2,
        )
        return report

