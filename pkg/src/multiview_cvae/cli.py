"""
Command-line surface: ``mvcvae <command> [flags]``.

Every command writes its artifacts under ``--out`` together with a ``run_manifest.json``
recording the effective configuration, seeds, inputs, outputs, wall-clock and the
``git describe`` string of the working tree.
"""

from __future__ import annotations

import argparse
import json
import logging
import subprocess
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from .common import (
    CheckpointError,
    ContractViolationError,
    EvaluationRefusedError,
    NonFiniteLossError,
    RunManifest,
)
from .common.imaging import image_strip, read_image, write_pgm, write_png
from .evaluation import (
    export_embeddings,
    load_reference_models,
    save_reference_models,
    sweep_lambda_z,
)
from .models import (
    MultiViewModel,
    interpolation_strip,
    regress_new_identity,
    retarget,
    retarget_to_soft_identity,
)
from .services import get_container, reset_container
from .synthgen import SyntheticDataset, generate_dataset, load_dataset
from .training import TrainConfig, load_checkpoint, load_classifier

RUN_MANIFEST = "run_manifest.json"
METRICS_FILE = "metrics.json"
SOFT_LABEL_FILE = "soft_label.json"
ABLATION_FILE = "lambda_z_ablation.json"
REFERENCES_DIR = "references"
IMAGE_SUFFIXES = (".pgm", ".png")

# (exception type, error code, exit status); first match wins
EXIT_CODES: tuple[tuple[type[BaseException], str, int], ...] = (
    (FileNotFoundError, "missing_file", 3),
    (ContractViolationError, "contract_violation", 4),
    (CheckpointError, "checkpoint_io", 5),
    (NonFiniteLossError, "non_finite_loss", 6),
    (EvaluationRefusedError, "evaluation_refused", 7),
    (OSError, "io", 5),
)


# ---------- run manifests ----------


def git_describe() -> str:
    try:
        result = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True,
            text=True,
            timeout=10,
            check=False,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return result.stdout.strip() if result.returncode == 0 and result.stdout.strip() else "unknown"


def write_run_manifest(
    out: Path,
    command: str,
    config: dict[str, Any],
    seeds: dict[str, int],
    inputs: dict[str, str],
    outputs: dict[str, str],
    started: float,
) -> Path:
    manifest = RunManifest(
        command=command,
        config=config,
        seeds=seeds,
        inputs=inputs,
        outputs=outputs,
        wall_clock_seconds=round(time.perf_counter() - started, 3),
        git_describe=git_describe(),
    )
    path = out / RUN_MANIFEST
    path.write_text(manifest.to_json() + "\n", encoding="utf-8")
    return path


# ---------- configuration layering ----------


def read_config_file(path: str | Path | None) -> dict[str, Any]:
    """Reads a JSON config mirroring TrainConfig / ModelConfig field names."""
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file {path} not found")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as ex:
        raise ContractViolationError(f"config file {path} is not valid JSON: {ex}") from ex
    if not isinstance(payload, dict):
        raise ContractViolationError(f"config file {path} must hold a JSON object")
    payload = dict(payload)
    model = dict(payload.pop("model", {}) or {})
    if "variant" in payload:
        model["variant"] = payload.pop("variant")
    payload["model"] = model
    return payload


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def default_conv_stages(image_size: int) -> int:
    """Stage count that brings image_size down to a 4x4 bottleneck."""
    return max(1, int(image_size).bit_length() - 3)


def resolve_train_config(
    defaults: TrainConfig,
    dataset: SyntheticDataset,
    file_payload: dict[str, Any],
    train_flags: dict[str, Any],
    model_flags: dict[str, Any],
) -> TrainConfig:
    """Environment defaults, then the config file, then explicit flags.

    Data geometry (image size, identity count, keypoint width) fills whatever the config
    file leaves unset, so a mismatching file is reported instead of silently replaced.
    """
    base = defaults.to_dict()
    base.pop("variant", None)
    file_model = file_payload.get("model", {})
    geometry = {
        "image_size": dataset.image_size,
        "num_identities": dataset.num_identities,
        "keypoint_dim": dataset.keypoint_dim,
        "conv_stages": default_conv_stages(file_model.get("image_size", dataset.image_size)),
    }
    base["model"] = _merge(base["model"], geometry)
    merged = _merge(base, file_payload)
    merged = _merge(merged, {k: v for k, v in train_flags.items() if v is not None})
    merged["model"] = _merge(
        merged["model"], {k: v for k, v in model_flags.items() if v is not None}
    )
    return TrainConfig.from_dict(merged)


# ---------- shared loading ----------


def load_trained_model(path: str | Path) -> MultiViewModel:
    model = load_checkpoint(path)
    if model.training_step == 0:
        raise ContractViolationError(f"checkpoint {path} is untrained (step 0)")
    return model


def check_model_matches_data(model: MultiViewModel, dataset: SyntheticDataset) -> None:
    cfg = model.config
    problems = []
    if cfg.image_size != dataset.image_size:
        problems.append(f"image_size data={dataset.image_size} model={cfg.image_size}")
    if cfg.num_identities != dataset.num_identities:
        problems.append(f"num_identities data={dataset.num_identities} model={cfg.num_identities}")
    if cfg.keypoint_dim != dataset.keypoint_dim:
        problems.append(f"keypoint_dim data={dataset.keypoint_dim} model={cfg.keypoint_dim}")
    if problems:
        raise ContractViolationError("checkpoint does not match dataset: " + ", ".join(problems))


def write_image(out: Path, stem: str, image: np.ndarray, png: bool) -> dict[str, str]:
    outputs = {f"{stem}.pgm": str(write_pgm(out / f"{stem}.pgm", image))}
    if png:
        outputs[f"{stem}.png"] = str(write_png(out / f"{stem}.png", image))
    return outputs


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------- commands ----------


def cmd_gen_data(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    threads = args.threads or container.config.runtime.threads()
    out = _out_dir(args.out)
    manifest = generate_dataset(
        num_identities=args.ids,
        samples_per_id=args.samples,
        image_size=args.size,
        seed=args.seed,
        out_path=out,
        threads=threads,
        telemetry=container.telemetry(),
    )
    write_run_manifest(
        out,
        "gen-data",
        manifest["config"],
        {"seed": args.seed},
        {},
        {"dataset": str(out)},
        started,
    )


def cmd_train(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    dataset = load_dataset(args.data)
    config = resolve_train_config(
        container.train_config(),
        dataset,
        read_config_file(args.config),
        {
            "epochs": args.epochs,
            "batch_size": args.batch_size,
            "lr": args.lr,
            "seed": args.seed,
        },
        {
            "variant": args.variant,
            "latent_dim": args.latent_dim,
            "lambda_kl": args.lambda_kl,
            "lambda_z": args.lambda_z,
            "lambda_key": args.lambda_key,
        },
    )
    out = _out_dir(args.out)
    container.model_config.override(config.model)
    container.train_config.override(config)
    try:
        trainer = container.trainer()
        trainer.train(dataset, out_dir=out)
    finally:
        container.train_config.reset_override()
        container.model_config.reset_override()
    write_run_manifest(
        out,
        "train",
        config.to_dict(),
        {"seed": config.seed},
        {"data": str(args.data), "config": str(args.config) if args.config else ""},
        {"checkpoint": str(out / "checkpoint"), "history": str(out / "loss_history.csv")},
        started,
    )


def cmd_eval(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    dataset = load_dataset(args.data)
    model = load_trained_model(args.checkpoint)
    check_model_matches_data(model, dataset)
    threads = args.threads or container.config.runtime.threads()
    overrides = {
        "seed": args.seed,
        "threads": threads,
        "vae_epochs": args.vae_epochs,
        "classifier_epochs": args.classifier_epochs,
        "classifier_channels": args.classifier_channels,
        "min_classifier_accuracy": args.min_classifier_accuracy,
    }
    config = replace(
        container.evaluation_config(), **{k: v for k, v in overrides.items() if v is not None}
    )
    references = (
        load_reference_models(args.references, dataset.num_identities) if args.references else None
    )
    container.evaluation_config.override(config)
    try:
        evaluator = container.evaluator(references=references)
    finally:
        container.evaluation_config.reset_override()

    out = _out_dir(args.out)
    report = evaluator.evaluate(model, dataset)
    metrics_path = out / METRICS_FILE
    metrics_path.write_text(report.to_json() + "\n", encoding="utf-8")
    outputs = {"metrics": str(metrics_path)}
    if references is None:
        outputs["references"] = str(save_reference_models(evaluator.references, out / REFERENCES_DIR))
    write_run_manifest(
        out,
        "eval",
        {"evaluation": config.to_dict(), "model": model.config.to_dict()},
        {"seed": config.seed, "model_seed": model.seed},
        {
            "checkpoint": str(args.checkpoint),
            "data": str(args.data),
            "references": str(args.references or ""),
        },
        outputs,
        started,
    )


def cmd_retarget(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    model = load_trained_model(args.checkpoint)
    image = read_image(args.input_image)
    out = _out_dir(args.out)
    result = retarget(image, args.source_id, args.target_id, model)
    outputs = write_image(out, f"retarget_{args.source_id}_to_{args.target_id}", result, args.png)
    write_run_manifest(
        out,
        "retarget",
        {"model": model.config.to_dict(), "source_id": args.source_id, "target_id": args.target_id},
        {"model_seed": model.seed},
        {"checkpoint": str(args.checkpoint), "input_image": str(args.input_image)},
        outputs,
        started,
    )


def cmd_interpolate(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    model = load_trained_model(args.checkpoint)
    first, second = read_image(args.a), read_image(args.b)
    out = _out_dir(args.out)
    frames = interpolation_strip(first, second, args.steps, args.render_id, model)
    outputs = write_image(out, "interpolation", image_strip(frames), args.png)
    write_run_manifest(
        out,
        "interpolate",
        {"model": model.config.to_dict(), "steps": args.steps, "render_id": args.render_id},
        {"model_seed": model.seed},
        {"checkpoint": str(args.checkpoint), "a": str(args.a), "b": str(args.b)},
        outputs,
        started,
    )


def cmd_embed(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    dataset = load_dataset(args.data)
    model = load_trained_model(args.checkpoint)
    check_model_matches_data(model, dataset)
    out = _out_dir(args.out)
    embeddings_path, pca_path = export_embeddings(model, dataset, out)
    write_run_manifest(
        out,
        "embed",
        {"model": model.config.to_dict()},
        {"model_seed": model.seed},
        {"checkpoint": str(args.checkpoint), "data": str(args.data)},
        {"embeddings": str(embeddings_path), "pca": str(pca_path)},
        started,
    )


def read_image_dir(path: str | Path) -> tuple[list[Path], np.ndarray]:
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"image directory {root} not found")
    files = sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise ContractViolationError(f"no .pgm or .png images in {root}")
    images = [read_image(p) for p in files]
    shapes = {img.shape for img in images}
    if len(shapes) != 1:
        raise ContractViolationError(f"images in {root} differ in size: {sorted(shapes)}")
    return files, np.stack(images)


def cmd_regress_id(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    model = load_trained_model(args.checkpoint)
    classifier = load_classifier(args.classifier)
    if classifier.num_identities != model.config.num_identities:
        raise ContractViolationError(
            f"classifier covers {classifier.num_identities} identities, "
            f"model covers {model.config.num_identities}"
        )
    files, images = read_image_dir(args.images_dir)
    soft = regress_new_identity(images, classifier)
    ranked = np.argsort(-soft, kind="stable")

    out = _out_dir(args.out)
    label_path = out / SOFT_LABEL_FILE
    payload = {
        "soft_label": [float(p) for p in soft],
        "ranking": [{"identity": int(i), "probability": float(soft[i])} for i in ranked],
        "images": [p.name for p in files],
    }
    label_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    outputs = {"soft_label": str(label_path)}
    outputs.update(
        write_image(out, "soft_identity", retarget_to_soft_identity(images[0], soft, model), args.png)
    )
    write_run_manifest(
        out,
        "regress-id",
        {"model": model.config.to_dict(), "classifier": classifier.config_dict()},
        {"model_seed": model.seed},
        {
            "checkpoint": str(args.checkpoint),
            "classifier": str(args.classifier),
            "images_dir": str(args.images_dir),
        },
        outputs,
        started,
    )


def cmd_ablate_lambda_z(args: argparse.Namespace, container: Any) -> None:
    started = time.perf_counter()
    dataset = load_dataset(args.data)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as ex:
        raise ContractViolationError(f"--values must be comma-separated numbers: {ex}") from ex
    config = resolve_train_config(
        container.train_config(),
        dataset,
        read_config_file(args.config),
        {"epochs": args.epochs, "seed": args.seed},
        {"variant": "a"},
    )
    threads = args.threads or container.config.runtime.threads()
    results = sweep_lambda_z(values, dataset, config, container.telemetry(), threads)

    out = _out_dir(args.out)
    path = out / ABLATION_FILE
    path.write_text(json.dumps([r.to_dict() for r in results], indent=2) + "\n", encoding="utf-8")
    write_run_manifest(
        out,
        "ablate-lambda-z",
        {"train": config.to_dict(), "values": values},
        {"seed": config.seed},
        {"data": str(args.data), "config": str(args.config) if args.config else ""},
        {"ablation": str(path)},
        started,
    )


# ---------- parser ----------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvcvae",
        description="Multi-view conditional VAEs: data generation, training, evaluation, retargeting.",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Python logging level (default: WARNING)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace, Any], None], help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--out", required=True, help="output directory")
        return p

    p = command("gen-data", cmd_gen_data, "generate the synthetic face dataset")
    p.add_argument("--ids", type=int, default=8, help="number of identities")
    p.add_argument("--samples", type=int, default=200, help="samples per identity")
    p.add_argument("--size", type=int, default=32, help="image side length")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default MVD_THREADS)")

    p = command("train", cmd_train, "train a model variant")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--variant", choices=["baseline", "a", "b"], default=None)
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--latent-dim", type=int, default=None)
    p.add_argument("--lambda-kl", type=float, default=None)
    p.add_argument("--lambda-z", type=float, default=None)
    p.add_argument("--lambda-key", type=float, default=None)

    p = command("eval", cmd_eval, "compute the evaluation metrics of a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--references", default=None, help="reuse reference models saved by eval")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--vae-epochs", type=int, default=None)
    p.add_argument("--classifier-epochs", type=int, default=None)
    p.add_argument("--classifier-channels", type=int, default=None)
    p.add_argument(
        "--min-classifier-accuracy",
        type=float,
        default=None,
        help="refuse evaluation below this ground-truth accuracy (default 0.95)",
    )

    p = command("retarget", cmd_retarget, "render an image under another identity")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input-image", required=True)
    p.add_argument("--source-id", type=int, required=True)
    p.add_argument("--target-id", type=int, required=True)
    p.add_argument("--png", action="store_true", help="also write PNG")

    p = command("interpolate", cmd_interpolate, "interpolate between two images")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--a", required=True, help="first image")
    p.add_argument("--b", required=True, help="second image")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--render-id", type=int, required=True)
    p.add_argument("--png", action="store_true", help="also write PNG")

    p = command("embed", cmd_embed, "export latent embeddings and their PCA projection")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)

    p = command("regress-id", cmd_regress_id, "estimate a soft identity label for new images")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--classifier", required=True, help="classifier checkpoint directory")
    p.add_argument("--images-dir", required=True)
    p.add_argument("--png", action="store_true", help="also write PNG")

    p = command("ablate-lambda-z", cmd_ablate_lambda_z, "sweep the latent-consistency weight")
    p.add_argument("--data", required=True)
    p.add_argument("--values", default="0,1,100", help="comma-separated lambda_z values")
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)

    return parser


def error_line(ex: BaseException) -> tuple[str, int]:
    for exc_type, code, status in EXIT_CODES:
        if isinstance(ex, exc_type):
            break
    else:
        code, status = "internal", 1
    return f"error code={code} exit={status} message={json.dumps(str(ex))}", status


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return int(ex.code or 0)

    logging.basicConfig(
        level=getattr(logging, args.log_level), format="%(levelname)s %(name)s %(message)s"
    )
    container = get_container()
    telemetry = container.telemetry()
    try:
        args.handler(args, container)
        return 0
    except Exception as ex:
        line, status = error_line(ex)
        telemetry.debug("command %s failed", args.command, exc_info=True)
        print(line, file=sys.stderr)
        return status
    finally:
        telemetry.shutdown()
        reset_container()


if __name__ == "__main__":
    sys.exit(main())
