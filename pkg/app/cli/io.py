"""File formats for the command-line front end.

CSV datasets have a header row, an integer `label` column and real-valued
feature columns in header order. Model files are JSON, either explicit

    {"priors": [...], "means": [[...], ...], "sigma2": [...], "d": 2,
     "truncation_radius": 3.0}

or the circle shorthand {"circle": {"m": 4, "mu": 1, "sigma2": 0.3, "d": 2,
"gamma": null}}. JSON output is written with sorted keys and two-space indent so
re-serialising a parsed report reproduces it byte for byte.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..core.errors import BadModelFile, BoundsError, MalformedInput
from ..core.types import LabeledDataset, Priors, validate_dataset
from ..oracle.gaussian import GaussianMixtureModel
from ..synth.circle import CircleConfig, circle_model

LABEL_COLUMN = "label"


def read_dataset_csv(path: str | Path, n_classes: int | None = None) -> LabeledDataset:
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError as exc:
        raise MalformedInput(f"no such file: {path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"cannot parse CSV {path}: {exc}") from exc
    if LABEL_COLUMN not in frame.columns:
        raise MalformedInput(f"CSV {path} has no '{LABEL_COLUMN}' column")
    features = [c for c in frame.columns if c != LABEL_COLUMN]
    if not features:
        raise MalformedInput(f"CSV {path} has no feature columns")

    raw_labels = frame[LABEL_COLUMN]
    if raw_labels.isna().any() or not pd.api.types.is_numeric_dtype(raw_labels):
        raise MalformedInput("label column must hold integers")
    labels = raw_labels.to_numpy()
    if not np.all(np.equal(np.mod(labels, 1), 0)):
        raise MalformedInput("label column must hold integers")
    try:
        points = frame[features].apply(pd.to_numeric, errors="raise").to_numpy(dtype=np.float64)
    except (ValueError, TypeError) as exc:
        raise MalformedInput(f"non-numeric feature value: {exc}") from exc
    return validate_dataset(points, labels.astype(np.int64), n_classes=n_classes)


def dataset_frame(dataset: LabeledDataset) -> pd.DataFrame:
    cols = {f"x{k + 1}": dataset.points[:, k] for k in range(dataset.d)}
    frame = pd.DataFrame(cols)
    frame[LABEL_COLUMN] = dataset.labels
    return frame


def write_dataset_csv(dataset: LabeledDataset, path: str | Path | None) -> None:
    text = dataset_frame(dataset).to_csv(index=False, float_format="%.17g")
    write_text(text, path)


def read_priors_file(path: str | Path) -> Priors:
    """JSON list of priors, or an object with a `priors` list."""
    data = _read_json(path, MalformedInput)
    values = data.get("priors") if isinstance(data, dict) else data
    if not isinstance(values, list):
        raise MalformedInput(f"{path}: expected a list of priors")
    try:
        return Priors(np.asarray(values, dtype=np.float64))
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{path}: priors must be numbers") from exc


def _read_json(path: str | Path, error: type[BoundsError]) -> Any:
    try:
        with Path(path).open("r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as exc:
        raise error(f"no such file: {path}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise error(f"{path} is not valid JSON: {exc}") from exc


def model_from_dict(data: Any) -> GaussianMixtureModel:
    if not isinstance(data, dict):
        raise BadModelFile("model description must be a JSON object")
    try:
        if "circle" in data:
            circ = dict(data["circle"])
            return circle_model(
                CircleConfig(
                    m=int(circ["m"]),
                    mu=float(circ["mu"]),
                    sigma2=float(circ["sigma2"]),
                    d=int(circ.get("d", 2)),
                    gamma=None if circ.get("gamma") is None else float(circ["gamma"]),
                )
            )
        means = np.asarray(data["means"], dtype=np.float64)
        d = int(data.get("d", means.shape[1] if means.ndim == 2 else 1))
        if means.ndim != 2 or means.shape[1] != d:
            raise BadModelFile(f"means must be an m x {d} matrix, got shape {means.shape}")
        radius = data.get("truncation_radius")
        return GaussianMixtureModel(
            priors=Priors(np.asarray(data["priors"], dtype=np.float64)),
            means=means,
            sigma2=np.asarray(data["sigma2"], dtype=np.float64),
            truncation_radius=None if radius is None else float(radius),
        )
    except BadModelFile:
        raise
    except KeyError as exc:
        raise BadModelFile(f"model description is missing key {exc}") from exc
    except (BoundsError, TypeError, ValueError) as exc:
        raise BadModelFile(f"invalid model description: {exc}") from exc


def read_model_file(path: str | Path) -> GaussianMixtureModel:
    return model_from_dict(_read_json(path, BadModelFile))


def model_to_dict(model: GaussianMixtureModel) -> dict[str, Any]:
    return {
        "priors": [float(x) for x in model.priors.p],
        "means": model.means.tolist(),
        "sigma2": [float(x) for x in model.sigma2],
        "d": model.d,
        "truncation_radius": model.truncation_radius,
    }


def dumps_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def write_json(payload: Any, path: str | Path | None) -> None:
    write_text(dumps_json(payload), path)


def write_frame(frame: pd.DataFrame, path: str | Path | None) -> None:
    write_text(frame.to_csv(index=False, float_format="%.17g"), path)
