"""Uniform train/predict contract over the six classifier variants."""
from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import NUM_BEAMS, NUM_CLASSES, ClassLabel, Dataset, Scan
from ..dataset_io import write_dataset
from ..errors import DegenerateTrainingError, DimensionError
from ..features import FeatureTransformer, fit_feature_transformer
from . import boosting, linear, nets, svm, trees

MODEL_FORMAT_VERSION = 1

VARIANTS = ("rf", "adaboost", "svm", "logreg", "mlp", "cnn")

_DEFAULTS = {
    "rf": {"trees": 100, "max_depth": 100, "features_per_split": 16, "bootstrap": True},
    "adaboost": {"rounds": 200},
    "svm": {"C": 1.0, "degree": 3, "coef0": 0.0, "gamma": None, "tol": 1e-3},
    "logreg": {"l2": 1e-4, "max_iter": 2000, "grad_tol": 1e-6},
    "mlp": {"epochs": 30, "batch_size": 32, "lr": 0.01, "dropout": 0.5},
    "cnn": {"epochs": 30, "batch_size": 32, "lr": 0.01, "dropout": 0.25},
}


def default_params(variant: str) -> dict:
    return dict(_DEFAULTS[variant])


@dataclass(frozen=True)
class ModelSpec:
    """Variant name, hyperparameters and the training seed."""

    variant: str
    seed: int = 42
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(
                f"unknown variant {self.variant!r}; choose one of {', '.join(VARIANTS)}"
            )
        unknown = set(self.params) - set(_DEFAULTS[self.variant])
        if unknown:
            raise ValueError(
                f"unknown hyperparameters for {self.variant}: {sorted(unknown)}"
            )

    def resolved_params(self) -> dict:
        merged = default_params(self.variant)
        merged.update(self.params)
        return merged


@dataclass
class TrainedModel:
    """Immutable predictor: fitted transformer plus the variant payload."""

    spec: ModelSpec
    transformer: FeatureTransformer
    payload: object
    metadata: dict = field(default_factory=dict)

    def predict_proba_matrix(self, X_raw: np.ndarray) -> np.ndarray:
        """Class probabilities for raw (untransformed) feature rows."""
        X_raw = np.atleast_2d(np.asarray(X_raw, dtype=np.float64))
        if X_raw.shape[1] != NUM_BEAMS:
            raise DimensionError(f"expected {NUM_BEAMS} features, got {X_raw.shape[1]}")
        Xt = self.transformer.transform_matrix(X_raw)
        if self.spec.variant == "cnn":
            Xt = Xt[:, None, :]
            return self.payload.predict_proba(Xt)
        return self.payload.predict_proba(Xt)


def train(spec: ModelSpec, data: Dataset) -> TrainedModel:
    """Fit the transformer and the variant trainer on the whole dataset.

    Deterministic given (spec, data): every stochastic component draws from
    substreams of spec.seed.
    """
    X_raw = data.feature_matrix()
    y = data.label_vector()
    if np.unique(y).shape[0] < 2:
        raise DegenerateTrainingError(
            "training data must contain at least two classes"
        )
    transformer = fit_feature_transformer(X_raw)
    Xt = transformer.transform_matrix(X_raw)
    params = spec.resolved_params()

    converged = True
    if spec.variant == "rf":
        payload = trees.train_random_forest(
            Xt,
            y,
            n_trees=params["trees"],
            max_depth=params["max_depth"],
            features_per_split=params["features_per_split"],
            bootstrap=params["bootstrap"],
            seed=spec.seed,
            num_classes=NUM_CLASSES,
        )
    elif spec.variant == "adaboost":
        payload = boosting.train_adaboost(
            Xt, y, rounds=params["rounds"], num_classes=NUM_CLASSES
        )
    elif spec.variant == "svm":
        payload = svm.train_svm(
            Xt,
            y,
            C=params["C"],
            degree=params["degree"],
            coef0=params["coef0"],
            gamma=params["gamma"],
            tol=params["tol"],
            num_classes=NUM_CLASSES,
        )
        converged = all(payload.converged)
    elif spec.variant == "logreg":
        payload = linear.train_logreg(
            Xt,
            y,
            l2=params["l2"],
            max_iter=params["max_iter"],
            grad_tol=params["grad_tol"],
            num_classes=NUM_CLASSES,
        )
        converged = payload.converged
    elif spec.variant == "mlp":
        rng = np.random.default_rng([spec.seed, 11])
        net = nets.build_mlp(rng, n_in=NUM_BEAMS, dropout_rate=params["dropout"])
        nets.train_network(
            net,
            Xt,
            y,
            epochs=params["epochs"],
            batch_size=params["batch_size"],
            lr=params["lr"],
            seed=spec.seed,
            num_classes=NUM_CLASSES,
        )
        payload = net
    elif spec.variant == "cnn":
        rng = np.random.default_rng([spec.seed, 12])
        net = nets.build_cnn(rng, length=NUM_BEAMS, dropout_rate=params["dropout"])
        nets.train_network(
            net,
            Xt[:, None, :],
            y,
            epochs=params["epochs"],
            batch_size=params["batch_size"],
            lr=params["lr"],
            seed=spec.seed,
            num_classes=NUM_CLASSES,
        )
        payload = net
    else:  # unreachable; ModelSpec validates the variant
        raise ValueError(spec.variant)

    metadata = {
        "seed": spec.seed,
        "converged": converged,
        "params": params,
        "train_fingerprint": dataset_fingerprint(data),
    }
    return TrainedModel(
        spec=spec, transformer=transformer, payload=payload, metadata=metadata
    )


def predict_proba(model: TrainedModel, scan: Scan) -> np.ndarray:
    """4-vector of class probabilities for one scan (canonical class order)."""
    return model.predict_proba_matrix(np.array(scan.ranges)[None, :])[0]


def predict_label(model: TrainedModel, scan: Scan) -> ClassLabel:
    """Argmax of predict_proba; exact ties go to the lowest class index."""
    return ClassLabel(int(np.argmax(predict_proba(model, scan))))


def dataset_fingerprint(data: Dataset) -> str:
    buf = io.StringIO()
    write_dataset(data, buf)
    return hashlib.sha256(buf.getvalue().encode("utf-8")).hexdigest()


# --- model files -------------------------------------------------------------

_PAYLOAD_CODECS = {
    "rf": (lambda p: p.to_dict(), trees.RandomForest.from_dict),
    "adaboost": (lambda p: p.to_dict(), boosting.AdaBoostModel.from_dict),
    "svm": (lambda p: p.to_dict(), svm.SvmModel.from_dict),
    "logreg": (lambda p: p.to_dict(), linear.LogRegModel.from_dict),
    "mlp": (nets.network_to_dict, nets.network_from_dict),
    "cnn": (nets.network_to_dict, nets.network_from_dict),
}


def model_to_json(model: TrainedModel) -> str:
    encode, _ = _PAYLOAD_CODECS[model.spec.variant]
    document = {
        "format_version": MODEL_FORMAT_VERSION,
        "spec": {
            "variant": model.spec.variant,
            "seed": model.spec.seed,
            "params": model.spec.params,
        },
        "transformer": model.transformer.to_dict(),
        "payload": encode(model.payload),
        "metadata": model.metadata,
    }
    return json.dumps(document)


def model_from_json(text: str) -> TrainedModel:
    document = json.loads(text)
    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    spec = ModelSpec(
        variant=document["spec"]["variant"],
        seed=int(document["spec"]["seed"]),
        params=dict(document["spec"]["params"]),
    )
    _, decode = _PAYLOAD_CODECS[spec.variant]
    return TrainedModel(
        spec=spec,
        transformer=FeatureTransformer.from_dict(document["transformer"]),
        payload=decode(document["payload"]),
        metadata=dict(document["metadata"]),
    )


def save_model(model: TrainedModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))


def load_model(path) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())
