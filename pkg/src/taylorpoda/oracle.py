"""Prediction-model oracles: serialized MLPs, analytic polynomials, external processes.

A model is a pure function from a d-dimensional feature vector to a scalar.
All evaluation is routed through :func:`evaluate_batch` so that single and
batched calls share one code path; in-process forward passes use einsum
(fixed reduction order), which keeps per-row results bit-identical
regardless of batch size.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import threading
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionError,
    NonFiniteInput,
    NonFiniteOutput,
    OracleError,
    ParseError,
    UnsupportedActivation,
)

ACTIVATIONS = ("tanh", "logistic", "relu", "softplus", "identity")
FINAL_TRANSFORMS = ("none", "logistic")
OUTPUT_KINDS = ("regression", "probability")

#: Hard cap on rows per external-oracle wire request.
EXTERNAL_BATCH_ROWS = 4096
#: Default per-batch timeout for external oracles, seconds.
EXTERNAL_TIMEOUT = 30.0


@dataclass(frozen=True)
class FeatureVector:
    """An instance to explain: d finite feature values with optional names."""

    values: np.ndarray
    names: Optional[tuple] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "values", vals)
        if vals.size < 1:
            raise DimensionError("feature vector needs at least one component")
        if not np.isfinite(vals).all():
            raise NonFiniteInput("feature vector contains NaN/Inf")
        if self.names is not None:
            names = tuple(str(n) for n in self.names)
            if len(names) != vals.size:
                raise DimensionError(
                    f"{len(names)} names for {vals.size} features"
                )
            object.__setattr__(self, "names", names)

    @property
    def dim(self) -> int:
        return int(self.values.size)


def _logistic(z: np.ndarray) -> np.ndarray:
    return 0.5 * (np.tanh(0.5 * z) + 1.0)


def _apply_activation(z: np.ndarray, name: str, sharpness: float) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    if name == "logistic":
        return _logistic(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "softplus":
        return np.logaddexp(0.0, sharpness * z) / sharpness
    if name == "identity":
        return z
    raise UnsupportedActivation(f"unknown activation {name!r}")


@dataclass(frozen=True)
class MlpLayer:
    weights: np.ndarray  # (out_units, in_units)
    bias: np.ndarray  # (out_units,)
    activation: str
    sharpness: float = 1.0  # softplus steepness; ignored otherwise


@dataclass
class MlpModel:
    """Fully connected MLP ending in a single output unit."""

    layers: list
    final_transform: str = "none"
    output_kind: str = "regression"
    input_dim: int = field(init=False)

    def __post_init__(self):
        if not self.layers:
            raise DimensionError("MLP needs at least one layer")
        expected = self.layers[0].weights.shape[1]
        for k, layer in enumerate(self.layers):
            out_units, in_units = layer.weights.shape
            if in_units != expected:
                raise DimensionError(
                    f"layer {k} expects {in_units} inputs, got {expected}"
                )
            if layer.bias.shape != (out_units,):
                raise DimensionError(f"layer {k} bias shape {layer.bias.shape}")
            if layer.activation not in ACTIVATIONS:
                raise UnsupportedActivation(
                    f"layer {k} activation {layer.activation!r}"
                )
            expected = out_units
        if expected != 1:
            raise DimensionError(f"final layer must output 1 unit, got {expected}")
        if self.final_transform not in FINAL_TRANSFORMS:
            raise ParseError(f"unknown final_transform {self.final_transform!r}")
        self.input_dim = int(self.layers[0].weights.shape[1])

    def _forward(self, X: np.ndarray) -> np.ndarray:
        h = X
        for layer in self.layers:
            z = np.einsum("nd,od->no", h, layer.weights) + layer.bias
            h = _apply_activation(z, layer.activation, layer.sharpness)
        out = h[:, 0]
        if self.final_transform == "logistic":
            out = _logistic(out)
        return out


@dataclass
class PolynomialModel:
    """Sum of monomials c * prod_i x_i^e_i; doubles as an exact Taylor oracle."""

    monomials: list  # [(coef, {feature_index: positive exponent}), ...]
    input_dim: int
    output_kind: str = "regression"

    def __post_init__(self):
        cleaned = []
        for coef, exps in self.monomials:
            coef = float(coef)
            if not np.isfinite(coef):
                raise ParseError("non-finite monomial coefficient")
            exps = {int(i): int(e) for i, e in exps.items()}
            for i, e in exps.items():
                if not 0 <= i < self.input_dim:
                    raise DimensionError(
                        f"monomial references feature {i}, input_dim={self.input_dim}"
                    )
                if e < 1:
                    raise ParseError(f"exponent for feature {i} must be >= 1")
            cleaned.append((coef, exps))
        self.monomials = cleaned

    def _forward(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(X.shape[0], dtype=np.float64)
        for coef, exps in self.monomials:
            term = np.full(X.shape[0], coef, dtype=np.float64)
            for i, e in exps.items():
                term = term * X[:, i] ** e
            out = out + term
        return out


class ExternalModel:
    """Child-process oracle speaking newline-delimited JSON over stdin/stdout.

    Request: ``{"id": n, "inputs": [[...], ...]}``; response:
    ``{"id": n, "outputs": [...]}``. One request in flight per process;
    concurrent callers are serialized on a lock.
    """

    def __init__(self, command: str, input_dim: int, protocol_version: int = 1,
                 output_kind: str = "regression", timeout: float = EXTERNAL_TIMEOUT):
        if protocol_version != 1:
            raise ParseError(f"unsupported protocol_version {protocol_version}")
        if not command:
            raise ParseError("external model needs a command")
        self.command = command
        self.input_dim = int(input_dim)
        self.protocol_version = protocol_version
        self.output_kind = output_kind
        self.timeout = float(timeout)
        self._proc: Optional[subprocess.Popen] = None
        self._buf = b""
        self._next_id = 0
        self._lock = threading.Lock()

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    shlex.split(self.command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    bufsize=0,
                )
            except OSError as exc:
                raise OracleError(f"cannot spawn oracle: {exc}") from exc
            self._buf = b""
        return self._proc

    def _read_line(self, deadline: float) -> bytes:
        import select

        proc = self._proc
        while b"\n" not in self._buf:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self.close()
                raise OracleError("oracle timed out")
            ready, _, _ = select.select([proc.stdout], [], [], remaining)
            if not ready:
                continue
            chunk = proc.stdout.read(65536)
            if not chunk:
                self.close()
                raise OracleError("oracle closed its output stream")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line

    def _request(self, rows: np.ndarray, deadline: float) -> np.ndarray:
        proc = self._ensure_proc()
        self._next_id += 1
        req_id = self._next_id
        payload = json.dumps({"id": req_id, "inputs": rows.tolist()}) + "\n"
        try:
            proc.stdin.write(payload.encode())
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            self.close()
            raise OracleError(f"oracle pipe broken: {exc}") from exc
        line = self._read_line(deadline)
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            self.close()
            raise OracleError(f"oracle sent invalid JSON: {line[:200]!r}") from exc
        if msg.get("id") != req_id:
            self.close()
            raise OracleError(f"oracle answered id {msg.get('id')}, expected {req_id}")
        outputs = msg.get("outputs")
        if not isinstance(outputs, list) or len(outputs) != rows.shape[0]:
            self.close()
            raise OracleError("oracle output count mismatch")
        return np.asarray(outputs, dtype=np.float64)

    def _forward(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0], dtype=np.float64)
        with self._lock:
            for start in range(0, X.shape[0], EXTERNAL_BATCH_ROWS):
                chunk = X[start : start + EXTERNAL_BATCH_ROWS]
                deadline = time.monotonic() + self.timeout
                out[start : start + chunk.shape[0]] = self._request(chunk, deadline)
        return out

    def close(self):
        proc, self._proc = self._proc, None
        self._buf = b""
        if proc is not None and proc.poll() is None:
            proc.kill()
            proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


ModelSpec = Union[MlpModel, PolynomialModel, ExternalModel]


def _parse_mlp(doc: dict) -> MlpModel:
    try:
        input_dim = int(doc["input_dim"])
        raw_layers = doc["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed MLP document: {exc}") from exc
    layers = []
    for k, entry in enumerate(raw_layers):
        try:
            W = np.asarray(entry["weights"], dtype=np.float64)
            b = np.asarray(entry["bias"], dtype=np.float64)
            act = str(entry["activation"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed layer {k}: {exc}") from exc
        if W.ndim != 2:
            raise DimensionError(f"layer {k} weights must be a matrix")
        if not (np.isfinite(W).all() and np.isfinite(b).all()):
            raise ParseError(f"layer {k} has non-finite parameters")
        sharp = float(entry.get("sharpness", 1.0))
        if sharp <= 0:
            raise ParseError(f"layer {k} sharpness must be positive")
        layers.append(MlpLayer(W, b, act, sharp))
    output_kind = str(doc.get("output_kind", "")) or None
    final = doc.get("final_transform")
    if final is None:
        final = "logistic" if output_kind == "probability" else "none"
    if output_kind is None:
        output_kind = "probability" if final == "logistic" else "regression"
    if output_kind not in OUTPUT_KINDS:
        raise ParseError(f"unknown output_kind {output_kind!r}")
    model = MlpModel(layers, final_transform=str(final), output_kind=output_kind)
    if model.input_dim != input_dim:
        raise DimensionError(
            f"declared input_dim {input_dim} != first layer width {model.input_dim}"
        )
    return model


def _parse_polynomial(doc: dict) -> PolynomialModel:
    try:
        input_dim = int(doc["input_dim"])
        monomials = [
            (entry["coef"], entry.get("exps", {})) for entry in doc["monomials"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed polynomial document: {exc}") from exc
    output_kind = str(doc.get("output_kind", "regression"))
    if output_kind not in OUTPUT_KINDS:
        raise ParseError(f"unknown output_kind {output_kind!r}")
    return PolynomialModel(monomials, input_dim, output_kind=output_kind)


def _parse_external(doc: dict) -> ExternalModel:
    try:
        command = str(doc["command"])
        input_dim = int(doc["input_dim"])
        version = int(doc.get("protocol_version", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed external-model document: {exc}") from exc
    output_kind = str(doc.get("output_kind", "regression"))
    if output_kind not in OUTPUT_KINDS:
        raise ParseError(f"unknown output_kind {output_kind!r}")
    return ExternalModel(
        command,
        input_dim,
        protocol_version=version,
        output_kind=output_kind,
        timeout=float(doc.get("timeout", EXTERNAL_TIMEOUT)),
    )


def load_model(path) -> ModelSpec:
    """Load and validate a model file (see README for the JSON schemas)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"model file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object")
    kind = doc.get("type")
    if kind == "mlp":
        return _parse_mlp(doc)
    if kind == "polynomial":
        return _parse_polynomial(doc)
    if kind == "external":
        return _parse_external(doc)
    raise ParseError(f"unknown model type {kind!r}")


def _as_matrix(model: ModelSpec, xs) -> np.ndarray:
    if isinstance(xs, FeatureVector):
        X = xs.values[None, :]
    else:
        if isinstance(xs, (list, tuple)):
            xs = [x.values if isinstance(x, FeatureVector) else x for x in xs]
        try:
            X = np.asarray(xs, dtype=np.float64)
        except ValueError as exc:
            raise DimensionError(f"ragged batch: {exc}") from exc
        if X.ndim == 1:
            if X.size == 0:
                X = X.reshape(0, model.input_dim)
            elif X.size == model.input_dim:
                X = X[None, :]
            elif model.input_dim == 1:
                X = X.reshape(-1, 1)
    if X.ndim != 2 or (X.shape[0] > 0 and X.shape[1] != model.input_dim):
        raise DimensionError(
            f"expected rows of dimension {model.input_dim}, got shape {X.shape}"
        )
    if not np.isfinite(X).all():
        raise NonFiniteInput("input rows contain NaN/Inf")
    return X


def evaluate_batch(model: ModelSpec, xs) -> np.ndarray:
    """Evaluate the model on a batch of rows; element i equals evaluate(model, xs[i])."""
    X = _as_matrix(model, xs)
    if X.shape[0] == 0:
        return np.empty(0, dtype=np.float64)
    out = model._forward(X)
    if not np.isfinite(out).all():
        raise NonFiniteOutput("model produced NaN/Inf")
    if model.output_kind == "probability" and (
        out.min() < -1e-9 or out.max() > 1 + 1e-9
    ):
        warnings.warn(
            "probability-kind model produced outputs outside [0, 1]",
            RuntimeWarning,
            stacklevel=2,
        )
    return out


def evaluate(model: ModelSpec, x) -> float:
    """Evaluate the model on a single feature vector."""
    vals = x.values if isinstance(x, FeatureVector) else np.asarray(x, dtype=np.float64)
    return float(evaluate_batch(model, vals[None, :])[0])
