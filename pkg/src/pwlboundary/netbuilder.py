"""Deep rectifier networks that approximate the Euclidean norm.

The 2-D block folds the plane with angles ``theta_j = pi / 2^j``: after the
first layer takes absolute values, each further layer rotates by ``theta_j``
and reflects, so the angle of the input is folded into ``[0, theta_k]`` and the
block output ``f_k`` satisfies ``cos(theta_k) r <= f_k <= r``.  Chaining
``d - 1`` blocks (block ``l`` reads the previous block's output and the raw
input ``x_{l+1}`` through a skip connection) approximates the norm in R^d.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

import numpy as np

from .errors import NumericalError

Activation = Literal["relu", "linear"]


@dataclass(frozen=True)
class Source:
    """A raw input (``layer is None``) or neuron ``index`` of an earlier layer."""

    index: int
    layer: Optional[int] = None

    @property
    def kind(self) -> str:
        return "input" if self.layer is None else "layer"


@dataclass(frozen=True)
class Neuron:
    activation: Activation
    bias: float
    inputs: tuple[tuple[Source, float], ...]


@dataclass(frozen=True)
class LayeredNetwork:
    dim: int
    layers: tuple[tuple[Neuron, ...], ...]
    radius: Optional[float] = None
    k: Optional[int] = None

    def __post_init__(self):
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        if self.dim < 1 or not layers:
            raise ValueError("network needs a positive input dimension and at least one layer")
        for li, layer in enumerate(layers):
            if not layer:
                raise ValueError(f"layer {li} is empty")
            for ni, neuron in enumerate(layer):
                if neuron.activation not in ("relu", "linear"):
                    raise ValueError(f"layer {li} neuron {ni}: unknown activation {neuron.activation!r}")
                if not math.isfinite(neuron.bias):
                    raise ValueError(f"layer {li} neuron {ni}: non-finite bias")
                for src, w in neuron.inputs:
                    if not math.isfinite(w):
                        raise ValueError(f"layer {li} neuron {ni}: non-finite weight")
                    if src.layer is None:
                        ok = 0 <= src.index < self.dim
                    else:
                        ok = 0 <= src.layer < li and 0 <= src.index < len(layers[src.layer])
                    if not ok:
                        raise ValueError(f"layer {li} neuron {ni}: bad source {src}")

    @property
    def outputs(self) -> tuple[Neuron, ...]:
        return self.layers[-1]

    @property
    def unit_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def layer_count(self) -> int:
        return len(self.layers)


def theta(j: int) -> float:
    return math.pi / 2.0**j


def _block(first_layer: int, a: Source, b: Source, k: int, offset: float) -> list[list[Neuron]]:
    """Layers of one 2-D folding block reading sources ``a`` and ``b``."""
    abs_layer = [
        Neuron("relu", 0.0, ((a, 1.0),)),
        Neuron("relu", 0.0, ((a, -1.0),)),
        Neuron("relu", 0.0, ((b, 1.0),)),
        Neuron("relu", 0.0, ((b, -1.0),)),
    ]
    layers = [abs_layer]
    # current (f, fbar) as weighted sums of the previous layer's nodes
    f_terms = [(0, 1.0), (1, 1.0)]
    g_terms = [(2, 1.0), (3, 1.0)]
    for j in range(2, k):
        c, s = math.cos(theta(j)), math.sin(theta(j))
        prev = first_layer + len(layers) - 1

        def comb(cf, cg):
            return tuple((Source(i, prev), cf * w) for i, w in f_terms) + tuple(
                (Source(i, prev), cg * w) for i, w in g_terms
            )

        layers.append(
            [
                Neuron("relu", 0.0, comb(c, s)),  # f_j
                Neuron("relu", 0.0, comb(-s, c)),  # positive part of the reflected coordinate
                Neuron("relu", 0.0, comb(s, -c)),  # negative part
            ]
        )
        f_terms = [(0, 1.0)]
        g_terms = [(1, 1.0), (2, 1.0)]
    c, s = math.cos(theta(k)), math.sin(theta(k))
    prev = first_layer + len(layers) - 1
    out = tuple((Source(i, prev), c * w) for i, w in f_terms) + tuple(
        (Source(i, prev), s * w) for i, w in g_terms
    )
    layers.append([Neuron("linear", -offset, out)])
    return layers


def build_norm2d(k: int, radius: float = 0.0) -> LayeredNetwork:
    """``f_k(x1, x2) - radius`` in ``k`` layers and ``3k - 1`` units."""
    return build_norm_nd(2, k, radius)


def build_norm_nd(d: int, k: int, radius: float = 0.0) -> LayeredNetwork:
    """``g_{d-1}(x; k) - radius``: ``d - 1`` chained 2-D blocks, ``k (d - 1)`` layers."""
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    if not (math.isfinite(radius) and radius >= 0):
        raise ValueError("radius must be finite and non-negative")
    layers: list[list[Neuron]] = []
    a = Source(0)
    for blk in range(d - 1):
        last = blk == d - 2
        layers += _block(len(layers), a, Source(blk + 1), k, radius if last else 0.0)
        a = Source(0, len(layers) - 1)
    return LayeredNetwork(d, tuple(tuple(layer) for layer in layers), float(radius), int(k))


def forward(net: LayeredNetwork, x, return_preactivations: bool = False):
    """Evaluate all layers on a point or an ``(n, d)`` batch.

    Each neuron sums its inputs in stored order, so a batch row and a single
    point give bit-identical results.  Returns the output-layer values with
    shape ``(n, outputs)`` (or ``(outputs,)``), and optionally the list of
    per-layer pre-activation arrays.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != net.dim:
        raise ValueError(f"expected inputs of dimension {net.dim}, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains non-finite values")
    values: list[list[np.ndarray]] = []
    pre: list[np.ndarray] = []
    for li, layer in enumerate(net.layers):
        outs, zs = [], []
        for ni, neuron in enumerate(layer):
            z = np.full(X.shape[0], neuron.bias)
            with np.errstate(over="ignore", invalid="ignore"):
                for src, w in neuron.inputs:
                    v = X[:, src.index] if src.layer is None else values[src.layer][src.index]
                    z = z + w * v
            if not np.all(np.isfinite(z)):
                raise NumericalError(f"non-finite value at layer {li}, neuron {ni}")
            zs.append(z)
            outs.append(np.maximum(z, 0.0) if neuron.activation == "relu" else z)
        values.append(outs)
        pre.append(np.stack(zs, axis=1))
    out = np.stack(values[-1], axis=1)
    if single:
        out = out[0]
        pre = [p[0] for p in pre]
    if return_preactivations:
        return out, pre
    return out


def eval_network(net: LayeredNetwork, x) -> np.ndarray:
    return forward(net, x)


def eval_scalar(net: LayeredNetwork, x):
    """Single-output evaluation: a float for one point, a 1-D array for a batch."""
    if len(net.outputs) != 1:
        raise ValueError("network has more than one output")
    out = forward(net, x)
    return float(out[0]) if out.ndim == 1 else out[:, 0]


def relu_pattern(net: LayeredNetwork, x) -> np.ndarray:
    """Boolean matrix of which relu neurons are active (pre-activation > 0)."""
    _, pre = forward(net, np.atleast_2d(x), return_preactivations=True)
    cols = []
    for layer, z in zip(net.layers, pre):
        for ni, neuron in enumerate(layer):
            if neuron.activation == "relu":
                cols.append(z[:, ni] > 0)
    return np.stack(cols, axis=1)


def classify_ball(net: LayeredNetwork, x, tol: float = 1e-12):
    """``inside`` / ``boundary`` / ``outside`` by the sign of the network output."""
    if len(net.outputs) != 1:
        raise ValueError("classify_ball needs a single-output network")
    v = eval_scalar(net, x)
    if v > tol:
        return "outside"
    if v < -tol:
        return "inside"
    return "boundary"


def to_dict(net: LayeredNetwork) -> dict:
    doc = {
        "dim": net.dim,
        "layers": [
            {
                "neurons": [
                    {
                        "activation": n.activation,
                        "bias": n.bias,
                        "inputs": [
                            {
                                "src": {"kind": "input", "index": s.index}
                                if s.layer is None
                                else {"kind": "layer", "layer": s.layer, "index": s.index},
                                "w": w,
                            }
                            for s, w in n.inputs
                        ],
                    }
                    for n in layer
                ]
            }
            for layer in net.layers
        ],
    }
    if net.radius is not None:
        doc["radius"] = net.radius
    if net.k is not None:
        doc["k"] = net.k
    return doc


def from_dict(doc: dict) -> LayeredNetwork:
    try:
        layers = []
        for layer in doc["layers"]:
            neurons = []
            for n in layer["neurons"]:
                inputs = []
                for edge in n["inputs"]:
                    src = edge["src"]
                    if src["kind"] == "input":
                        s = Source(int(src["index"]))
                    elif src["kind"] == "layer":
                        s = Source(int(src["index"]), int(src["layer"]))
                    else:
                        raise ValueError(f"unknown source kind {src['kind']!r}")
                    inputs.append((s, float(edge["w"])))
                neurons.append(Neuron(n["activation"], float(n["bias"]), tuple(inputs)))
            layers.append(tuple(neurons))
        return LayeredNetwork(
            int(doc["dim"]),
            tuple(layers),
            None if doc.get("radius") is None else float(doc["radius"]),
            None if doc.get("k") is None else int(doc["k"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed network document: {exc!r}") from None


def dumps(net: LayeredNetwork) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(to_dict(net), indent=1)


def loads(text: str) -> LayeredNetwork:
    return from_dict(json.loads(text))


def save(net: LayeredNetwork, path) -> None:
    Path(path).write_text(dumps(net) + "\n", encoding="utf-8")


def load(path) -> LayeredNetwork:
    return loads(Path(path).read_text(encoding="utf-8"))
