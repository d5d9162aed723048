"""Layered architecture recovery instances and their classical cost model.

Layers are indexed bottom-up: a higher index is a higher layer, and a call
from layer ``k`` to layer ``k - 1`` is the one unpenalised direction under
the default policy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ._validation import CapacityError, InstanceError, check_square

DEFAULT_PENALTIES = {"intra": 2, "back": 15, "skip": 1, "adjacent": 0}
DEFAULT_ENUMERATION_BOUND = 10**7


@dataclass(frozen=True)
class DependencyGraph:
    """Packages and the weighted dependency counts between them.

    ``W[i, j]`` is the number of dependencies from package ``i`` to package
    ``j``.
    """

    W: np.ndarray
    package_names: tuple = ()

    def __post_init__(self):
        W = check_square(self.W, "W", nonnegative=True)
        if np.any(np.diag(W) != 0):
            raise InstanceError("W must have a zero diagonal")
        W = W.copy()
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        names = tuple(self.package_names) or tuple(f"pkg{i}" for i in range(len(W)))
        if len(names) != len(W):
            raise InstanceError(f"{len(names)} package names for {len(W)} packages")
        object.__setattr__(self, "package_names", names)

    @property
    def n_packages(self) -> int:
        return self.W.shape[0]


@dataclass(frozen=True)
class LayerPolicy:
    """Penalty matrix ``C[src_layer, dst_layer]`` applied per dependency."""

    C: np.ndarray

    def __post_init__(self):
        C = check_square(self.C, "C", nonnegative=True).copy()
        if C.shape[0] < 1:
            raise InstanceError("a policy needs at least one layer")
        C.setflags(write=False)
        object.__setattr__(self, "C", C)

    @property
    def n_layers(self) -> int:
        return self.C.shape[0]

    @classmethod
    def from_penalties(cls, n_layers: int, penalties: dict | None = None) -> "LayerPolicy":
        """Synthesize ``C`` from per-relation penalties.

        Same layer is ``intra``, calling upward is ``back``, calling exactly
        one layer down is ``adjacent`` and two or more down is ``skip``.
        """
        pen = dict(DEFAULT_PENALTIES)
        if penalties:
            unknown = set(penalties) - set(pen)
            if unknown:
                raise InstanceError(f"unknown penalty kinds: {sorted(unknown)}")
            pen.update(penalties)
        if n_layers < 1:
            raise InstanceError("n_layers must be positive")
        C = np.empty((n_layers, n_layers), dtype=np.result_type(*[type(v) for v in pen.values()]))
        for src in range(n_layers):
            for dst in range(n_layers):
                C[src, dst] = pen[_relation(src, dst)]
        return cls(C)


@dataclass(frozen=True)
class Assignment:
    layers: tuple
    n_layers: int = field(default=0, compare=False)

    def __post_init__(self):
        layers = tuple(int(k) for k in self.layers)
        object.__setattr__(self, "layers", layers)
        if self.n_layers and any(not 0 <= k < self.n_layers for k in layers):
            raise InstanceError(f"layer index out of range [0, {self.n_layers}): {layers}")

    def __len__(self):
        return len(self.layers)

    def to_matrix(self, n_layers: int) -> np.ndarray:
        X = np.zeros((len(self.layers), n_layers), dtype=np.uint8)
        X[np.arange(len(self.layers)), self.layers] = 1
        return X


@dataclass(frozen=True)
class LarInstance:
    graph: DependencyGraph
    policy: LayerPolicy

    @property
    def n_packages(self) -> int:
        return self.graph.n_packages

    @property
    def n_layers(self) -> int:
        return self.policy.n_layers


def _relation(src: int, dst: int) -> str:
    if src == dst:
        return "intra"
    if src < dst:
        return "back"
    if src == dst + 1:
        return "adjacent"
    return "skip"


def _check_layers(graph: DependencyGraph, policy: LayerPolicy, a) -> np.ndarray:
    layers = np.asarray(a.layers if isinstance(a, Assignment) else a, dtype=np.int64)
    if layers.ndim != 1 or layers.size != graph.n_packages:
        raise InstanceError(
            f"assignment covers {layers.size} packages, graph has {graph.n_packages}"
        )
    if layers.size and (layers.min() < 0 or layers.max() >= policy.n_layers):
        raise InstanceError(f"layer index out of range [0, {policy.n_layers})")
    return layers


def _exact_sum(values: np.ndarray):
    # integer inputs stay integer until the final conversion
    if np.issubdtype(values.dtype, np.integer):
        return int(values.sum(dtype=np.int64))
    return float(values.sum())


def assignment_cost(graph: DependencyGraph, policy: LayerPolicy, a) -> float:
    """Total penalised dependency weight ``sum W[i,j] * C[layer_i, layer_j]``."""
    layers = _check_layers(graph, policy, a)
    penalties = policy.C[layers[:, None], layers[None, :]]
    return float(_exact_sum(graph.W * penalties))


def cost_breakdown(graph: DependencyGraph, policy: LayerPolicy, a) -> dict:
    """Split the weighted cost by call relation (skip/back/intra/adjacent)."""
    layers = _check_layers(graph, policy, a)
    weighted = graph.W * policy.C[layers[:, None], layers[None, :]]
    src, dst = layers[:, None], layers[None, :]
    masks = {
        "skip": src >= dst + 2,
        "back": src < dst,
        "intra": src == dst,
        "adjacent": src == dst + 1,
    }
    return {kind: float(_exact_sum(weighted[mask])) for kind, mask in masks.items()}


def brute_force_optimum(
    graph: DependencyGraph,
    policy: LayerPolicy,
    max_assignments: int = DEFAULT_ENUMERATION_BOUND,
    chunk_size: int = 1 << 16,
) -> tuple[Assignment, float]:
    """Exhaustively minimise :func:`assignment_cost`.

    Assignments are enumerated in lexicographic order of the layer vector,
    so the first minimum found is the lexicographically smallest one.
    """
    m, n = graph.n_packages, policy.n_layers
    total = n**m
    if total > max_assignments:
        raise CapacityError(f"{n}^{m} = {total} assignments exceeds bound {max_assignments}")
    W, C = graph.W, policy.C
    place = n ** np.arange(m - 1, -1, -1, dtype=np.int64)
    best_idx, best_val = 0, None
    for start in range(0, total, chunk_size):
        idx = np.arange(start, min(start + chunk_size, total), dtype=np.int64)
        L = (idx[:, None] // place) % n
        vals = (W[None, :, :] * C[L[:, :, None], L[:, None, :]]).sum(axis=(1, 2))
        k = int(np.argmin(vals))
        if best_val is None or vals[k] < best_val:
            best_idx, best_val = int(idx[k]), vals[k]
    layers = tuple(int(v) for v in (best_idx // place) % n)
    return Assignment(layers, n), float(best_val)


def instance_from_dict(data: dict) -> LarInstance:
    """Build an instance from the JSON instance schema.

    ``C`` may be given directly, or synthesized from ``n_layers`` plus an
    optional ``penalties`` mapping.
    """
    try:
        W = np.asarray(data["W"])
    except KeyError as exc:
        raise InstanceError("instance is missing 'W'") from exc
    graph = DependencyGraph(W, tuple(data.get("packages", ())))
    if "C" in data:
        policy = LayerPolicy(np.asarray(data["C"]))
        if "n_layers" in data and int(data["n_layers"]) != policy.n_layers:
            raise InstanceError("n_layers disagrees with the shape of C")
    elif "n_layers" in data:
        policy = LayerPolicy.from_penalties(int(data["n_layers"]), data.get("penalties"))
    else:
        raise InstanceError("instance needs 'C' or 'n_layers'")
    return LarInstance(graph, policy)


def instance_to_dict(instance: LarInstance) -> dict:
    return {
        "packages": list(instance.graph.package_names),
        "W": instance.graph.W.tolist(),
        "n_layers": instance.n_layers,
        "C": instance.policy.C.tolist(),
    }


def load_instance(path) -> LarInstance:
    with open(Path(path)) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: invalid JSON ({exc})") from exc
    return instance_from_dict(data)


def reference_instance() -> LarInstance:
    """The five-package, three-layer example used throughout the docs and tests."""
    text = resources.files("qaoalab.data").joinpath("reference_instance.json").read_text()
    return instance_from_dict(json.loads(text))


def reference_assignment() -> Assignment:
    """Layer placement shown with the reference instance (cost 561)."""
    return Assignment((0, 1, 1, 1, 2), 3)
