"""Pattern moving space: fuzzy c-means over a scalar series, class intervals.

A pattern space partitions a one-dimensional data series into ``k`` fuzzy
c-means clusters, hardens the memberships, and represents every class by
the closed interval spanning its members. Classes are kept sorted by
ascending cluster center and numbered ``1..k``; the class count is the
cardinality of the space.

Classification of an arbitrary interval is nearest-neighbor under the
Hausdorff distance, and measuring a class returns its stored interval
object, so anything routed through classify-then-measure is bit-identical
to one of the class intervals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ClusteringError
from .intervals import Interval

__all__ = [
    "FcmConfig",
    "PatternClass",
    "PatternSpace",
    "fcm_cluster",
    "build_space",
]


@dataclass(frozen=True)
class FcmConfig:
    """Fuzzy c-means settings.

    ``k`` is the target cluster count. ``tolerance`` bounds the maximum
    center movement between iterations at convergence.
    """

    k: int
    fuzziness: float = 2.0
    tolerance: float = 1e-6
    max_iterations: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"cluster count must be >= 1, got {self.k}")
        if not self.fuzziness > 1.0:
            raise ValueError(f"fuzziness must exceed 1, got {self.fuzziness!r}")
        if not self.tolerance > 0.0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance!r}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


def _farthest_point_init(values: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Pick k distinct data values: a seeded start, then greedy farthest points."""
    distinct = np.unique(values)
    if distinct.size < k:
        raise ClusteringError(
            f"cannot seed {k} clusters from {distinct.size} distinct value(s)"
        )
    centers = np.empty(k)
    centers[0] = distinct[rng.integers(distinct.size)]
    min_dist = np.abs(distinct - centers[0])
    for i in range(1, k):
        centers[i] = distinct[np.argmax(min_dist)]
        np.minimum(min_dist, np.abs(distinct - centers[i]), out=min_dist)
    return centers


def _memberships(values: np.ndarray, centers: np.ndarray, fuzziness: float) -> np.ndarray:
    """Membership matrix U (k x N) for the current centers.

    U[i, j] = 1 / sum_t (d_ij / d_tj) ** (2 / (fuzziness - 1)); a point that
    coincides with a center gets full membership in the first such cluster.
    """
    dist = np.abs(centers[:, None] - values[None, :])  # (k, N)
    nearest = dist.min(axis=0)
    u = np.zeros_like(dist)
    on_center = nearest == 0.0
    if np.any(on_center):
        cols = np.flatnonzero(on_center)
        rows = np.argmax(dist[:, cols] == 0.0, axis=0)
        u[rows, cols] = 1.0
    regular = ~on_center
    if np.any(regular):
        # Ratios to the nearest center stay >= 1, so the powers cannot overflow.
        rel = dist[:, regular] / nearest[regular]
        weights = rel ** (-2.0 / (fuzziness - 1.0))
        u[:, regular] = weights / weights.sum(axis=0)
    return u


def fcm_cluster(data, config: FcmConfig) -> tuple[np.ndarray, np.ndarray]:
    """Cluster a scalar series by fuzzy c-means with hardened assignments.

    Returns ``(centers, assignments)`` where ``centers`` has shape ``(k,)``
    and ``assignments`` maps each point to the 0-based cluster of maximal
    membership (ties to the lowest index). Raises ``ClusteringError`` when a
    cluster ends up with no hard members; callers may retry with a new seed.
    """
    values = np.asarray(data, dtype=float).ravel()
    if values.size == 0:
        raise ClusteringError("cannot cluster an empty series")
    if not np.all(np.isfinite(values)):
        raise ClusteringError("data series contains non-finite values")
    if config.k > values.size:
        raise ClusteringError(
            f"cluster count {config.k} exceeds the {values.size} data point(s)"
        )

    rng = np.random.default_rng(config.seed)
    centers = _farthest_point_init(values, config.k, rng)

    prev_objective = np.inf
    for _ in range(config.max_iterations):
        u = _memberships(values, centers, config.fuzziness)
        weights = u ** config.fuzziness
        mass = weights.sum(axis=1)
        if np.any(mass == 0.0):
            raise ClusteringError("a cluster lost all membership mass; reseed and retry")
        new_centers = (weights @ values) / mass
        dist = np.abs(new_centers[:, None] - values[None, :])
        objective = float(np.sum(weights * dist**2))
        # Alternating optimization must not increase the objective.
        assert objective <= prev_objective * (1.0 + 1e-12) + 1e-12, (
            f"fcm objective increased: {prev_objective!r} -> {objective!r}"
        )
        prev_objective = objective
        shift = np.max(np.abs(new_centers - centers))
        centers = new_centers
        if shift < config.tolerance:
            break

    final_u = _memberships(values, centers, config.fuzziness)
    assignments = np.argmax(final_u, axis=0)
    counts = np.bincount(assignments, minlength=config.k)
    if np.any(counts == 0):
        empty = int(np.flatnonzero(counts == 0)[0])
        raise ClusteringError(
            f"cluster {empty} has no hard-assigned members; reseed and retry"
        )
    return centers, assignments


@dataclass(frozen=True)
class PatternClass:
    """One class of the space: 1-based id, span interval, cluster center."""

    id: int
    interval: Interval
    center: float

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"class id must be >= 1, got {self.id}")


class PatternSpace:
    """An ordered collection of pattern classes over a scalar series.

    Classes are sorted by strictly ascending cluster center with ids
    ``1..cpms``; their interval lower bounds must be non-decreasing in the
    same order. Construction validates both, whether the classes come from
    clustering or from a serialized file.
    """

    __slots__ = ("_classes", "_lowers", "_uppers")

    def __init__(self, classes):
        classes = tuple(classes)
        if not classes:
            raise ClusteringError("a pattern space needs at least one class")
        for rank, cls in enumerate(classes, start=1):
            if cls.id != rank:
                raise ClusteringError(
                    f"class ids must run 1..{len(classes)} in order, got {cls.id} at position {rank}"
                )
        centers = [cls.center for cls in classes]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ClusteringError(f"class centers must strictly ascend, got {centers}")
        lowers = [cls.interval.lower for cls in classes]
        if any(b < a for a, b in zip(lowers, lowers[1:])):
            raise ClusteringError(
                f"class interval lower bounds must be non-decreasing, got {lowers}"
            )
        self._classes = classes
        self._lowers = np.array(lowers)
        self._uppers = np.array([cls.interval.upper for cls in classes])

    @property
    def classes(self) -> tuple[PatternClass, ...]:
        return self._classes

    @property
    def cpms(self) -> int:
        """Cardinality of the pattern moving space (the class count)."""
        return len(self._classes)

    def classify(self, x: Interval) -> int:
        """Id of the class whose interval is Hausdorff-nearest to ``x``.

        Ties resolve to the lowest id.
        """
        dist = np.maximum(np.abs(x.lower - self._lowers), np.abs(x.upper - self._uppers))
        return int(np.argmin(dist)) + 1

    def measure(self, class_id: int) -> Interval:
        """The stored interval of class ``class_id`` (1-based)."""
        if not 1 <= class_id <= len(self._classes):
            raise ValueError(
                f"class id {class_id} out of range 1..{len(self._classes)}"
            )
        return self._classes[class_id - 1].interval

    def encode_series(self, data) -> list[Interval]:
        """Map each scalar to the class interval nearest its degenerate embedding.

        A scalar ``x`` is treated as the interval ``[x, x]``, classified, and
        measured; the result list therefore contains only class intervals.
        """
        values = np.asarray(data, dtype=float).ravel()
        dist = np.maximum(
            np.abs(values[:, None] - self._lowers[None, :]),
            np.abs(values[:, None] - self._uppers[None, :]),
        )
        ids = np.argmin(dist, axis=1)
        return [self._classes[i].interval for i in ids]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PatternSpace):
            return NotImplemented
        return self._classes == other._classes

    def __repr__(self) -> str:
        return f"PatternSpace(cpms={self.cpms})"

    def to_json(self) -> dict:
        return {
            "cpms": self.cpms,
            "classes": [
                {
                    "id": cls.id,
                    "lower": cls.interval.lower,
                    "upper": cls.interval.upper,
                    "center": cls.center,
                }
                for cls in self._classes
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PatternSpace":
        classes = [
            PatternClass(
                id=int(entry["id"]),
                interval=Interval(entry["lower"], entry["upper"]),
                center=float(entry["center"]),
            )
            for entry in doc["classes"]
        ]
        space = cls(classes)
        if int(doc["cpms"]) != space.cpms:
            raise ClusteringError(
                f"declared cpms {doc['cpms']} does not match the {space.cpms} classes"
            )
        return space

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "PatternSpace":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def build_space(data, config: FcmConfig) -> PatternSpace:
    """Cluster a scalar series and assemble the ordered pattern space.

    Each cluster becomes a class spanning ``[min, max]`` of its hard
    members; classes are reordered by ascending center and renumbered.
    """
    values = np.asarray(data, dtype=float).ravel()
    centers, assignments = fcm_cluster(values, config)
    order = np.argsort(centers, kind="stable")
    classes = []
    for rank, idx in enumerate(order, start=1):
        members = values[assignments == idx]
        classes.append(
            PatternClass(
                id=rank,
                interval=Interval(members.min(), members.max()),
                center=float(centers[idx]),
            )
        )
    return PatternSpace(classes)
