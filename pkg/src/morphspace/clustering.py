"""Seeded k-means over scenario pairs in the impact-likelihood plane.

The solver is fully deterministic for a given seed: greedy probabilistic
seeding draws from ``numpy.random.default_rng(seed)``, assignment ties go
to the lowest centroid index, and an emptied cluster is repaired by
reseeding its centroid to the point farthest from its assigned centroid.
Recorded inertia never increases between iterations.

Cluster labels in a ``ClusterModel`` are ordered by ascending mean member
impact, so cluster 0 always reads "least severe" regardless of seeding.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import IngestError, ParamError
from .pairs import ScenarioPair, consistent_pairs

MIN_K, MAX_K = 2, 10


@dataclass(frozen=True, eq=False)
class KMeansResult:
    """Raw solver output over an (n, d) point array."""

    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    iterations: int
    inertia_history: tuple[float, ...]


@dataclass(frozen=True)
class ClusterSummary:
    cluster: int
    size: int
    mean_impact: float
    mean_likelihood: float


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Clustered pair space: assignments keyed by pair, labels severity-ordered."""

    k: int
    seed: int
    centroids: tuple[tuple[float, float], ...]
    assignments: Mapping[tuple[str, str], int]
    inertia: float
    iterations: int
    inertia_history: tuple[float, ...]
    summaries: tuple[ClusterSummary, ...]


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return (diff * diff).sum(axis=2)


def _seed_centroids(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=float)
    centroids[0] = points[int(rng.integers(n))]
    for i in range(1, k):
        d2 = _squared_distances(points, centroids[:i]).min(axis=1)
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[i] = points[idx]
    return centroids


def kmeans(
    points: Sequence[Sequence[float]] | np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansResult:
    """Lloyd iterations from greedy probabilistic seeding.

    Stops when the largest centroid movement drops below ``tol`` or after
    ``max_iter`` rounds.  ``k`` may not exceed the number of distinct
    points, so every cluster can end non-empty.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ParamError("points must form a non-empty 2-d array")
    if not np.all(np.isfinite(x)):
        raise ParamError("points contain non-finite values")
    distinct = len({tuple(row) for row in x.tolist()})
    if not 1 <= k <= distinct:
        raise ParamError(
            f"k={k} outside [1, {distinct}] (number of distinct points)"
        )
    if max_iter < 1:
        raise ParamError("max_iter must be at least 1")
    if tol < 0:
        raise ParamError("tol must be non-negative")

    rng = np.random.default_rng(seed)
    centroids = _seed_centroids(x, k, rng)
    labels = np.zeros(x.shape[0], dtype=int)
    history: list[float] = []
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        d2 = _squared_distances(x, centroids)
        labels = d2.argmin(axis=1)  # ties go to the lowest index
        # repair: give each empty cluster the point farthest from its centroid
        for c in range(k):
            if np.any(labels == c):
                continue
            current = d2[np.arange(x.shape[0]), labels]
            counts = np.bincount(labels, minlength=k)
            current = np.where(counts[labels] > 1, current, -1.0)  # keep singletons
            far = int(current.argmax())
            labels[far] = c
        new_centroids = centroids.copy()
        for c in range(k):
            members = x[labels == c]
            if members.shape[0]:
                new_centroids[c] = members.mean(axis=0)
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        final_d2 = _squared_distances(x, centroids)
        history.append(float(final_d2[np.arange(x.shape[0]), labels].sum()))
        if shift < tol:
            break
    return KMeansResult(
        centroids=centroids,
        labels=labels,
        inertia=history[-1],
        iterations=iterations,
        inertia_history=tuple(history),
    )


def cluster_pairs(
    pairs: Sequence[ScenarioPair],
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> ClusterModel:
    """Cluster consistent pairs by (impact, likelihood); relabel by severity.

    Labels are remapped so mean member impact rises with the cluster index
    (ties broken by mean likelihood, then original label), making reports
    comparable across seeds.
    """
    if not MIN_K <= k <= MAX_K:
        raise ParamError(f"k={k} outside [{MIN_K}, {MAX_K}]")
    kept = consistent_pairs(pairs)
    if len(kept) < k:
        raise ParamError(
            f"only {len(kept)} consistent pairs; need at least k={k}"
        )
    points = np.array([(p.impact, p.likelihood) for p in kept], dtype=float)
    result = kmeans(points, k=k, seed=seed, max_iter=max_iter, tol=tol)

    order_keys = []
    for c in range(k):
        members = points[result.labels == c]
        order_keys.append(
            (float(members[:, 0].mean()), float(members[:, 1].mean()), c)
        )
    old_order = sorted(range(k), key=lambda c: order_keys[c])
    remap = {old: new for new, old in enumerate(old_order)}

    labels = [remap[int(c)] for c in result.labels]
    centroids = tuple(
        (float(result.centroids[old][0]), float(result.centroids[old][1]))
        for old in old_order
    )
    assignments = {p.key(): lab for p, lab in zip(kept, labels)}
    summaries = []
    for c in range(k):
        member_pts = points[np.array(labels) == c]
        summaries.append(
            ClusterSummary(
                cluster=c,
                size=int(member_pts.shape[0]),
                mean_impact=float(member_pts[:, 0].mean()),
                mean_likelihood=float(member_pts[:, 1].mean()),
            )
        )
    return ClusterModel(
        k=k,
        seed=seed,
        centroids=centroids,
        assignments=assignments,
        inertia=result.inertia,
        iterations=result.iterations,
        inertia_history=result.inertia_history,
        summaries=tuple(summaries),
    )


# ---------------------------------------------------------------------------
# Interchange
# ---------------------------------------------------------------------------

CLUSTER_COLUMNS = ("condition_a", "condition_b", "impact", "likelihood", "cluster")


def write_clusters_csv(path, pairs: Sequence[ScenarioPair], model: ClusterModel) -> None:
    """Consistent pairs with their cluster labels, in pair order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CLUSTER_COLUMNS)
        for p in consistent_pairs(pairs):
            writer.writerow(
                [
                    p.a,
                    p.b,
                    f"{p.impact:.4f}",
                    f"{p.likelihood:.4f}",
                    model.assignments[p.key()],
                ]
            )


def read_clusters_csv(path) -> list[tuple[ScenarioPair, int]]:
    out: list[tuple[ScenarioPair, int]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file")
        missing = [c for c in CLUSTER_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise IngestError(f"{path}: missing required columns {missing}")
        for i, row in enumerate(reader, start=2):
            try:
                pair = ScenarioPair(
                    a=row["condition_a"].strip(),
                    b=row["condition_b"].strip(),
                    impact=float(row["impact"]),
                    likelihood=float(row["likelihood"]),
                )
                out.append((pair, int(row["cluster"])))
            except ValueError as exc:
                raise IngestError(f"{path} line {i}: {exc}") from exc
    return out


def model_to_dict(model: ClusterModel) -> dict:
    return {
        "k": model.k,
        "seed": model.seed,
        "iterations": model.iterations,
        "inertia": round(model.inertia, 9),
        "centroids": [
            [round(c[0], 9), round(c[1], 9)] for c in model.centroids
        ],
        "clusters": [
            {
                "cluster": s.cluster,
                "size": s.size,
                "mean_impact": round(s.mean_impact, 9),
                "mean_likelihood": round(s.mean_likelihood, 9),
            }
            for s in model.summaries
        ],
    }


def model_from_dict(
    data: Mapping, assignments: Mapping[tuple[str, str], int]
) -> ClusterModel:
    """Rebuild a model from its JSON form plus stored pair assignments.

    The iteration history is not serialized, so it comes back empty.
    """
    return ClusterModel(
        k=data["k"],
        seed=data["seed"],
        centroids=tuple((float(c[0]), float(c[1])) for c in data["centroids"]),
        assignments=dict(assignments),
        inertia=float(data["inertia"]),
        iterations=int(data["iterations"]),
        inertia_history=(),
        summaries=tuple(
            ClusterSummary(
                cluster=c["cluster"],
                size=c["size"],
                mean_impact=float(c["mean_impact"]),
                mean_likelihood=float(c["mean_likelihood"]),
            )
            for c in data["clusters"]
        ),
    )


def write_model_json(path, model: ClusterModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")
