"""Correlation networks over scored entities and their structural analyses.

Entities (conditions or dimensions) get numeric profiles; Pearson
correlation over profiles gives a matrix; thresholding the matrix gives an
undirected weighted graph; the graph feeds community detection, maximal
clique enumeration, betweenness centrality and component analysis.  All
algorithms are deterministic: ties resolve by node id, never by hash or
insertion order.

A caution on pair-derived profiles: with a single axis, every entity's
profile is the shared score vector plus a per-entity constant, so Pearson
correlation is identically 1 and the matrix carries no structure.  The
``combined`` axis concatenates the impact and likelihood profiles, which
breaks the shared-shift pattern (entities differ in their impact-minus-
likelihood offset) and yields an informative matrix.  Respondent-level
profiles do not have this issue.
"""
from __future__ import annotations

import csv
import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParamError, ShapeError
from .field import MorphologicalField
from .survey import AXES, ConditionScore, SurveyResponse, score_map

PROFILE_AXES = ("impact", "likelihood", "combined")
GRAPH_MODES = ("signed-abs", "positive")


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Symmetric Pearson matrix; undefined entries are NaN, diagonal is 1."""

    entities: tuple[str, ...]
    values: np.ndarray
    axis: str = ""
    zero_variance: tuple[str, ...] = ()

    def value(self, a: str, b: str) -> float:
        i = self.entities.index(a)
        j = self.entities.index(b)
        return float(self.values[i, j])


@dataclass(frozen=True, eq=False)
class ThresholdGraph:
    """Undirected weighted graph from thresholding a correlation matrix."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    threshold: float = 0.0
    mode: str = "signed-abs"
    axis: str = ""

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        for a, b, _w in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def degrees(self) -> dict[str, int]:
        adj = self.adjacency()
        return {v: len(adj[v]) for v in self.nodes}


@dataclass(frozen=True)
class CommunityPartition:
    """Disjoint node groups covering the graph, with their modularity."""

    communities: tuple[tuple[str, ...], ...]
    modularity: float


@dataclass(frozen=True, eq=False)
class CliqueSet:
    """All maximal cliques plus per-node membership counts."""

    cliques: tuple[tuple[str, ...], ...]
    membership: Mapping[str, int]


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


def _axis_vector(
    scores: Sequence[ConditionScore], ids: Sequence[str], axis: str
) -> list[float]:
    lookup = score_map(scores)
    return [lookup[cid].value(axis) for cid in ids]


def condition_profiles(
    field: MorphologicalField,
    scores: Sequence[ConditionScore],
    axis: str = "combined",
) -> dict[str, tuple[float, ...]]:
    """Pair-derived profile per scored condition, keyed in field order.

    Entry i of a condition's single-axis profile is the combined value of
    that condition with scored condition i (itself included, so the index
    is shared).  ``combined`` concatenates the impact and likelihood
    profiles; see the module docstring for why that is the useful default.
    """
    if axis not in PROFILE_AXES:
        raise ParamError(f"unknown profile axis {axis!r}; expected one of {PROFILE_AXES}")
    lookup = score_map(scores)
    ids = [
        cid
        for cid in field.condition_ids()
        if cid in lookup and lookup[cid].assessed()
    ]
    out: dict[str, tuple[float, ...]] = {}
    parts = ("impact", "likelihood") if axis == "combined" else (axis,)
    base = {part: _axis_vector(scores, ids, part) for part in parts}
    for cid in ids:
        row: list[float] = []
        for part in parts:
            own = lookup[cid].value(part)
            row.extend((own + other) / 2.0 for other in base[part])
        out[cid] = tuple(row)
    return out


def dimension_profiles(
    field: MorphologicalField,
    scores: Sequence[ConditionScore],
    axis: str = "combined",
) -> dict[str, tuple[float, ...]]:
    """Pair-derived profile per dimension (mean of its scored conditions)."""
    if axis not in PROFILE_AXES:
        raise ParamError(f"unknown profile axis {axis!r}; expected one of {PROFILE_AXES}")
    lookup = score_map(scores)
    ids = [
        cid
        for cid in field.condition_ids()
        if cid in lookup and lookup[cid].assessed()
    ]
    parts = ("impact", "likelihood") if axis == "combined" else (axis,)
    base = {part: _axis_vector(scores, ids, part) for part in parts}
    out: dict[str, tuple[float, ...]] = {}
    for dim in field.dimensions:
        scored = [c.id for c in dim.conditions if c.id in set(ids)]
        if not scored:
            continue
        row: list[float] = []
        for part in parts:
            own = sum(lookup[c].value(part) for c in scored) / len(scored)
            row.extend((own + other) / 2.0 for other in base[part])
        out[dim.id] = tuple(row)
    return out


def respondent_profiles(
    field: MorphologicalField,
    responses: Sequence[SurveyResponse],
    axis: str = "combined",
) -> dict[str, tuple[float, ...]]:
    """Profile per condition indexed by respondents with complete coverage.

    Only respondents who rated every profiled condition on the axis are
    usable (Pearson needs a shared index); fewer than three such
    respondents is an error.
    """
    if axis not in PROFILE_AXES:
        raise ParamError(f"unknown profile axis {axis!r}; expected one of {PROFILE_AXES}")
    parts = ("impact", "likelihood") if axis == "combined" else (axis,)
    table: dict[str, dict[tuple[str, str], float]] = {}
    for r in responses:
        table.setdefault(r.condition, {})[(r.axis, r.respondent)] = r.value
    ids = [cid for cid in field.condition_ids() if cid in table]
    if not ids:
        raise ShapeError("no responses reference field conditions")
    columns: list[tuple[str, str]] = []
    for part in parts:
        raters = [
            sorted({resp for (ax, resp) in table[cid] if ax == part}) for cid in ids
        ]
        complete = set(raters[0]).intersection(*map(set, raters[1:])) if raters else set()
        columns.extend((part, resp) for resp in sorted(complete))
    if len(columns) < 3:
        raise ShapeError(
            "fewer than three complete respondent columns; cannot correlate"
        )
    return {cid: tuple(table[cid][col] for col in columns) for cid in ids}


# ---------------------------------------------------------------------------
# Correlation
# ---------------------------------------------------------------------------


def correlation_matrix(
    profiles: Mapping[str, Sequence[float]], axis: str = ""
) -> CorrelationMatrix:
    """Pearson correlation between all profile pairs.

    Profiles must share one index of length at least three.  Zero-variance
    profiles produce undefined (NaN) off-diagonal entries rather than
    zeros; the diagonal is 1 by convention.
    """
    entities = tuple(profiles)
    if len(entities) < 2:
        raise ShapeError("need at least two profiles to correlate")
    lengths = {len(profiles[e]) for e in entities}
    if len(lengths) != 1:
        raise ShapeError(f"profiles disagree on length: {sorted(lengths)}")
    (length,) = lengths
    if length < 3:
        raise ShapeError(f"profile length {length} too short; need at least 3")
    x = np.array([profiles[e] for e in entities], dtype=float)
    if not np.all(np.isfinite(x)):
        raise ShapeError("profiles contain non-finite values")
    centered = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered * centered).sum(axis=1))
    flat = norms <= 1e-12
    safe = np.where(flat, 1.0, norms)
    r = (centered @ centered.T) / np.outer(safe, safe)
    r = np.clip(r, -1.0, 1.0)
    r[flat, :] = np.nan
    r[:, flat] = np.nan
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(
        entities=entities,
        values=r,
        axis=axis,
        zero_variance=tuple(e for e, f in zip(entities, flat) if f),
    )


def build_graph(
    matrix: CorrelationMatrix, threshold: float, mode: str = "signed-abs"
) -> ThresholdGraph:
    """Keep edges whose correlation clears the threshold.

    ``signed-abs`` keeps |r| >= t (edge weight retains sign); ``positive``
    keeps r >= t.  Undefined entries never become edges.  Isolated nodes
    stay in the node set.
    """
    if mode not in GRAPH_MODES:
        raise ParamError(f"unknown graph mode {mode!r}; expected one of {GRAPH_MODES}")
    if not 0.0 <= threshold <= 1.0:
        raise ParamError(f"threshold {threshold} outside [0, 1]")
    n = len(matrix.entities)
    edges: list[tuple[str, str, float]] = []
    for i in range(n):
        for j in range(i + 1, n):
            r = float(matrix.values[i, j])
            if math.isnan(r):
                continue
            keep = abs(r) >= threshold if mode == "signed-abs" else r >= threshold
            if keep:
                edges.append((matrix.entities[i], matrix.entities[j], r))
    return ThresholdGraph(
        nodes=matrix.entities,
        edges=tuple(edges),
        threshold=threshold,
        mode=mode,
        axis=matrix.axis,
    )


def graph_from_edges(
    nodes: Iterable[str], edges: Iterable[tuple[str, str]] | Iterable[tuple[str, str, float]]
) -> ThresholdGraph:
    """Build a graph directly from an edge list (weights default to 1)."""
    node_tuple = tuple(nodes)
    order = {v: i for i, v in enumerate(node_tuple)}
    canon: list[tuple[str, str, float]] = []
    for e in edges:
        a, b = e[0], e[1]
        w = float(e[2]) if len(e) > 2 else 1.0
        if a not in order or b not in order:
            raise ParamError(f"edge ({a!r}, {b!r}) references unknown node")
        if a == b:
            raise ParamError(f"self-loop on {a!r} not allowed")
        if order[a] > order[b]:
            a, b = b, a
        canon.append((a, b, w))
    canon.sort(key=lambda e: (order[e[0]], order[e[1]]))
    return ThresholdGraph(nodes=node_tuple, edges=tuple(canon), mode="manual")


# ---------------------------------------------------------------------------
# Community detection (greedy agglomerative modularity)
# ---------------------------------------------------------------------------


def modularity(graph: ThresholdGraph, partition: Sequence[Iterable[str]]) -> float:
    """Unweighted Newman modularity of a disjoint covering partition."""
    groups = [set(g) for g in partition]
    seen: set[str] = set()
    for g in groups:
        overlap = seen & g
        if overlap:
            raise ParamError(f"partition groups overlap on {sorted(overlap)}")
        seen |= g
    if seen != set(graph.nodes):
        raise ParamError("partition does not cover the node set exactly")
    m = len(graph.edges)
    if m == 0:
        return 0.0
    degrees = graph.degrees()
    where = {v: i for i, g in enumerate(groups) for v in g}
    intra = [0] * len(groups)
    for a, b, _w in graph.edges:
        if where[a] == where[b]:
            intra[where[a]] += 1
    q = 0.0
    for i, g in enumerate(groups):
        d = sum(degrees[v] for v in g)
        q += intra[i] / m - (d / (2.0 * m)) ** 2
    return q


def greedy_modularity_communities(graph: ThresholdGraph) -> CommunityPartition:
    """Agglomerate communities while any merge has positive modularity gain.

    Starts from singletons and repeatedly merges the pair with the largest
    gain.  Gains are compared as exact integers (2*m*l_ab - d_a*d_b, the
    gain scaled by 2*m^2), so tie-breaking is reproducible: equal gains
    resolve to the lexicographically smallest community pair, where a
    community is labelled by its smallest member id.  An edgeless graph
    stays all singletons with modularity zero.
    """
    nodes = graph.nodes
    m = len(graph.edges)
    if m == 0:
        return CommunityPartition(
            communities=tuple((v,) for v in sorted(nodes)), modularity=0.0
        )
    degrees = graph.degrees()
    comm: dict[str, set[str]] = {v: {v} for v in nodes}  # label -> members
    deg: dict[str, int] = {v: degrees[v] for v in nodes}  # label -> degree sum
    between: dict[str, dict[str, int]] = {v: {} for v in nodes}
    label_of = {v: v for v in nodes}
    for a, b, _w in graph.edges:
        between[a][b] = between[a].get(b, 0) + 1
        between[b][a] = between[b].get(a, 0) + 1

    while True:
        best: tuple[int, str, str] | None = None
        for la in comm:
            for lb, l_ab in between[la].items():
                if lb <= la:
                    continue
                score = 2 * m * l_ab - deg[la] * deg[lb]
                if score <= 0:
                    continue
                if best is None or score > best[0] or (
                    score == best[0] and (la, lb) < (best[1], best[2])
                ):
                    best = (score, la, lb)
        if best is None:
            break
        _score, la, lb = best
        # fold community lb into la, relabelling if lb is the smaller id
        keep, drop = (la, lb) if la < lb else (lb, la)
        comm[keep] |= comm[drop]
        deg[keep] += deg[drop]
        merged_links = between[keep]
        for other, cnt in between[drop].items():
            if other == keep:
                continue
            merged_links[other] = merged_links.get(other, 0) + cnt
            between[other][keep] = merged_links[other]
            del between[other][drop]
        merged_links.pop(drop, None)
        for member in comm[drop]:
            label_of[member] = keep
        del comm[drop], deg[drop], between[drop]

    groups = sorted(
        (tuple(sorted(g)) for g in comm.values()), key=lambda g: (-len(g), g)
    )
    q = modularity(graph, [set(g) for g in groups])
    return CommunityPartition(communities=groups, modularity=q)


# ---------------------------------------------------------------------------
# Maximal cliques (recursive expansion with pivoting)
# ---------------------------------------------------------------------------


def maximal_cliques(graph: ThresholdGraph) -> CliqueSet:
    """Every maximal clique, sorted by size then members; plus counts.

    Isolated nodes appear as singleton cliques, so every node has a
    membership count of at least one.
    """
    adj = graph.adjacency()
    found: list[tuple[str, ...]] = []

    def expand(r: set[str], p: set[str], x: set[str]) -> None:
        if not p and not x:
            found.append(tuple(sorted(r)))
            return
        # pivot on the candidate covering most of p; ties break on id
        pivot = max(sorted(p | x), key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(graph.nodes), set())
    found.sort(key=lambda c: (-len(c), c))
    membership: dict[str, int] = {v: 0 for v in graph.nodes}
    for clique in found:
        for v in clique:
            membership[v] += 1
    return CliqueSet(cliques=tuple(found), membership=membership)


# ---------------------------------------------------------------------------
# Betweenness centrality (shortest-path accumulation)
# ---------------------------------------------------------------------------


def betweenness_centrality(
    graph: ThresholdGraph, normalized: bool = False
) -> dict[str, float]:
    """Fraction of shortest paths through each node (endpoints excluded).

    Unweighted BFS variant.  For an undirected graph each unordered pair
    is counted once.  With ``normalized`` the scores divide by the number
    of unordered pairs excluding the node, (n-1)(n-2)/2.
    """
    nodes = graph.nodes
    adj = graph.adjacency()
    bc = {v: 0.0 for v in nodes}
    for s in nodes:
        stack: list[str] = []
        preds: dict[str, list[str]] = {v: [] for v in nodes}
        sigma = {v: 0 for v in nodes}
        sigma[s] = 1
        dist: dict[str, int] = {s: 0}
        queue: deque[str] = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in sorted(adj[v]):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: 0.0 for v in nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    for v in nodes:
        bc[v] /= 2.0  # undirected: each pair was accumulated from both ends
    if normalized:
        n = len(nodes)
        scale = (n - 1) * (n - 2) / 2.0
        if scale > 0:
            for v in nodes:
                bc[v] /= scale
        else:
            bc = {v: 0.0 for v in nodes}
    return bc


def connected_components(graph: ThresholdGraph) -> tuple[tuple[str, ...], ...]:
    """Components as sorted member tuples, largest first."""
    adj = graph.adjacency()
    seen: set[str] = set()
    comps: list[tuple[str, ...]] = []
    for v in graph.nodes:
        if v in seen:
            continue
        queue = deque([v])
        seen.add(v)
        members = [v]
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    members.append(w)
                    queue.append(w)
        comps.append(tuple(sorted(members)))
    comps.sort(key=lambda c: (-len(c), c))
    return tuple(comps)


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def write_matrix_csv(path, matrix: CorrelationMatrix) -> None:
    """Square CSV with entity ids on both margins; undefined cells blank."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(matrix.entities))
        for i, e in enumerate(matrix.entities):
            row: list[str] = [e]
            for j in range(len(matrix.entities)):
                v = float(matrix.values[i, j])
                row.append("" if math.isnan(v) else f"{v:.4f}")
            writer.writerow(row)


def read_matrix_csv(path, axis: str = "") -> CorrelationMatrix:
    """Read a square matrix CSV as written by write_matrix_csv."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise ShapeError(f"{path}: not a square matrix file")
    entities = tuple(rows[0][1:])
    n = len(entities)
    if len(rows) != n + 1:
        raise ShapeError(f"{path}: expected {n} data rows, found {len(rows) - 1}")
    values = np.full((n, n), np.nan)
    for i, row in enumerate(rows[1:]):
        if len(row) != n + 1 or row[0] != entities[i]:
            raise ShapeError(f"{path}: row {i + 2} does not match the header order")
        for j, cell in enumerate(row[1:]):
            if cell.strip() == "":
                continue
            try:
                values[i, j] = float(cell)
            except ValueError as exc:
                raise ShapeError(f"{path}: row {i + 2} bad cell {cell!r}") from exc
    if not np.allclose(
        np.nan_to_num(values, nan=9.0), np.nan_to_num(values.T, nan=9.0), atol=1e-9
    ):
        raise ShapeError(f"{path}: matrix is not symmetric")
    return CorrelationMatrix(entities=entities, values=values, axis=axis)


def write_graph_csv(path, graph: ThresholdGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "weight"])
        for a, b, w in graph.edges:
            writer.writerow([a, b, f"{w:.4f}"])


def graph_to_dict(graph: ThresholdGraph) -> dict:
    return {
        "axis": graph.axis,
        "mode": graph.mode,
        "threshold": graph.threshold,
        "nodes": list(graph.nodes),
        "edges": [
            {"a": a, "b": b, "weight": round(w, 4)} for a, b, w in graph.edges
        ],
    }


def graph_from_dict(data: Mapping) -> ThresholdGraph:
    """Inverse of :func:`graph_to_dict` for reloading stored graphs."""
    return ThresholdGraph(
        nodes=tuple(data["nodes"]),
        edges=tuple(
            (e["a"], e["b"], float(e["weight"])) for e in data["edges"]
        ),
        threshold=float(data.get("threshold", 0.0)),
        mode=str(data.get("mode", "signed-abs")),
        axis=str(data.get("axis", "")),
    )


def write_graph_json(path, graph: ThresholdGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(graph), fh, indent=2, sort_keys=True)
        fh.write("\n")
