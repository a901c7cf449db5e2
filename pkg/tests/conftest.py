"""Shared builders for small fields, scores and graphs used across tests."""
from __future__ import annotations

import itertools

import pytest

from morphspace.field import MorphologicalField, field_from_dict
from morphspace.survey import ConditionScore


def make_field(spec: dict[str, list[str]], fid: str = "test-field") -> MorphologicalField:
    """Field from {dimension-id: [condition ids]} keeping dict order."""
    return field_from_dict(
        {
            "id": fid,
            "title": fid,
            "dimensions": [
                {
                    "id": did,
                    "name": did,
                    "conditions": [{"id": cid, "name": cid} for cid in conds],
                }
                for did, conds in spec.items()
            ],
        }
    )


def make_score(cid: str, impact: float, likelihood: float) -> ConditionScore:
    return ConditionScore(
        condition=cid,
        impact=impact,
        likelihood=likelihood,
        n_impact=1,
        n_likelihood=1,
    )


def brute_force_consistent(field, exclusions) -> list[tuple[str, ...]]:
    """Reference count by full enumeration; only viable for small fields."""
    banned_pairs = set(exclusions.pairs)
    banned_conds = set(exclusions.conditions)
    out = []
    pools = [[c.id for c in d.conditions] for d in field.dimensions]
    for combo in itertools.product(*pools):
        if any(c in banned_conds for c in combo):
            continue
        ok = True
        for i in range(len(combo)):
            for j in range(i + 1, len(combo)):
                a, b = combo[i], combo[j]
                if (a, b) in banned_pairs or (b, a) in banned_pairs:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(combo)
    return out


@pytest.fixture
def small_field() -> MorphologicalField:
    return make_field(
        {
            "alpha": ["a1", "a2", "a3"],
            "beta": ["b1", "b2"],
            "gamma": ["g1", "g2", "g3", "g4"],
        }
    )


@pytest.fixture
def small_scores(small_field) -> list[ConditionScore]:
    values = {
        "a1": (0.9, 0.2),
        "a2": (0.5, 0.5),
        "a3": (0.1, 0.8),
        "b1": (0.8, 0.4),
        "b2": (0.3, 0.6),
        "g1": (0.7, 0.7),
        "g2": (0.6, 0.1),
        "g3": (0.2, 0.9),
        "g4": (0.4, 0.3),
    }
    return [make_score(c, i, l) for c, (i, l) in values.items()]
