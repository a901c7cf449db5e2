"""Bundled example dataset: an AI-risk morphological field with panel scores.

Fourteen scored dimensions (46 conditions) spanning technological
transition, socio-technical ecology, and control; an optional fifteenth
dimension covers superintelligence pathways and carries no scores.  The
aggregate table records panel means per condition; counts reflect the two
survey tracks (42 impact raters, 79 likelihood raters).

Also bundled, for comparison reports only: the four previously released
scenario tables (frozen exactly as printed, including their internal
inconsistencies) and the released condition scorecard.
"""
from __future__ import annotations

import json
from importlib import resources

from .field import MorphologicalField, field_from_dict
from .report import PublishedRow, PublishedScenario
from .survey import ConditionScore, LikertScale, scale_from_dict

FIELD_ID = "ai-risk"
EXTENDED_FIELD_ID = "ai-risk-extended"

_CACHE: dict[str, object] = {}


def _read_text(name: str) -> str:
    return resources.files("morphspace.data").joinpath(name).read_text("utf-8")


def bundled_field(extended: bool = False) -> MorphologicalField:
    """The example field; ``extended`` adds the unscored fifteenth dimension."""
    key = f"field:{extended}"
    if key not in _CACHE:
        doc = json.loads(_read_text("ai_risk_field.json"))
        if extended:
            doc["id"] = EXTENDED_FIELD_ID
            doc["title"] = doc["title"] + " (with superintelligence pathways)"
            doc["dimensions"].append(
                json.loads(_read_text("superintelligence_dimension.json"))
            )
        _CACHE[key] = field_from_dict(doc)
    return _CACHE[key]


def bundled_scores() -> tuple[ConditionScore, ...]:
    """Panel means per scored condition, in field order."""
    if "scores" not in _CACHE:
        out: list[ConditionScore] = []
        lines = _read_text("condition_scores.csv").strip().splitlines()
        for line in lines[1:]:
            cid, imp, lik, n_imp, n_lik = line.split(",")
            out.append(
                ConditionScore(
                    condition=cid,
                    impact=float(imp),
                    likelihood=float(lik),
                    n_impact=int(n_imp),
                    n_likelihood=int(n_lik),
                )
            )
        _CACHE["scores"] = tuple(out)
    return _CACHE["scores"]


def bundled_scales() -> dict[str, LikertScale]:
    """Response scales keyed by axis; the impact scale is inverted."""
    if "scales" not in _CACHE:
        scales = {}
        for name in ("impact_scale.json", "likelihood_scale.json"):
            scale = scale_from_dict(json.loads(_read_text(name)))
            scales[scale.axis] = scale
        _CACHE["scales"] = scales
    return dict(_CACHE["scales"])


def published_scenarios() -> tuple[PublishedScenario, ...]:
    """The four released scenario tables, verbatim."""
    if "published" not in _CACHE:
        doc = json.loads(_read_text("published_scenarios.json"))
        out = []
        for s in doc["scenarios"]:
            out.append(
                PublishedScenario(
                    id=s["id"],
                    name=s["name"],
                    banner=s["banner"],
                    printed_impact=float(s["printed_average"]["impact"]),
                    printed_likelihood=float(s["printed_average"]["likelihood"]),
                    rows=tuple(
                        PublishedRow(
                            dimension=r["dimension"],
                            condition=r["condition"],
                            label=r["label"],
                            impact=float(r["impact"]),
                            likelihood=float(r["likelihood"]),
                        )
                        for r in s["rows"]
                    ),
                )
            )
        _CACHE["published"] = tuple(out)
    return _CACHE["published"]


def published_scorecard() -> dict[str, dict[str, str]]:
    """Released scorecard: scenario id -> {dimension id: condition id}.

    The released card is severity-ordered; one corporate-governance cell
    is unresolvable in the source (ambiguous duplicate label) and is
    absent here.
    """
    if "scorecard" not in _CACHE:
        table: dict[str, dict[str, str]] = {}
        lines = _read_text("published_scorecard.csv").strip().splitlines()
        for line in lines[1:]:
            scenario, dimension, condition = line.split(",")[:3]
            table.setdefault(scenario, {})[dimension] = condition
        _CACHE["scorecard"] = table
    return {k: dict(v) for k, v in _CACHE["scorecard"].items()}
