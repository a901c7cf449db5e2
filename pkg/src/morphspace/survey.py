"""Expert ratings: band scales, response ingest, aggregation, ranking.

Respondents rate conditions on two axes (impact, likelihood) either as a
raw value in [0, 1] or as a named band on a 0-100 scale; a band maps to its
midpoint over 100.  A scale marked ``inverted`` flips band values at ingest
(1 - value), so that stored scores always read "higher means more" on the
engine's orientation regardless of how the questionnaire was phrased.  Raw
numeric values are taken as already oriented.

Aggregation produces one score row per condition: weighted means per axis
(weights keyed by expertise stratum, default 1.0), population standard
deviations, counts, and unweighted per-stratum summaries.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping, Sequence

from .errors import IngestError, ScaleError
from .field import MorphologicalField

AXES = ("impact", "likelihood")
DIRECTIONS = ("normal", "inverted")


@dataclass(frozen=True)
class LikertBand:
    """A labelled integer interval on a 0-100 response scale."""

    label: str
    lower: int
    upper: int

    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2.0


@dataclass(frozen=True)
class LikertScale:
    """Ordered, non-overlapping bands covering 0-100 for one axis."""

    id: str
    axis: str
    bands: tuple[LikertBand, ...]
    direction: str = "normal"


@dataclass(frozen=True)
class SurveyResponse:
    """One rating of one condition on one axis by one respondent."""

    respondent: str
    condition: str
    axis: str
    value: float
    expertise: str = ""
    track: str = ""


@dataclass(frozen=True)
class StratumStats:
    """Unweighted summary of one expertise stratum on one axis."""

    expertise: str
    axis: str
    mean: float
    sd: float
    n: int


@dataclass(frozen=True)
class ConditionScore:
    """Aggregated panel judgement for one condition.

    ``impact``/``likelihood`` are None when no respondent rated that axis;
    such conditions are carried through as unassessed rather than dropped.
    """

    condition: str
    impact: float | None = None
    likelihood: float | None = None
    n_impact: int = 0
    n_likelihood: int = 0
    impact_sd: float | None = None
    likelihood_sd: float | None = None
    strata: tuple[StratumStats, ...] = ()

    def value(self, axis: str) -> float | None:
        if axis == "impact":
            return self.impact
        if axis == "likelihood":
            return self.likelihood
        raise IngestError(f"unknown axis {axis!r}")

    def assessed(self, axis: str | None = None) -> bool:
        if axis is None:
            return self.impact is not None and self.likelihood is not None
        return self.value(axis) is not None


def score_map(scores: Iterable[ConditionScore]) -> dict[str, ConditionScore]:
    return {s.condition: s for s in scores}


# ---------------------------------------------------------------------------
# Scales
# ---------------------------------------------------------------------------


def validate_scale(scale: LikertScale) -> None:
    if scale.axis not in AXES:
        raise ScaleError(f"scale {scale.id!r}: unknown axis {scale.axis!r}")
    if scale.direction not in DIRECTIONS:
        raise ScaleError(f"scale {scale.id!r}: unknown direction {scale.direction!r}")
    if not scale.bands:
        raise ScaleError(f"scale {scale.id!r}: needs at least one band")
    seen: set[str] = set()
    expected_lower = 0
    for band in scale.bands:
        if band.label.strip() == "":
            raise ScaleError(f"scale {scale.id!r}: band label may not be blank")
        key = band.label.casefold()
        if key in seen:
            raise ScaleError(f"scale {scale.id!r}: duplicate band label {band.label!r}")
        seen.add(key)
        if not (0 <= band.lower <= band.upper <= 100):
            raise ScaleError(
                f"scale {scale.id!r}: band {band.label!r} bounds"
                f" [{band.lower}, {band.upper}] fall outside 0-100"
            )
        if band.lower != expected_lower:
            raise ScaleError(
                f"scale {scale.id!r}: band {band.label!r} starts at {band.lower},"
                f" expected {expected_lower} (bands must tile 0-100 without"
                " gaps or overlaps)"
            )
        expected_lower = band.upper + 1
    if expected_lower != 101:
        raise ScaleError(f"scale {scale.id!r}: bands stop short of 100")


def band_value(scale: LikertScale, label: str) -> float:
    """Map a band label to its oriented unit-interval value."""
    key = label.strip().casefold()
    for band in scale.bands:
        if band.label.casefold() == key:
            value = band.midpoint() / 100.0
            return 1.0 - value if scale.direction == "inverted" else value
    known = ", ".join(repr(b.label) for b in scale.bands)
    raise ScaleError(f"scale {scale.id!r}: unknown band {label!r} (known: {known})")


def scale_from_dict(data: object) -> LikertScale:
    if not isinstance(data, Mapping):
        raise ScaleError("scale document must be a JSON object")
    try:
        bands = tuple(
            LikertBand(label=str(b["label"]), lower=int(b["lower"]), upper=int(b["upper"]))
            for b in data["bands"]
        )
        scale = LikertScale(
            id=str(data["id"]),
            axis=str(data.get("axis", data["id"])),
            bands=bands,
            direction=str(data.get("direction", "normal")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScaleError(f"malformed scale document: {exc}") from exc
    validate_scale(scale)
    return scale


def scale_to_dict(scale: LikertScale) -> dict:
    return {
        "id": scale.id,
        "axis": scale.axis,
        "direction": scale.direction,
        "bands": [
            {"label": b.label, "lower": b.lower, "upper": b.upper} for b in scale.bands
        ],
    }


def load_scale(path) -> LikertScale:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScaleError(f"{path}: not valid JSON ({exc})") from exc
    return scale_from_dict(data)


# ---------------------------------------------------------------------------
# Response ingest
# ---------------------------------------------------------------------------

RESPONSE_COLUMNS = ("respondent", "condition", "axis", "value", "expertise", "track")


def parse_responses(
    rows: Iterable[Mapping[str, str]],
    scales: Mapping[str, LikertScale] | None = None,
) -> list[SurveyResponse]:
    """Turn raw CSV rows into responses; band labels need a scale per axis."""
    scales = scales or {}
    out: list[SurveyResponse] = []
    problems: list[str] = []
    for i, row in enumerate(rows, start=2):  # header is line 1
        try:
            axis = row["axis"].strip()
            if axis not in AXES:
                raise IngestError(f"unknown axis {row['axis']!r}")
            raw = row["value"].strip()
            try:
                value = float(raw)
            except ValueError:
                scale = scales.get(axis)
                if scale is None:
                    raise IngestError(
                        f"band label {raw!r} given but no {axis} scale is loaded"
                    )
                value = band_value(scale, raw)
            else:
                if not 0.0 <= value <= 1.0:
                    raise IngestError(f"numeric value {raw} outside [0, 1]")
            out.append(
                SurveyResponse(
                    respondent=row["respondent"].strip(),
                    condition=row["condition"].strip(),
                    axis=axis,
                    value=value,
                    expertise=row.get("expertise", "").strip(),
                    track=row.get("track", "").strip(),
                )
            )
        except (IngestError, ScaleError, KeyError) as exc:
            detail = f"missing column {exc}" if isinstance(exc, KeyError) else str(exc)
            problems.append(f"line {i}: {detail}")
    if problems:
        shown = "; ".join(problems[:5])
        more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
        raise IngestError(f"{len(problems)} bad response rows: {shown}{more}")
    return out


def read_responses_csv(
    path, scales: Mapping[str, LikertScale] | None = None
) -> list[SurveyResponse]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file")
        missing = [c for c in RESPONSE_COLUMNS[:4] if c not in reader.fieldnames]
        if missing:
            raise IngestError(f"{path}: missing required columns {missing}")
        return parse_responses(reader, scales)


def write_responses_csv(path, responses: Sequence[SurveyResponse]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESPONSE_COLUMNS)
        for r in responses:
            writer.writerow(
                [r.respondent, r.condition, r.axis, f"{r.value:.6f}", r.expertise, r.track]
            )


# ---------------------------------------------------------------------------
# Aggregation and ranking
# ---------------------------------------------------------------------------


def _weighted_stats(
    values: Sequence[float], weights: Sequence[float]
) -> tuple[float, float]:
    total = sum(weights)
    mean = sum(w * v for w, v in zip(weights, values)) / total
    var = sum(w * (v - mean) ** 2 for w, v in zip(weights, values)) / total
    return mean, math.sqrt(var)


def aggregate(
    field: MorphologicalField,
    responses: Sequence[SurveyResponse],
    weights: Mapping[str, float] | None = None,
) -> tuple[ConditionScore, ...]:
    """Aggregate responses to one score row per field condition, field order.

    ``weights`` maps expertise labels to multipliers (missing labels weigh
    1.0).  Rows naming conditions outside the field are rejected rather
    than dropped, so a typo cannot silently shrink the panel.
    """
    weights = weights or {}
    for label, w in weights.items():
        if w <= 0:
            raise IngestError(f"expertise weight for {label!r} must be positive")
    known = set(field.condition_ids())
    unknown = sorted({r.condition for r in responses if r.condition not in known})
    if unknown:
        raise IngestError(f"responses reference unknown conditions: {unknown}")

    by_cond: dict[str, dict[str, list[SurveyResponse]]] = {}
    for r in responses:
        by_cond.setdefault(r.condition, {}).setdefault(r.axis, []).append(r)

    out: list[ConditionScore] = []
    for cid in field.condition_ids():
        per_axis = by_cond.get(cid, {})
        stats: dict[str, tuple[float, float, int]] = {}
        strata: list[StratumStats] = []
        for axis in AXES:
            rows = per_axis.get(axis, [])
            if rows:
                vals = [r.value for r in rows]
                wts = [weights.get(r.expertise, 1.0) for r in rows]
                mean, sd = _weighted_stats(vals, wts)
                stats[axis] = (mean, sd, len(rows))
                by_stratum: dict[str, list[float]] = {}
                for r in rows:
                    by_stratum.setdefault(r.expertise, []).append(r.value)
                for label in sorted(by_stratum):
                    svals = by_stratum[label]
                    smean = sum(svals) / len(svals)
                    ssd = math.sqrt(sum((v - smean) ** 2 for v in svals) / len(svals))
                    strata.append(
                        StratumStats(
                            expertise=label, axis=axis, mean=smean, sd=ssd, n=len(svals)
                        )
                    )
        imp = stats.get("impact")
        lik = stats.get("likelihood")
        out.append(
            ConditionScore(
                condition=cid,
                impact=imp[0] if imp else None,
                likelihood=lik[0] if lik else None,
                n_impact=imp[2] if imp else 0,
                n_likelihood=lik[2] if lik else 0,
                impact_sd=imp[1] if imp else None,
                likelihood_sd=lik[1] if lik else None,
                strata=tuple(strata),
            )
        )
    return tuple(out)


def rank_conditions(
    scores: Iterable[ConditionScore], axis: str, top: int | None = None
) -> list[tuple[str, float]]:
    """Conditions by descending score on one axis; ties break on id.

    Unassessed conditions are left out of the ranking entirely.
    """
    if axis not in AXES:
        raise IngestError(f"unknown axis {axis!r}")
    ranked = sorted(
        ((s.condition, s.value(axis)) for s in scores if s.value(axis) is not None),
        key=lambda item: (-item[1], item[0]),
    )
    return ranked[:top] if top is not None else ranked


# ---------------------------------------------------------------------------
# Aggregate table CSV
# ---------------------------------------------------------------------------

SCORE_COLUMNS = ("condition", "impact", "likelihood", "n_impact", "n_likelihood")


def write_scores_csv(path, scores: Sequence[ConditionScore]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCORE_COLUMNS)
        for s in scores:
            writer.writerow(
                [
                    s.condition,
                    "" if s.impact is None else f"{s.impact:.4f}",
                    "" if s.likelihood is None else f"{s.likelihood:.4f}",
                    s.n_impact,
                    s.n_likelihood,
                ]
            )


def read_scores_csv(path) -> tuple[ConditionScore, ...]:
    out: list[ConditionScore] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file")
        missing = [c for c in SCORE_COLUMNS[:3] if c not in reader.fieldnames]
        if missing:
            raise IngestError(f"{path}: missing required columns {missing}")
        for i, row in enumerate(reader, start=2):
            try:
                imp = row["impact"].strip()
                lik = row["likelihood"].strip()
                impact = float(imp) if imp else None
                likelihood = float(lik) if lik else None
                for v in (impact, likelihood):
                    if v is not None and not 0.0 <= v <= 1.0:
                        raise ValueError(f"score {v} outside [0, 1]")
                out.append(
                    ConditionScore(
                        condition=row["condition"].strip(),
                        impact=impact,
                        likelihood=likelihood,
                        n_impact=int(row.get("n_impact") or 0),
                        n_likelihood=int(row.get("n_likelihood") or 0),
                    )
                )
            except ValueError as exc:
                raise IngestError(f"{path} line {i}: {exc}") from exc
    return tuple(out)
