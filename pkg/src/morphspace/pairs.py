"""Cross-dimension scenario pairs and consistency judgments.

A scenario pair joins two conditions from different dimensions; its value
on each axis is the arithmetic mean of the two condition scores, kept at
full precision internally (exports round to four decimals).  Consistency
judgments mark pairs as incompatible; surviving pairs feed the network and
clustering stages, and inconsistent pairs double as exclusion constraints
when counting the consistent configuration space.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import IngestError, PairError
from .field import ExclusionSet, MorphologicalField, make_exclusions
from .survey import ConditionScore, score_map

log = logging.getLogger(__name__)

VERDICTS = ("consistent", "inconsistent")


@dataclass(frozen=True)
class ScenarioPair:
    """Two cross-dimension conditions with their combined axis values."""

    a: str
    b: str
    impact: float
    likelihood: float
    consistent: bool = True

    def key(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass(frozen=True)
class ConsistencyJudgment:
    """A recorded verdict on one pair, with provenance fields kept verbatim."""

    a: str
    b: str
    verdict: str
    note: str = ""
    author: str = ""
    timestamp: str = ""


def combine_values(
    a: ConditionScore, b: ConditionScore
) -> tuple[float, float]:
    """Mean impact and mean likelihood of two scored conditions."""
    for s in (a, b):
        if not s.assessed():
            raise PairError(f"condition {s.condition!r} is not scored on both axes")
    return ((a.impact + b.impact) / 2.0, (a.likelihood + b.likelihood) / 2.0)


def unscored_conditions(
    field: MorphologicalField, scores: Sequence[ConditionScore]
) -> tuple[str, ...]:
    """Field conditions lacking a score on either axis, field order."""
    lookup = score_map(scores)
    return tuple(
        cid
        for cid in field.condition_ids()
        if cid not in lookup or not lookup[cid].assessed()
    )


def generate_pairs(
    field: MorphologicalField, scores: Sequence[ConditionScore]
) -> list[ScenarioPair]:
    """All cross-dimension pairs of scored conditions, in field order.

    The first member always precedes the second in field order.  Conditions
    without a full score are skipped (logged once), not treated as errors:
    a field may legitimately carry an unassessed exploratory dimension.
    """
    lookup = score_map(scores)
    skipped = unscored_conditions(field, scores)
    if skipped:
        log.warning(
            "skipping %d unscored conditions in pair generation: %s",
            len(skipped),
            ", ".join(skipped),
        )
    out: list[ScenarioPair] = []
    dims = field.dimensions
    for di, dim_a in enumerate(dims):
        for cond_a in dim_a.conditions:
            if cond_a.id in skipped:
                continue
            sa = lookup[cond_a.id]
            for dim_b in dims[di + 1 :]:
                for cond_b in dim_b.conditions:
                    if cond_b.id in skipped:
                        continue
                    impact, likelihood = combine_values(sa, lookup[cond_b.id])
                    out.append(
                        ScenarioPair(
                            a=cond_a.id, b=cond_b.id, impact=impact, likelihood=likelihood
                        )
                    )
    return out


def canonical_pair(field: MorphologicalField, a: str, b: str) -> tuple[str, str]:
    """Field-order key of a cross-dimension pair; rejects invalid ids."""
    return _canonical_key(field, a, b)


def _canonical_key(
    field: MorphologicalField, a: str, b: str
) -> tuple[str, str]:
    index = field.condition_index()
    for cid in (a, b):
        if cid not in index:
            raise PairError(f"judgment references unknown condition id {cid!r}")
    if a == b:
        raise PairError(f"judgment pairs condition {a!r} with itself")
    if index[a][0] == index[b][0]:
        raise PairError(
            f"judgment pair ({a!r}, {b!r}) lies within one dimension;"
            " cross-consistency applies across dimensions only"
        )
    return (a, b) if index[a] < index[b] else (b, a)


def apply_judgments(
    field: MorphologicalField,
    pairs: Sequence[ScenarioPair],
    judgments: Sequence[ConsistencyJudgment],
) -> list[ScenarioPair]:
    """Return pairs with consistency flags set from the judgment log.

    The log is replayed in order, so the last verdict on a pair wins.
    Judgments may reference unscored conditions (their pairs simply do not
    exist in the generated list); unknown ids or same-dimension pairs are
    hard errors.
    """
    verdicts: dict[tuple[str, str], bool] = {}
    for j in judgments:
        v = j.verdict.strip().casefold()
        if v not in VERDICTS:
            raise PairError(
                f"unknown verdict {j.verdict!r} for pair ({j.a!r}, {j.b!r});"
                f" expected one of {VERDICTS}"
            )
        verdicts[_canonical_key(field, j.a, j.b)] = v == "consistent"
    out: list[ScenarioPair] = []
    for p in pairs:
        flag = verdicts.get(p.key(), p.consistent)
        out.append(
            ScenarioPair(
                a=p.a, b=p.b, impact=p.impact, likelihood=p.likelihood, consistent=flag
            )
        )
    return out


def consistent_pairs(pairs: Iterable[ScenarioPair]) -> list[ScenarioPair]:
    return [p for p in pairs if p.consistent]


def judgments_to_exclusions(
    field: MorphologicalField, judgments: Sequence[ConsistencyJudgment]
) -> ExclusionSet:
    """Collapse the judgment log to the set of currently excluded pairs."""
    state: dict[tuple[str, str], bool] = {}
    for j in judgments:
        v = j.verdict.strip().casefold()
        if v not in VERDICTS:
            raise PairError(f"unknown verdict {j.verdict!r}")
        state[_canonical_key(field, j.a, j.b)] = v == "inconsistent"
    excluded = [key for key, off in state.items() if off]
    return make_exclusions(field, pairs=excluded)


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

PAIR_COLUMNS = ("condition_a", "condition_b", "impact", "likelihood", "consistent")
JUDGMENT_COLUMNS = ("condition_a", "condition_b", "verdict", "note", "author", "timestamp")


def write_pairs_csv(path, pairs: Sequence[ScenarioPair]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PAIR_COLUMNS)
        for p in pairs:
            writer.writerow(
                [
                    p.a,
                    p.b,
                    f"{p.impact:.4f}",
                    f"{p.likelihood:.4f}",
                    "true" if p.consistent else "false",
                ]
            )


def read_pairs_csv(path) -> list[ScenarioPair]:
    out: list[ScenarioPair] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file")
        missing = [c for c in PAIR_COLUMNS[:4] if c not in reader.fieldnames]
        if missing:
            raise IngestError(f"{path}: missing required columns {missing}")
        for i, row in enumerate(reader, start=2):
            try:
                flag = row.get("consistent", "true").strip().casefold()
                if flag not in ("true", "false"):
                    raise ValueError(f"bad consistent flag {row.get('consistent')!r}")
                out.append(
                    ScenarioPair(
                        a=row["condition_a"].strip(),
                        b=row["condition_b"].strip(),
                        impact=float(row["impact"]),
                        likelihood=float(row["likelihood"]),
                        consistent=flag == "true",
                    )
                )
            except ValueError as exc:
                raise IngestError(f"{path} line {i}: {exc}") from exc
    return out


def write_judgments_csv(path, judgments: Sequence[ConsistencyJudgment]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(JUDGMENT_COLUMNS)
        for j in judgments:
            writer.writerow([j.a, j.b, j.verdict, j.note, j.author, j.timestamp])


def read_judgments_csv(path) -> list[ConsistencyJudgment]:
    out: list[ConsistencyJudgment] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return out  # an absent or empty log means no verdicts yet
        missing = [c for c in JUDGMENT_COLUMNS[:3] if c not in reader.fieldnames]
        if missing:
            raise IngestError(f"{path}: missing required columns {missing}")
        for row in reader:
            out.append(
                ConsistencyJudgment(
                    a=row["condition_a"].strip(),
                    b=row["condition_b"].strip(),
                    verdict=row["verdict"].strip(),
                    note=row.get("note", ""),
                    author=row.get("author", ""),
                    timestamp=row.get("timestamp", ""),
                )
            )
    return out
