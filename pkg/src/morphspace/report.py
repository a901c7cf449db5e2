"""Scenario assembly and report bundle generation.

Each cluster of the pair space becomes one scenario: a condition's
affinity to a cluster is the share of its consistent pairs landing there,
and each dimension contributes its highest-affinity condition.  Scenario
averages are plain means over the chosen conditions, computed at full
precision; files round to four decimals at write time.

The bundle also carries two comparison sections against previously
published results for the bundled field: recomputed versus printed
averages for the four released scenario tables, and a concordance count
against the released condition scorecard.  Both are informational; they
never alter the generated scenarios.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .clustering import ClusterModel
from .errors import AssemblyError, ParamError
from .field import MorphologicalField
from .pairs import ScenarioPair, consistent_pairs
from .survey import ConditionScore, score_map


@dataclass(frozen=True)
class ConditionAffinity:
    """Share of a condition's consistent pairs falling in each cluster."""

    condition: str
    shares: tuple[float, ...]
    n_pairs: int


@dataclass(frozen=True)
class ScenarioRow:
    dimension: str
    condition: str
    impact: float
    likelihood: float


@dataclass(frozen=True)
class Scenario:
    """One assembled future: a condition per dimension plus its averages."""

    name: str
    cluster: int
    rows: tuple[ScenarioRow, ...]
    impact: float
    likelihood: float


def condition_affinities(
    field: MorphologicalField,
    pairs: Sequence[ScenarioPair],
    model: ClusterModel,
) -> tuple[ConditionAffinity, ...]:
    """Affinity rows in field order for every condition with pairs.

    Shares are non-negative and sum to one per condition.  Conditions
    without any consistent pair (unscored, or fully pruned) are absent.
    """
    counts: dict[str, list[int]] = {}
    for p in consistent_pairs(pairs):
        label = model.assignments.get(p.key())
        if label is None:
            raise ParamError(f"pair ({p.a!r}, {p.b!r}) missing from cluster model")
        for cid in (p.a, p.b):
            counts.setdefault(cid, [0] * model.k)[label] += 1
    out: list[ConditionAffinity] = []
    for cid in field.condition_ids():
        if cid not in counts:
            continue
        per_cluster = counts[cid]
        total = sum(per_cluster)
        out.append(
            ConditionAffinity(
                condition=cid,
                shares=tuple(c / total for c in per_cluster),
                n_pairs=total,
            )
        )
    return tuple(out)


def assemble_scenarios(
    field: MorphologicalField,
    scores: Sequence[ConditionScore],
    affinities: Sequence[ConditionAffinity],
    names: Sequence[str] | None = None,
) -> tuple[Scenario, ...]:
    """One scenario per cluster, ordered by cluster index.

    Within a dimension the cluster gets the condition with the highest
    affinity share; ties prefer the higher impact, then the smaller id.
    Dimensions with no affinity rows (no scored conditions) are left out
    of every scenario rather than guessed at.
    """
    if not affinities:
        raise AssemblyError("no affinity rows; nothing to assemble")
    k = len(affinities[0].shares)
    by_condition = {a.condition: a for a in affinities}
    lookup = score_map(scores)
    if names is not None and len(names) != k:
        raise AssemblyError(f"got {len(names)} names for {k} clusters")

    scenarios: list[Scenario] = []
    for c in range(k):
        rows: list[ScenarioRow] = []
        for dim in field.dimensions:
            candidates = [
                cond.id for cond in dim.conditions if cond.id in by_condition
            ]
            if not candidates:
                continue
            best = min(
                candidates,
                key=lambda cid: (
                    -by_condition[cid].shares[c],
                    -lookup[cid].impact,
                    cid,
                ),
            )
            s = lookup[best]
            rows.append(
                ScenarioRow(
                    dimension=dim.id,
                    condition=best,
                    impact=s.impact,
                    likelihood=s.likelihood,
                )
            )
        if not rows:
            raise AssemblyError(f"cluster {c} selected no conditions")
        impact = sum(r.impact for r in rows) / len(rows)
        likelihood = sum(r.likelihood for r in rows) / len(rows)
        scenarios.append(
            Scenario(
                name=names[c] if names else f"scenario-{c + 1}",
                cluster=c,
                rows=tuple(rows),
                impact=impact,
                likelihood=likelihood,
            )
        )
    return tuple(scenarios)


def risk_matrix_plot_data(
    points: Mapping[str, tuple[float, float]], bins: int = 5
) -> dict:
    """Impact-likelihood scatter bucketed onto a bins x bins grid.

    A value v lands in bucket min(floor(v * bins), bins - 1), so 1.0 stays
    inside the top bucket.
    """
    if bins < 1:
        raise ParamError("bins must be at least 1")

    def bucket(v: float) -> int:
        return min(int(v * bins), bins - 1)

    series = []
    for key in sorted(points):
        impact, likelihood = points[key]
        series.append(
            {
                "id": key,
                "impact": round(impact, 6),
                "likelihood": round(likelihood, 6),
                "impact_bin": bucket(impact),
                "likelihood_bin": bucket(likelihood),
            }
        )
    return {"bins": bins, "series": series}


# ---------------------------------------------------------------------------
# Published-result comparisons (bundled field only)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PublishedRow:
    dimension: str
    condition: str
    label: str
    impact: float
    likelihood: float


@dataclass(frozen=True)
class PublishedScenario:
    id: str
    name: str
    banner: str
    printed_impact: float
    printed_likelihood: float
    rows: tuple[PublishedRow, ...]


@dataclass(frozen=True)
class AverageCheck:
    """Printed versus recomputed average for one released table."""

    scenario: str
    printed_impact: float
    recomputed_impact: float
    printed_likelihood: float
    recomputed_likelihood: float

    def impact_delta(self) -> float:
        return self.recomputed_impact - self.printed_impact

    def likelihood_delta(self) -> float:
        return self.recomputed_likelihood - self.printed_likelihood

    def flagged(self, tolerance: float = 0.0005) -> bool:
        return (
            abs(self.impact_delta()) > tolerance
            or abs(self.likelihood_delta()) > tolerance
        )


def check_published_averages(
    published: Sequence[PublishedScenario],
) -> tuple[AverageCheck, ...]:
    """Recompute each released table's average from its own printed rows."""
    out = []
    for p in published:
        out.append(
            AverageCheck(
                scenario=p.id,
                printed_impact=p.printed_impact,
                recomputed_impact=sum(r.impact for r in p.rows) / len(p.rows),
                printed_likelihood=p.printed_likelihood,
                recomputed_likelihood=sum(r.likelihood for r in p.rows) / len(p.rows),
            )
        )
    return tuple(out)


@dataclass(frozen=True)
class ConcordanceCell:
    scenario: str
    reference: str
    dimension: str
    chosen: str
    expected: str

    def matched(self) -> bool:
        return self.chosen == self.expected


@dataclass(frozen=True)
class Concordance:
    """Cell-by-cell agreement with a reference condition scorecard."""

    cells: tuple[ConcordanceCell, ...]

    def matched(self) -> int:
        return sum(1 for c in self.cells if c.matched())

    def fraction(self) -> float:
        return self.matched() / len(self.cells) if self.cells else 0.0


def scorecard_concordance(
    field: MorphologicalField,
    scenarios: Sequence[Scenario],
    reference: Mapping[str, Mapping[str, str]],
) -> Concordance:
    """Compare generated picks against a reference scorecard.

    ``reference`` maps scenario id to {dimension id: condition id}.
    Generated and reference scenarios pair by ascending impact rank (the
    reference order is taken as already severity-sorted), so the check is
    label-free.  Only dimensions present in both sides count as cells.
    Requires equal scenario counts; otherwise there is nothing comparable
    and the result is empty.
    """
    if len(scenarios) != len(reference):
        return Concordance(cells=())
    ordered = sorted(scenarios, key=lambda s: (s.impact, s.name))
    dim_ids = {d.id for d in field.dimensions}
    cells: list[ConcordanceCell] = []
    for scen, ref_id in zip(ordered, reference):
        picks = {r.dimension: r.condition for r in scen.rows}
        for dim_id, expected in reference[ref_id].items():
            if dim_id not in dim_ids or dim_id not in picks:
                continue
            cells.append(
                ConcordanceCell(
                    scenario=scen.name,
                    reference=ref_id,
                    dimension=dim_id,
                    chosen=picks[dim_id],
                    expected=expected,
                )
            )
    return Concordance(cells=tuple(cells))


# ---------------------------------------------------------------------------
# Bundle writing
# ---------------------------------------------------------------------------

SCORECARD_FILE = "scorecard.csv"
AFFINITY_FILE = "affinities.csv"
PLOT_FILE = "plot_data.json"
SUMMARY_FILE = "summary.txt"


def scenario_file_name(index: int) -> str:
    return f"scenario-{index + 1}.csv"


def write_scorecard_csv(path, scenarios: Sequence[Scenario]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "dimension", "condition"])
        for s in scenarios:
            for r in s.rows:
                writer.writerow([s.name, r.dimension, r.condition])


def write_scenario_csv(path, scenario: Scenario) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dimension", "condition", "impact", "likelihood"])
        for r in scenario.rows:
            writer.writerow(
                [r.dimension, r.condition, f"{r.impact:.4f}", f"{r.likelihood:.4f}"]
            )
        writer.writerow(
            ["average", "", f"{scenario.impact:.4f}", f"{scenario.likelihood:.4f}"]
        )


def write_affinities_csv(path, affinities: Sequence[ConditionAffinity]) -> None:
    if not affinities:
        raise ParamError("no affinity rows to write")
    k = len(affinities[0].shares)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["condition"] + [f"cluster_{c}" for c in range(k)] + ["n_pairs"]
        )
        for a in affinities:
            writer.writerow(
                [a.condition]
                + [f"{share:.4f}" for share in a.shares]
                + [a.n_pairs]
            )


def _fmt(v: float) -> str:
    return f"{v:.4f}"


def summary_text(
    field: MorphologicalField,
    scenarios: Sequence[Scenario],
    model: ClusterModel,
    pair_total: int,
    survivors: int,
    configuration_count: int,
    average_checks: Sequence[AverageCheck] = (),
    concordance: Concordance | None = None,
    extra_lines: Sequence[str] = (),
) -> str:
    lines: list[str] = []
    lines.append(f"field: {field.id} ({field.title})")
    lines.append(
        f"dimensions: {len(field.dimensions)}  conditions: {len(field.condition_ids())}"
    )
    lines.append(f"configurations: {configuration_count}")
    lines.append(f"pairs: {pair_total}  consistent: {survivors}")
    lines.append(
        f"clustering: k={model.k} seed={model.seed}"
        f" iterations={model.iterations} inertia={model.inertia:.6f}"
    )
    for s in model.summaries:
        lines.append(
            f"  cluster {s.cluster}: size={s.size}"
            f" impact={_fmt(s.mean_impact)} likelihood={_fmt(s.mean_likelihood)}"
        )
    lines.append("")
    for s in scenarios:
        lines.append(
            f"scenario {s.name} (cluster {s.cluster}):"
            f" impact={_fmt(s.impact)} likelihood={_fmt(s.likelihood)}"
        )
        for r in s.rows:
            lines.append(f"  {r.dimension}: {r.condition}")
    if average_checks:
        lines.append("")
        lines.append("published table check (recomputed vs printed averages):")
        for chk in average_checks:
            flag = "  MISMATCH" if chk.flagged() else "  ok"
            lines.append(
                f"  {chk.scenario}: impact {chk.recomputed_impact:.3f}"
                f" vs {chk.printed_impact:.3f}"
                f" (delta {chk.impact_delta():+.3f}),"
                f" likelihood {chk.recomputed_likelihood:.3f}"
                f" vs {chk.printed_likelihood:.3f}"
                f" (delta {chk.likelihood_delta():+.3f}){flag}"
            )
    if concordance is not None and concordance.cells:
        lines.append("")
        lines.append(
            f"scorecard concordance: {concordance.matched()}/{len(concordance.cells)}"
            f" cells agree ({concordance.fraction():.3f})"
        )
        for cell in concordance.cells:
            if not cell.matched():
                lines.append(
                    f"  differs {cell.reference}/{cell.dimension}:"
                    f" chose {cell.chosen}, reference has {cell.expected}"
                )
    for line in extra_lines:
        lines.append(line)
    return "\n".join(lines) + "\n"


def write_report_bundle(
    outdir,
    field: MorphologicalField,
    scenarios: Sequence[Scenario],
    affinities: Sequence[ConditionAffinity],
    model: ClusterModel,
    pairs: Sequence[ScenarioPair],
    configuration_count: int,
    average_checks: Sequence[AverageCheck] = (),
    concordance: Concordance | None = None,
    extra_summary_lines: Sequence[str] = (),
) -> list[str]:
    """Write the full bundle into ``outdir``; returns the file names."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    names: list[str] = []

    write_scorecard_csv(out / SCORECARD_FILE, scenarios)
    names.append(SCORECARD_FILE)
    for i, s in enumerate(scenarios):
        fname = scenario_file_name(i)
        write_scenario_csv(out / fname, s)
        names.append(fname)
    write_affinities_csv(out / AFFINITY_FILE, affinities)
    names.append(AFFINITY_FILE)

    points = {s.name: (s.impact, s.likelihood) for s in scenarios}
    plot = risk_matrix_plot_data(points)
    with open(out / PLOT_FILE, "w", encoding="utf-8") as fh:
        json.dump(plot, fh, indent=2, sort_keys=True)
        fh.write("\n")
    names.append(PLOT_FILE)

    survivors = len(consistent_pairs(pairs))
    text = summary_text(
        field,
        scenarios,
        model,
        pair_total=len(pairs),
        survivors=survivors,
        configuration_count=configuration_count,
        average_checks=average_checks,
        concordance=concordance,
        extra_lines=extra_summary_lines,
    )
    with open(out / SUMMARY_FILE, "w", encoding="utf-8") as fh:
        fh.write(text)
    names.append(SUMMARY_FILE)
    return names
