"""Morphological field model: dimensions, conditions, configuration space.

A field is an ordered sequence of dimensions, each carrying an ordered
sequence of mutually exclusive conditions.  A configuration selects exactly
one condition per dimension; the unconstrained space is the Cartesian
product of the dimension sizes.  Exclusion constraints (pairwise, plus
single-condition exclusions used internally to express pins) shrink the
space; counting and enumeration honour them exactly.

Condition ids are unique across the whole field, not just within their
dimension, so that downstream tables can reference a condition by bare id.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field
from math import prod
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ConstraintError, FieldError

_ID_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")


@dataclass(frozen=True)
class ConditionDef:
    """One value a dimension can take."""

    id: str
    name: str
    description: str = ""


@dataclass(frozen=True)
class Dimension:
    """A named axis of the field with at least two conditions."""

    id: str
    name: str
    cluster: str
    conditions: tuple[ConditionDef, ...]

    def condition_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.conditions)

    def size(self) -> int:
        return len(self.conditions)


@dataclass(frozen=True)
class MorphologicalField:
    """An ordered collection of dimensions defining a configuration space."""

    id: str
    title: str
    dimensions: tuple[Dimension, ...]

    def sizes(self) -> tuple[int, ...]:
        return tuple(d.size() for d in self.dimensions)

    def condition_ids(self) -> tuple[str, ...]:
        """All condition ids in field order (dimension order, then position)."""
        return tuple(c.id for d in self.dimensions for c in d.conditions)

    def condition_index(self) -> dict[str, tuple[int, int]]:
        """Map condition id to (dimension position, condition position)."""
        out: dict[str, tuple[int, int]] = {}
        for i, dim in enumerate(self.dimensions):
            for j, cond in enumerate(dim.conditions):
                out[cond.id] = (i, j)
        return out

    def dimension_of(self, condition_id: str) -> Dimension:
        for dim in self.dimensions:
            for cond in dim.conditions:
                if cond.id == condition_id:
                    return dim
        raise FieldError(f"unknown condition id {condition_id!r}")

    def condition(self, condition_id: str) -> ConditionDef:
        for dim in self.dimensions:
            for cond in dim.conditions:
                if cond.id == condition_id:
                    return cond
        raise FieldError(f"unknown condition id {condition_id!r}")


@dataclass(frozen=True)
class Configuration:
    """One condition id per dimension, in field order."""

    choices: tuple[str, ...]


@dataclass(frozen=True)
class ExclusionSet:
    """Constraints that remove configurations from the space.

    ``pairs`` are cross-dimension pairs that may not co-occur; ``conditions``
    are single conditions removed outright (how pins are expressed: pinning
    a condition excludes its siblings).  Pairs are stored in field order.
    """

    pairs: frozenset[tuple[str, str]] = dc_field(default_factory=frozenset)
    conditions: frozenset[str] = dc_field(default_factory=frozenset)

    def is_empty(self) -> bool:
        return not self.pairs and not self.conditions


# ---------------------------------------------------------------------------
# Validation and JSON interchange
# ---------------------------------------------------------------------------


def _check_id(value: object, path: str) -> str:
    if not isinstance(value, str) or not _ID_RE.match(value):
        raise FieldError(
            f"at {path}: id must be lowercase kebab-case, got {value!r}"
        )
    return value


def _check_str(value: object, path: str) -> str:
    if not isinstance(value, str):
        raise FieldError(f"at {path}: expected a string, got {type(value).__name__}")
    return value


def field_from_dict(data: object) -> MorphologicalField:
    """Build and validate a field from its JSON object form.

    Raises FieldError with a JSON-path diagnostic on the first violation.
    """
    if not isinstance(data, Mapping):
        raise FieldError("field document must be a JSON object")
    for key in ("id", "title", "dimensions"):
        if key not in data:
            raise FieldError(f"missing required key {key!r}")
    field_id = _check_id(data["id"], "id")
    title = _check_str(data["title"], "title")
    raw_dims = data["dimensions"]
    if not isinstance(raw_dims, Sequence) or isinstance(raw_dims, (str, bytes)):
        raise FieldError("at dimensions: expected an array")
    if len(raw_dims) == 0:
        raise FieldError("at dimensions: a field needs at least one dimension")

    dim_seen: dict[str, str] = {}
    cond_seen: dict[str, str] = {}
    dims: list[Dimension] = []
    for i, rd in enumerate(raw_dims):
        dpath = f"dimensions[{i}]"
        if not isinstance(rd, Mapping):
            raise FieldError(f"at {dpath}: expected an object")
        for key in ("id", "name", "conditions"):
            if key not in rd:
                raise FieldError(f"at {dpath}: missing required key {key!r}")
        did = _check_id(rd["id"], f"{dpath}.id")
        if did in dim_seen:
            raise FieldError(
                f"at {dpath}.id: duplicate dimension id {did!r}"
                f" (first defined at {dim_seen[did]})"
            )
        dim_seen[did] = f"{dpath}.id"
        name = _check_str(rd["name"], f"{dpath}.name")
        cluster = _check_str(rd.get("cluster", ""), f"{dpath}.cluster")
        raw_conds = rd["conditions"]
        if not isinstance(raw_conds, Sequence) or isinstance(raw_conds, (str, bytes)):
            raise FieldError(f"at {dpath}.conditions: expected an array")
        if len(raw_conds) < 2:
            raise FieldError(
                f"at {dpath}.conditions: a dimension needs at least two conditions"
            )
        conds: list[ConditionDef] = []
        for j, rc in enumerate(raw_conds):
            cpath = f"{dpath}.conditions[{j}]"
            if not isinstance(rc, Mapping):
                raise FieldError(f"at {cpath}: expected an object")
            for key in ("id", "name"):
                if key not in rc:
                    raise FieldError(f"at {cpath}: missing required key {key!r}")
            cid = _check_id(rc["id"], f"{cpath}.id")
            if cid in cond_seen:
                raise FieldError(
                    f"at {cpath}.id: duplicate condition id {cid!r}"
                    f" (first defined at {cond_seen[cid]})"
                )
            cond_seen[cid] = f"{cpath}.id"
            conds.append(
                ConditionDef(
                    id=cid,
                    name=_check_str(rc["name"], f"{cpath}.name"),
                    description=_check_str(rc.get("description", ""), f"{cpath}.description"),
                )
            )
        dims.append(Dimension(id=did, name=name, cluster=cluster, conditions=tuple(conds)))
    return MorphologicalField(id=field_id, title=title, dimensions=tuple(dims))


def field_to_dict(field: MorphologicalField) -> dict:
    return {
        "id": field.id,
        "title": field.title,
        "dimensions": [
            {
                "id": d.id,
                "name": d.name,
                "cluster": d.cluster,
                "conditions": [
                    {"id": c.id, "name": c.name, "description": c.description}
                    for c in d.conditions
                ],
            }
            for d in field.dimensions
        ],
    }


def load_field(path) -> MorphologicalField:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FieldError(f"{path}: not valid JSON ({exc})") from exc
    return field_from_dict(data)


def dump_field(field: MorphologicalField, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(field_to_dict(field), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Exclusion constraints
# ---------------------------------------------------------------------------


def make_exclusions(
    field: MorphologicalField,
    pairs: Iterable[tuple[str, str]] = (),
    conditions: Iterable[str] = (),
) -> ExclusionSet:
    """Validate and canonicalise constraints against a field.

    Pairs must join different dimensions; both directions denote the same
    constraint and are stored once, ordered by field position.
    """
    index = field.condition_index()
    canon: set[tuple[str, str]] = set()
    for a, b in pairs:
        if a not in index:
            raise ConstraintError(f"exclusion references unknown condition id {a!r}")
        if b not in index:
            raise ConstraintError(f"exclusion references unknown condition id {b!r}")
        if a == b:
            raise ConstraintError(f"exclusion pairs a condition with itself: {a!r}")
        if index[a][0] == index[b][0]:
            raise ConstraintError(
                f"exclusion pair ({a!r}, {b!r}) lies within one dimension;"
                " sibling conditions are already mutually exclusive"
            )
        canon.add((a, b) if index[a] < index[b] else (b, a))
    singles: set[str] = set()
    for c in conditions:
        if c not in index:
            raise ConstraintError(f"exclusion references unknown condition id {c!r}")
        singles.add(c)
    return ExclusionSet(pairs=frozenset(canon), conditions=frozenset(singles))


def exclusions_for_pins(
    field: MorphologicalField, pinned: Iterable[str]
) -> ExclusionSet:
    """Express pinned conditions as sibling exclusions.

    Pinning a condition keeps only configurations that select it, which is
    the same as excluding every other condition of its dimension.  Two pins
    in one dimension would empty that dimension and are rejected.
    """
    index = field.condition_index()
    by_dim: dict[int, str] = {}
    for cid in pinned:
        if cid not in index:
            raise ConstraintError(f"pin references unknown condition id {cid!r}")
        di = index[cid][0]
        if di in by_dim and by_dim[di] != cid:
            raise ConstraintError(
                f"pins {by_dim[di]!r} and {cid!r} both target dimension"
                f" {field.dimensions[di].id!r}"
            )
        by_dim[di] = cid
    removed: set[str] = set()
    for di, keep in by_dim.items():
        for cond in field.dimensions[di].conditions:
            if cond.id != keep:
                removed.add(cond.id)
    return ExclusionSet(conditions=frozenset(removed))


def merge_exclusions(*sets: ExclusionSet) -> ExclusionSet:
    pairs: set[tuple[str, str]] = set()
    conditions: set[str] = set()
    for s in sets:
        pairs |= s.pairs
        conditions |= s.conditions
    return ExclusionSet(pairs=frozenset(pairs), conditions=frozenset(conditions))


# ---------------------------------------------------------------------------
# Counting and enumeration
# ---------------------------------------------------------------------------


def count_configurations(field: MorphologicalField) -> int:
    """Size of the unconstrained space: the product of dimension sizes."""
    return prod(field.sizes())


def count_cross_dimension_pairs(field: MorphologicalField) -> int:
    """Number of unordered condition pairs drawn from different dimensions."""
    total = sum(field.sizes())
    return (total * total - sum(n * n for n in field.sizes())) // 2


def _allowed_lists(
    field: MorphologicalField, exclusions: ExclusionSet
) -> list[list[str]]:
    return [
        [c.id for c in dim.conditions if c.id not in exclusions.conditions]
        for dim in field.dimensions
    ]


def _partner_map(exclusions: ExclusionSet) -> dict[str, set[str]]:
    partners: dict[str, set[str]] = {}
    for a, b in exclusions.pairs:
        partners.setdefault(a, set()).add(b)
        partners.setdefault(b, set()).add(a)
    return partners


def count_consistent_configurations(
    field: MorphologicalField, exclusions: ExclusionSet | None = None
) -> int:
    """Exact count of configurations that violate no exclusion.

    Backtracks only over dimensions touched by a pair constraint and
    multiplies the remaining dimensions in closed form, so sparse
    constraint sets stay fast even on huge spaces.
    """
    if exclusions is None or exclusions.is_empty():
        return count_configurations(field)
    allowed = _allowed_lists(field, exclusions)
    if any(not options for options in allowed):
        return 0
    partners = _partner_map(exclusions)
    constrained = [
        i
        for i, options in enumerate(allowed)
        if any(c in partners for c in options)
    ]
    free = prod(
        len(options)
        for i, options in enumerate(allowed)
        if i not in set(constrained)
    )
    if not constrained:
        return free

    forbidden: dict[str, int] = {}

    def walk(pos: int) -> int:
        if pos == len(constrained):
            return 1
        total = 0
        for cid in allowed[constrained[pos]]:
            if forbidden.get(cid):
                continue
            hit = partners.get(cid, ())
            for other in hit:
                forbidden[other] = forbidden.get(other, 0) + 1
            total += walk(pos + 1)
            for other in hit:
                forbidden[other] -= 1
        return total

    return walk(0) * free


def enumerate_configurations(
    field: MorphologicalField,
    exclusions: ExclusionSet | None = None,
    limit: int | None = None,
    offset: int = 0,
) -> Iterator[Configuration]:
    """Yield consistent configurations in lexicographic field order.

    ``offset`` skips that many configurations before yielding; ``limit``
    caps the number yielded.  The walk prunes on the first violated
    constraint, so it never materialises the full product.
    """
    if offset < 0:
        raise ConstraintError("offset must be non-negative")
    if limit is not None and limit < 0:
        raise ConstraintError("limit must be non-negative")
    exclusions = exclusions or ExclusionSet()
    allowed = _allowed_lists(field, exclusions)
    if any(not options for options in allowed):
        return
    partners = _partner_map(exclusions)
    ndims = len(allowed)
    choice: list[str] = [""] * ndims
    forbidden: dict[str, int] = {}
    skipped = 0
    emitted = 0

    def walk(pos: int) -> Iterator[Configuration]:
        nonlocal skipped, emitted
        if pos == ndims:
            if skipped < offset:
                skipped += 1
            else:
                emitted += 1
                yield Configuration(choices=tuple(choice))
            return
        for cid in allowed[pos]:
            if forbidden.get(cid):
                continue
            choice[pos] = cid
            hit = partners.get(cid, ())
            for other in hit:
                forbidden[other] = forbidden.get(other, 0) + 1
            yield from walk(pos + 1)
            for other in hit:
                forbidden[other] -= 1
            if limit is not None and emitted >= limit:
                return

    yield from walk(0)
