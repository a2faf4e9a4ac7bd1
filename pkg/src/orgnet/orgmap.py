"""Org chart and address directory: who belongs to which unit.

The chart is a forest of units, each tagged with one of seven categories.
The directory maps internal addresses to leaf-ish units. Together they let
any address be lifted to an ancestor unit at a chosen level or to its
category.
"""
from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import CategoryError, DataError, LevelError, OrgChartError
from .ingest import Address, normalize_address

logger = logging.getLogger(__name__)

CHART_HEADER = ("unit_id", "name", "parent_id", "category")
DIRECTORY_HEADER = ("address", "unit_id")


class UnitCategory(str, Enum):
    TECHNICAL_GROUP = "technical-group"
    TECHNICAL_PROGRAM = "technical-program"
    TECHNICAL_MANAGEMENT = "technical-management"
    OPERATIONS_GROUP = "operations-group"
    OPERATIONS_PROGRAM = "operations-program"
    OPERATIONS_MANAGEMENT = "operations-management"
    ADMINISTRATION = "administration"

    def __str__(self) -> str:
        return self.value


CATEGORY_ORDER = tuple(c.value for c in UnitCategory)
OTHER = "other"
EXTERNAL = "external"
UNKNOWN_INTERNAL = "unknown-internal"


@dataclass(frozen=True)
class OrgUnit:
    unit_id: str
    name: str
    parent_id: str | None
    level: int
    category: str
    """One of :data:`CATEGORY_ORDER`, or ``"other"`` for declared extras."""
    category_label: str = ""


@dataclass(frozen=True)
class OrgChart:
    units: Mapping[str, OrgUnit]

    def __len__(self) -> int:
        return len(self.units)

    def __contains__(self, unit_id: object) -> bool:
        return unit_id in self.units

    def __getitem__(self, unit_id: str) -> OrgUnit:
        return self.units[unit_id]

    @property
    def max_level(self) -> int:
        return max((u.level for u in self.units.values()), default=-1)

    def roots(self) -> list[str]:
        return [u.unit_id for u in self.units.values() if u.parent_id is None]

    def children(self, unit_id: str) -> list[str]:
        return [u.unit_id for u in self.units.values() if u.parent_id == unit_id]

    def category(self, unit_id: str) -> str:
        return self.units[unit_id].category


def _read_csv_rows(source) -> tuple[list[dict[str, str]], tuple[str, ...]]:
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
    reader = csv.DictReader(io.StringIO(text))
    rows = [{k.strip(): (v or "").strip() for k, v in row.items() if k is not None} for row in reader]
    return rows, tuple(f.strip() for f in reader.fieldnames or ())


def load_org_chart(source, extra_categories: Iterable[str] = ()) -> OrgChart:
    """Load and validate an org chart CSV (``unit_id,name,parent_id,category``).

    Categories outside the fixed seven are rejected unless listed in
    ``extra_categories``; those units get category ``"other"``.
    """
    rows, header = _read_csv_rows(source)
    if header[: len(CHART_HEADER)] != CHART_HEADER:
        raise DataError(f"org chart header must be {','.join(CHART_HEADER)}, got {','.join(header)}")
    extras = {c.strip().lower() for c in extra_categories}
    raw: dict[str, tuple[str, str | None, str, str]] = {}
    for i, row in enumerate(rows, start=2):
        uid = row["unit_id"]
        if not uid:
            raise OrgChartError(f"line {i}: empty unit_id")
        if uid in raw:
            raise OrgChartError(f"line {i}: duplicate unit_id {uid!r}")
        label = row["category"].lower()
        if label in CATEGORY_ORDER:
            cat = label
        elif label in extras:
            cat = OTHER
        else:
            raise CategoryError(f"line {i}: unknown category {row['category']!r} for unit {uid!r}")
        raw[uid] = (row["name"], row["parent_id"] or None, cat, label)

    for uid, (_, parent, _, _) in raw.items():
        if parent is not None and parent not in raw:
            raise OrgChartError(f"unit {uid!r} references unknown parent {parent!r}")

    levels: dict[str, int] = {}
    for uid in raw:
        chain = []
        cur: str | None = uid
        while cur is not None and cur not in levels:
            if cur in chain:
                cycle = chain[chain.index(cur):] + [cur]
                raise OrgChartError("cycle in org chart: " + " -> ".join(cycle))
            chain.append(cur)
            cur = raw[cur][1]
        base = -1 if cur is None else levels[cur]
        for depth, node in enumerate(reversed(chain), start=1):
            levels[node] = base + depth

    units = {
        uid: OrgUnit(uid, name, parent, levels[uid], cat, label)
        for uid, (name, parent, cat, label) in raw.items()
    }
    return OrgChart(units)


def write_org_chart(chart: OrgChart, stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CHART_HEADER)
    for u in chart.units.values():
        w.writerow([u.unit_id, u.name, u.parent_id or "", u.category_label or u.category])


@dataclass
class AddressDirectory:
    mapping: dict[Address, str]
    internal_suffix: str
    unresolved: list[tuple[str, str]] = field(default_factory=list)
    duplicates: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.mapping)

    def is_internal(self, address: Address) -> bool:
        return address.in_domain(self.internal_suffix)


def load_directory(source, chart: OrgChart, internal_suffix: str = "lab.gov") -> AddressDirectory:
    """Load an ``address,unit_id`` CSV against ``chart``.

    Rows naming units absent from the chart land in ``unresolved``. For an
    address listed more than once the first row wins and a warning is logged.
    """
    rows, header = _read_csv_rows(source)
    if rows and header[:2] != DIRECTORY_HEADER:
        raise DataError(f"directory header must be address,unit_id, got {','.join(header)}")
    directory = AddressDirectory({}, internal_suffix.lower().lstrip("."))
    for row in rows:
        raw_addr, uid = row.get("address", ""), row.get("unit_id", "")
        addr = normalize_address(raw_addr)
        if uid not in chart:
            directory.unresolved.append((str(addr), uid))
            continue
        if addr in directory.mapping:
            directory.duplicates.append((str(addr), uid))
            logger.warning("%s listed again (unit %s); keeping %s", addr, uid, directory.mapping[addr])
            continue
        directory.mapping[addr] = uid
    return directory


def resolve_unit(address: Address, directory: AddressDirectory) -> str:
    """Unit id for ``address``, else :data:`EXTERNAL` or :data:`UNKNOWN_INTERNAL`."""
    uid = directory.mapping.get(address)
    if uid is not None:
        return uid
    return UNKNOWN_INTERNAL if directory.is_internal(address) else EXTERNAL


def lift_to_level(unit_id: str, target_level: int, chart: OrgChart) -> str:
    unit = chart[unit_id]
    if target_level > unit.level or target_level < 0:
        raise LevelError(
            f"cannot lift {unit_id!r} (level {unit.level}) to level {target_level}"
        )
    while unit.level > target_level:
        unit = chart[unit.parent_id]
    return unit.unit_id


def unknown_internal_group(address: Address) -> str:
    """Pseudo-unit for internal addresses missing from the directory, one per domain."""
    return f"{UNKNOWN_INTERNAL}:{address.domain}"


def address_group(
    address: Address,
    directory: AddressDirectory,
    chart: OrgChart,
    *,
    level: int | None = None,
    by: str = "unit",
) -> str:
    """Aggregation key for one address.

    ``by="unit"`` gives the owning unit, lifted to ``level`` when the unit
    sits deeper than that. ``by="category"`` gives the unit's category.
    Internal addresses unknown to the directory map to a per-domain pseudo
    unit; everything else maps to ``"external"``.
    """
    uid = resolve_unit(address, directory)
    if uid == EXTERNAL:
        return EXTERNAL
    if uid == UNKNOWN_INTERNAL:
        return unknown_internal_group(address)
    if by == "category":
        return chart.category(uid)
    if by != "unit":
        raise ValueError(f"unknown grouping {by!r}")
    if level is not None and chart[uid].level > level:
        uid = lift_to_level(uid, level, chart)
    return uid
