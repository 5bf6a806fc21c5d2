"""
Reports produced by the commands and their two renderings.

The structured rendering is JSON with ``schema: v1``; :py:func:`load_report`
reads it back into an equal :py:class:`Report`. The text rendering prints
each grid with the degrees as its bottom row.
"""

import dataclasses
import logging
from fractions import Fraction
from typing import List
from typing import Optional

import salt.utils.json

from saltext.liemodels.utils.exceptions import InputError
from saltext.liemodels.utils.lie_core import LieElement
from saltext.liemodels.utils.lie_core import basis_at
from saltext.liemodels.utils.lie_core import format_scalar

log = logging.getLogger(__name__)

SCHEMA = "v1"
FORMATS = ("text", "structured")


def plain(value):
    """
    Reduce ``value`` to JSON-native types with string keys.
    """
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, (set, frozenset)):
        return sorted(plain(item) for item in value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, LieElement):
        return str(value)
    if hasattr(value, "to_dict"):
        return plain(value.to_dict())
    return str(value)


@dataclasses.dataclass
class Row:
    label: str
    cells: List[str]


@dataclasses.dataclass
class Table:
    """
    A grid with one column per topological degree.
    """

    title: str
    degrees: List[int]
    rows: List[Row] = dataclasses.field(default_factory=list)

    def to_dict(self):
        return {
            "title": self.title,
            "degrees": list(self.degrees),
            "rows": [{"label": row.label, "cells": list(row.cells)} for row in self.rows],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["title"],
            list(data["degrees"]),
            [Row(row["label"], list(row["cells"])) for row in data["rows"]],
        )

    def render(self):
        labels = [row.label for row in self.rows] + [""]
        label_width = max(len(label) for label in labels)
        widths = []
        for k, degree in enumerate(self.degrees):
            widths.append(max([len(str(degree))] + [len(row.cells[k]) for row in self.rows]))
        lines = [self.title]
        for row in self.rows:
            cells = " | ".join(cell.ljust(w) for cell, w in zip(row.cells, widths))
            lines.append(f"{row.label.ljust(label_width)} | {cells}".rstrip())
        lines.append("=" * label_width + "=+=" + "=+=".join("=" * w for w in widths))
        degrees = " | ".join(str(d).ljust(w) for d, w in zip(self.degrees, widths))
        lines.append(f"{''.ljust(label_width)} | {degrees}".rstrip())
        return "\n".join(lines)


@dataclasses.dataclass
class Report:
    """
    Result of one command.

    verdict
        ``True``/``False`` for commands that decide something, ``None``
        otherwise.

    data
        JSON-native payload specific to the command.

    lines
        Human-readable summary printed by the text rendering.
    """

    command: str
    verdict: Optional[bool] = None
    tables: List[Table] = dataclasses.field(default_factory=list)
    data: dict = dataclasses.field(default_factory=dict)
    lines: List[str] = dataclasses.field(default_factory=list)
    schema: str = SCHEMA

    def __post_init__(self):
        self.data = plain(self.data)
        self.lines = [str(line) for line in self.lines]

    def to_dict(self):
        return {
            "schema": self.schema,
            "command": self.command,
            "verdict": self.verdict,
            "tables": [table.to_dict() for table in self.tables],
            "data": self.data,
            "lines": list(self.lines),
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("schema") != SCHEMA:
            raise InputError(
                f"unsupported report schema {data.get('schema')!r}", kind="syntax-error"
            )
        return cls(
            data["command"],
            data.get("verdict"),
            [Table.from_dict(table) for table in data.get("tables", [])],
            data.get("data", {}),
            data.get("lines", []),
        )


def emit(report, fmt="text"):
    """
    Render ``report`` as ``text`` or ``structured`` output.
    """
    if fmt == "structured":
        return salt.utils.json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise InputError(f"unknown output format {fmt}", kind="syntax-error")
    chunks = [table.render() for table in report.tables]
    if report.lines:
        chunks.append("\n".join(report.lines))
    if report.verdict is not None:
        chunks.append(f"verdict: {'pass' if report.verdict else 'fail'}")
    return "\n\n".join(chunks) + "\n"


def load_report(text):
    try:
        data = salt.utils.json.loads(text)
    except ValueError as exc:
        raise InputError(f"not a structured report: {exc}", kind="syntax-error") from exc
    return Report.from_dict(data)


def generator_grid(model, title="generators"):
    """
    Basis elements of the model by bidegree, highest resolution degree on
    top. Columns run through the generators and every certified degree.
    """
    generators = model.generators
    top = max([g.top_deg for g in generators] + [model.cutoff - 1, 0])
    degrees = list(range(1, top + 1))
    rows = []
    for res in range(max((g.res_deg for g in generators), default=0), -1, -1):
        cells = [
            "; ".join(
                str(monomial)
                for monomial in basis_at(generators, (degree, res), model.bound).monomials
            )
            for degree in degrees
        ]
        rows.append(Row(f"res {res}", cells))
    return Table(title, degrees, rows)


def homology_grid(table, title="homology"):
    """
    Representatives and dimensions of a homology table.
    """
    degrees = sorted(table.degrees)
    classes = Row("classes", ["; ".join(str(r) for r in table.representatives(d)) for d in degrees])
    dims = Row("dim", [str(table.degrees[d].dim) for d in degrees])
    return Table(title, degrees, [classes, dims])
