"""Reader and canonical writer for the FOON text formats.

Subgraph files are TAB-separated records::

    # comment
    O   object-name
    S   state-label                 adds a state to the current object
    S   state-label {i1,i2}         ... plus ingredients
    S   {i1,i2}                     ingredients only
    M   motion-name                 objects before it are inputs, after outputs
    //                              ends a functional unit

Kitchen files use O/S lines with optional ``//`` separators.  Motion rate
files hold ``motion<TAB>rate`` lines.
"""
from __future__ import annotations

import math
import re
import warnings
from typing import Optional

from .core import FunctionalUnit, Kitchen, MotionNode, MotionRateTable, ObjectNode

ERROR_KINDS = (
    "bad_record_tag",
    "object_before_motion_missing",
    "motion_missing",
    "multiple_motions",
    "state_without_object",
    "empty_unit_side",
    "bad_rate",
    "bad_ingredient_list",
    "stray_text",
)

_INGREDIENTS = re.compile(r"^\{(.*)\}$")


class ParseError(ValueError):
    def __init__(self, kind: str, line: int, message: str, file: str = "<string>"):
        assert kind in ERROR_KINDS, kind
        self.kind = kind
        self.line = line
        self.message = message
        self.file = file
        super().__init__(str(self))

    def __str__(self):
        return f"{self.file}:{self.line}: {self.kind}: {self.message}"

    def with_file(self, file) -> "ParseError":
        return ParseError(self.kind, self.line, self.message, str(file))


class DuplicateMotionWarning(UserWarning):
    pass


def _lines(text: str):
    """Yield ``(lineno, fields)`` for every non-blank, non-comment line."""
    if text.startswith("\ufeff"):
        text = text[1:]
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, [f.strip() for f in line.split("\t")]


def _parse_ingredients(field: str, lineno: int) -> list:
    m = _INGREDIENTS.match(field)
    if not m or "{" in m.group(1) or "}" in m.group(1):
        raise ParseError("bad_ingredient_list", lineno, f"malformed ingredient list {field!r}")
    body = m.group(1).strip()
    if not body:
        return []
    items = [p.strip() for p in body.split(",")]
    if any(not p for p in items):
        raise ParseError("bad_ingredient_list", lineno, f"empty entry in {field!r}")
    return items


class _Block:
    __slots__ = ("name", "states", "ingredients", "line")

    def __init__(self, name, line):
        self.name = name
        self.states = set()
        self.ingredients = set()
        self.line = line

    def build(self) -> ObjectNode:
        return ObjectNode(self.name, frozenset(self.states), frozenset(self.ingredients))


def _object_record(tag, fields, lineno, current):
    """Handle an O or S record; returns the new current block (or None for S)."""
    if tag == "O":
        if len(fields) != 2 or not fields[1]:
            raise ParseError("stray_text", lineno, "O record takes exactly one object name")
        return _Block(fields[1], lineno)
    # S record
    if current is None:
        raise ParseError("state_without_object", lineno, "S line with no preceding O line")
    rest = fields[1:]
    if not rest or len(rest) > 2 or not rest[0]:
        raise ParseError("stray_text", lineno, "S record takes a state label and optional ingredients")
    if len(rest) == 1 and rest[0].startswith("{"):
        current.ingredients.update(_parse_ingredients(rest[0], lineno))
        return None
    if "{" in rest[0] or "}" in rest[0]:
        raise ParseError("bad_ingredient_list", lineno, "ingredients must be a separate field")
    current.states.add(rest[0])
    if len(rest) == 2:
        current.ingredients.update(_parse_ingredients(rest[1], lineno))
    return None


def _build_side(blocks, side):
    nodes, seen = [], set()
    for block in blocks:
        node = block.build()
        if node in seen:
            raise ParseError("stray_text", block.line, f"object {node.label()!r} repeated among {side}")
        seen.add(node)
        nodes.append(node)
    return nodes


def parse_subgraph(text: str, file: str = "<string>") -> list:
    """Parse subgraph text into functional units, in file order."""
    try:
        return _parse_subgraph(text)
    except ParseError as err:
        raise err.with_file(file) from None


def _parse_subgraph(text):
    units = []
    inputs, outputs = [], []
    motion: Optional[str] = None
    motion_line = 0
    current = None
    last_line = 0

    def close(lineno):
        nonlocal inputs, outputs, motion, current
        if motion is None:
            if inputs:
                raise ParseError("motion_missing", lineno, "functional unit has no M line")
            return
        if not outputs:
            raise ParseError("empty_unit_side", lineno, "functional unit has no output objects")
        units.append(FunctionalUnit(tuple(_build_side(inputs, "inputs")), MotionNode(motion),
                                    tuple(_build_side(outputs, "outputs"))))
        inputs, outputs, motion, current = [], [], None, None

    for lineno, fields in _lines(text):
        last_line = lineno
        tag = fields[0].upper()
        if tag == "//":
            if len(fields) != 1:
                raise ParseError("stray_text", lineno, "text after unit delimiter")
            close(lineno)
            current = None
        elif tag == "O":
            current = _object_record(tag, fields, lineno, current)
            (outputs if motion is not None else inputs).append(current)
        elif tag == "S":
            _object_record(tag, fields, lineno, current)
        elif tag == "M":
            if len(fields) != 2 or not fields[1]:
                raise ParseError("stray_text", lineno, "M record takes exactly one motion name")
            if motion is not None:
                raise ParseError("multiple_motions", lineno,
                                 f"second M line in one unit (first on line {motion_line})")
            if not inputs:
                raise ParseError("object_before_motion_missing", lineno, "M line with no input objects")
            motion, motion_line = fields[1], lineno
            current = None
        else:
            raise ParseError("bad_record_tag", lineno, f"unknown record tag {fields[0]!r}")
    close(last_line)
    return units


def parse_kitchen(text: str, file: str = "<string>") -> Kitchen:
    items = set()
    current = None
    try:
        for lineno, fields in _lines(text):
            tag = fields[0].upper()
            if tag == "//":
                if len(fields) != 1:
                    raise ParseError("stray_text", lineno, "text after delimiter")
                if current is not None:
                    items.add(current.build())
                current = None
            elif tag in ("O", "S"):
                block = _object_record(tag, fields, lineno, current)
                if block is not None:
                    if current is not None:
                        items.add(current.build())
                    current = block
            elif tag == "M":
                raise ParseError("stray_text", lineno, "motion lines are not allowed in kitchen files")
            else:
                raise ParseError("bad_record_tag", lineno, f"unknown record tag {fields[0]!r}")
        if current is not None:
            items.add(current.build())
    except ParseError as err:
        raise err.with_file(file) from None
    return Kitchen(frozenset(items))


def parse_motion_rates(text: str, file: str = "<string>", *, default_rate=None,
                       strict=False) -> MotionRateTable:
    entries: dict = {}
    for lineno, fields in _lines(text):
        if len(fields) != 2 or not fields[0]:
            raise ParseError("stray_text", lineno, "expected motion<TAB>rate", file)
        motion, raw = MotionNode(fields[0]).name, fields[1]
        try:
            rate = float(raw)
        except ValueError:
            raise ParseError("bad_rate", lineno, f"rate {raw!r} is not a number", file) from None
        if not math.isfinite(rate) or not 0.0 <= rate <= 1.0:
            raise ParseError("bad_rate", lineno, f"rate {raw!r} outside [0, 1]", file)
        if motion in entries:
            warnings.warn(f"{file}:{lineno}: motion {motion!r} redefined", DuplicateMotionWarning,
                          stacklevel=2)
        entries[motion] = rate
    return MotionRateTable(entries, default_rate=default_rate, strict=strict)


def _object_lines(node: ObjectNode) -> list:
    lines = [f"O\t{node.name}"]
    ingredients = ""
    if node.ingredients:
        ingredients = "{" + ",".join(sorted(node.ingredients)) + "}"
    states = sorted(node.states)
    if not states and ingredients:
        lines.append(f"S\t{ingredients}")
    for i, state in enumerate(states):
        if i == 0 and ingredients:
            lines.append(f"S\t{state}\t{ingredients}")
        else:
            lines.append(f"S\t{state}")
    return lines


def serialize_subgraph(units) -> str:
    out = []
    for unit in units:
        for node in unit.inputs:
            out.extend(_object_lines(node))
        out.append(f"M\t{unit.motion.name}")
        for node in unit.outputs:
            out.extend(_object_lines(node))
        out.append("//")
    return "".join(line + "\n" for line in out)


def serialize_kitchen(kitchen: Kitchen) -> str:
    out = []
    for node in kitchen:
        out.extend(_object_lines(node))
        out.append("//")
    return "".join(line + "\n" for line in out)


def serialize_motion_rates(table: MotionRateTable) -> str:
    return "".join(f"{m}\t{r!r}\n" for m, r in sorted(table.entries.items()))


def read_text(path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def load_subgraph(path) -> list:
    return parse_subgraph(read_text(path), str(path))


def load_kitchen(path) -> Kitchen:
    return parse_kitchen(read_text(path), str(path))


def load_motion_rates(path, **options) -> MotionRateTable:
    return parse_motion_rates(read_text(path), str(path), **options)
