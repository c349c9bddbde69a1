"""Reader and writer for oriented-matroid catalogue files with vertical column headers.

A file starts with ``r`` header lines whose digit columns spell the r-subset
each sign belongs to, followed by one record per line::

                112123
                233444
    IC(4,2,1) = ++++++

The header columns are authoritative for the tuple order; signs are mapped onto
colex order when a record is turned into a :class:`Chirotope`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Iterator

from .chirotope import Chirotope, reorient
from .errors import ParseError
from .signs import colex_index, colex_subsets, format_signs

_RECORD = re.compile(r"^(?P<label>\S+)\s*=\s*(?P<signs>\S*)\s*$")
_LABEL = re.compile(r"^[A-Za-z]+\((?P<size>\d+),(?P<rank>\d+),(?P<index>\d+)\)$")


@dataclass(frozen=True)
class DatabaseRecord:
    rank: int
    size: int
    label: str
    signs: str  # in header column order
    columns: tuple[tuple[int, ...], ...]  # 1-based sorted subsets

    def __post_init__(self):
        if len(self.signs) != comb(self.size, self.rank):
            raise ParseError(f"{self.label}: {len(self.signs)} signs for C({self.size},{self.rank}) bases")
        if sorted(self.columns) != sorted(combinations(range(1, self.size + 1), self.rank)):
            raise ParseError(f"{self.label}: header columns are not all {self.rank}-subsets of [{self.size}]")

    def chirotope(self) -> Chirotope:
        index = colex_index(self.size, self.rank)
        vals = [0] * len(self.signs)
        lookup = {"+": 1, "-": -1, "0": 0}
        for col, ch in zip(self.columns, self.signs):
            vals[index[tuple(e - 1 for e in col)]] = lookup[ch]
        return Chirotope(self.rank, self.size, tuple(vals))

    @classmethod
    def from_chirotope(cls, chi: Chirotope, label: str) -> DatabaseRecord:
        cols = tuple(tuple(e + 1 for e in s) for s in colex_subsets(chi.n, chi.r))
        return cls(chi.r, chi.n, label, chi.sign_string, cols)


def _read(source) -> str:
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        return Path(source).read_text()
    return str(source)


def parse_database(source) -> list[DatabaseRecord]:
    """Parse a catalogue file (path or text)."""
    lines = _read(source).splitlines()
    header: list[tuple[int, str]] = []
    records: list[DatabaseRecord] = []
    columns = None
    start = width = None
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        m = _RECORD.match(line)
        if m is None:
            if records:
                raise ParseError("header line after the first record", line=lineno)
            if not re.fullmatch(r"\s*\d+\s*", line):
                raise ParseError("expected a header line of digits", line=lineno)
            header.append((lineno, line))
            continue
        if columns is None:
            if not header:
                raise ParseError("record before any header line", line=lineno)
            start = m.start("signs")
            width = max(len(h.rstrip()) for _, h in header) - start
            cols = []
            for k in range(width):
                digits = []
                for hl, h in header:
                    ch = h[start + k] if start + k < len(h) else " "
                    if not ch.isdigit():
                        raise ParseError("header column is not a digit", line=hl, offset=start + k)
                    digits.append(int(ch))
                cols.append(tuple(digits))
            columns = tuple(cols)
        signs = m.group("signs")
        for k, ch in enumerate(signs):
            if ch not in "+-0":
                raise ParseError(f"invalid sign character {ch!r}", line=lineno, offset=m.start("signs") + k)
        if m.start("signs") != start:
            raise ParseError("sign row is not aligned with the header columns", line=lineno, offset=m.start("signs"))
        if len(signs) != width:
            raise ParseError(
                f"sign row has {len(signs)} entries, header has {width} columns",
                line=lineno,
                offset=m.start("signs") + min(len(signs), width),
            )
        rank = len(header)
        size = max(max(c) for c in columns)
        label = m.group("label")
        lm = _LABEL.match(label)
        if lm and (int(lm.group("size")), int(lm.group("rank"))) != (size, rank):
            raise ParseError(f"label {label} disagrees with header shape ({size},{rank})", line=lineno)
        try:
            records.append(DatabaseRecord(rank, size, label, signs, columns))
        except ParseError as exc:
            raise ParseError(str(exc), line=lineno) from None
    return records


def format_database(records: Iterable[DatabaseRecord]) -> str:
    records = list(records)
    if not records:
        return ""
    columns = records[0].columns
    pad = max(len(r.label) for r in records) + 3
    out = [" " * pad + "".join(str(c[k]) for c in columns) for k in range(records[0].rank)]
    for r in records:
        if r.columns != columns:
            raise ValueError("records with different column orders cannot share a header")
        out.append(f"{r.label.ljust(pad - 3)} = {r.signs}")
    return "\n".join(out) + "\n"


def expand_reorientation_class(rep: DatabaseRecord) -> Iterator[Chirotope]:
    """The ``2^size`` reorientations of the representative (relabelings are not expanded)."""
    chi = rep.chirotope()
    for mask in range(2**rep.size):
        yield reorient(chi, [e + 1 for e in range(rep.size) if mask >> e & 1])


def records_from_chirotopes(chis: Iterable[Chirotope], prefix: str = "IC") -> list[DatabaseRecord]:
    return [
        DatabaseRecord.from_chirotope(chi, f"{prefix}({chi.n},{chi.r},{k})") for k, chi in enumerate(chis, 1)
    ]


def signs_in_colex(rec: DatabaseRecord) -> str:
    return format_signs(rec.chirotope().values)
