"""Regret CSV schema: fixed header, 12 significant digits, exact round trip."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

HEADER = ("algorithm", "seed", "t", "cum_expected_regret", "cum_realized_regret", "wall_time_ms")
SUMMARY_HEADER = (
    "algorithm", "t", "n_seeds",
    "mean_cum_expected_regret", "stderr_cum_expected_regret",
    "mean_cum_realized_regret", "stderr_cum_realized_regret",
)


class SchemaError(ValueError):
    """A CSV does not carry the expected header."""


def fmt(x: float) -> str:
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def quantize(x: float) -> float:
    """The float that survives a write/read cycle unchanged."""
    return float(fmt(x))


@dataclass(frozen=True)
class RegretCsvRow:
    algorithm: str
    seed: int
    t: int
    cum_expected_regret: float
    cum_realized_regret: float
    wall_time_ms: float = 0.0

    def __post_init__(self):
        for name in ("cum_expected_regret", "cum_realized_regret", "wall_time_ms"):
            object.__setattr__(self, name, quantize(getattr(self, name)))

    def cells(self) -> list[str]:
        return [self.algorithm, str(self.seed), str(self.t),
                fmt(self.cum_expected_regret), fmt(self.cum_realized_regret), fmt(self.wall_time_ms)]


def sort_rows(rows: Iterable[RegretCsvRow]) -> list[RegretCsvRow]:
    return sorted(rows, key=lambda r: (r.algorithm, r.seed, r.t))


def serialize(rows: Sequence[RegretCsvRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def parse(text: str) -> list[RegretCsvRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != HEADER:
        raise SchemaError(f"expected header {','.join(HEADER)}, got {header!r}")
    rows = []
    for line, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(HEADER):
            raise SchemaError(f"line {line}: expected {len(HEADER)} fields, got {len(cells)}")
        rows.append(RegretCsvRow(cells[0], int(cells[1]), int(cells[2]),
                                 float(cells[3]), float(cells[4]), float(cells[5])))
    return rows


def write_rows(path: Path, rows: Sequence[RegretCsvRow]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize(rows))


def read_rows(path: Path) -> list[RegretCsvRow]:
    return parse(Path(path).read_text())


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in r])
    path.write_text(buf.getvalue())
