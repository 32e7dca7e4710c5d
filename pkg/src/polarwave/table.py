"""Rectangular sweep tables and their byte-stable CSV encoding."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class SweepTable:
    header: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self) -> None:
        header = tuple(self.header)
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, len(header))
        if rows.ndim != 2 or rows.shape[1] != len(header):
            raise ValueError(f"rows must have shape (n, {len(header)}), got {rows.shape}")
        x = rows[:, 0]
        if np.any(~np.isfinite(x)) or np.any(np.diff(x) <= 0):
            raise ValueError("abscissa must be finite and strictly increasing")
        object.__setattr__(self, "header", header)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_columns(cls, columns: dict[str, Sequence[float]]) -> "SweepTable":
        names = tuple(columns)
        data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
        return cls(names, data)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.header.index(name)]

    def __len__(self) -> int:
        return self.rows.shape[0]


def format_value(value: float) -> str:
    """Nine significant digits, exponent without sign padding: ``0.19215 -> 1.92150000e-1``."""
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0.0:
        v = 0.0  # drop the sign of negative zero
    mantissa, exponent = f"{v:.8e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def encode_csv(table: SweepTable) -> str:
    lines = [",".join(table.header)]
    lines += [",".join(format_value(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def write_csv(table: SweepTable, path: str | os.PathLike[str]) -> None:
    """UTF-8, LF line endings, header first."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(encode_csv(table))
