"""Strict tabular access to result CSVs."""
from __future__ import annotations

import csv
from pathlib import Path


class ResultFrame:
    """Column-oriented view of a CSV with strict numeric parsing."""

    def __init__(self, columns: dict):
        if not columns:
            raise ValueError("no columns")
        lengths = {len(v) for v in columns.values()}
        if len(lengths) != 1:
            raise ValueError("ragged columns")
        self.columns = columns
        self.length = lengths.pop()
        if self.length == 0:
            raise ValueError("CSV contains a header but no rows")

    @classmethod
    def load(cls, path, required: tuple = ()) -> "ResultFrame":
        with open(Path(path), newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty file") from None
            missing = [c for c in required if c not in header]
            if missing:
                raise ValueError(f"{path}: missing columns {missing}")
            columns = {name: [] for name in header}
            for row in reader:
                if len(row) != len(header):
                    raise ValueError(f"{path}: ragged row {row!r}")
                for name, cell in zip(header, row):
                    columns[name].append(cell)
        return cls(columns)

    def floats(self, name: str) -> list:
        try:
            return [float(v) for v in self.columns[name]]
        except ValueError as exc:
            raise ValueError(f"column {name!r} is not numeric: {exc}") from None

    def strings(self, name: str) -> list:
        return list(self.columns[name])

    def __len__(self) -> int:
        return self.length
