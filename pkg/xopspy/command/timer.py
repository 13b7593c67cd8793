# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Utility class to time the stages of a CLI command."""

import time
from contextlib import contextmanager

from rich.align import Align
from rich.table import Table


class Timer:
    """Wall clock timings of named stages, optionally per item.

    Usage:

    .. code-block:: python

        timer = Timer("Suite", "Check")

        with timer("structure", "eigenpolys"):
            ...  # Code to be timed

        rich.print(timer.get_table())
    """

    def __init__(self, *axes):
        if not 1 <= len(axes) <= 2:
            raise ValueError("Timer supports one or two axes")
        self.axes = axes
        self.axes_values = tuple({} for _ in axes)
        self.data = {}

    @contextmanager
    def __call__(self, *items):
        if len(items) != len(self.axes):
            raise ValueError(f"Expected {len(self.axes)} labels, got {len(items)}")
        tic = time.perf_counter()
        try:
            yield
        finally:
            self.data[items] = self.data.get(items, 0.0) + time.perf_counter() - tic
            for i, item in enumerate(items):
                # dict keeps insertion order
                self.axes_values[i][item] = None

    @property
    def total(self) -> float:
        return sum(self.data.values())

    def get_table(self, title="Timings") -> Table:
        """Table with one row per stage (and one column per item for two axes)."""
        table = Table(title=title, show_footer=True)
        if len(self.axes) == 1:
            table.add_column(self.axes[0], footer="TOTAL:", justify="right")
            table.add_column("time", footer=f"{self.total:.3f} s", justify="right")
            for (stage,), value in self.data.items():
                table.add_row(stage, f"{value:.3f} s")
            return table

        totals = {value: 0.0 for value in self.axes_values[0]}
        for (col, _), value in self.data.items():
            totals[col] += value
        table.add_column(footer="TOTAL:", justify="right")
        for value in self.axes_values[0]:
            table.add_column(
                header=Align(value, "center"),
                footer=f"{totals[value]:.3f} s",
                justify="right",
            )
        for row in self.axes_values[1]:
            cells = (
                f"{self.data[col, row]:.3f} s" if (col, row) in self.data else "-"
                for col in self.axes_values[0]
            )
            table.add_row(row, *cells)
        return table
