# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Collection of useful helper methods when working with xopspy.
"""

import json
import logging
from typing import Optional, Union

import rich
from rich.table import Table
from rich.tree import Tree
from xxhash import xxh3_64

from xopspy.serialize import decimal
from xopspy.spectral import ExceptionalSystem, MonodromyReport

logger = logging.getLogger(__name__)


def fingerprint(data: Union[str, bytes, dict, list]) -> str:
    """Content fingerprint of a document.

    Objects are hashed in their canonical JSON form (sorted keys, no whitespace), so
    the fingerprint does not depend on formatting. The hash function used is
    ``xxhash.xxh3_64`` from the ``xxhash`` package.

    Example:
        .. code-block:: python

            xopspy.util.fingerprint({"base": {"family": "hermite"}, "steps": []})
    """
    if isinstance(data, (dict, list)):
        data = json.dumps(data, sort_keys=True, separators=(",", ":"))
    if isinstance(data, str):
        data = data.encode("utf-8")
    return xxh3_64(data).hexdigest()


def system_tree(system: ExceptionalSystem, title: Optional[str] = None) -> Tree:
    """Build a ``rich.tree.Tree`` describing an exceptional system."""
    tree = Tree(f"[magenta]{title or 'Exceptional system'}")
    operator = tree.add("[bold]operator")
    for name in ("p", "q", "r"):
        operator.add(f"{name} = {getattr(system.T, name)}")
    if system.nf is not None:
        tree.add(f"[bold]eta[/] = {system.nf.eta.as_expr()}")
        tree.add(f"[bold]s[/] = {system.nf.s.as_expr()}")
    tree.add(f"[bold]symbol[/] sigma(n) = {system.symbol.as_expr()}")
    degrees = ", ".join(map(str, system.exceptional_degrees)) or "none"
    tree.add(f"[bold]exceptional degrees[/] {degrees}")
    table = Table("k", "eigenvalue", "eigenpolynomial", title=f"Degrees <= {system.N}")
    for k, pair in sorted(system.eigenpairs.items()):
        table.add_row(str(k), str(pair.eigenvalue), str(pair.y.as_expr()))
    tree.add(table)
    return tree


def print_system(system: ExceptionalSystem, title: Optional[str] = None) -> None:
    """Pretty print an exceptional system."""
    rich.print(system_tree(system, title))


def monodromy_table(report: MonodromyReport) -> Table:
    table = Table(
        "pole", "method", "lambda", "verdict", "obstruction", title="Monodromy"
    )
    styles = {"pass": "green", "fail": "red", "inconclusive": "yellow"}
    for entry in report.entries:
        style = styles.get(entry.verdict, "white")
        table.add_row(
            decimal(entry.zeta, 8) or str(entry.factor.as_expr()),
            entry.method,
            str(entry.eigenvalue),
            f"[{style}]{entry.verdict}",
            decimal(entry.obstruction, 5) or "-",
        )
    return table
