import io
import json

from rich.console import Console
from rich.table import Table
from rich.tree import Tree

from xopspy.exact import poly
from xopspy.spectral import eigenpolys, trivial_monodromy_certificate
from xopspy.util import fingerprint, monodromy_table, print_system, system_tree


def _render(renderable) -> str:
    console = Console(width=120, record=True, file=io.StringIO())
    console.print(renderable)
    return console.export_text()


def test_fingerprint_ignores_formatting():
    document = {"base": {"family": "hermite"}, "steps": []}
    compact = fingerprint(document)
    assert len(compact) == 16
    assert fingerprint(json.loads(json.dumps(document, indent=4))) == compact
    assert fingerprint({"steps": [], "base": {"family": "hermite"}}) == compact
    assert fingerprint({"base": {"family": "laguerre"}, "steps": []}) != compact


def test_fingerprint_of_text():
    assert fingerprint("xopspy") == fingerprint(b"xopspy")
    assert fingerprint([1, 2]) == fingerprint("[1,2]")


def test_system_tree(x1_laguerre):
    nf = x1_laguerre(2)
    system = eigenpolys(nf.operator(), nf.eta, 3)
    tree = system_tree(system, "X1 Laguerre")
    assert isinstance(tree, Tree)
    text = _render(tree)
    assert "X1 Laguerre" in text
    assert "eta = z + 2" in text
    assert "exceptional degrees 0" in text
    assert "Degrees <= 3" in text


def test_system_tree_without_eta(hermite_operator, capsys):
    system = eigenpolys(hermite_operator, N=2)
    text = _render(system_tree(system))
    assert "Exceptional system" in text
    assert "exceptional degrees none" in text
    assert "eta =" not in text
    print_system(system)
    assert "sigma(n)" in capsys.readouterr().out


def test_monodromy_table(log_control):
    report = trivial_monodromy_certificate(log_control, poly([0, 1]), depth=6)
    table = monodromy_table(report)
    assert isinstance(table, Table)
    assert table.row_count == len(report.entries)
    assert "fail" in _render(table)
