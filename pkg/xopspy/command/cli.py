# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
""" Main CLI entry point """

import csv
import io
import logging
import sys
from contextlib import ExitStack
from typing import List, Optional

import click
import mpmath
import numpy
import sympy
from rich import box, console, traceback
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table

import xopspy
from xopspy.command.helpers import (
    EXIT_CHECK_FAILED,
    exit_code_contract,
    read_document,
    setup_rich_log_handler,
    write_output,
)
from xopspy.command.timer import Timer
from xopspy.darboux import corpus_chains, run_chain
from xopspy.defaults import DEFAULT_MAX_DEGREE, GRAM_TOLERANCE, PRECISION_BITS
from xopspy.exact import rat
from xopspy.exception import (
    IdentityViolation,
    NoWeightError,
    NotNaturalError,
    PreconditionError,
    QuadratureError,
    SubspaceError,
    UnknownFamilyError,
)
from xopspy.quadform import (
    QuadConfig,
    gram_matrix,
    regularity_check,
    weight_curve,
    weight_of,
    write_weight_curve,
)
from xopspy.serialize import (
    FORMAT_VERSION,
    chain_from_json,
    chain_to_json,
    dumps,
    gap_data_to_json,
    gram_report_to_json,
    monodromy_report_to_json,
    poly_to_json,
    rat_to_json,
    system_from_json,
    system_to_json,
)
from xopspy.spectral import (
    eigenpolys,
    naturalize,
    semisimplicity_check,
    trivial_monodromy_certificate,
)
from xopspy.structure import (
    codimension_report,
    infer_eta,
    subspace_basis,
    verify_natural,
)
from xopspy.util import fingerprint, monodromy_table, print_system

logger = logging.getLogger(__name__)

SUITES = ("structure", "monodromy", "orthogonality")


def _excepthook(type_, value, tb):
    logger.debug("Suppressed traceback:", exc_info=(type_, value, tb))
    # Only display the last traceback frame:
    if tb is not None:
        while tb.tb_next:
            tb = tb.tb_next
    rich_tb = traceback.Traceback.from_exception(type_, value, tb, extra_lines=0)
    console.Console(stderr=True).print(rich_tb)


@click.group("xopspy", invoke_without_command=True, no_args_is_help=True)
def cli():
    """xopspy command line interface.

    Construct exceptional operators with Darboux chains and verify their structure.
    You can get help for each command by executing:

        xopspy <command> --help
    """
    # Limit the traceback to 1 item: avoid scaring CLI users with long traceback prints
    # and let them focus on the actual error message
    sys.excepthook = _excepthook


def _common_options(func):
    """Options shared by all commands that write a document."""
    decorators = (
        click.option(
            "--metadata",
            is_flag=True,
            help="Add the xopspy version and an input fingerprint to the output.",
        ),
        click.option(
            "--out",
            "-o",
            type=click.Path(dir_okay=False, writable=True),
            help="Write the output to this file instead of standard output.",
        ),
        click.option("--timeit", is_flag=True, help="Show timing information."),
        click.option(
            "--quiet", "-q", is_flag=True, help="Suppress progress and info output."
        ),
    )
    for decorator in decorators:
        func = decorator(func)
    return func


_max_degree_option = click.option(
    "--max-degree",
    "-N",
    type=click.IntRange(min=0),
    default=None,
    help="Degree bound of the eigenpolynomials (defaults to the document's).",
)
_precision_option = click.option(
    "--precision-bits",
    type=click.IntRange(min=64),
    default=PRECISION_BITS,
    show_default=True,
    help="Working precision of numeric checks.",
)


def _metadata(enabled: bool, document: dict) -> Optional[dict]:
    if not enabled:
        return None
    return {"xopspy_version": xopspy.__version__, "input": fingerprint(document)}


def _print_timings(timer: Timer, timeit: bool, title: str) -> None:
    if timeit:
        console.Console(stderr=True).print(timer.get_table(title))


def _csv_text(header: List[str], rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _load_system(source: str, max_degree: Optional[int]):
    """Parse a system document; returns the document, its data and the degree bound."""
    _, document = read_document(source)
    if "operator" not in document:
        raise PreconditionError("Not a system document: missing key 'operator'")
    data = system_from_json(document)
    N = data["N"] if max_degree is None else max_degree
    if data["eta"] is None:
        found = infer_eta(data["operator"])
        if found is not None:
            try:
                verify_natural(data["operator"], found[0])
                data["eta"] = found[0]
            except NotNaturalError:
                logger.info("Operator is not natural for the inferred eta")
    return document, data, N


def _gap_data(system):
    """Subspace basis and gap data of a natural system, at the required margin."""
    nf = system.nf
    size = max(system.N, 2 * nf.eta.degree() + 2, 3 * nf.eta.degree() + 1)
    basis = subspace_basis(nf, size)
    return basis, codimension_report(nf, basis)


@cli.command("version")
def print_version():
    """Print version information of xopspy."""
    cons = console.Console()
    grid = Table(title="xopspy version info", show_header=False, title_style="bold")
    grid.box = box.HORIZONTALS
    if cons.size.width > 120:
        grid.width = 120
    grid.add_row("xopspy version:", xopspy.__version__)
    grid.add_row("Document format version:", FORMAT_VERSION)
    grid.add_section()
    grid.add_row("sympy version:", sympy.__version__)
    grid.add_row("mpmath version:", mpmath.__version__)
    grid.add_row("numpy version:", numpy.__version__)
    grid.add_section()
    grid.add_row("Working precision:", f"{PRECISION_BITS} bits")
    cons.print(grid)


@cli.command("corpus")
@click.argument("name", required=False)
@click.option(
    "--out",
    "-o",
    type=click.Path(dir_okay=False, writable=True),
    help="Write the chain document to this file instead of standard output.",
)
@exit_code_contract
def corpus(name, out):
    """List the built-in chains, or write the chain document of NAME."""
    chains = corpus_chains()
    if name is None:
        table = Table("name", "base", "steps", "fingerprint", title="Chain corpus")
        for key, chain in chains.items():
            document = chain_to_json(chain)
            table.add_row(
                key, str(chain.base), str(len(chain.steps)), fingerprint(document)
            )
        console.Console().print(table)
        return
    if name not in chains:
        raise UnknownFamilyError(name, chains, what="corpus chain")
    write_output(dumps("chain", chain_to_json(chains[name])), out)


@cli.command("construct")
@click.argument("chain", required=False)
@click.option("--corpus", "corpus_name", help="Use a chain of the built-in corpus.")
@_max_degree_option
@_common_options
@exit_code_contract
def construct(chain, corpus_name, max_degree, quiet, timeit, out, metadata):
    """Run a Darboux chain and write the exceptional system it produces.

    \b
    chain  Chain document: a file path or inline JSON.

    The final operator is brought to its natural gauge; the output holds the
    operator, eta, s, the exceptional degrees, the eigenpolynomials up to the
    degree bound and the gap data of every primary pole.
    """
    setup_rich_log_handler(quiet)
    if (chain is None) == (corpus_name is None):
        raise click.UsageError("Give either CHAIN or --corpus")
    if corpus_name is not None:
        chains = corpus_chains()
        if corpus_name not in chains:
            raise UnknownFamilyError(corpus_name, chains, what="corpus chain")
        document = chain_to_json(chains[corpus_name])
    else:
        _, document = read_document(chain)
    N = DEFAULT_MAX_DEGREE if max_degree is None else max_degree

    timer = Timer("Stage")
    with timer("chain"):
        chain_obj = chain_from_json(document)
        result = run_chain(chain_obj)
    with timer("eigenpolynomials"):
        system = naturalize(result.final, N)
    with timer("gap data"):
        _, gaps = _gap_data(system)
    logger.info(
        "Constructed system of codimension %d, exceptional degrees %s",
        gaps.codim,
        list(system.exceptional_degrees),
    )

    payload = {"chain": chain_to_json(chain_obj)}
    payload.update(system_to_json(system))
    payload["gaps"] = gap_data_to_json(gaps)
    write_output(dumps("system", payload, _metadata(metadata, document)), out)
    _print_timings(timer, timeit, "Time required per stage")


# Verification suites
def _check(name: str, verdict: str, detail=None) -> dict:
    entry = {"name": name, "verdict": verdict}
    if detail is not None:
        entry["detail"] = detail
    return entry


def _structure_suite(data: dict, N: int, timer: Timer) -> List[dict]:
    T, eta = data["operator"], data["eta"]
    if eta is None:
        return [_check("natural", "fail", "no eta found for the operator")]
    with timer("structure", "natural"):
        try:
            nf = verify_natural(T, eta)
        except NotNaturalError as exc:
            return [_check("natural", "fail", str(exc))]
    checks = [_check("natural", "pass")]

    with timer("structure", "eigenpolynomials"):
        system = eigenpolys(T, eta, N)
    stored = {k: y for k, y in data["eigenpolys"].items() if k <= N}
    mismatched = [
        k
        for k, y in sorted(stored.items())
        if k not in system.eigenpairs or system.eigenpairs[k].y != y.monic()
    ]
    recorded = [k for k in data["exceptional_degrees"] if k <= N]
    if data["exceptional_degrees"] and recorded != list(system.exceptional_degrees):
        mismatched.append("exceptional degrees")
    checks.append(
        _check(
            "eigenpolynomials",
            "fail" if mismatched else "pass",
            {"mismatched": [str(k) for k in mismatched]} if mismatched else None,
        )
    )

    with timer("structure", "codimension"):
        try:
            basis, gaps = _gap_data(system)
        except (IdentityViolation, SubspaceError) as exc:
            checks.append(_check("codimension", "fail", str(exc)))
            return checks
    codim_ok = len(system.exceptional_degrees) == nf.eta.degree()
    checks.append(
        _check(
            "codimension",
            "pass" if codim_ok else "fail",
            {
                "gaps": gap_data_to_json(gaps),
                "exceptional_degrees": list(system.exceptional_degrees),
            },
        )
    )

    with timer("structure", "semisimplicity"):
        try:
            report = semisimplicity_check(T, basis)
        except SubspaceError as exc:
            checks.append(_check("semisimplicity", "fail", str(exc)))
            return checks
    defective = [
        {
            "eigenvalue": rat_to_json(d.eigenvalue),
            "algebraic": d.algebraic,
            "geometric": d.geometric,
            "witness": poly_to_json(d.witness),
            "image": poly_to_json(d.image),
        }
        for d in report.defective
    ]
    checks.append(
        _check(
            "semisimplicity",
            "pass" if report.semisimple else "fail",
            {"defective": defective} if defective else None,
        )
    )
    return checks


def _monodromy_suite(
    data: dict, depth: Optional[int], precision_bits: int, timer: Timer, quiet: bool
) -> List[dict]:
    if data["eta"] is None:
        return [_check("monodromy", "fail", "no eta found for the operator")]
    with timer("monodromy", "certificate"):
        report = trivial_monodromy_certificate(
            data["operator"], data["eta"], depth, precision_bits=precision_bits
        )
    if not quiet and report.entries:
        console.Console(stderr=True).print(monodromy_table(report))
    return [_check("monodromy", report.verdict, monodromy_report_to_json(report))]


def _orthogonality_suite(
    data: dict, N: int, cfg: QuadConfig, timer: Timer
) -> List[dict]:
    T, eta = data["operator"], data["eta"]
    if eta is None:
        return [_check("weight", "fail", "no eta found for the operator")]
    with timer("orthogonality", "weight"):
        try:
            nf = verify_natural(T, eta)
            W = weight_of(T, nf)
        except (NotNaturalError, NoWeightError) as exc:
            return [_check("weight", "fail", str(exc))]
    regularity = regularity_check(W)
    if not regularity.regular:
        return [_check("regularity", "fail", regularity.failures)]
    checks = [_check("regularity", "pass")]
    with timer("orthogonality", "gram"):
        system = eigenpolys(T, eta, N)
        try:
            report = gram_matrix(system, W, cfg=cfg)
        except QuadratureError as exc:
            checks.append(_check("gram", "fail", str(exc)))
            return checks
    orthogonal = report.max_offdiag < mpmath.mpf(GRAM_TOLERANCE)
    checks.append(
        _check("gram", "pass" if orthogonal else "fail", gram_report_to_json(report))
    )
    return checks


@cli.command("verify")
@click.argument("system")
@click.option(
    "--suite",
    type=click.Choice([*SUITES, "all"]),
    default="all",
    show_default=True,
    help="Verification suite to run.",
)
@_max_degree_option
@click.option(
    "--depth",
    type=click.IntRange(min=2),
    default=None,
    help="Frobenius series depth (defaults to a rule based on the gap count).",
)
@_precision_option
@_common_options
@exit_code_contract
def verify(
    system, suite, max_degree, depth, precision_bits, quiet, timeit, out, metadata
):
    """Run verification suites on a system document.

    \b
    system  System document (e.g. the output of `construct`): path or inline JSON.

    Exits with 1 when a check fails. Inconclusive numeric verdicts exit with 0 and
    are listed under "warnings".
    """
    setup_rich_log_handler(quiet)
    document, data, N = _load_system(system, max_degree)
    cfg = QuadConfig(precision_bits=precision_bits)
    suites = SUITES if suite == "all" else (suite,)
    timer = Timer("Suite", "Check")
    results = {}

    # mpmath keeps its precision in a process-wide context: suites run one by one
    with ExitStack() as stack:
        columns = (
            TimeElapsedColumn(),
            BarColumn(),
            TaskProgressColumn(),
            TextColumn("[progress.description]{task.description}"),
            SpinnerColumn("simpleDots", style="[white]"),
        )
        progress = stack.enter_context(
            Progress(*columns, console=console.Console(stderr=True), disable=quiet)
        )
        task = progress.add_task("Verifying", total=len(suites))
        for name in suites:
            progress.update(task, description=f"Running [bold green]{name}[/]")
            if name == "structure":
                results[name] = _structure_suite(data, N, timer)
            elif name == "monodromy":
                results[name] = _monodromy_suite(
                    data, depth, precision_bits, timer, quiet
                )
            else:
                results[name] = _orthogonality_suite(data, N, cfg, timer)
            progress.update(task, advance=1)

    verdicts = [check["verdict"] for checks in results.values() for check in checks]
    warnings = [
        f"{suite_name}/{check['name']}: numeric verdict is inconclusive"
        for suite_name, checks in results.items()
        for check in checks
        if check["verdict"] == "inconclusive"
    ]
    verdict = "fail" if "fail" in verdicts else "pass"
    logger.info("Verification verdict: %s", verdict)
    payload = {"suite": suite, "N": N, "verdict": verdict, "suites": results}
    if warnings:
        payload["warnings"] = warnings
        for warning in warnings:
            logger.warning(warning)
    write_output(dumps("verification", payload, _metadata(metadata, document)), out)
    _print_timings(timer, timeit, "Time required per check")
    if verdict == "fail":
        sys.exit(EXIT_CHECK_FAILED)


@cli.command("tabulate")
@click.argument("system")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
)
@_max_degree_option
@_common_options
@exit_code_contract
def tabulate(system, fmt, max_degree, quiet, timeit, out, metadata):
    """Tabulate the exact eigenpolynomial coefficients of a system document.

    Rows are the degrees k <= N with an eigenpolynomial; the coefficients c0..cN are
    exact rationals, padded with zeros to the degree bound.
    """
    setup_rich_log_handler(quiet)
    document, data, N = _load_system(system, max_degree)
    timer = Timer("Stage")
    with timer("eigenpolynomials"):
        result = eigenpolys(data["operator"], data["eta"], N)
    rows = []
    for k, pair in sorted(result.eigenpairs.items()):
        coefficients = poly_to_json(pair.y)
        coefficients += ["0"] * (N + 1 - len(coefficients))
        rows.append((str(k), rat_to_json(pair.eigenvalue), coefficients))
    if fmt == "csv":
        header = ["k", "eigenvalue"] + [f"c{i}" for i in range(N + 1)]
        text = _csv_text(header, [[k, ev, *c] for k, ev, c in rows])
    else:
        payload = {
            "N": N,
            "exceptional_degrees": list(result.exceptional_degrees),
            "rows": [{"k": int(k), "eigenvalue": ev, "coeffs": c} for k, ev, c in rows],
        }
        text = dumps("table", payload, _metadata(metadata, document))
    write_output(text, out)
    _print_timings(timer, timeit, "Time required per stage")


@cli.command("gram")
@click.argument("system")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv"]),
    default="json",
    show_default=True,
)
@_max_degree_option
@_precision_option
@_common_options
@exit_code_contract
def gram(system, fmt, max_degree, precision_bits, quiet, timeit, out, metadata):
    """Gram matrix of the eigenpolynomials of a regular system document.

    Entries are integrals of W y_i y_j over the orthogonality interval, written as
    decimal strings at the requested precision.
    """
    setup_rich_log_handler(quiet)
    document, data, N = _load_system(system, max_degree)
    T, eta = data["operator"], data["eta"]
    if eta is None:
        raise NoWeightError("no eta found for the operator")
    timer = Timer("Stage")
    with timer("weight"):
        nf = verify_natural(T, eta)
        W = weight_of(T, nf)
    with timer("eigenpolynomials"):
        result = eigenpolys(T, eta, N)
    with timer("quadrature"):
        report = gram_matrix(result, W, cfg=QuadConfig(precision_bits=precision_bits))
    payload = gram_report_to_json(report)
    if fmt == "csv":
        text = _csv_text(["i", "j", "value"], payload["entries"])
    else:
        text = dumps("gram", payload, _metadata(metadata, document))
    write_output(text, out)
    _print_timings(timer, timeit, "Time required per stage")


@cli.command("weight")
@click.argument("system")
@click.option(
    "--grid",
    required=True,
    help='Comma separated exact abscissae, e.g. "1/2,1,2".',
)
@click.option("--digits", type=click.IntRange(min=1), default=30, show_default=True)
@_precision_option
@click.option(
    "--out",
    "-o",
    type=click.Path(dir_okay=False, writable=True),
    help="Write the CSV to this file instead of standard output.",
)
@exit_code_contract
def weight(system, grid, digits, precision_bits, out):
    """Sample the orthogonality weight of a system document as CSV (z, W(z))."""
    _, data, _ = _load_system(system, None)
    if data["eta"] is None:
        raise NoWeightError("no eta found for the operator")
    W = weight_of(data["operator"], verify_natural(data["operator"], data["eta"]))
    points = [rat(x.strip()) for x in grid.split(",") if x.strip()]
    outside = [x for x in points if not W.interval.contains(x)]
    if outside:
        raise PreconditionError(f"Grid points {outside} lie outside {W.interval}")
    with mpmath.workprec(precision_bits):
        rows = weight_curve(W, points, digits)
    if out is None:
        click.echo(_csv_text(["z", "W(z)"], rows), nl=False)
    else:
        write_weight_curve(out, rows)


@cli.command("report")
@click.argument("system")
@_max_degree_option
@click.option(
    "--monodromy", is_flag=True, help="Also show the trivial monodromy certificate."
)
@exit_code_contract
def report(system, max_degree, monodromy):
    """Pretty print a system document: operator, eta and eigenpolynomials."""
    setup_rich_log_handler(False)
    _, data, N = _load_system(system, max_degree)
    result = eigenpolys(data["operator"], data["eta"], N)
    print_system(result)
    if monodromy and data["eta"] is not None:
        certificate = trivial_monodromy_certificate(data["operator"], data["eta"])
        console.Console().print(monodromy_table(certificate))


if __name__ == "__main__":
    cli()
