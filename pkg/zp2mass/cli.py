"""Command line: ``zp2mass mass|enumerate|classify|verify``.

Results go to stdout and are byte-identical for identical arguments; JSON log lines go
to stderr. Exit codes: 0 success, 1 verification mismatch, 2 uncertified
classification, 64 usage error, 65 library error.
"""

from __future__ import annotations

import json
import os
import random
from contextlib import contextmanager
from typing import Iterator, Optional, Sequence

import click
from pydantic import ValidationError

from . import census, codecore, equivalence, lifting, verify
from .codecore import CodeZp2
from .config import settings
from .errors import ZpmError
from .jlog import jlog
from .schemas import CheckResult, CodeOut, EnumerationReport, Family, JobConfig, MassReport

EXIT_MISMATCH = 1
EXIT_UNCERTIFIED = 2
EXIT_USAGE = 64
EXIT_ERROR = 65

FAMILIES = [f.value for f in Family]
LIFT_ENUMERATORS = {
    Family.SO: lifting.so_lifts,
    Family.EVEN_ONE: lifting.even_lifts_with_one,
    Family.EVEN_PM1: lifting.even_lifts_with_pm1,
}


class JobGroup(click.Group):
    """Maps click usage errors to 64 and library errors to 65."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_USAGE
            raise
        except ZpmError as exc:
            jlog("error", "job_failed", error=type(exc).__name__, detail=str(exc))
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_ERROR)


def job_options(fn):
    fn = click.option("--format", "output_format", type=click.Choice(["json", "tsv", "text"]), default=None, help="Output format")(fn)
    fn = click.option("--workers", type=int, default=None, help="Worker processes (default: CPU count)")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized checks")(fn)
    fn = click.option("--oracle-max-space", type=int, default=None, help="Largest p^(2n) the oracle sweeps")(fn)
    fn = click.option("--aut-max-n", type=int, default=None, help="Longest code the automorphism search accepts")(fn)
    fn = click.option("--family-limit", type=int, default=None, help="Largest family classified")(fn)
    return fn


def family_option(default: Optional[str] = None, required: bool = False):
    return click.option("--family", type=click.Choice(FAMILIES), default=default, required=required, help="Code family")


def make_job(command: str, *, default_format: str = "text", **values) -> JobConfig:
    workers = values.pop("workers", None)
    values["workers"] = workers if workers else os.cpu_count() or 1
    values["output_format"] = values.get("output_format") or default_format
    for name in ("oracle_max_space", "aut_max_n", "family_limit"):
        if values.get(name) is None:
            values[name] = getattr(settings, name)
    try:
        return JobConfig(command=command, **values)
    except ValidationError as exc:
        raise click.UsageError("; ".join(e["msg"] for e in exc.errors())) from exc


@contextmanager
def budgets(cfg: JobConfig) -> Iterator[None]:
    saved = {name: getattr(settings, name) for name in ("oracle_max_space", "aut_max_n", "family_limit")}
    for name in saved:
        setattr(settings, name, getattr(cfg, name))
    try:
        yield
    finally:
        for name, value in saved.items():
            setattr(settings, name, value)


@click.group(cls=JobGroup)
@click.option("--log-level", type=click.Choice(["debug", "info", "warning", "error"]), default=None, help="stderr log threshold")
def main(log_level: Optional[str]) -> None:
    """Exact counting, enumeration and classification of self-orthogonal codes over Z_{p^2}."""
    if log_level:
        settings.log_level = log_level


# --- mass ---------------------------------------------------------------------------


def render_mass(report: MassReport, fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2, exclude_none=True)
    if fmt == "tsv":
        lines = ["k1\tk2\tterm"]
        if report.breakdown is not None:
            lines += [f"{t.k1}\t{t.k2}\t{t.term}" for t in report.breakdown]
        else:
            lines.append(f"{report.k1}\t{report.k2}\t{report.value}")
        return "\n".join(lines)
    lines = [str(report.value)]
    for t in report.breakdown or []:
        lines.append(f"  {{{t.k1},{t.k2}}}: {t.term}")
    if report.diagnostic:
        lines.append(f"# {report.diagnostic}")
    return "\n".join(lines)


@main.command("mass")
@family_option(required=True)
@click.option("-p", type=int, default=2, show_default=True)
@click.option("-n", type=int, required=True)
@click.option("--k1", type=int, default=None)
@click.option("--k2", type=int, default=None)
@job_options
def mass_cmd(family, p, n, k1, k2, **opts):
    """Exact number of codes in a family, by the mass formulas."""
    cfg = make_job("mass", family=family, p=p, n=n, k1=k1, k2=k2, **opts)
    with budgets(cfg):
        report = census.mass(cfg.family, p, n, k1, k2)
    click.echo(render_mass(report, cfg.output_format))


# --- enumerate ------------------------------------------------------------------------


def render_codes(report: EnumerationReport, codes: Sequence[CodeZp2], fmt: str) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2, exclude_none=True)
    if fmt == "tsv":
        lines = ["index\tk1\tk2\tgenerators"]
        for i, C in enumerate(codes):
            gens = ";".join(" ".join(str(x) for x in row) for row in C.gens.tolist())
            lines.append(f"{i}\t{C.k1}\t{C.k2}\t{gens}")
        return "\n".join(lines)
    blocks = [codecore.format_matrix(C) for C in codes]
    return "\n".join(blocks) + ("\n" if blocks else "") + f"# count {report.count}"


@main.command("enumerate")
@click.option("--lifts", "mode", flag_value="lifts", help="Lift a residue (and torsion) code read from files")
@click.option("--oracle", "mode", flag_value="oracle", help="Exhaustive Howell-form sweep")
@click.option("--constructive", "mode", flag_value="constructive", help="Lifts over every admissible chain")
@click.option("--residue", type=click.File("r"), default=None, help="Residue code matrix file ('-' for stdin)")
@click.option("--torsion", type=click.File("r"), default=None, help="Torsion code matrix file (defaults to the residue)")
@family_option()
@click.option("-p", type=int, default=2, show_default=True)
@click.option("-n", type=int, default=None)
@click.option("--k1", type=int, default=None)
@click.option("--k2", type=int, default=None)
@job_options
def enumerate_cmd(mode, residue, torsion, family, p, n, k1, k2, **opts):
    """Generator matrices of every code in a family, in canonical order."""
    mode = mode or "constructive"
    if mode == "lifts":
        if residue is None:
            raise click.UsageError("--lifts needs --residue")
        C1 = codecore.read_fp_code(residue.read())
        C2 = codecore.read_fp_code(torsion.read()) if torsion is not None else C1
        p, n = C1.p, C1.n
        family = family or Family.SO.value
    elif n is None:
        raise click.UsageError(f"--{mode} needs -n")
    elif mode == "constructive" and family is None:
        raise click.UsageError("--constructive needs --family")
    cfg = make_job("enumerate", family=family, p=p, n=n, k1=k1, k2=k2, input_path=getattr(residue, "name", None), **opts)
    with budgets(cfg):
        if mode == "lifts":
            if cfg.family not in LIFT_ENUMERATORS:
                raise click.UsageError(f"--lifts builds {', '.join(f.value for f in LIFT_ENUMERATORS)} codes, not {cfg.family.value}")
            jlog("info", "lifts_requested", input_path=cfg.input_path, p=p, n=n, family=cfg.family.value, residue_dim=C1.dim, torsion_dim=C2.dim)
            codes = LIFT_ENUMERATORS[cfg.family](C1, C2, workers=cfg.workers)
        elif mode == "oracle":
            codes = census.oracle_enumerate(p, n, cfg.family, k1, k2, workers=cfg.workers)
        else:
            codes = census.constructive_enumerate(cfg.family, p, n, k1, k2, workers=cfg.workers)
    codes = sorted(codes, key=lambda C: C.key())
    report = EnumerationReport(
        mode=mode,
        family=cfg.family,
        p=p,
        n=n,
        count=len(codes),
        codes=[CodeOut(rows=C.gens.tolist(), k1=C.k1, k2=C.k2) for C in codes],
    )
    click.echo(render_codes(report, codes, cfg.output_format))


# --- classify -------------------------------------------------------------------------


@main.command("classify")
@family_option(default=Family.SO.value)
@click.option("-p", type=int, default=2, show_default=True)
@click.option("-n", type=int, required=True)
@click.option("--k1", type=int, default=None)
@click.option("--k2", type=int, default=None)
@click.option("--oracle", is_flag=True, help="Take the family from the exhaustive sweep")
@job_options
@click.pass_context
def classify_cmd(ctx, family, p, n, k1, k2, oracle, **opts):
    """Equivalence classes of a family, certified by the mass formula."""
    cfg = make_job("classify", default_format="json", family=family, p=p, n=n, k1=k1, k2=k2, **opts)
    with budgets(cfg):
        result = equivalence.classify(p, n, cfg.family, k1, k2, oracle=oracle, workers=cfg.workers)
    report = result.to_schema()
    if cfg.output_format == "json":
        click.echo(report.model_dump_json(indent=2, exclude_none=True))
    else:
        sep = "\t" if cfg.output_format == "tsv" else "  "
        for rep in report.representatives:
            click.echo(sep.join([f"{{{rep.k1},{rep.k2}}}", f"aut={rep.aut_order}", f"orbit={rep.orbit_size}", json.dumps(rep.rows)]))
        click.echo(f"# classes {len(report.representatives)} mass {report.mass_sum} expected {report.expected_mass} certified {report.certified}")
    if not result.certified:
        ctx.exit(EXIT_UNCERTIFIED)


# --- verify ---------------------------------------------------------------------------


def render_checks(results: Sequence[CheckResult], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.model_dump(mode="json", exclude={"seconds"}) for r in results], indent=2)
    lines = []
    for r in results:
        params = " ".join(f"{k}={v}" for k, v in r.params.items())
        line = f"{'PASS' if r.ok else 'FAIL'}\t{r.name}\t{params}"
        if not r.ok:
            line += f"\texpected={r.expected}\tactual={r.actual}"
        lines.append(line)
    failed = sum(1 for r in results if not r.ok)
    lines.append(f"# {len(results)} checks, {failed} failed")
    return "\n".join(lines)


@main.command("verify")
@click.option("--grid", type=click.Choice(sorted(verify.GRIDS)), default=None, help="Run a check grid")
@click.option("--lemma", type=click.Choice(["3.1", "3.2"]), default=None, help="Random trials of the lift-map image sizes")
@click.option("--paper-example", "worked_example", is_flag=True, help="The worked example over Z_9 at length 4")
@click.option("-p", type=int, default=2, show_default=True)
@click.option("-m", type=int, default=1, show_default=True, help="Rows of the random matrices")
@click.option("-n", type=int, default=4, show_default=True)
@click.option("--trials", type=int, default=50, show_default=True)
@job_options
@click.pass_context
def verify_cmd(ctx, grid, lemma, worked_example, p, m, n, trials, **opts):
    """Check the formulas against oracles; exit 1 on any mismatch."""
    cfg = make_job("verify", p=p, n=n, **opts)
    rng = random.Random(cfg.seed)
    results: list[CheckResult] = []
    with budgets(cfg):
        if worked_example:
            results += verify.check_worked_example()
        if lemma:
            if not 1 <= m <= n:
                raise click.UsageError("--lemma needs 1 <= m <= n")
            if lemma == "3.2" and p != 2:
                raise click.UsageError("--lemma 3.2 concerns p = 2")
            results.append(verify.check_lemma(lemma, p, m, n, trials, rng))
        if grid or not (worked_example or lemma):
            results += verify.run_grid(grid or "small", seed=cfg.seed, workers=cfg.workers)
    click.echo(render_checks(results, cfg.output_format))
    if not all(r.ok for r in results):
        ctx.exit(EXIT_MISMATCH)
