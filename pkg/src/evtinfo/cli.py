"""Command-line front end.

Usage:
    evtinfo converge exponential --lambda 1 --n 10,100,1000
    evtinfo converge gnedenko --n 10 --n 100 --format json
    evtinfo check gnedenko
    evtinfo score exponential --normalized 10 --x 1
    evtinfo kl gumbel --mu 0 --beta 2
    evtinfo norming gnedenko --n 100
    evtinfo sample exponential --count 1000 --seed 7 --normalized 10

Exit codes: 0 success, 1 identity failure (check), 2 usage error,
3 numerical failure in at least one row.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import ConfigError, load_distribution
from .distributions import Distribution, GumbelParams, make_exponential, make_gnedenko, make_gumbel
from .errors import EvtInfoError
from .information import (
    GUMBEL_ENTROPY,
    entropy_direct,
    entropy_via_score,
    expected_log_cdf_at_max,
    expected_log_tail_at_max,
    kl_decomposition,
    kl_direct,
    kl_to_gumbel,
)
from .montecarlo import SeededStream, estimate, kl_estimate, metadata, sample, entropy_estimate
from .normalize import NormalizedMax, NormingConstants, norming_constants, normalized_max
from .numerics import DEFAULT_TOL
from .specfun import harmonic

__all__ = ["cli", "main", "ConvergenceRow", "converge_rows", "check_report", "resolve_tol"]

BUILTINS = ("exponential", "gumbel", "gnedenko")
CHECK_NS = (1, 2, 5, 10)
CHECK_TOL = 1e-8

EXIT_OK, EXIT_IDENTITY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class ConvergenceRow:
    n: int
    a_n: float
    b_n: float
    entropy: float
    entropy_target: float
    kl: float
    score_gap: float
    harmonic_gap: float
    mean_term: float
    mgf_bracket: float
    error: str = ""


CONVERGENCE_COLUMNS = [f.name for f in fields(ConvergenceRow)]


def resolve_tol(flag: float | None) -> float:
    """flag > EVTINFO_TOL > default."""
    if flag is not None:
        return flag
    env = os.environ.get("EVTINFO_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise click.UsageError(f"EVTINFO_TOL is not a number: {env!r}") from None
    return DEFAULT_TOL


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.17g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.generic):
        return v.item()
    return v


def render_csv(columns: list[str], rows: list[dict], comments: dict | None = None) -> str:
    buf = io.StringIO()
    for k, v in (comments or {}).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    return buf.getvalue()


def render_json(rows: list[dict], meta: dict) -> str:
    clean = [{k: _jsonable(v) for k, v in r.items()} for r in rows]
    return json.dumps({"meta": meta, "rows": clean}, indent=2) + "\n"


def _parse_list(values, conv) -> list:
    out = []
    for v in values:
        for part in str(v).split(","):
            part = part.strip()
            if part:
                try:
                    out.append(conv(part))
                except ValueError:
                    raise click.BadParameter(f"cannot parse {part!r}") from None
    return out


def _parse_int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(s)
    return int(v)


# --- distribution selection --------------------------------------------------

def build_distribution(name: str, lam: float, mu: float, beta: float,
                       spec: str | None) -> Distribution:
    try:
        if name == "exponential":
            return make_exponential(lam)
        if name == "gumbel":
            return make_gumbel(GumbelParams(mu, beta))
        if name == "gnedenko":
            return make_gnedenko()
        if name == "custom" or Path(name).is_file():
            path = spec if name == "custom" else name
            if not path:
                raise click.UsageError("custom distribution needs --spec FILE")
            return load_distribution(path)
    except (ConfigError, OSError) as exc:
        raise click.UsageError(f"cannot load spec: {exc}") from None
    except EvtInfoError as exc:
        raise click.UsageError(str(exc)) from None
    raise click.UsageError(
        f"unknown distribution {name!r}; choose from {', '.join(BUILTINS)}, custom, or a spec file")


def _common(f):
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json", "text"]), default=None,
                     help="Output format (default csv; text for check).")(f)
    f = click.option("--tol", type=float, default=None, help="Quadrature tolerance.")(f)
    f = click.option("--seed", type=int, default=None, help="Monte Carlo seed.")(f)
    f = click.option("--spec", "spec_file", type=click.Path(dir_okay=False), default=None,
                     help="von Mises spec file for the custom distribution.")(f)
    f = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                     help="Write to FILE instead of standard output.")(f)
    return f


def _law_options(f):
    f = click.option("--lambda", "lam", type=float, default=1.0, show_default=True,
                     help="Exponential rate.")(f)
    f = click.option("--mu", type=float, default=0.0, show_default=True, help="Gumbel location.")(f)
    f = click.option("--beta", type=float, default=1.0, show_default=True, help="Gumbel scale.")(f)
    return f


def _settings(ctx, fmt, tol, seed, spec_file, default_fmt="csv") -> dict:
    g = ctx.find_root().obj or {}
    return {
        "fmt": fmt or g.get("fmt") or default_fmt,
        "tol": resolve_tol(tol if tol is not None else g.get("tol")),
        "seed": next((s for s in (seed, g.get("seed")) if s is not None), 0),
        "spec": spec_file or g.get("spec"),
    }


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _meta(command: str, settings: dict, dist: Distribution | None = None, **extra) -> dict:
    meta = {"tool": "evtinfo", "version": __version__, "command": command,
            "seed": settings["seed"], "tol": settings["tol"]}
    if dist is not None:
        meta["distribution"] = dist.name
    meta.update(extra)
    return meta


# --- converge ----------------------------------------------------------------

def _quadrature_row(dist: Distribution, n: int, tol: float) -> ConvergenceRow:
    nm = normalized_max(dist, n)
    dec = kl_decomposition(nm, tol=tol)
    ent = entropy_via_score(nm, tol=tol)
    return ConvergenceRow(n, nm.a, nm.b, ent, GUMBEL_ENTROPY, dec.total, dec.score_gap,
                          dec.harmonic_gap, dec.mean_term, dec.mgf_bracket)


def _mc_row(dist: Distribution, n: int, seed: int, count: int, workers: int) -> ConvergenceRow:
    nm = normalized_max(dist, n)
    spec = nm.base.von_mises
    stream = SeededStream(seed, n)
    z = sample(nm, stream, count, workers)
    ent = 1.0 - estimate(nm, nm.max_score, stream, count, draws=z).mean
    log_g_b = float(spec.log_g(nm.b))
    score_gap = log_g_b - estimate(nm, lambda v: spec.log_g(nm.a * v + nm.b), stream, count, draws=z).mean
    harmonic_gap = math.log(n) - harmonic(n)
    mean_term = estimate(nm, lambda v: v, stream, count, draws=z).mean
    mgf_bracket = estimate(nm, lambda v: np.expm1(-v), stream, count, draws=z).mean
    kl = math.fsum([score_gap, harmonic_gap, 1.0 / n, mean_term, mgf_bracket])
    return ConvergenceRow(n, nm.a, nm.b, ent, GUMBEL_ENTROPY, kl, score_gap,
                          harmonic_gap, mean_term, mgf_bracket)


def converge_rows(dist: Distribution, ns: list[int], method: str = "quadrature",
                  tol: float = DEFAULT_TOL, seed: int = 0, samples: int = 100_000,
                  workers: int = 1) -> list[ConvergenceRow]:
    """One ConvergenceRow per n, in the given order; failures fill ``error``."""
    rows = []
    for n in ns:
        try:
            if method == "mc":
                rows.append(_mc_row(dist, n, seed, samples, workers))
            else:
                rows.append(_quadrature_row(dist, n, tol))
        except EvtInfoError as exc:
            nan = float("nan")
            rows.append(ConvergenceRow(n, nan, nan, nan, GUMBEL_ENTROPY, nan, nan, nan, nan, nan,
                                       error=f"{type(exc).__name__}: {exc}"))
    return rows


@click.group()
@click.version_option(__version__, prog_name="evtinfo")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "text"]), default=None)
@click.option("--tol", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--spec", "spec_file", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def cli(ctx, fmt, tol, seed, spec_file):
    """Max-score entropy and relative-entropy calculus for Gumbel limits."""
    ctx.obj = {"fmt": fmt, "tol": tol, "seed": seed, "spec": spec_file}


@cli.command()
@click.argument("dist_name", metavar="DIST")
@_law_options
@click.option("--n", "n_values", multiple=True, required=True,
              help="Block size(s); repeat or comma-separate.")
@click.option("--method", type=click.Choice(["quadrature", "mc"]), default="quadrature",
              show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True,
              help="Monte Carlo sample count per row.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--plot-data", type=click.Path(dir_okay=False), default=None,
              help="Also write 'n kl' two-column data for gnuplot.")
@_common
@click.pass_context
def converge(ctx, dist_name, lam, mu, beta, n_values, method, samples, workers, plot_data,
             fmt, tol, seed, spec_file, output):
    """Entropy, relative entropy and its decomposition for N_n over a list of n."""
    st = _settings(ctx, fmt, tol, seed, spec_file)
    ns = _parse_list(n_values, _parse_int)
    if not ns or any(n < 1 for n in ns):
        raise click.BadParameter("--n values must be integers >= 1")
    dist = build_distribution(dist_name, lam, mu, beta, st["spec"])
    rows = converge_rows(dist, ns, method, st["tol"], st["seed"], samples, workers)
    dicts = [asdict(r) for r in rows]
    extra = {"method": method}
    comments = None
    if method == "mc":
        mc = metadata(SeededStream(st["seed"]), samples)
        mc["stream_id"] = "n"
        extra["monte_carlo"] = mc
        comments = mc
    if st["fmt"] == "json":
        text = render_json(dicts, _meta("converge", st, dist, **extra))
    else:
        text = render_csv(CONVERGENCE_COLUMNS, dicts, comments)
    _emit(text, output)
    if plot_data:
        lines = ["# n kl"] + [f"{r.n} {_fmt(r.kl)}" for r in rows if not r.error]
        Path(plot_data).write_text("\n".join(lines) + "\n")
    if any(r.error for r in rows):
        ctx.exit(EXIT_NUMERIC)


# --- check -------------------------------------------------------------------

def check_report(dist: Distribution, tol: float = DEFAULT_TOL) -> list[dict]:
    """The distribution-free identity suite for one law."""
    items = []

    def add(label, measured, target):
        items.append({"distribution": dist.name, "identity": label, "measured": measured,
                      "target": target, "passed": abs(measured - target) <= CHECK_TOL})

    add("E log F(X)", expected_log_cdf_at_max(dist, 1, tol), -1.0)
    add("E log(1-F(X))", -expected_log_tail_at_max(dist, 1, tol), -1.0)
    for n in CHECK_NS:
        add(f"E log F(M_{n})", expected_log_cdf_at_max(dist, n, tol), -1.0 / n)
    for n in CHECK_NS:
        add(f"-E log(1-F(M_{n}))", expected_log_tail_at_max(dist, n, tol), harmonic(n))
    add("H(X) via score vs direct", entropy_via_score(dist, tol), entropy_direct(dist, tol))
    return items


@cli.command()
@click.argument("dist_name", metavar="[DIST]", required=False)
@_law_options
@_common
@click.pass_context
def check(ctx, dist_name, lam, mu, beta, fmt, tol, seed, spec_file, output):
    """Run the distribution-free identity suite (all built-ins by default)."""
    st = _settings(ctx, fmt, tol, seed, spec_file, default_fmt="text")
    names = [dist_name] if dist_name else list(BUILTINS)
    items, failures = [], []
    for name in names:
        dist = build_distribution(name, lam, mu, beta, st["spec"])
        try:
            got = check_report(dist, st["tol"])
        except EvtInfoError as exc:
            click.echo(f"{dist.name}: numerical failure: {exc}", err=True)
            ctx.exit(EXIT_NUMERIC)
        items.extend(got)
        failures.extend(i for i in got if not i["passed"])
    if st["fmt"] == "json":
        text = render_json(items, _meta("check", st, check_tol=CHECK_TOL))
    elif st["fmt"] == "csv":
        text = render_csv(["distribution", "identity", "measured", "target", "passed"], items)
    else:
        lines, current = [], None
        for i in items:
            if i["distribution"] != current:
                current = i["distribution"]
                lines.append(f"[{current}]")
            lines.append(f"{i['identity']}: {i['measured']:.6f} target {i['target']:.6f}"
                         + ("" if i["passed"] else "  FAIL"))
        lines.append(f"{len(items) - len(failures)}/{len(items)} identities within {CHECK_TOL:g}")
        text = "\n".join(lines) + "\n"
    _emit(text, output)
    if failures:
        for i in failures:
            click.echo(f"FAILED {i['distribution']}: {i['identity']} "
                       f"measured {i['measured']!r} target {i['target']!r}", err=True)
        ctx.exit(EXIT_IDENTITY)


# --- score -------------------------------------------------------------------

@cli.command()
@click.argument("dist_name", metavar="DIST")
@_law_options
@click.option("--x", "x_values", multiple=True, required=True,
              help="Evaluation point(s); repeat or comma-separate.")
@click.option("--normalized", type=int, default=None,
              help="Evaluate the max-score of N_n for this n instead.")
@click.option("--plot-data", type=click.Path(dir_okay=False), default=None,
              help="Also write 'x theta' two-column data for gnuplot.")
@_common
@click.pass_context
def score(ctx, dist_name, lam, mu, beta, x_values, normalized, plot_data,
          fmt, tol, seed, spec_file, output):
    """Pointwise max-score and hazard."""
    st = _settings(ctx, fmt, tol, seed, spec_file)
    xs = _parse_list(x_values, float)
    dist = build_distribution(dist_name, lam, mu, beta, st["spec"])
    target: Distribution = dist
    if normalized is not None:
        try:
            target = normalized_max(dist, normalized)
        except EvtInfoError as exc:
            raise click.UsageError(str(exc)) from None
    rows = []
    for x in xs:
        try:
            rows.append({"x": x, "theta": target.max_score(x), "hazard": target.hazard(x), "error": ""})
        except EvtInfoError as exc:
            rows.append({"x": x, "theta": float("nan"), "hazard": float("nan"),
                         "error": f"{type(exc).__name__}: {exc}"})
    if st["fmt"] == "json":
        text = render_json(rows, _meta("score", st, target))
    else:
        text = render_csv(["x", "theta", "hazard", "error"], rows)
    _emit(text, output)
    if plot_data:
        lines = ["# x theta"] + [f"{_fmt(r['x'])} {_fmt(r['theta'])}" for r in rows if not r["error"]]
        Path(plot_data).write_text("\n".join(lines) + "\n")
    if any(r["error"] for r in rows):
        ctx.exit(EXIT_NUMERIC)


# --- kl ----------------------------------------------------------------------

@cli.command()
@click.argument("dist_name", metavar="DIST")
@_law_options
@click.option("--normalized", type=int, default=None, help="Use N_n for this n.")
@click.option("--target-mu", type=float, default=0.0, show_default=True)
@click.option("--target-beta", type=float, default=1.0, show_default=True)
@click.option("--method", type=click.Choice(["quadrature", "mc"]), default="quadrature",
              show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_common
@click.pass_context
def kl(ctx, dist_name, lam, mu, beta, normalized, target_mu, target_beta, method, samples,
       workers, fmt, tol, seed, spec_file, output):
    """Relative entropy to a Gumbel(target-mu, target-beta) law."""
    st = _settings(ctx, fmt, tol, seed, spec_file)
    dist = build_distribution(dist_name, lam, mu, beta, st["spec"])
    try:
        target_params = GumbelParams(target_mu, target_beta)
        law = normalized_max(dist, normalized) if normalized is not None else dist
    except EvtInfoError as exc:
        raise click.UsageError(str(exc)) from None
    row = {"distribution": law.name, "target_mu": target_mu, "target_beta": target_beta}
    extra = {"method": method}
    comments = None
    try:
        if method == "mc":
            stream = SeededStream(st["seed"])
            k = kl_estimate(law, stream, samples, target_params, workers)
            h = entropy_estimate(law, stream, samples, workers)
            row.update(kl=k.mean, kl_std_error=k.std_error, entropy=h.mean,
                       entropy_std_error=h.std_error, error="")
            extra["monte_carlo"] = comments = metadata(stream, samples)
            columns = ["distribution", "target_mu", "target_beta", "kl", "kl_std_error",
                       "entropy", "entropy_std_error", "error"]
        else:
            row.update(kl=kl_to_gumbel(law, target_params, st["tol"]),
                       kl_direct=kl_direct(law, target_params, st["tol"]),
                       entropy=entropy_via_score(law, st["tol"]), error="")
            columns = ["distribution", "target_mu", "target_beta", "kl", "kl_direct", "entropy", "error"]
    except EvtInfoError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        columns = ["distribution", "target_mu", "target_beta", "error"]
    if st["fmt"] == "json":
        text = render_json([row], _meta("kl", st, law, **extra))
    else:
        text = render_csv(columns, [row], comments)
    _emit(text, output)
    if row["error"]:
        ctx.exit(EXIT_NUMERIC)


# --- norming -----------------------------------------------------------------

@cli.command()
@click.argument("dist_name", metavar="DIST")
@_law_options
@click.option("--n", "n_values", multiple=True, required=True)
@_common
@click.pass_context
def norming(ctx, dist_name, lam, mu, beta, n_values, fmt, tol, seed, spec_file, output):
    """Norming constants a_n = g(b_n), 1 - F(b_n) = 1/n."""
    st = _settings(ctx, fmt, tol, seed, spec_file)
    ns = _parse_list(n_values, _parse_int)
    dist = build_distribution(dist_name, lam, mu, beta, st["spec"])
    rows = []
    for n in ns:
        try:
            c = norming_constants(dist, n)
            resid = float(dist.sf(c.b_n)) - 1.0 / n
            rows.append({"n": n, "a_n": c.a_n, "b_n": c.b_n, "tail_residual": resid, "error": ""})
        except EvtInfoError as exc:
            nan = float("nan")
            rows.append({"n": n, "a_n": nan, "b_n": nan, "tail_residual": nan,
                         "error": f"{type(exc).__name__}: {exc}"})
    if st["fmt"] == "json":
        text = render_json(rows, _meta("norming", st, dist))
    else:
        text = render_csv(["n", "a_n", "b_n", "tail_residual", "error"], rows)
    _emit(text, output)
    if any(r["error"] for r in rows):
        ctx.exit(EXIT_NUMERIC)


# --- sample ------------------------------------------------------------------

@cli.command("sample")
@click.argument("dist_name", metavar="DIST")
@_law_options
@click.option("--count", type=int, default=1000, show_default=True)
@click.option("--normalized", type=int, default=None, help="Sample N_n for this n.")
@click.option("--raw-max", is_flag=True, help="With --normalized: sample M_n (a=1, b=0).")
@click.option("--stream", "stream_id", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_common
@click.pass_context
def sample_cmd(ctx, dist_name, lam, mu, beta, count, normalized, raw_max, stream_id, workers,
               fmt, tol, seed, spec_file, output):
    """Seeded inverse-transform draws."""
    st = _settings(ctx, fmt, tol, seed, spec_file)
    if count < 1:
        raise click.BadParameter("--count must be >= 1")
    dist = build_distribution(dist_name, lam, mu, beta, st["spec"])
    law: Distribution = dist
    try:
        stream = SeededStream(st["seed"], stream_id)
        if normalized is not None:
            nc = NormingConstants.identity(normalized) if raw_max else norming_constants(dist, normalized)
            law = NormalizedMax(dist, nc)
        xs = sample(law, stream, count, workers)
    except EvtInfoError as exc:
        raise click.UsageError(str(exc)) from None
    meta = metadata(stream, count)
    rows = [{"x": float(v)} for v in xs]
    if st["fmt"] == "json":
        text = render_json(rows, _meta("sample", st, law, monte_carlo=meta))
    else:
        text = render_csv(["x"], rows, {**meta, "distribution": law.name})
    _emit(text, output)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="evtinfo", standalone_mode=True)
    except SystemExit as exc:
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
