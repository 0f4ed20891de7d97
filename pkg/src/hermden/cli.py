"""Command line: densities, derivatives, correction coefficients and verification suites.

Exit codes: 0 success, 1 a verified identity failed, 2 parse or budget
error, 3 the target violates a precondition gate.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import click

from .cache import ResultCache, default_cache_path
from .closed import CONVENTIONS, derivative_at_one
from .engine import BETA_MODES, SOURCES, Engine, RepresentabilityError
from .field import FieldError, PrimeContext
from .lattice import AdmissibleFunction, HermMatrix, LatticeError, WeightVector, parse_matrix
from .oracle import DEFAULT_BUDGET, NORMALIZATIONS, BudgetExceeded, count_representations
from .suites import SUITES, jsonable, run_suite, suite_passed

EXIT_OK, EXIT_FAIL, EXIT_RESOURCE, EXIT_GATE = 0, 1, 2, 3


@dataclass
class RunConfig:
    p: int
    u: int
    budget: int
    convention: str
    fmt: str
    cache_path: str | None
    source: str
    beta_mode: str

    def context(self) -> PrimeContext:
        return PrimeContext(self.p, self.u)

    def engine(self) -> Engine:
        cache = ResultCache(self.cache_path) if self.cache_path else None
        return Engine(self.context(), budget=self.budget, convention=self.convention,
                      source=self.source, beta_mode=self.beta_mode, cache=cache)


class CommandError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


def _common(f):
    opts = [
        click.option("--p", "p", type=int, default=3, show_default=True, help="odd prime"),
        click.option("--u", "u", type=int, default=0, help="non-residue (default: least)"),
        click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True,
                     help="oracle work cap"),
        click.option("--convention", type=click.Choice(CONVENTIONS), default="column",
                     show_default=True),
        click.option("--format", "fmt", type=click.Choice(["pretty", "json", "csv"]),
                     default="pretty", show_default=True),
        click.option("--cache", "cache_path", type=click.Path(dir_okay=False), default=None,
                     help="cache file (default from $HERMDEN_CACHE)"),
        click.option("--no-cache", is_flag=True, help="ignore any cache file"),
        click.option("--source", type=click.Choice(SOURCES), default="auto", show_default=True),
        click.option("--beta-mode", type=click.Choice(BETA_MODES), default="pinned",
                     show_default=True),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def _config(kw) -> RunConfig:
    if kw["budget"] <= 0:
        raise CommandError(EXIT_RESOURCE, "config", "budget must be positive")
    path = None if kw.pop("no_cache") else (kw["cache_path"] or default_cache_path())
    return RunConfig(kw.pop("p"), kw.pop("u"), kw.pop("budget"), kw.pop("convention"),
                     kw.pop("fmt"), path, kw.pop("source"), kw.pop("beta_mode"))


def _parse_phi(text: str) -> AdmissibleFunction:
    """``WEIGHT:TYPE`` such as ``ZY:1``."""
    try:
        w, t = text.split(":")
        return AdmissibleFunction(WeightVector.parse(w), int(t))
    except (ValueError, LatticeError) as exc:
        raise CommandError(EXIT_RESOURCE, "parse", f"bad --phi {text!r}: {exc}") from exc


def _parse_T(text: str, ctx) -> HermMatrix:
    try:
        return parse_matrix(text, ctx)
    except (ValueError, LatticeError, FieldError) as exc:
        raise CommandError(EXIT_RESOURCE, "parse", f"bad matrix {text!r}: {exc}") from exc


def _emit(cfg: RunConfig, obj: dict, rows: list[dict] | None = None):
    obj = jsonable(obj)
    if cfg.fmt == "json":
        click.echo(json.dumps(obj, sort_keys=True))
    elif cfg.fmt == "csv":
        rows = jsonable(rows if rows is not None else [obj])
        keys = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: json.dumps(r[k], sort_keys=True) if isinstance(r.get(k), (dict, list))
                         else r.get(k, "") for k in keys})
        click.echo(buf.getvalue(), nl=False)
    else:
        for k in sorted(obj):
            click.echo(f"{k}: {obj[k]}")


def _run(cfg_kw, body):
    fmt = cfg_kw.get("fmt", "pretty")
    try:
        cfg = _config(cfg_kw)
        code = body(cfg)
    except CommandError as exc:
        _fail(fmt, exc.code, exc.kind, str(exc))
    except RepresentabilityError as exc:
        _fail(fmt, EXIT_GATE, "representability", str(exc))
    except BudgetExceeded as exc:
        _fail(fmt, EXIT_RESOURCE, "budget", str(exc))
    except (LatticeError, FieldError, ValueError) as exc:
        _fail(fmt, EXIT_RESOURCE, "input", str(exc))
    sys.exit(code or EXIT_OK)


def _fail(fmt, code, kind, message):
    if fmt == "json":
        click.echo(json.dumps({"error": {"kind": kind, "message": message, "exit": code}},
                              sort_keys=True))
    else:
        click.echo(f"error ({kind}): {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Exact local densities and the local Kudla-Rapoport identity."""


@main.command()
@click.option("--S", "S_text", default=None, help="Gram matrix of the representing lattice")
@click.option("--phi", "phi_text", default=None, help="admissible function WEIGHT:TYPE")
@click.option("--T", "T_text", required=True, help="target matrix, JSON with ϖ^k sugar")
@click.option("--r", type=int, default=0, show_default=True, help="hyperbolic planes")
@click.option("--normalization", type=click.Choice(NORMALIZATIONS), default="volume",
              show_default=True)
@_common
def alpha(S_text, phi_text, T_text, r, normalization, **kw):
    """Representation density ``alpha(S, T)`` or weighted density ``alpha_T(r, phi)``."""
    def body(cfg):
        ctx = cfg.context()
        T = _parse_T(T_text, ctx)
        if (S_text is None) == (phi_text is None):
            raise CommandError(EXIT_RESOURCE, "parse", "give exactly one of --S and --phi")
        if S_text is not None:
            S = _parse_T(S_text, ctx)
            if r:
                S = S.block_sum(HermMatrix.identity(ctx, 2 * r))
            res = count_representations(S, T, budget=cfg.budget)
            out = {"value": res.normalized, "provenance": "oracle", "precision": res.k,
                   "stabilized": res.stabilized}
        else:
            phi = _parse_phi(phi_text)
            eng = cfg.engine()
            value = eng.alpha(T, phi, r, normalization)
            out = {"value": value, "provenance": eng.density_poly(T, phi).provenance,
                   "normalization": normalization, "phi": phi.descriptor(), "r": r}
        _emit(cfg, out)
    _run(kw, body)


@main.command()
@click.option("--phi", "phi_text", required=True)
@click.option("--T", "T_text", required=True)
@click.option("--symbolic", is_flag=True, help="exact in q when the closed chain applies")
@_common
def dden(phi_text, T_text, symbolic, **kw):
    """Corrected central derivative divided by the level volume."""
    def body(cfg):
        eng = cfg.engine()
        res = eng.dden(_parse_T(T_text, eng.ctx), _parse_phi(phi_text), symbolic=symbolic)
        out = res.to_json()
        out["beta_mode"] = eng.beta_mode
        _emit(cfg, out)
    _run(kw, body)


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--h", type=int, required=True)
@click.option("--weight", default=None, help="weight string, default all Z")
@click.option("--symbolic", is_flag=True)
@click.option("--normalization", type=click.Choice(NORMALIZATIONS), default="rep",
              show_default=True, help="normalization shown as 'value'")
@_common
def beta(n, h, weight, symbolic, normalization, **kw):
    """Correction coefficients ``beta(t)`` for ``t < h``."""
    def body(cfg):
        eng = cfg.engine()
        tab = eng.beta_table(n, h, weight, symbolic=symbolic)
        out = {"n": n, "h": h, "weight": str(tab.weight), "mode": tab.mode,
               "value": {str(t): str(v) for t, v in tab.by_normalization[normalization].items()},
               "normalization": normalization,
               "by_normalization": {nm: {str(t): str(v) for t, v in d.items()}
                                    for nm, d in tab.by_normalization.items()},
               "back_substitution_ok": tab.back_substitution_ok(),
               "provenance": dict(sorted(tab.provenance.items()))}
        _emit(cfg, out)
    _run(kw, body)


@main.command()
@click.option("--phi", "phi_text", required=True)
@click.option("--T", "T_text", required=True)
@_common
def ftpoly(phi_text, T_text, **kw):
    """Density polynomial in ``X = (-q)^(-k)`` for ``k`` added unimodular columns."""
    def body(cfg):
        eng = cfg.engine()
        phi = _parse_phi(phi_text)
        F = eng.density_poly(_parse_T(T_text, eng.ctx), phi)
        out = {"coeffs": [str(c) for c in F.coeffs], "provenance": F.provenance,
               "stabilized": F.stabilized, "value_at_one": F.value_at_one(),
               "derivative": derivative_at_one(F, eng.convention),
               "convention": eng.convention, "phi": phi.descriptor()}
        _emit(cfg, out)
    _run(kw, body)


@main.command()
@click.argument("suite", type=click.Choice(SUITES))
@click.option("--lam-max", type=int, default=None, help="valuation range for rank-one suites")
@_common
def verify(suite, lam_max, **kw):
    """Run a verification suite; exit 1 if any check fails."""
    def body(cfg):
        recs = run_suite(suite, cfg.context(), lam_max=lam_max, engine=cfg.engine())
        ok = suite_passed(recs)
        if cfg.fmt == "json":
            for r in recs:
                click.echo(json.dumps(jsonable(r), sort_keys=True))
            click.echo(json.dumps({"suite": suite, "passed": ok, "checks": len(recs)},
                                  sort_keys=True))
        elif cfg.fmt == "csv":
            _emit(cfg, {}, recs)
        else:
            counts = {}
            for r in recs:
                counts[r["status"]] = counts.get(r["status"], 0) + 1
                if r["status"] == "fail":
                    click.echo(f"FAIL {json.dumps(jsonable(r), sort_keys=True)}")
            click.echo(f"{suite}: {'pass' if ok else 'fail'} "
                       + " ".join(f"{k}={v}" for k, v in sorted(counts.items())))
        return EXIT_OK if ok else EXIT_FAIL
    _run(kw, body)


if __name__ == "__main__":
    main()
