"""Command-line front end.

Exit status: 0 success, 1 verification failures, 2 unreadable or invalid
input, 3 internal consistency error, 4 refinement cap reached.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .curves import DEFAULT_TOL, compute_length
from .errors import ConsistencyError, NonRectifiableError, SchemaError
from .essential import check_metric_axioms, essential_matrix
from .io import Report, columns, load_curves, load_nullsets, load_space
from .modulus import CurveFamily, ess_length, is_exceptional, mod_infinity, mod_sup
from .verify import Check, run_all

COMMANDS = ("length", "modsup", "modinf", "essl", "essmetric", "verify")


@dataclass
class RunConfig:
    command: str
    space: Path | None = None
    curves: Path | None = None
    nullsets: Path | None = None
    tol: float = DEFAULT_TOL
    max_hops: int | None = None
    out: Path | None = None
    format: str = "text"
    plot: Path | None = None
    profile: bool = False


def build_parser():
    p = argparse.ArgumentParser(prog="infmod", description=(
        "Curve lengths, infinity-modulus, essential length and the essential "
        "metric on finite metric measure spaces."))
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--space", type=Path, help="space file")
    p.add_argument("--curves", type=Path, help="curve-family file")
    p.add_argument("--nullsets", type=Path, help="null-set certificate file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                   help="relative tolerance of length refinement (default %(default)g)")
    p.add_argument("--max-hops", type=int, default=None,
                   help="longest simple path enumerated on graph spaces")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--plot", type=Path,
                   help="write refinement level vs length estimate as column text")
    p.add_argument("--profile", action="store_true",
                   help="include the sampled length function in 'length' output")
    return p


def _inputs(cfg: RunConfig, need_space=True, need_curves=True):
    space = load_space(cfg.space) if cfg.space else None
    if need_space and space is None:
        raise SchemaError("--space", f"'{cfg.command}' needs a space file")
    curves = load_curves(cfg.curves, space) if cfg.curves else None
    if need_curves and curves is None:
        raise SchemaError("--curves", f"'{cfg.command}' needs a curve file")
    certs = load_nullsets(cfg.nullsets, space) if cfg.nullsets else []
    return space, curves, certs


def _modulus_items(rep, res):
    rep.add("value", res.value)
    rep.add("method", res.method)
    if res.lp_value is not None:
        rep.add("lp_value", res.lp_value)
    rep.add("extremal_density", res.extremal_density)
    rep.add("certificate", res.certificate)


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one command; returns the exit status."""
    stdout = stdout or sys.stdout
    if not cfg.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    rep = Report()
    status = 0
    plot = None
    try:
        if cfg.command == "length":
            space, curves, _ = _inputs(cfg, need_space=False)
            rows = []
            for i, c in enumerate(curves):
                L, prof = compute_length(c, cfg.tol)
                rep.add(f"curve.{i}.length", L)
                rep.add(f"curve.{i}.segments", len(prof.breakpoints) - 1)
                rep.add(f"curve.{i}.refinements", len(prof.history) - 1)
                if cfg.profile:
                    rep.add(f"curve.{i}.breakpoints", list(prof.breakpoints))
                    rep.add(f"curve.{i}.cumulative", list(prof.cumulative))
                rows += [(i, lvl, est) for lvl, est in enumerate(prof.history)]
            plot = columns(("curve", "level", "length_estimate"), rows)
        elif cfg.command in ("modsup", "modinf", "essl"):
            space, curves, certs = _inputs(cfg)
            fam = CurveFamily(space, curves, cfg.curves.stem, cfg.tol)
            rep.add("family", fam.name)
            rep.add("curves", len(fam.rectifiable))
            rep.add("nonrectifiable", len(fam.nonrectifiable))
            if cfg.command == "modsup":
                _modulus_items(rep, mod_sup(fam))
            elif cfg.command == "modinf":
                _modulus_items(rep, mod_infinity(fam, certs))
            else:
                exc, witness = is_exceptional(fam, certs)
                rep.add("ess_length", ess_length(fam, certs))
                rep.add("exceptional", exc)
                rep.add("certificate", witness)
        elif cfg.command == "essmetric":
            space, curves, certs = _inputs(cfg, need_curves=False)
            results = essential_matrix(space, certs, cfg.max_hops, curves)
            for (x, y), r in results.items():
                if x >= y:
                    continue
                key = f"pair.{x}.{y}"
                rep.add(f"{key}.d", r.d)
                rep.add(f"{key}.d_ess", r.d_ess)
                rep.add(f"{key}.d_hat", r.d_hat)
                rep.add(f"{key}.null_set", r.witnessing_null_set)
                rep.add(f"{key}.curve", r.witnessing_curve)
        elif cfg.command == "verify":
            checks = run_all()
            if cfg.space:
                space, curves, certs = _inputs(cfg, need_curves=False)
                mr = check_metric_axioms(space, certs, cfg.max_hops, curves)
                checks.append(Check(f"metric axioms: {cfg.space.name}", mr.ok,
                                    "; ".join(mr.violations[:3])))
            for i, c in enumerate(checks):
                verdict = "PASS" if c.ok else "FAIL"
                if cfg.format == "structured":
                    rep.add(f"check.{i:02d}.status", verdict)
                    rep.add(f"check.{i:02d}.name", c.name)
                    rep.add(f"check.{i:02d}.detail", c.detail or "-")
                else:
                    rep.add(f"{verdict} {c.name}", c.detail or "-")
            failed = sum(not c.ok for c in checks)
            rep.add("failed", failed)
            status = 1 if failed else 0
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"consistency error: {exc}", file=sys.stderr)
        return 3
    except NonRectifiableError as exc:
        print(f"error: {exc} (lower bound {exc.lower_bound!r})", file=sys.stderr)
        return 4

    text = rep.render(cfg.format)
    if cfg.out:
        cfg.out.write_text(text)
    else:
        stdout.write(text)
    if cfg.plot and plot is not None:
        cfg.plot.write_text(plot)
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, args.space, args.curves, args.nullsets, args.tol,
                    args.max_hops, args.out, args.format, args.plot, args.profile)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
