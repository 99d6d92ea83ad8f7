"""Built-in verification suite run by ``infmod verify``.

Each check returns a ``Check``; the suite passes when every check does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .curves import Curve, compute_length, line_integral, positive_length_in, positive_time_in
from .essential import check_metric_axioms, connecting_family, d_hat, simple_paths
from .instances import cantor_staircase, complement, dyadic_level_region, random_graph
from .io import load_curves, load_nullsets, load_space
from .modulus import CurveFamily, check_modulus_laws, mod_infinity, mod_sup, mod_sup_lp
from .space import NullSetCertificate


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


def fixture(name):
    return resources.files("infmod") / "fixtures" / name


def check_cantor(level=12):
    c = cantor_staircase(level)
    L, _ = compute_length(c)
    E = dyadic_level_region(level)
    F = complement(E)
    on_e = line_integral(c, lambda p: E(p).astype(float))
    out = [
        Check(f"cantor level {level} length in [sqrt2, 2]",
              math.sqrt(2) - 1e-9 <= L <= 2, f"length={L!r}"),
        Check(f"cantor level {level} length along E near 1", abs(on_e - 1) <= 2e-2,
              f"integral={on_e!r}"),
        Check(f"cantor level {level} positive length but no positive time in F",
              positive_length_in(c, F, 1e-2) and not positive_time_in(c, F, 1e-2)),
    ]
    return out


def check_graph_duality(n_random=10, seed=7):
    out = []
    sp = load_space(fixture("path_graph.json"))
    v = mod_infinity(connecting_family(sp, "a", "c")).value
    out.append(Check("path graph a-b-c Mod_inf = 1/2", abs(v - 0.5) <= 1e-12, f"value={v!r}"))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_random):
        g = random_graph(rng, int(rng.integers(3, 7)))
        x, y = g.points[0], g.points[-1]
        fam = connecting_family(g, x, y)
        worst = max(worst, abs(mod_infinity(fam).value - 1 / g.distance(x, y)))
    out.append(Check(f"graph duality on {n_random} random graphs", worst <= 1e-6,
                     f"max error={worst:.3g}"))
    return out


def check_laws(seed=11, rounds=20):
    rng = np.random.default_rng(seed)
    total = 0
    bad = []
    for _ in range(rounds):
        g = random_graph(rng, int(rng.integers(4, 7)), null_prob=0.2)
        fams = []
        for _ in range(3):
            x, y = rng.choice(len(g), 2, replace=False)
            paths = simple_paths(g, g.points[x], g.points[y])
            if not paths:
                continue
            k = int(rng.integers(1, len(paths) + 1))
            pick = rng.choice(len(paths), k, replace=False)
            fams.append(CurveFamily(g, [Curve.from_path(g, paths[i]) for i in pick],
                                    f"F{len(fams)}"))
        rep = check_modulus_laws(fams, chains=[fams[:1]] if fams else ())
        total += rep.checks
        bad += rep.violations
    return [Check(f"modulus laws ({total} checks)", not bad, "; ".join(bad[:3]))]


def check_modsup(seed=5, rounds=10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(rounds):
        g = random_graph(rng, int(rng.integers(3, 7)))
        fam = connecting_family(g, g.points[0], g.points[-1])
        f, l = mod_sup(fam).value, mod_sup_lp(fam).value
        worst = max(worst, abs(f - l) / max(1.0, f))
    return [Check("Mod_sup formula vs LP", worst <= 1e-6, f"max rel error={worst:.3g}")]


def check_metrics():
    out = []
    cases = []
    sp = load_space(fixture("path_graph.json"))
    cases.append(("path graph", sp, [], None))
    sq = load_space(fixture("four_cycle.json"))
    cases.append(("four-cycle", sq, [], None))
    tr = load_space(fixture("two_route.json"))
    curves = load_curves(fixture("two_route_curves.json"), tr)
    certs = load_nullsets(fixture("two_route_nullsets.json"), tr)
    cases.append(("two-route", tr, certs, curves))
    for name, space, cs, cv in cases:
        rep = check_metric_axioms(space, cs, curves=cv)
        out.append(Check(f"metric axioms: {name}", rep.ok, "; ".join(rep.violations[:3])))
    r = d_hat(tr, "x", "y", certs, curves=curves)
    out.append(Check("two-route d_hat = d_ess = 3 > d = 1",
                     r.d_hat == r.d_ess and abs(r.d_ess - 3) <= 1e-9 and r.d == 1.0,
                     f"d={r.d!r} d_ess={r.d_ess!r} d_hat={r.d_hat!r}"))
    fam = connecting_family(tr, "x", "y", curves=curves)
    v = mod_infinity(fam, certs).value
    out.append(Check("two-route Mod_inf = 1/3", abs(v - 1 / 3) <= 1e-9, f"value={v!r}"))
    every = NullSetCertificate(tr.null_points(), tr)
    short = fam.shorter_than(2.0)
    out.append(Check("null strip makes the short route exceptional",
                     mod_infinity(short, [every]).value == 0.0))
    return out


def run_all():
    checks = []
    for fn in (check_cantor, check_graph_duality, check_modsup, check_laws, check_metrics):
        checks += fn()
    return checks
