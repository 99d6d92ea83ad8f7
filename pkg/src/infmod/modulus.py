"""Admissible densities, the supremum- and infinity-modulus of finite curve
families, exceptional families and essential length.

Null sets are atomic: a set of points is null when every point has weight
zero.  Unless ``canonical=False`` is passed, the set of all weight-zero
points is always among the null sets considered; since it contains every
other null set it decides exceptionality on its own, and user certificates
only change which witness gets reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import lp
from .curves import DEFAULT_MAX_SEGMENTS, DEFAULT_TOL, Curve, compute_length, is_subcurve, \
    line_integral, occupation
from .errors import ConsistencyError, NonRectifiableError
from .space import Density, NullSetCertificate, Space, ess_sup, null_mask

INF = math.inf

# A curve has positive length in F when its arc length in F exceeds this
# fraction of its total length.
COVER_TOL = 1e-12
LP_CURVE_LIMIT = 64
LP_RTOL = 1e-6


def reciprocal(x: float) -> float:
    """1/x with 1/0 = inf and 1/inf = 0."""
    if x == 0:
        return INF
    if x == INF:
        return 0.0
    return 1.0 / x


class CurveFamily:
    """A finite family of curves on one space.

    Curves whose length refinement does not settle are kept apart as
    non-rectifiable and never enter length-based computations.
    """

    def __init__(self, space: Space, curves: Iterable[Curve] = (), name: str = "",
                 tol: float = DEFAULT_TOL, max_segments: int = DEFAULT_MAX_SEGMENTS):
        self.space = space
        self.name = name
        self.tol = tol
        seen = set()
        rect, lengths, nonrect = [], [], []
        for c in curves:
            if c in seen:
                continue
            seen.add(c)
            if c.space is not space:
                raise ValueError(f"{c!r} does not live on this family's space")
            try:
                length, _ = compute_length(c, tol, max_segments)
            except NonRectifiableError:
                nonrect.append(c)
                continue
            rect.append(c)
            lengths.append(length)
        self.rectifiable = tuple(rect)
        self.lengths = np.array(lengths, dtype=float)
        self.nonrectifiable = tuple(nonrect)

    @property
    def curves(self) -> tuple:
        return self.rectifiable + self.nonrectifiable

    def __len__(self):
        return len(self.rectifiable) + len(self.nonrectifiable)

    def __iter__(self):
        return iter(self.curves)

    def __contains__(self, c):
        return c in set(self.curves)

    def __repr__(self):
        return f"CurveFamily({self.name!r}, {len(self)} curves)"

    def _derive(self, curves, name):
        fam = CurveFamily.__new__(CurveFamily)
        fam.space, fam.name, fam.tol = self.space, name, self.tol
        keep = set(curves)
        idx = [i for i, c in enumerate(self.rectifiable) if c in keep]
        fam.rectifiable = tuple(self.rectifiable[i] for i in idx)
        fam.lengths = self.lengths[idx]
        fam.nonrectifiable = tuple(c for c in self.nonrectifiable if c in keep)
        return fam

    def subfamily(self, curves, name=None) -> "CurveFamily":
        return self._derive(curves, name or f"{self.name}'")

    def shorter_than(self, a: float) -> "CurveFamily":
        """The subfamily of rectifiable curves with length strictly below ``a``."""
        return self._derive([c for c, L in zip(self.rectifiable, self.lengths) if L < a],
                            f"{self.name}({a:g})")

    def union(self, other: "CurveFamily", name=None) -> "CurveFamily":
        if other.space is not self.space:
            raise ValueError("families live on different spaces")
        return CurveFamily(self.space, self.curves + other.curves,
                           name or f"{self.name}+{other.name}", self.tol)

    def issubset(self, other: "CurveFamily") -> bool:
        return set(self.curves) <= set(other.curves)

    def occupation_matrix(self) -> np.ndarray:
        """Rows: arc length each rectifiable curve spends in each point's cell."""
        n = len(self.space)
        if not self.rectifiable:
            return np.zeros((0, n))
        return np.array([occupation(c, self.tol).length for c in self.rectifiable])

    def covered(self, mask: np.ndarray) -> np.ndarray:
        """Per rectifiable curve: has positive length in the points of ``mask``."""
        if not self.rectifiable:
            return np.zeros(0, dtype=bool)
        occ = self.occupation_matrix()
        return occ[:, mask].sum(axis=1) > COVER_TOL * self.lengths


@dataclass
class ModulusResult:
    value: float
    method: str
    extremal_density: Density | None = None
    certificate: NullSetCertificate | None = None
    lp_value: float | None = None
    exceptional: tuple = field(default=())


def _as_certs(certs) -> list:
    if certs is None:
        return []
    if isinstance(certs, NullSetCertificate):
        return [certs]
    return list(certs)


def _mask_cert(space, mask) -> NullSetCertificate:
    return NullSetCertificate((space.points[i] for i in np.nonzero(mask)[0]), space)


def is_admissible(rho: Density, fam: CurveFamily, tol: float = 1e-9) -> bool:
    """Whether every curve of ``fam`` has ``rho``-length at least ``1 - tol``.

    Non-rectifiable members count as satisfied only when ``rho`` is bounded
    below by a positive constant.
    """
    if rho.space is not fam.space:
        raise ValueError("density and family live on different spaces")
    if fam.nonrectifiable and not rho.values.min() > 0:
        return False
    return all(line_integral(c, rho, fam.tol) >= 1 - tol for c in fam.rectifiable)


def inf_length(fam: CurveFamily) -> float:
    """Shortest length among the rectifiable members (+inf if there are none)."""
    return float(fam.lengths.min()) if len(fam.lengths) else INF


def mod_sup(fam: CurveFamily) -> ModulusResult:
    """Supremum-modulus: the reciprocal of the shortest length."""
    ell = inf_length(fam)
    value = reciprocal(ell)
    rho = Density.constant(fam.space, value) if 0 < ell < INF else None
    if ell == INF:
        rho = Density.constant(fam.space, 0.0) if not fam.nonrectifiable else None
    return ModulusResult(value, "formula", rho)


def _minimax_lp(fam: CurveFamily, bounded: np.ndarray) -> tuple[float, np.ndarray]:
    """min t  s.t.  occupation @ rho >= 1,  rho_v <= t on ``bounded`` points."""
    n = len(fam.space)
    C = fam.occupation_matrix()
    m = C.shape[0]
    if m == 0:
        return 0.0, np.zeros(n)
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    A_ge = np.hstack([C, np.zeros((m, 1))])
    idx = np.nonzero(bounded)[0]
    A_ub = np.zeros((len(idx), n + 1))
    A_ub[np.arange(len(idx)), idx] = 1.0
    A_ub[:, -1] = -1.0
    try:
        res = lp.solve(cost, A_ub, np.zeros(len(idx)), A_ge, np.ones(m))
    except lp.LPError as exc:
        raise ConsistencyError(f"minimax LP failed on a finite family: {exc}") from exc
    return res.value, res.x[:n]


def mod_sup_lp(fam: CurveFamily) -> ModulusResult:
    """Supremum-modulus by the minimax LP over all point densities."""
    if fam.nonrectifiable and not fam.rectifiable:
        return ModulusResult(0.0, "minimax-lp")
    value, rho = _minimax_lp(fam, np.ones(len(fam.space), dtype=bool))
    return ModulusResult(value, "minimax-lp", Density(fam.space, np.maximum(rho, 0.0)))


def mod_infinity_star(fam: CurveFamily, certs=(), canonical: bool = True) -> ModulusResult:
    """Infimum of the essential supremum over (strongly) admissible densities.

    Solved as an LP in which densities are free on null points and bounded
    by the objective elsewhere; no exceptionality logic is involved.
    """
    mask = null_mask(fam.space, _as_certs(certs), canonical)
    value, rho = _minimax_lp(fam, ~mask)
    return ModulusResult(value, "minimax-lp", Density(fam.space, np.maximum(rho, 0.0)))


def is_exceptional(fam: CurveFamily, certs=(), canonical: bool = True):
    """Decide exceptionality from null-set certificates.

    Returns ``(flag, witness)``.  Empty families and families with no
    rectifiable member are exceptional with an empty witness.  A single
    supplied certificate that every curve has positive length in is
    preferred as the witness; otherwise the union of all null sets is used.
    """
    certs = _as_certs(certs)
    sp = fam.space
    mask = null_mask(sp, certs, canonical)
    if not fam.rectifiable:
        return True, NullSetCertificate((), sp)
    for cert in certs:
        single = null_mask(sp, [cert], canonical=False)
        if fam.covered(single).all():
            return True, cert
    if fam.covered(mask).all():
        return True, _mask_cert(sp, mask)
    return False, None


def _ess(fam: CurveFamily, certs, canonical):
    """Essential length by scanning the families {length <= L} over sorted lengths."""
    for L in np.unique(fam.lengths):
        prefix = fam._derive([c for c, l in zip(fam.rectifiable, fam.lengths) if l <= L], "")
        exc, _ = is_exceptional(prefix, certs, canonical)
        if not exc:
            _, witness = is_exceptional(fam.shorter_than(L), certs, canonical)
            return float(L), witness
    _, witness = is_exceptional(fam, certs, canonical)
    return INF, witness


def ess_length(fam: CurveFamily, certs=(), canonical: bool = True) -> float:
    """Essential length: sup of ``a`` such that the curves shorter than ``a``
    form an exceptional family."""
    return _ess(fam, _as_certs(certs), canonical)[0]


def mod_infinity(fam: CurveFamily, certs=(), canonical: bool = True,
                 lp_check: bool = True) -> ModulusResult:
    """Infinity-modulus as the reciprocal of the essential length.

    The extremal density is the constant ``1/essl`` (zero when the whole
    family is exceptional), weakly admissible up to the returned exceptional
    subfamily.  Families of at most ``LP_CURVE_LIMIT`` rectifiable curves are
    cross-checked against ``mod_infinity_star``.
    """
    certs = _as_certs(certs)
    essl, witness = _ess(fam, certs, canonical)
    value = reciprocal(essl)
    sp = fam.space
    if essl == INF:
        rho = Density.constant(sp, 0.0)
        exceptional = fam.curves
    elif essl > 0:
        rho = Density.constant(sp, value)
        exceptional = fam.shorter_than(essl).curves + fam.nonrectifiable
    else:
        rho, exceptional = None, fam.nonrectifiable
    res = ModulusResult(value, "formula", rho, witness, exceptional=exceptional)
    if lp_check and len(fam.rectifiable) <= LP_CURVE_LIMIT:
        star = mod_infinity_star(fam, certs, canonical)
        res.lp_value = star.value
        if abs(star.value - value) > LP_RTOL * max(1.0, value):
            raise ConsistencyError(
                f"essential-length formula gives {value!r} but the LP gives {star.value!r}")
    return res


# exceptional families and the density sequence k * 1_F ----------------------

def exceptional_density_sequence(fam: CurveFamily, cert: NullSetCertificate, k: int):
    """``(k * 1_F, Gamma_k)``: the density and the subfamily of curves with at
    least ``1/k`` of their length in ``F``, for which it is admissible."""
    rho = Density.indicator(fam.space, cert.point_ids, scale=float(k))
    mask = null_mask(fam.space, [cert], canonical=False)
    occ = fam.occupation_matrix()
    in_f = occ[:, mask].sum(axis=1) if len(occ) else np.zeros(0)
    members = [c for c, m in zip(fam.rectifiable, in_f) if m >= 1.0 / k]
    return rho, fam.subfamily(members, f"{fam.name}_{k}")


def null_admissible_density(fam: CurveFamily, cert: NullSetCertificate) -> Density:
    """A density supported on ``cert`` that is admissible for ``fam``.

    Exists whenever every curve has positive length in ``cert``; its
    essential supremum is zero.
    """
    mask = null_mask(fam.space, [cert], canonical=False)
    occ = fam.occupation_matrix()
    in_f = occ[:, mask].sum(axis=1)
    if len(in_f) and not np.all(in_f > 0):
        raise ValueError("some curve has no length in the certificate")
    scale = 1.0 / in_f.min() if len(in_f) else 0.0
    return Density.indicator(fam.space, cert.point_ids, scale=scale)


# modulus laws ----------------------------------------------------------------

@dataclass
class LawReport:
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_modulus_laws(fams: Sequence[CurveFamily], certs=(), chains=(),
                       canonical: bool = True, tol: float = LP_RTOL) -> LawReport:
    """Check monotonicity, subadditivity, continuity from below and the
    shorter-walks property on the given families.

    Every ordered pair is checked for inclusion (monotone), subcurve
    domination (shorter walks) and its union (subadditive).  Each entry of
    ``chains`` is an increasing sequence of nested families.
    """
    certs = _as_certs(certs)
    report = LawReport()
    cache = {}

    def mod(f):
        key = frozenset(f.curves)
        if key not in cache:
            cache[key] = mod_infinity(f, certs, canonical).value
        return cache[key]

    def le(a, b):
        return a <= b + tol * max(1.0, abs(b)) if b != INF else True

    for f in fams:
        report.checks += 1
        ms = mod_sup(f).value
        if not le(mod(f), ms):
            report.violations.append(f"Mod_inf({f.name})={mod(f)} > Mod_sup={ms}")
    for i, f in enumerate(fams):
        for j, g in enumerate(fams):
            if i == j:
                continue
            if f.issubset(g):
                report.checks += 1
                if not le(mod(f), mod(g)):
                    report.violations.append(
                        f"monotone: {f.name} in {g.name} but {mod(f)} > {mod(g)}")
            if f.rectifiable and all(any(is_subcurve(s, c) for s in g.rectifiable)
                                     for c in f.rectifiable):
                report.checks += 1
                if not le(mod(f), mod(g)):
                    report.violations.append(
                        f"shorter walks: {g.name} below {f.name} but {mod(f)} > {mod(g)}")
            if i < j:
                report.checks += 1
                u = f.union(g)
                if not le(mod(u), mod(f) + mod(g)):
                    report.violations.append(
                        f"subadditive: {f.name}+{g.name} gives {mod(u)} > {mod(f)} + {mod(g)}")
    for chain in chains:
        chain = list(chain)
        for a, b in zip(chain, chain[1:]):
            if not a.issubset(b):
                raise ValueError(f"chain is not nested at {a.name} / {b.name}")
        values = [mod(f) for f in chain]
        report.checks += 1
        if any(not le(x, y) for x, y in zip(values, values[1:])):
            report.violations.append(f"continuity from below: not nondecreasing {values}")
        union = chain[0]
        for f in chain[1:]:
            union = union.union(f)
        report.checks += 1
        if abs(values[-1] - mod(union)) > tol * max(1.0, mod(union)):
            report.violations.append(
                f"continuity from below: last {values[-1]} != union {mod(union)}")
    return report


__all__ = [
    "CurveFamily", "ModulusResult", "LawReport", "reciprocal", "is_admissible", "inf_length",
    "mod_sup", "mod_sup_lp", "mod_infinity", "mod_infinity_star", "is_exceptional",
    "ess_length", "check_modulus_laws", "exceptional_density_sequence",
    "null_admissible_density", "ess_sup",
]
