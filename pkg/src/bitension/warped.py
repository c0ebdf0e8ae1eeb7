"""Rotationally symmetric maps ``(x, t) -> alpha(t) x`` from ``S^m x R`` into ``R^{m+1}``,
and totally geodesic slices of charts.

For these maps ``tau = (alpha'' - m alpha) x`` and
``tau_2 = (alpha'''' - 2 m alpha'' + m^2 alpha) x``.  The biharmonic profiles
are exactly ``alpha = c1 e^{kt} + c2 t e^{kt} + c3 e^{-kt} + c4 t e^{-kt}``
with ``k = sqrt(m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import jets
from .errors import (BadDimension, BadOrder, BadParams, ChartEscape, PropertyViolated,
                     SliceOutsideChart)
from .fields import GridMap, Lattice, sup_norm
from .geometry import (ChartGeometry, MetricChart, chart_catalog, euclidean, sphere_polar,
                       sphere_polar_embedding)

SCAN_POINTS = 10_000
ROOT_TOL = 1e-12
DEGENERATE = 1e-10


@dataclass(frozen=True)
class ProfileAlpha:
    m: int
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise BadParams(f"m must be a positive integer, got {self.m!r}")

    @property
    def k(self) -> float:
        return math.sqrt(self.m)

    @property
    def coeffs(self):
        return (self.c1, self.c2, self.c3, self.c4)

    @property
    def harmonic(self) -> bool:
        return self.c2 == 0 and self.c4 == 0

    def jet(self, t):
        """``alpha(t)`` for floats, arrays or jets."""
        k = self.k
        ep, em = jets.exp(k * t), jets.exp(-k * t)
        return self.c1 * ep + self.c2 * t * ep + self.c3 * em + self.c4 * t * em


def _kpow(m: int, k: float, p: int, sign: float):
    # (sign * k)^p using k^2 = m exactly
    if p < 0:
        return 0.0
    return (sign ** p) * float(m) ** (p // 2) * (k if p % 2 else 1.0)


def _basis(p: ProfileAlpha, t, order: int):
    """Order-``order`` derivatives of the four basis functions at ``t``."""
    t = np.asarray(t, dtype=float)
    m, k = p.m, p.k
    ep, em = np.exp(k * t), np.exp(-k * t)
    out = []
    for sign, e in ((1.0, ep), (-1.0, em)):
        out.append(_kpow(m, k, order, sign) * e)
        out.append((_kpow(m, k, order, sign) * t + order * _kpow(m, k, order - 1, sign)) * e)
    return out[0], out[1], out[2], out[3]


def alpha_eval(p: ProfileAlpha, t, order: int = 0):
    if order not in (0, 1, 2, 3, 4):
        raise BadOrder(f"order must be in 0..4, got {order!r}")
    b = _basis(p, t, order)
    return p.c1 * b[0] + p.c2 * b[1] + p.c3 * b[2] + p.c4 * b[3]


def tension_profile(p: ProfileAlpha, t):
    """``alpha'' - m alpha``, assembled per basis function."""
    b2, b0 = _basis(p, t, 2), _basis(p, t, 0)
    return sum(c * (d2 - p.m * d0) for c, d2, d0 in zip(p.coeffs, b2, b0))


def bitension_profile(p: ProfileAlpha, t):
    m = p.m
    return generic_bitension(lambda order: alpha_eval(p, t, order), m)


def generic_bitension(derivative, m: float):
    """``f'''' - 2 m f'' + m^2 f`` from a callable ``derivative(order)``."""
    return derivative(4) - 2.0 * m * derivative(2) + m * m * derivative(0)


def generic_tension(derivative, m: float):
    return derivative(2) - m * derivative(0)


@dataclass(frozen=True)
class ExtremumRecord:
    t0: float
    value: float
    kind: str
    second_derivative: float

    def to_json(self) -> dict:
        return {"t0": self.t0, "value": self.value, "kind": self.kind,
                "second_derivative": self.second_derivative}


def _classify(a2: float) -> str:
    if a2 > DEGENERATE:
        return "min"
    if a2 < -DEGENERATE:
        return "max"
    return "degenerate"


def extrema(p: ProfileAlpha, interval) -> list[ExtremumRecord]:
    """Critical points of ``alpha`` on ``interval``: sign changes of ``alpha'`` on a
    10^4-point scan, refined with Brent's method to 1e-12."""
    lo, hi = float(interval[0]), float(interval[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise BadParams(f"need a finite interval, got {interval!r}")
    ts = np.linspace(lo, hi, SCAN_POINTS)
    d = alpha_eval(p, ts, 1)
    f = lambda t: float(alpha_eval(p, t, 1))  # noqa: E731
    roots = []
    for i in range(SCAN_POINTS):
        if d[i] == 0.0:
            roots.append(float(ts[i]))
        elif i + 1 < SCAN_POINTS and d[i] * d[i + 1] < 0:
            roots.append(brentq(f, ts[i], ts[i + 1], xtol=ROOT_TOL, rtol=4 * np.finfo(float).eps,
                                maxiter=200))
    out = []
    for t0 in roots:
        a2 = float(alpha_eval(p, t0, 2))
        out.append(ExtremumRecord(t0, float(alpha_eval(p, t0, 0)), _classify(a2), a2))
    return out


def harmonic_extremum_property(p: ProfileAlpha, interval) -> dict:
    """Every extremum of a harmonic profile with positive value is a minimum."""
    if not p.harmonic:
        raise BadParams("profile is not in the harmonic subfamily (c2 = c4 = 0)")
    found = extrema(p, interval)
    for r in found:
        if r.value > 0 and r.kind != "min":
            raise PropertyViolated(f"positive extremum at t0={r.t0} is a {r.kind}")
    return {"extrema": [r.to_json() for r in found], "passed": True}


def concave_side_certificate(m: int, t_max: float | None = None) -> dict:
    """For ``alpha = t e^{-sqrt(m) t}``: the largest radius reached over ``t > 0``
    against ``1 / (sqrt(m) e)``, plus the location of the maximum."""
    p = ProfileAlpha(m, c4=1.0)
    t_max = 10.0 / p.k if t_max is None else t_max
    recs = [r for r in extrema(p, (0.0, t_max)) if r.kind == "max"]
    # a plain scan only resolves the peak to O(spacing^2); the refined critical
    # points are folded in so the maximum is exact to root tolerance
    ts = np.linspace(0.0, t_max, 1000)
    scan_max = max([float(np.max(alpha_eval(p, ts, 0)))] + [r.value for r in recs])
    radius = 1.0 / (p.k * math.e)
    best = max(recs, key=lambda r: r.value) if recs else None
    return {"m": m, "radius": radius, "scan_max": scan_max,
            "t0": best.t0 if best else None, "value": best.value if best else None}


# -- grid embedding --------------------------------------------------------

def source_chart(m: int) -> MetricChart:
    if m not in (1, 2):
        raise BadDimension(f"grid embedding supports m in {{1, 2}}, got {m}")
    return chart_catalog(f"product(sphere-polar:{m}, euclidean:1)")


def profile_lattice(m: int, n_sphere: int, t_range, n_t: int, s_range=(0.5, math.pi - 0.5),
                    n_s: int | None = None) -> Lattice:
    """Lattice over ``S^m x R``: periodic azimuth, interior polar angle (m=2), t axis."""
    if m == 1:
        return Lattice.over([(0.0, 2 * math.pi), t_range], [n_sphere, n_t], [True, False])
    if m == 2:
        return Lattice.over([(0.0, 2 * math.pi), s_range, t_range],
                            [n_sphere, n_s or n_sphere, n_t], [True, False, False])
    raise BadDimension(f"grid embedding supports m in {{1, 2}}, got {m}")


def embed_on_grid(p: ProfileAlpha, lattice: Lattice) -> GridMap:
    m = p.m
    src = source_chart(m)
    if lattice.m != m + 1:
        raise BadDimension(f"lattice has dimension {lattice.m}, need {m + 1}")
    emb = sphere_polar_embedding(m)

    def func(y):
        a = p.jet(y[m])
        return [a * x for x in emb(y[:m])]
    return GridMap.from_function(src, euclidean(m + 1), lattice, func)


def unit_vector_field(phi: GridMap):
    """The point ``x`` of ``S^m`` at every node of a profile lattice."""
    m = phi.m - 1
    coords = phi.lattice.coords()
    return np.stack(sphere_polar_embedding(m)([coords[..., i] for i in range(m)]), axis=-1)


def expected_fields(p: ProfileAlpha, phi: GridMap):
    """Closed-form ``tau`` and ``tau_2`` on a profile lattice."""
    x = unit_vector_field(phi)
    t = phi.lattice.coords()[..., -1]
    return (tension_profile(p, t)[..., None] * x, bitension_profile(p, t)[..., None] * x)


# -- totally geodesic slices -----------------------------------------------

def totally_geodesic_conditions(chart: MetricChart, normal, samples, slice_values=None) -> dict:
    """Normal Christoffel components and their tangential derivatives on a slice.

    ``normal`` holds 0-based coordinate indices; the slice fixes those
    coordinates to ``slice_values`` (default zero).  Returns the max over
    samples of ``|Gamma^t_ab|``, ``|d_c Gamma^t_ab|``, ``|d_c d_d Gamma^t_ab|`` for
    normal ``t`` and tangential ``a, b, c, d``.
    """
    normal = sorted({int(i) for i in normal})
    n = chart.dim
    if not normal or any(i < 0 or i >= n for i in normal):
        raise BadParams(f"bad normal index set {normal} for dimension {n}")
    tang = [i for i in range(n) if i not in normal]
    y = np.atleast_2d(np.asarray(samples, dtype=float))
    vals = np.zeros(len(normal)) if slice_values is None else np.asarray(slice_values, float)
    if y.shape[-1] != n or not np.all(chart.contains(y)):
        raise SliceOutsideChart("sample points are not inside the chart")
    if np.max(np.abs(y[:, normal] - vals), initial=0.0) > 1e-12:
        raise SliceOutsideChart("sample points are not on the slice")
    geo = ChartGeometry.at(chart, y)
    ix = np.ix_
    G = geo.gamma[(slice(None),) + ix(normal, tang, tang)] if tang else np.zeros(1)
    dG = geo.dgamma[(slice(None),) + ix(normal, tang, tang, tang)] if tang else np.zeros(1)
    d2G = geo.d2gamma[(slice(None),) + ix(normal, tang, tang, tang, tang)] if tang \
        else np.zeros(1)
    return {"gamma": float(np.max(np.abs(G), initial=0.0)),
            "dgamma": float(np.max(np.abs(dG), initial=0.0)),
            "d2gamma": float(np.max(np.abs(d2G), initial=0.0)),
            "normal": normal, "tangential": tang}


def compose_totally_geodesic_check(phi: GridMap, route: str = "intrinsic") -> dict:
    """Compare ``tau_2(iota o phi)`` with ``d iota(tau_2(phi))`` for the equator
    inclusion ``iota: S^{n-1} -> S^n``, ``y -> (y, pi/2)``."""
    from .tension import bitension_field

    if phi.target.kind != "sphere-polar":
        raise BadParams("compose check needs a sphere-polar target")
    k = phi.target.dim
    big = sphere_polar(k + 1)
    vals = np.concatenate([phi.values, np.full(phi.values.shape[:-1] + (1,), math.pi / 2)],
                          axis=-1)
    if not np.all(big.contains(vals)):
        raise ChartEscape("composed image leaves the polar chart")
    closed = None
    if phi.closed_form is not None:
        inner = phi.closed_form
        closed = lambda x: list(inner(x)) + [math.pi / 2 + 0.0 * x[0]]  # noqa: E731
    comp = GridMap(phi.source, big, phi.lattice, vals, closed)
    lhs = bitension_field(comp, route)
    base = bitension_field(phi, route)
    rhs = np.concatenate([base, np.zeros(base.shape[:-1] + (1,))], axis=-1)
    mask = phi.lattice.interior_mask(2)
    return {"residual": sup_norm(lhs - rhs, mask), "sup_lhs": sup_norm(lhs, mask),
            "sup_rhs": sup_norm(rhs, mask)}
