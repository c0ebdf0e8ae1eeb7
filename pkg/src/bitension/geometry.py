"""Charted Riemannian manifolds.

Every geometric quantity is derived from a chart's metric evaluator.  The
evaluator is an ordinary function of the coordinates written with the
functions from :mod:`bitension.jets`; feeding it third-order jets yields the
metric together with its first three partial derivatives, which is exactly
what the second derivatives of the Christoffel symbols require.

Index layout of the arrays returned here (0-based, batch axes first):

* ``gamma[..., t, a, b]``            Gamma^t_{ab}
* ``dgamma[..., t, a, b, d]``        d Gamma^t_{ab} / dy^d
* ``d2gamma[..., t, a, b, d, e]``    d^2 Gamma^t_{ab} / dy^d dy^e
* ``riemann[..., t, w, b, a]``       component of R(d_w, d_b) d_a along d_t,
  with ``R(X,Y)Z = [nabla_X, nabla_Y]Z - nabla_[X,Y] Z``
* ``ricci[..., i, j]``               sum_k riemann[..., k, k, i, j]
* ``A[..., t, a, b, d]``, ``B[..., t, a, b, d, c]`` as in :func:`ab_tensors`
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import jets
from .errors import BadParams, PointOutsideChart, PoleSingular, SingularMetric, UnknownChart
from .jets import Jet3

DET_MIN = 1e-14
MAX_SPHERE_DIM = 4


@dataclass(frozen=True, eq=False)
class MetricChart:
    """A coordinate chart with an evaluable metric.

    ``metric`` maps a list of ``dim`` coordinates (floats, arrays or jets) to
    a nested ``dim x dim`` list of metric components.  ``lower``/``upper``
    bound the open coordinate box.
    """

    name: str
    dim: int
    lower: tuple
    upper: tuple
    metric: Callable = field(repr=False)
    kind: str = "custom"
    flat: bool = False
    embedded_sphere: bool = False
    parts: tuple = ()

    def contains(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return np.all((y > lo) & (y < hi), axis=-1)


# -- catalog ---------------------------------------------------------------

def _euclidean_metric(n):
    def metric(y):
        return [[1.0 if a == b else 0.0 for b in range(n)] for a in range(n)]
    return metric


def _sphere_polar_metric(n):
    if n == 1:
        return lambda y: [[1.0]]
    sub = _sphere_polar_metric(n - 1)

    def metric(y):
        s = y[n - 1]
        w = jets.sin(s) * jets.sin(s)
        inner = sub(y[: n - 1])
        g = [[w * inner[a][b] for b in range(n - 1)] + [0.0] for a in range(n - 1)]
        g.append([0.0] * (n - 1) + [1.0])
        return g
    return metric


def _product_metric(parts):
    dims = [p.dim for p in parts]
    n = sum(dims)

    def metric(y):
        g = [[0.0] * n for _ in range(n)]
        off = 0
        for p, d in zip(parts, dims):
            block = p.metric(y[off: off + d])
            for a in range(d):
                for b in range(d):
                    g[off + a][off + b] = block[a][b]
            off += d
        return g
    return metric


def _split_top_level(text):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return [p for p in parts if p]


def euclidean(n: int) -> MetricChart:
    _check_dim(n)
    inf = math.inf
    return MetricChart(f"euclidean:{n}", n, (-inf,) * n, (inf,) * n, _euclidean_metric(n),
                       kind="euclidean", flat=True)


def flat_torus(n: int) -> MetricChart:
    _check_dim(n)
    inf = math.inf
    return MetricChart(f"flat-torus:{n}", n, (-inf,) * n, (inf,) * n, _euclidean_metric(n),
                       kind="flat-torus", flat=True)


def sphere_polar(n: int) -> MetricChart:
    """Unit n-sphere in iterated polar coordinates ``(theta, s_2, ..., s_n)``.

    The last coordinate ``s`` is the polar angle of the outermost factor in
    ``sin^2 s * g_{S^{n-1}} + ds^2``; the first coordinate is the azimuth.
    """
    _check_dim(n)
    if n > MAX_SPHERE_DIM:
        raise BadParams(f"sphere-polar limited to n <= {MAX_SPHERE_DIM}, got {n}")
    lower = (-math.inf,) + (0.0,) * (n - 1)
    upper = (math.inf,) + (math.pi,) * (n - 1)
    return MetricChart(f"sphere-polar:{n}", n, lower, upper, _sphere_polar_metric(n),
                       kind="sphere-polar", flat=(n == 1))


def sphere_embedded(n: int) -> MetricChart:
    """The unit n-sphere seen through its inclusion into R^{n+1}.

    The chart is the flat ambient space; maps into it are required to stay
    on the unit sphere.
    """
    _check_dim(n)
    inf = math.inf
    return MetricChart(f"sphere-embedded:{n}", n + 1, (-inf,) * (n + 1), (inf,) * (n + 1),
                       _euclidean_metric(n + 1), kind="sphere-embedded", flat=True,
                       embedded_sphere=True)


def product(*parts: MetricChart) -> MetricChart:
    if not parts:
        raise BadParams("product needs at least one factor")
    name = "product(" + ", ".join(p.name for p in parts) + ")"
    lower = sum((tuple(p.lower) for p in parts), ())
    upper = sum((tuple(p.upper) for p in parts), ())
    return MetricChart(name, sum(p.dim for p in parts), lower, upper, _product_metric(parts),
                       kind="product", flat=all(p.flat for p in parts), parts=tuple(parts))


def _check_dim(n):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise BadParams(f"dimension must be a positive integer, got {n!r}")


_SIMPLE = {
    "euclidean": euclidean,
    "sphere-polar": sphere_polar,
    "sphere-embedded": sphere_embedded,
    "flat-torus": flat_torus,
}


def chart_catalog(name: str, params: dict | None = None) -> MetricChart:
    """Build a chart from its catalog name, e.g. ``"sphere-polar:2"`` or
    ``"product(sphere-polar:1, euclidean:1)"``.

    ``params`` may supply ``{"n": ...}`` for names given without a dimension.
    """
    if not isinstance(name, str):
        raise UnknownChart(f"chart name must be a string, got {name!r}")
    text = name.strip()
    m = re.fullmatch(r"product\((.*)\)", text)
    if m:
        return product(*(chart_catalog(p) for p in _split_top_level(m.group(1))))
    m = re.fullmatch(r"([a-z\-]+)(?::\s*(-?\d+))?", text)
    if not m or m.group(1) not in _SIMPLE:
        raise UnknownChart(f"unknown chart {name!r}")
    if m.group(2) is not None:
        n = int(m.group(2))
    elif params and "n" in params:
        n = params["n"]
    else:
        raise BadParams(f"chart {name!r} needs a dimension")
    return _SIMPLE[m.group(1)](n)


# -- batch evaluation ------------------------------------------------------

def check_inside(chart: MetricChart, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != chart.dim:
        raise PointOutsideChart(f"{chart.name}: point has {y.shape[-1]} coordinates, "
                                f"expected {chart.dim}")
    inside = chart.contains(y)
    if not np.all(inside):
        bad = y[~inside] if y.ndim > 1 else y
        raise PointOutsideChart(f"{chart.name}: point(s) outside the chart box, e.g. "
                                f"{np.asarray(bad).reshape(-1, chart.dim)[0].tolist()}")
    return y


def metric_jets(chart: MetricChart, y):
    """Metric and its first three partials at points ``y`` (shape ``B + (n,)``).

    Returns ``(g, dg, d2g, d3g)`` with ``dg[..., a, b, d] = d g_ab / dy^d``.
    """
    y = np.asarray(y, dtype=float)
    n = chart.dim
    var = Jet3.variables(y, n)
    return jets.stack_jets(chart.metric(var), n, y.shape[:-1])


def _checked_inverse(chart, g):
    det = np.linalg.det(g)
    if np.any(det < DET_MIN):
        raise SingularMetric(f"{chart.name}: det g = {float(np.min(det)):.3e} below {DET_MIN}")
    if np.any(np.linalg.eigvalsh(g)[..., 0] <= 0):
        raise SingularMetric(f"{chart.name}: metric not positive definite")
    return np.linalg.inv(g), det


@dataclass(eq=False)
class ChartGeometry:
    """All chart-level geometry at a batch of points, computed lazily."""

    chart: MetricChart
    points: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray
    d3g: np.ndarray
    ginv: np.ndarray
    det: np.ndarray

    @classmethod
    def at(cls, chart: MetricChart, y) -> "ChartGeometry":
        y = check_inside(chart, y)
        g, dg, d2g, d3g = metric_jets(chart, y)
        ginv, det = _checked_inverse(chart, g)
        return cls(chart, y, g, dg, d2g, d3g, ginv, det)

    @cached_property
    def sqrt_det(self):
        return np.sqrt(self.det)

    # derivatives of the inverse metric, d ginv^{tg} / dy^d
    @cached_property
    def dginv(self):
        return -np.einsum("...ta,...abd,...bg->...tgd", self.ginv, self.dg, self.ginv)

    @cached_property
    def d2ginv(self):
        gi, g1, g2 = self.ginv, self.dg, self.d2g
        t = (np.einsum("...ta,...abd,...bc,...cfe,...fg->...tgde", gi, g1, gi, g1, gi)
             + np.einsum("...ta,...abe,...bc,...cfd,...fg->...tgde", gi, g1, gi, g1, gi)
             - np.einsum("...ta,...abde,...bg->...tgde", gi, g2, gi))
        return t

    # lower Christoffel symbols  L[g, a, b] = 1/2 (d_a g_gb + d_b g_ga - d_g g_ab)
    @cached_property
    def _lower(self):
        g1, g2, g3 = self.dg, self.d2g, self.d3g
        L0 = 0.5 * (np.einsum("...gba->...gab", g1) + g1 - np.einsum("...abg->...gab", g1))
        L1 = 0.5 * (np.einsum("...gbad->...gabd", g2) + g2
                    - np.einsum("...abgd->...gabd", g2))
        L2 = 0.5 * (np.einsum("...gbade->...gabde", g3) + g3
                    - np.einsum("...abgde->...gabde", g3))
        return L0, L1, L2

    @cached_property
    def gamma(self):
        return np.einsum("...tg,...gab->...tab", self.ginv, self._lower[0])

    @cached_property
    def dgamma(self):
        L0, L1, _ = self._lower
        return (np.einsum("...tgd,...gab->...tabd", self.dginv, L0)
                + np.einsum("...tg,...gabd->...tabd", self.ginv, L1))

    @cached_property
    def d2gamma(self):
        L0, L1, L2 = self._lower
        return (np.einsum("...tgde,...gab->...tabde", self.d2ginv, L0)
                + np.einsum("...tgd,...gabe->...tabde", self.dginv, L1)
                + np.einsum("...tge,...gabd->...tabde", self.dginv, L1)
                + np.einsum("...tg,...gabde->...tabde", self.ginv, L2))

    @cached_property
    def riemann(self):
        return riemann_from(self.gamma, self.dgamma)

    @cached_property
    def ricci(self):
        return np.einsum("...kkij->...ij", self.riemann)

    @cached_property
    def ricci_raised(self):
        return np.einsum("...ik,...kl,...lj->...ij", self.ginv, self.ricci, self.ginv)

    @cached_property
    def A(self):
        return a_from(self.gamma, self.dgamma)

    @cached_property
    def B(self):
        G, dG, d2G = self.gamma, self.dgamma, self.d2gamma
        return (d2G
                + np.einsum("...wdca,...twb->...tabdc", dG, G)
                + np.einsum("...wdcb,...twa->...tabdc", dG, G)
                + np.einsum("...wdc,...tabw->...tabdc", G, dG)
                + np.einsum("...wdc,...sab,...tws->...tabdc", G, G, G))


def riemann_from(G, dG):
    """``riemann[..., t, w, b, a]`` from Christoffel symbols and their partials."""
    return (np.einsum("...tbaw->...twba", dG)
            - np.einsum("...twab->...twba", dG)
            + np.einsum("...cba,...twc->...twba", G, G)
            - np.einsum("...cwa,...tbc->...twba", G, G))


def a_from(G, dG):
    return dG + np.einsum("...cab,...tcd->...tabd", G, G)


def christoffel_derivative_fd(chart: MetricChart, y, step: float = 1e-3):
    """Fourth-order central differences of the Christoffel symbols, laid out
    like :attr:`ChartGeometry.dgamma`.  Used as an independent oracle."""
    y = np.asarray(y, dtype=float)
    n = chart.dim
    out = np.empty(y.shape[:-1] + (n, n, n, n))
    for d in range(n):
        e = np.zeros(n)
        e[d] = step
        G = [ChartGeometry.at(chart, y + k * e).gamma for k in (-2, -1, 1, 2)]
        out[..., d] = (G[0] - 8.0 * G[1] + 8.0 * G[2] - G[3]) / (12.0 * step)
    return out


def sectional_curvatures(geo: ChartGeometry):
    """Sectional curvature of every coordinate 2-plane, ``[..., a, b]`` (a != b)."""
    g = geo.g
    num = np.einsum("...at,...tabb->...ab", g, geo.riemann)
    gaa = np.einsum("...aa->...a", g)
    den = gaa[..., :, None] * gaa[..., None, :] - g * g
    n = g.shape[-1]
    off = ~np.eye(n, dtype=bool)
    out = np.full(num.shape, np.nan)
    out[..., off] = num[..., off] / den[..., off]
    return out


# -- point operations ------------------------------------------------------

def metric_at(chart: MetricChart, y):
    """Metric and its inverse at a single interior point."""
    geo = ChartGeometry.at(chart, np.asarray(y, dtype=float))
    return geo.g, geo.ginv


def christoffel(chart: MetricChart, y) -> np.ndarray:
    return ChartGeometry.at(chart, y).gamma


def curvature(chart: MetricChart, y):
    geo = ChartGeometry.at(chart, y)
    return geo.riemann, geo.ricci


def ab_tensors(chart: MetricChart, y):
    """The combinations

    ``A^t_{abd} = dGamma^t_{ab}/dy^d + Gamma^c_{ab} Gamma^t_{cd}`` and

    ``B^t_{abdc} = d^2Gamma^t_{ab}/dy^d dy^c + dGamma^w_{dc}/dy^a Gamma^t_{wb}
    + dGamma^w_{dc}/dy^b Gamma^t_{wa} + Gamma^w_{dc} dGamma^t_{ab}/dy^w
    + Gamma^w_{dc} Gamma^s_{ab} Gamma^t_{ws}``.
    """
    geo = ChartGeometry.at(chart, y)
    return geo.A, geo.B


@dataclass(frozen=True)
class CurvaturePack:
    point: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    d2gamma: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    A: np.ndarray
    B: np.ndarray


def curvature_pack(chart: MetricChart, y) -> CurvaturePack:
    geo = ChartGeometry.at(chart, y)
    return CurvaturePack(geo.points, geo.gamma, geo.dgamma, geo.d2gamma, geo.riemann,
                         geo.ricci, geo.A, geo.B)


def sphere_polar_christoffel_closed_form(n: int, y) -> np.ndarray:
    """Christoffel symbols of the iterated polar chart from the warped-product
    formulas, recursing on the ``S^{n-1}`` factor."""
    y = np.asarray(y, dtype=float)
    if n < 1 or n > MAX_SPHERE_DIM or y.shape[-1] != n:
        raise BadParams(f"bad dimension {n} for point of shape {y.shape}")
    G = np.zeros(y.shape[:-1] + (n, n, n))
    if n == 1:
        return G
    s = y[..., n - 1]
    if np.any((s <= 0) | (s >= np.pi)) or np.any(np.sin(s) == 0):
        raise PoleSingular("polar angle at a pole")
    k = n - 1
    G[..., :k, :k, :k] = sphere_polar_christoffel_closed_form(k, y[..., :k])
    g_sub = np.asarray(jets.stack_jets(_sphere_polar_metric(k)(
        [y[..., i] for i in range(k)]), 1, y.shape[:-1])[0])
    G[..., k, :k, :k] = -(np.sin(s) * np.cos(s))[..., None, None] * g_sub
    cot = np.cos(s) / np.sin(s)
    for a in range(k):
        G[..., a, a, k] = cot
        G[..., a, k, a] = cot
    return G


# -- embeddings ------------------------------------------------------------

def sphere_polar_embedding(n: int) -> Callable:
    """Inclusion of the polar chart of S^n into R^{n+1}, as a coordinate map."""
    if n == 1:
        return lambda y: [jets.cos(y[0]), jets.sin(y[0])]
    sub = sphere_polar_embedding(n - 1)

    def emb(y):
        s = y[n - 1]
        return [jets.sin(s) * c for c in sub(y[: n - 1])] + [jets.cos(s)]
    return emb


def sphere_polar_chart_of(point) -> np.ndarray:
    """Inverse of :func:`sphere_polar_embedding` for points away from the poles."""
    x = np.asarray(point, dtype=float)
    n = x.shape[-1] - 1
    out = np.empty(x.shape[:-1] + (n,))
    rest = x
    for k in range(n, 1, -1):
        r = np.linalg.norm(rest[..., :-1], axis=-1)
        out[..., k - 1] = np.arctan2(r, rest[..., -1])
        rest = rest[..., :-1]
    out[..., 0] = np.arctan2(rest[..., 1], rest[..., 0])
    return out


def sample_interior(chart: MetricChart, count: int, rng: np.random.Generator,
                    margin: float = 0.2) -> np.ndarray:
    """Random points inside the chart box, kept ``margin`` away from finite
    bounds; infinite coordinates are drawn from [-pi, pi]."""
    lo = np.array([l + margin if np.isfinite(l) else -np.pi for l in chart.lower])
    hi = np.array([u - margin if np.isfinite(u) else np.pi for u in chart.upper])
    return rng.uniform(lo, hi, size=(count, chart.dim))
