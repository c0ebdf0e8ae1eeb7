"""Second-order reduction ``y = (phi, v, w)`` with ``v = dphi`` and ``w = Delta phi``.

The reduced system is ``Delta y = F``.  Block by block:

* ``Delta phi = w``
* ``Delta v = -dw``, where ``Delta`` on the one-form ``v`` is the Hodge-sign
  Laplacian ``-Tr nabla^2 v + v(Ric)``; with this sign the identity
  ``Delta d = d Delta`` makes the block read ``-dw``
* ``Delta w = F_3``, target dependent (sphere or general chart)

Stacked component order per node: the ``n`` map components, then ``v``
flattened with the source index outermost (``v[i, a]``), then ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import EmptyInterior, EmptyMask, LatticeMismatch
from .fields import (GridMap, Lattice, _require_node, derivatives, domain_geometry, gradient,
                     laplacian)
from .geometry import MetricChart
from .tension import sphere_terms

SPHERE = "sphere-embedded"
GENERAL = "general-chart"
SKIP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ReducedState:
    phi: GridMap
    v: np.ndarray   # [..., a, i]
    w: np.ndarray   # [..., a]
    kind: str

    @property
    def lattice(self) -> Lattice:
        return self.phi.lattice

    @property
    def size(self) -> int:
        n, m = self.phi.n, self.phi.m
        return n * (m + 2)

    @cached_property
    def y(self):
        """Stacked per-node vector of length ``n(m+2)`` (``n`` = ambient dim)."""
        counts = self.lattice.counts
        vv = np.swapaxes(self.v, -1, -2).reshape(counts + (-1,))
        return np.concatenate([self.phi.values, vv, self.w], axis=-1)


def reduce(phi: GridMap) -> ReducedState:
    if not phi.lattice.interior_mask(2).any():
        raise EmptyInterior("radius-2 interior is empty")
    kind = SPHERE if phi.target.embedded_sphere else GENERAL
    return ReducedState(phi, phi.dphi.copy(), phi.lap.copy(), kind)


def one_form_covariant(lattice, geo, v):
    """``(nabla v)_ij = d_i v_j - Gamma^k_ij v_k`` for ``v[..., a, j]``."""
    dv = gradient(lattice, v)  # [..., a, j, i]
    return np.swapaxes(dv, -1, -2) - np.einsum("...kij,...ak->...aij", geo.gamma, v)


def rough_trace_one_form(lattice, geo, v):
    """``Tr nabla^2 v`` for a vector-valued one-form ``v[..., a, k]``.

    Second partials use the compact stencil, so on flat charts this is the
    plain lattice Laplacian of each component.
    """
    d1, d2 = derivatives(lattice, v)          # [..., a, k, i], [..., a, k, i, j]
    G, dG, gi = geo.gamma, geo.dgamma, geo.ginv
    opt = dict(optimize=True)
    # nabla_i (nabla v)_jk with every term written out
    t = (np.einsum("...ij,...akij->...ak", gi, d2)
         - np.einsum("...ij,...ljki,...al->...ak", gi, dG, v, **opt)
         - np.einsum("...ij,...ljk,...ali->...ak", gi, G, d1, **opt)
         - np.einsum("...ij,...pij,...akp->...ak", gi, G, d1, **opt)
         + np.einsum("...ij,...pij,...lpk,...al->...ak", gi, G, G, v, **opt)
         - np.einsum("...ij,...pik,...apj->...ak", gi, G, d1, **opt)
         + np.einsum("...ij,...pik,...ljp,...al->...ak", gi, G, G, v, **opt))
    return t


def hodge_laplacian_one_form(lattice, geo, v):
    ric_mixed = np.einsum("...kp,...pl->...kl", geo.ricci, geo.ginv)
    return -rough_trace_one_form(lattice, geo, v) + np.einsum("...kl,...al->...ak", ric_mixed, v)


def _f3_general(phi: GridMap, v, w, Dw, Kv):
    geo = phi.domain
    tg = phi.target_geometry
    G, A, B = tg.gamma, tg.A, tg.B
    gi = geo.ginv
    opt = dict(optimize=True)
    inner = np.einsum("...ij,...ai,...bj->...ab", gi, v, v, **opt)
    t1 = -4.0 * np.einsum("...ij,...ai,...bj,...tab->...t", gi, Dw, v, G, **opt)
    t2 = -2.0 * np.einsum("...kl,...ak,...bl,...tab->...t", geo.ricci_raised, v, v, G, **opt)
    KK = np.einsum("...ik,...jl,...aij,...bkl->...ab", gi, gi, Kv, Kv, **opt)
    t3 = -2.0 * np.einsum("...ab,...tab->...t", KK, G)
    t4 = -4.0 * np.einsum("...ij,...kl,...aik,...bl,...dj,...tabd->...t",
                          gi, gi, Kv, v, v, A, **opt)
    t5 = -2.0 * np.einsum("...ab,...d,...tabd->...t", inner, w, A, **opt)
    t6 = -np.einsum("...ab,...dc,...tabdc->...t", inner, inner, B, **opt)
    t7 = -np.einsum("...a,...b,...tab->...t", w, w, G, **opt)
    return t1 + t2 + t3 + t4 + t5 + t6 + t7


def rhs_F_field(state: ReducedState):
    """Blocks ``(w, -dw, F_3)`` of the right-hand side; valid on radius 2."""
    phi, lat = state.phi, state.lattice
    geo = phi.domain
    Dw = gradient(lat, state.w)
    Kv = one_form_covariant(lat, geo, state.v)
    if state.kind == SPHERE:
        f3 = -sphere_terms(geo, phi.values, state.v, Kv, state.w, Dw)
    else:
        f3 = _f3_general(phi, state.v, state.w, Dw, Kv)
    return state.w, -Dw, f3


def lhs_field(state: ReducedState):
    """Blocks of ``Delta y``."""
    lat, geo = state.lattice, state.phi.domain
    return (laplacian(lat, geo, state.phi.values),
            hodge_laplacian_one_form(lat, geo, state.v),
            laplacian(lat, geo, state.w))


def block_residuals(state: ReducedState):
    """Per-block residual fields ``Delta y - F``."""
    return tuple(a - b for a, b in zip(lhs_field(state), rhs_F_field(state)))


def stack_blocks(blocks):
    b0, b1, b2 = blocks
    counts = b0.shape[:-1]
    return np.concatenate([b0, np.swapaxes(b1, -1, -2).reshape(counts + (-1,)), b2], axis=-1)


def rhs_F(state: ReducedState, node):
    node = _require_node(state.lattice, node, 2)
    return stack_blocks(rhs_F_field(state))[node]


def system_residual(state: ReducedState, blocks: bool = False):
    """Sup over the radius-2 interior of ``|Delta y - F|`` (max over components)."""
    mask = state.lattice.interior_mask(2)
    if not mask.any():
        raise EmptyInterior("radius-2 interior is empty")
    res = block_residuals(state)
    per = [float(np.max(np.abs(r[mask]))) for r in res]
    total = max(per)
    return (total, per) if blocks else total


@dataclass(frozen=True, eq=False)
class DifferenceField:
    """Stacked ``u = y_1 - y_2`` on a lattice of the source chart."""

    u: np.ndarray
    lattice: Lattice
    source: MetricChart
    n: int
    m: int

    def blocks(self):
        n, m = self.n, self.m
        return self.u[..., :n], self.u[..., n:n + n * m], self.u[..., n + n * m:]


def difference_u(s1: ReducedState, s2: ReducedState) -> DifferenceField:
    if (s1.lattice != s2.lattice or s1.kind != s2.kind
            or s1.phi.source.name != s2.phi.source.name):
        raise LatticeMismatch("states live on different lattices, charts or target kinds")
    if s1.phi.n != s2.phi.n:
        raise LatticeMismatch("target dimensions differ")
    return DifferenceField(s1.y - s2.y, s1.lattice, s1.phi.source, s1.phi.n, s1.phi.m)


@dataclass
class RatioReport:
    value: float
    infinite: bool
    skipped: int
    evaluated: int
    ratio: np.ndarray = field(repr=False)
    Au: np.ndarray = field(repr=False)

    def to_json(self) -> dict:
        return {"C": None if self.infinite else self.value, "infinite": self.infinite,
                "skipped_nodes": self.skipped, "evaluated_nodes": self.evaluated}


def aronszajn_ratio(u: DifferenceField, mask) -> RatioReport:
    """Empirical constant in ``|Au^a| <= C (sum |d_i u^b| + sum |u^b|)``.

    ``A`` is the scalar Laplace-Beltrami of the source chart applied to each
    component.  ``mask`` must lie in the radius-2 interior.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != u.lattice.counts or not mask.any():
        raise EmptyMask("mask is empty or has the wrong shape")
    if np.any(mask & ~u.lattice.interior_mask(2)):
        raise EmptyMask("mask leaves the radius-2 interior")
    geo = domain_geometry(u.source, u.lattice)
    Au = laplacian(u.lattice, geo, u.u)
    du = gradient(u.lattice, u.u)
    num = np.max(np.abs(Au), axis=-1)
    den = np.sum(np.abs(du), axis=(-2, -1)) + np.sum(np.abs(u.u), axis=-1)
    num_m, den_m = num[mask], den[mask]
    skip = (num_m < SKIP_TOL) & (den_m < SKIP_TOL)
    inf = (num_m >= SKIP_TOL) & (den_m < SKIP_TOL)
    ok = ~skip & ~inf
    ratio = np.full(num.shape, np.nan)
    sel = np.zeros_like(mask)
    sel[mask] = ok
    ratio[sel] = num[sel] / den[sel]
    value = float(np.max(num_m[ok] / den_m[ok])) if ok.any() else 0.0
    if inf.any():
        value = float("inf")
    return RatioReport(value, bool(inf.any()), int(skip.sum()), int(ok.sum()), ratio, Au)
