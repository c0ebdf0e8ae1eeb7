"""Maps and pull-back sections sampled on rectangular lattices.

All operators work on whole lattice arrays with wrapped central differences.
A field obtained from ``r`` nested difference operations is only meaningful
on the radius-``r`` interior (see :meth:`Lattice.interior_mask`); periodic
axes have no boundary band.  The per-node functions check the node against
the interior they need and raise :class:`NodeOutsideInterior` otherwise.

Component layouts (batch axes = lattice axes first):

* map values ``phi[..., a]``
* differential ``dphi[..., a, i]`` = d phi^a / dx^i
* Hessians ``[..., a, i, j]``
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from . import stencil
from .errors import BadParams, ChartEscape, LatticeMismatch, NodeOutsideInterior, NotOnSphere
from .geometry import ChartGeometry, MetricChart, check_inside
from .jets import Jet3, stack_jets

SPHERE_TOL = 1e-12


@dataclass(frozen=True)
class Lattice:
    counts: tuple
    spacing: tuple
    periodic: tuple
    origin: tuple

    def __post_init__(self):
        m = len(self.counts)
        if not (len(self.spacing) == len(self.periodic) == len(self.origin) == m) or m == 0:
            raise BadParams("lattice fields must all have the same nonzero length")
        if any(int(c) < 1 for c in self.counts) or any(not h > 0 for h in self.spacing):
            raise BadParams("lattice counts and spacings must be positive")
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        object.__setattr__(self, "spacing", tuple(float(h) for h in self.spacing))
        object.__setattr__(self, "periodic", tuple(bool(p) for p in self.periodic))
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))

    @classmethod
    def over(cls, bounds, counts, periodic=None) -> "Lattice":
        """Lattice covering ``bounds`` (one ``(lo, hi)`` pair per axis).

        Non-periodic axes include both endpoints; periodic axes exclude ``hi``
        (which is identified with ``lo``).
        """
        counts = tuple(int(c) for c in counts)
        periodic = tuple(periodic) if periodic is not None else (False,) * len(counts)
        spacing, origin = [], []
        for (lo, hi), n, p in zip(bounds, counts, periodic):
            if p:
                spacing.append((hi - lo) / n)
            else:
                if n < 2:
                    raise BadParams("non-periodic axes need at least two nodes")
                spacing.append((hi - lo) / (n - 1))
            origin.append(lo)
        return cls(counts, tuple(spacing), periodic, tuple(origin))

    @property
    def m(self) -> int:
        return len(self.counts)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, i: int) -> np.ndarray:
        return self.origin[i] + self.spacing[i] * np.arange(self.counts[i])

    def coords(self) -> np.ndarray:
        axes = np.meshgrid(*[self.axis(i) for i in range(self.m)], indexing="ij")
        return np.stack(axes, axis=-1)

    def interior_mask(self, radius: int) -> np.ndarray:
        mask = np.ones(self.counts, dtype=bool)
        for i, (n, p) in enumerate(zip(self.counts, self.periodic)):
            if p or radius == 0:
                continue
            idx = np.arange(n)
            keep = (idx >= radius) & (idx <= n - 1 - radius)
            shape = [1] * self.m
            shape[i] = n
            mask &= keep.reshape(shape)
        return mask

    def in_interior(self, node, radius: int) -> bool:
        node = tuple(int(k) for k in node)
        if len(node) != self.m:
            return False
        for k, n, p in zip(node, self.counts, self.periodic):
            if not 0 <= k < n:
                return False
            if not p and not radius <= k <= n - 1 - radius:
                return False
        return True

    def refine(self) -> "Lattice":
        """Halve every spacing; coarse nodes stay nodes (every other one)."""
        counts = tuple(2 * n if p else 2 * n - 1 for n, p in zip(self.counts, self.periodic))
        return Lattice(counts, tuple(h / 2 for h in self.spacing), self.periodic, self.origin)

    def coarse_slice(self):
        """Index into a refined lattice array that picks this lattice's nodes."""
        return tuple(slice(None, None, 2) for _ in range(self.m))


def _require_node(lattice: Lattice, node, radius: int):
    if not lattice.in_interior(node, radius):
        raise NodeOutsideInterior(f"node {tuple(node)} not in the radius-{radius} interior")
    return tuple(int(k) for k in node)


@lru_cache(maxsize=32)
def domain_geometry(source: MetricChart, lattice: Lattice) -> ChartGeometry:
    """Source-chart geometry at every lattice node."""
    return ChartGeometry.at(source, lattice.coords())


def derivatives(lattice: Lattice, f, second=True):
    return stencil.derivatives(f, lattice.spacing, second)


def gradient(lattice: Lattice, f):
    return stencil.gradient(f, lattice.spacing)


def covariant_hessian(lattice: Lattice, geo: ChartGeometry, f):
    """``f_ij - Gamma^k_ij f_k`` for each trailing component of ``f``."""
    d1, d2 = derivatives(lattice, f)
    return _hessian_from(geo, d1, d2)


def _hessian_from(geo, d1, d2):
    extra = d1.ndim - geo.gamma.ndim + 2  # trailing component axes
    G = geo.gamma.reshape(geo.gamma.shape[:-3] + (1,) * extra + geo.gamma.shape[-3:])
    return d2 - np.einsum("...kij,...k->...ij", G, d1)


def laplacian(lattice: Lattice, geo: ChartGeometry, f):
    """Scalar Laplace-Beltrami ``g^ij (f_ij - Gamma^k_ij f_k)`` per component."""
    return trace(geo, covariant_hessian(lattice, geo, f))


def trace(geo: ChartGeometry, t):
    extra = t.ndim - geo.ginv.ndim
    gi = geo.ginv.reshape(geo.ginv.shape[:-2] + (1,) * extra + geo.ginv.shape[-2:])
    return np.einsum("...ij,...ij->...", gi, t)


@dataclass(frozen=True, eq=False)
class GridMap:
    """A map between two charts sampled on a lattice of the source chart.

    ``closed_form``, when present, is the expression the node values were
    sampled from (a function of the source coordinates that also accepts
    jets); it enables exact-derivative diagnostics.
    """

    source: MetricChart
    target: MetricChart
    lattice: Lattice
    values: np.ndarray
    closed_form: Callable | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.lattice.m != self.source.dim:
            raise BadParams(f"lattice dimension {self.lattice.m} != source dimension "
                            f"{self.source.dim}")
        if vals.shape != self.lattice.counts + (self.target.dim,):
            raise BadParams(f"values shape {vals.shape} does not match lattice "
                            f"{self.lattice.counts} x target dim {self.target.dim}")
        check_inside(self.source, self.lattice.coords())
        if not np.all(np.isfinite(vals)) or not np.all(self.target.contains(vals)):
            raise ChartEscape(f"map values leave the target chart {self.target.name}")
        if self.target.embedded_sphere:
            err = np.max(np.abs(np.linalg.norm(vals, axis=-1) - 1.0))
            if err > SPHERE_TOL:
                raise NotOnSphere(f"| |phi| - 1 | = {err:.3e} exceeds {SPHERE_TOL}")

    @classmethod
    def from_function(cls, source, target, lattice, func, keep_closed_form=True) -> "GridMap":
        x = lattice.coords()
        comps = func([x[..., i] for i in range(lattice.m)])
        vals = np.stack([np.broadcast_to(np.asarray(c, dtype=float), lattice.counts)
                         for c in comps], axis=-1)
        return cls(source, target, lattice, vals, func if keep_closed_form else None)

    def with_values(self, values) -> "GridMap":
        return GridMap(self.source, self.target, self.lattice, values)

    @property
    def m(self) -> int:
        return self.source.dim

    @property
    def n(self) -> int:
        return self.target.dim

    @property
    def domain(self) -> ChartGeometry:
        return domain_geometry(self.source, self.lattice)

    @cached_property
    def target_geometry(self) -> ChartGeometry:
        return ChartGeometry.at(self.target, self.values)

    @cached_property
    def _d(self):
        return derivatives(self.lattice, self.values)

    @property
    def dphi(self):
        return self._d[0]

    @cached_property
    def hess(self):
        """Covariant Hessian of each coordinate component, ``[..., a, i, j]``."""
        return _hessian_from(self.domain, *self._d)

    @cached_property
    def lap(self):
        """Laplace-Beltrami of each coordinate component."""
        return trace(self.domain, self.hess)

    @cached_property
    def dphi_inner(self):
        """``<dphi^a, dphi^b> = g^ij phi^a_i phi^b_j``."""
        return np.einsum("...ij,...ai,...bj->...ab", self.domain.ginv, self.dphi, self.dphi)

    def exact_jets(self):
        """Values and exact partial derivatives up to order three at every node."""
        if self.closed_form is None:
            raise BadParams("map has no closed form")
        x = self.lattice.coords()
        comps = self.closed_form(Jet3.variables(x, self.m))
        return stack_jets(list(comps), self.m, self.lattice.counts)


@dataclass(frozen=True, eq=False)
class GridSection:
    """A section ``u^a d/dy^a`` of the pull-back bundle, sampled on the base lattice."""

    base: GridMap
    components: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        if comps.shape != self.base.values.shape:
            raise LatticeMismatch(f"section shape {comps.shape} does not match base map "
                                  f"{self.base.values.shape}")
        object.__setattr__(self, "components", comps)


# -- field operators -------------------------------------------------------

def second_fundamental_form_field(phi: GridMap):
    """``(nabla dphi)^t_ij``; for embedded-sphere targets the sphere's own form
    ``phi_ij - Gamma^k_ij phi_k + <phi_i, phi_j> phi``."""
    K = phi.hess
    if phi.target.embedded_sphere:
        euc = np.einsum("...ai,...aj->...ij", phi.dphi, phi.dphi)
        return K + phi.values[..., :, None, None] * euc[..., None, :, :]
    G = phi.target_geometry.gamma
    return K + np.einsum("...tab,...ai,...bj->...tij", G, phi.dphi, phi.dphi)


def jacobi_field(phi: GridMap, u):
    """``Delta sigma - Tr R(dphi, sigma) dphi`` in target coordinates.

    ``Delta u^t + 2 <du^a, dphi^b> Gamma^t_ab
    + u^a (Delta phi^b Gamma^t_ab + <dphi^b, dphi^w> A^t_bwa)``.
    Valid one node further in than ``u``.
    """
    if phi.target.embedded_sphere:
        raise BadParams("the coordinate Jacobi operator needs a chart target, "
                        "not an embedded sphere")
    u = np.asarray(u, dtype=float)
    geo = phi.domain
    du, d2u = derivatives(phi.lattice, u)
    lap_u = trace(geo, _hessian_from(geo, du, d2u))
    tg = phi.target_geometry
    G, A = tg.gamma, tg.A
    t1 = 2.0 * np.einsum("...ij,...ai,...bj,...tab->...t", geo.ginv, du, phi.dphi, G,
                         optimize=True)
    t2 = np.einsum("...a,...b,...tab->...t", u, phi.lap, G)
    t3 = np.einsum("...a,...bw,...tbwa->...t", u, phi.dphi_inner, A, optimize=True)
    return lap_u + t1 + t2 + t3


# -- node operations -------------------------------------------------------

def differential(phi: GridMap, node) -> np.ndarray:
    """``dphi`` at a node as an ``m x n`` array ``[i, a] = d phi^a / dx^i``."""
    node = _require_node(phi.lattice, node, 1)
    return phi.dphi[node].T.copy()


def map_laplacian(phi: GridMap, node) -> np.ndarray:
    node = _require_node(phi.lattice, node, 1)
    return phi.lap[node].copy()


def second_fundamental_form(phi: GridMap, node) -> np.ndarray:
    node = _require_node(phi.lattice, node, 1)
    return second_fundamental_form_field(phi)[node]


def section_jacobi_operator(phi: GridMap, sec: GridSection, node, section_radius: int = 0):
    """Jacobi operator of ``sec`` at ``node``.

    ``section_radius`` is the interior radius on which the section itself is
    valid (e.g. 1 for a tension field computed by finite differences).
    """
    if sec.base.lattice != phi.lattice:
        raise LatticeMismatch("section and map live on different lattices")
    node = _require_node(phi.lattice, node, max(1, section_radius + 1))
    return jacobi_field(phi, sec.components)[node]


def sup_norm(field, mask) -> float:
    """Max over masked nodes of the Euclidean norm of the trailing components."""
    f = np.asarray(field, dtype=float)
    lead = mask.ndim
    vals = f[mask]
    if vals.size == 0:
        return 0.0
    if f.ndim > lead:
        vals = np.sqrt(np.sum(vals.reshape(vals.shape[0], -1) ** 2, axis=-1))
    else:
        vals = np.abs(vals)
    return float(np.max(vals))
