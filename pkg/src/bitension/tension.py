"""Tension and bitension fields, the sphere-target identities and the bienergy.

Three independent routes give the bitension field:

* ``intrinsic``: the Jacobi operator of :mod:`bitension.fields` applied to
  the tension field, treated as a pull-back section.
* ``coordinate``: the fourth-order coordinate expansion
  ``Delta^2 phi - RHS`` built from the target Christoffel symbols and the
  A/B tensors.
* ``sphere-extrinsic``: the ambient formula for maps into the unit sphere of
  R^{n+1}.

Sign conventions: ``Delta`` is the trace of the Hessian (sum of second
partials on flat charts) and ``tau_2 = Delta tau - Tr R(dphi, tau) dphi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, EmptyInterior, NotOnSphere
from .fields import (GridMap, _require_node, derivatives, gradient, jacobi_field, laplacian,
                     second_fundamental_form_field, sup_norm, trace)
from .geometry import ChartGeometry, MetricChart, sphere_polar_embedding
from .jets import Jet3, stack_jets
from .serialize import field_rows, write_csv

ROUTES = ("intrinsic", "coordinate", "sphere-extrinsic")
IDENTITIES = ("div_theta", "laplacian_energy_density", "weitzenboeck", "grad_energy_density")


def _memo(phi: GridMap, key, fn):
    store = phi.__dict__.setdefault("_memo", {})
    if key not in store:
        store[key] = fn()
    return store[key]


def energy_density_field(phi: GridMap):
    """``|dphi|^2`` with the target metric (Euclidean for embedded spheres)."""
    if phi.target.embedded_sphere:
        return np.einsum("...aa->...", phi.dphi_inner)
    return np.einsum("...ab,...ab->...", phi.target_geometry.g, phi.dphi_inner)


def tension_field(phi: GridMap):
    """Trace of the second fundamental form; valid on the radius-1 interior."""
    return _memo(phi, "tau", lambda: trace(phi.domain, second_fundamental_form_field(phi)))


def tension_local_form(phi: GridMap):
    """``Delta phi^t + <dphi^a, dphi^b> Gamma^t_ab`` (chart targets)."""
    if phi.target.embedded_sphere:
        return phi.lap + energy_density_field(phi)[..., None] * phi.values
    return phi.lap + np.einsum("...ab,...tab->...t", phi.dphi_inner,
                               phi.target_geometry.gamma)


def _chart_target(phi):
    if phi.target.embedded_sphere:
        raise BadParams("this route needs a chart target; use sphere-extrinsic for "
                        "embedded sphere targets")


def bitension_intrinsic_field(phi: GridMap):
    _chart_target(phi)
    return _memo(phi, "intrinsic", lambda: jacobi_field(phi, tension_field(phi)))


def bitension_coordinate_field(phi: GridMap):
    """``Delta^2 phi^t`` minus the seven right-hand-side groups."""
    _chart_target(phi)

    def build():
        geo = phi.domain
        tg = phi.target_geometry
        G, A, B = tg.gamma, tg.A, tg.B
        gi = geo.ginv
        w = phi.lap
        Dw = gradient(phi.lattice, w)
        Lw = laplacian(phi.lattice, geo, w)
        K = phi.hess
        dphi = phi.dphi
        inner = phi.dphi_inner
        opt = dict(optimize=True)
        t1 = -4.0 * np.einsum("...ij,...ai,...bj,...tab->...t", gi, Dw, dphi, G, **opt)
        t2 = -2.0 * np.einsum("...kl,...ak,...bl,...tab->...t", geo.ricci_raised, dphi, dphi,
                              G, **opt)
        KK = np.einsum("...ik,...jl,...aij,...bkl->...ab", gi, gi, K, K, **opt)
        t3 = -2.0 * np.einsum("...ab,...tab->...t", KK, G)
        t4 = -4.0 * np.einsum("...ij,...kl,...aik,...bl,...dj,...tabd->...t",
                              gi, gi, K, dphi, dphi, A, **opt)
        t5 = -2.0 * np.einsum("...ab,...d,...tabd->...t", inner, w, A, **opt)
        t6 = -np.einsum("...ab,...dc,...tabdc->...t", inner, inner, B, **opt)
        t7 = -np.einsum("...a,...b,...tab->...t", w, w, G, **opt)
        return Lw - (t1 + t2 + t3 + t4 + t5 + t6 + t7)
    return _memo(phi, "coordinate", build)


def sphere_terms(geo: ChartGeometry, phi_v, v, Dv_cov, w, Dw):
    """Zeroth-order part of the ambient sphere equation.

    With ``v = dphi`` (``[..., a, i]``), ``Dv_cov`` its covariant Hessian,
    returns ``(|w|^2 + 2|nabla v|^2 + 4<v, nabla w> + 2 Ric(v, v) + 2|v|^4) phi
    + 4 <nabla v(e_i, e_j), v(e_i)> v(e_j) + 2 |v|^2 w``.
    """
    gi = geo.ginv
    opt = dict(optimize=True)
    ww = np.einsum("...a,...a->...", w, w)
    KK = np.einsum("...ik,...jl,...aij,...akl->...", gi, gi, Dv_cov, Dv_cov, **opt)
    vdw = np.einsum("...ij,...ai,...aj->...", gi, v, Dw, **opt)
    ric = np.einsum("...kl,...ak,...al->...", geo.ricci_raised, v, v, **opt)
    e = np.einsum("...ij,...ai,...aj->...", gi, v, v, **opt)
    coef = ww + 2.0 * KK + 4.0 * vdw + 2.0 * e * e + 2.0 * ric
    S = np.einsum("...ia,...jb,...cij,...ca,...db->...d", gi, gi, Dv_cov, v, v, **opt)
    return coef[..., None] * phi_v + 4.0 * S + 2.0 * e[..., None] * w


def bitension_sphere_extrinsic_field(phi: GridMap):
    if not phi.target.embedded_sphere:
        raise NotOnSphere(f"target {phi.target.name} is not an embedded sphere")

    def build():
        geo = phi.domain
        w = phi.lap
        Dw = gradient(phi.lattice, w)
        Lw = laplacian(phi.lattice, geo, w)
        return Lw + sphere_terms(geo, phi.values, phi.dphi, phi.hess, w, Dw)
    return _memo(phi, "sphere-extrinsic", build)


def bitension_field(phi: GridMap, route: str | None = None):
    if route is None:
        route = "sphere-extrinsic" if phi.target.embedded_sphere else "intrinsic"
    if route == "intrinsic":
        return bitension_intrinsic_field(phi)
    if route == "coordinate":
        return bitension_coordinate_field(phi)
    if route == "sphere-extrinsic":
        return bitension_sphere_extrinsic_field(phi)
    raise BadParams(f"unknown route {route!r}")


# -- node operations -------------------------------------------------------

def tension(phi: GridMap, node):
    node = _require_node(phi.lattice, node, 1)
    return tension_field(phi)[node].copy()


def bitension_intrinsic(phi: GridMap, node):
    node = _require_node(phi.lattice, node, 2)
    return bitension_intrinsic_field(phi)[node].copy()


def bitension_coordinate(phi: GridMap, node):
    node = _require_node(phi.lattice, node, 2)
    return bitension_coordinate_field(phi)[node].copy()


def bitension_sphere_extrinsic(phi: GridMap, node):
    if not phi.target.embedded_sphere:
        raise NotOnSphere(f"target {phi.target.name} is not an embedded sphere")
    node = _require_node(phi.lattice, node, 2)
    return bitension_sphere_extrinsic_field(phi)[node].copy()


# -- embedding helpers -----------------------------------------------------

def embedding_jacobian(target: MetricChart, values):
    """``d iota`` of the polar-chart inclusion into R^{n+1} at ``values``."""
    if target.kind != "sphere-polar":
        raise BadParams("embedding needs a sphere-polar target")
    n = target.dim
    vals = np.asarray(values, dtype=float)
    comps = sphere_polar_embedding(n)(Jet3.variables(vals, n))
    return stack_jets(comps, n, vals.shape[:-1])[1]


def push_forward(phi: GridMap, vec):
    """Push a chart-valued vector field along ``d iota`` into R^{n+1}."""
    J = embedding_jacobian(phi.target, phi.values)
    return np.einsum("...Aa,...a->...A", J, vec)


def embed_map(phi: GridMap, target: MetricChart) -> GridMap:
    """Compose a map into a sphere-polar chart with the standard embedding."""
    if phi.target.kind != "sphere-polar" or not target.embedded_sphere \
            or target.dim != phi.target.dim + 1:
        raise BadParams("embed_map needs sphere-polar:n -> sphere-embedded:n")
    emb = sphere_polar_embedding(phi.target.dim)
    vals = np.stack(emb([phi.values[..., a] for a in range(phi.target.dim)]), axis=-1)
    vals = vals / np.linalg.norm(vals, axis=-1, keepdims=True)
    closed = None
    if phi.closed_form is not None:
        inner = phi.closed_form
        closed = lambda x: emb(inner(x))  # noqa: E731
    return GridMap(phi.source, target, phi.lattice, vals, closed)


# -- identities ------------------------------------------------------------

def _pieces_stencil(phi: GridMap):
    lat = phi.lattice
    dphi, K, w = phi.dphi, phi.hess, phi.lap
    dw = gradient(lat, w)
    theta = np.einsum("...ai,...a->...i", dphi, w)
    e = np.einsum("...aa->...", phi.dphi_inner)
    de, d2e = derivatives(lat, e)
    return dict(dphi=dphi, K=K, w=w, dw=dw, theta=theta, dtheta=gradient(lat, theta),
                de=de, d2e=d2e, dK=gradient(lat, K))


def _pieces_exact(phi: GridMap):
    geo = phi.domain
    _, d1, d2, d3 = phi.exact_jets()
    G, dG = geo.gamma, geo.dgamma
    gi, dgi, d2gi = geo.ginv, geo.dginv, geo.d2ginv
    K = d2 - np.einsum("...kij,...ak->...aij", G, d1)
    dK = (d3 - np.einsum("...kijl,...ak->...aijl", dG, d1)
          - np.einsum("...kij,...akl->...aijl", G, d2))
    w = np.einsum("...ij,...aij->...a", gi, K)
    dw = np.einsum("...ijl,...aij->...al", dgi, K) + np.einsum("...ij,...aijl->...al", gi, dK)
    theta = np.einsum("...ai,...a->...i", d1, w)
    dtheta = np.einsum("...aji,...a->...ji", d2, w) + np.einsum("...aj,...ai->...ji", d1, dw)
    P = np.einsum("...ai,...aj->...ij", d1, d1)
    dP = np.einsum("...aik,...aj->...ijk", d2, d1)
    dP = dP + np.swapaxes(dP, -3, -2)
    d2P = np.einsum("...aikl,...aj->...ijkl", d3, d1) + np.einsum("...aik,...ajl->...ijkl", d2, d2)
    d2P = d2P + np.swapaxes(d2P, -4, -3)
    e = np.einsum("...ij,...ij->...", gi, P)
    de = np.einsum("...ijk,...ij->...k", dgi, P) + np.einsum("...ij,...ijk->...k", gi, dP)
    d2e = (np.einsum("...ijkl,...ij->...kl", d2gi, P)
           + np.einsum("...ijk,...ijl->...kl", dgi, dP)
           + np.einsum("...ijl,...ijk->...kl", dgi, dP)
           + np.einsum("...ij,...ijkl->...kl", gi, d2P))
    return dict(dphi=d1, K=K, w=w, dw=dw, theta=theta, dtheta=dtheta, de=de, d2e=d2e, dK=dK,
                e=e)


def identity_sides(geo: ChartGeometry, p: dict):
    """Both sides of the four sphere-proof identities from derivative pieces."""
    gi, G = geo.ginv, geo.gamma
    dphi, K, w, dw = p["dphi"], p["K"], p["w"], p["dw"]
    opt = dict(optimize=True)
    out = {}
    div = (np.einsum("...ij,...ji->...", gi, p["dtheta"])
           - np.einsum("...ij,...kij,...k->...", gi, G, p["theta"], **opt))
    rhs = np.einsum("...a,...a->...", w, w) + np.einsum("...ij,...ai,...aj->...", gi, dphi, dw,
                                                        **opt)
    out["div_theta"] = (div, rhs)
    lap_e = (np.einsum("...ab,...ab->...", gi, p["d2e"])
             - np.einsum("...ab,...kab,...k->...", gi, G, p["de"], **opt))
    KK = np.einsum("...ik,...jl,...aij,...akl->...", gi, gi, K, K, **opt)
    ric = np.einsum("...kl,...ak,...al->...", geo.ricci_raised, dphi, dphi, **opt)
    rhs = 2.0 * KK + 2.0 * np.einsum("...ij,...ai,...aj->...", gi, dw, dphi, **opt) + 2.0 * ric
    out["laplacian_energy_density"] = (lap_e, rhs)
    dK = p["dK"]
    weitz = (np.einsum("...ij,...ajki->...ak", gi, dK)
             - np.einsum("...ij,...pij,...apk->...ak", gi, G, K, **opt)
             - np.einsum("...ij,...pik,...ajp->...ak", gi, G, K, **opt))
    ric_mixed = np.einsum("...kp,...pl->...kl", geo.ricci, gi)
    rhs = dw + np.einsum("...kl,...al->...ak", ric_mixed, dphi)
    out["weitzenboeck"] = (weitz, rhs)
    grad = np.einsum("...kl,...k,...al->...a", gi, p["de"], dphi, **opt)
    rhs = 2.0 * np.einsum("...ia,...jb,...cij,...ca,...db->...d", gi, gi, K, dphi, dphi, **opt)
    out["grad_energy_density"] = (grad, rhs)
    return out


def identity_checks(phi: GridMap, mode: str = "stencil"):
    """Sup-norm residuals of the four identities over the radius-2 interior.

    ``mode="exact"`` evaluates the map's closed form on jets instead of
    differencing node values; the residuals are then pure rounding error.
    Returns ``(residuals, fields)`` with per-node residual fields.
    """
    if not phi.target.embedded_sphere:
        raise NotOnSphere(f"identity checks need an embedded sphere target, "
                          f"got {phi.target.name}")
    if mode == "stencil":
        pieces = _pieces_stencil(phi)
    elif mode == "exact":
        pieces = _pieces_exact(phi)
    else:
        raise BadParams(f"unknown mode {mode!r}")
    sides = identity_sides(phi.domain, pieces)
    mask = phi.lattice.interior_mask(2)
    if not mask.any():
        raise EmptyInterior("radius-2 interior is empty")
    fields, res = {}, {}
    for name, (lhs, rhs) in sides.items():
        fields[name] = lhs - rhs
        res[name] = sup_norm(lhs - rhs, mask)
    return res, fields


def local_coordinates_check(chart: MetricChart, y, dphi, ginv, reading: str = "swapped"):
    """Residual of the symmetric-contraction identity behind the Jacobi operator.

    ``dphi[..., b, j]`` and ``ginv[..., i, j]`` are arbitrary (``ginv``
    symmetric).  Compares
    ``g^ij phi^b_j phi^w_i (dGamma^t_ba/dy^w + Gamma^c_ba Gamma^t_wc - R^t_...)``
    with ``<dphi^b, dphi^w> A^t_bwa``.  ``reading`` selects which curvature
    component enters: ``"swapped"`` uses ``R(d_w, d_a) d_b`` (the one that
    makes the identity hold), ``"literal"`` uses ``R(d_w, d_b) d_a``.
    Returns the max absolute residual per point.
    """
    geo = ChartGeometry.at(chart, y)
    G, dG, R = geo.gamma, geo.dgamma, geo.riemann
    inner = np.einsum("...ij,...bj,...wi->...bw", ginv, dphi, dphi)
    if reading == "swapped":
        Rt = np.einsum("...twab->...tbaw", R)
    elif reading == "literal":
        Rt = np.einsum("...twba->...tbaw", R)
    else:
        raise BadParams(f"unknown reading {reading!r}")
    X = dG + np.einsum("...cba,...twc->...tbaw", G, G) - Rt
    lhs = np.einsum("...bw,...tbaw->...ta", inner, X)
    rhs = np.einsum("...bw,...tbwa->...ta", inner, geo.A)
    return np.max(np.abs(lhs - rhs), axis=(-2, -1))


# -- bienergy --------------------------------------------------------------

def bienergy(phi: GridMap) -> float:
    """Riemann sum of ``|tau|^2 sqrt(det g) prod(h)`` over the radius-1 interior."""
    mask = phi.lattice.interior_mask(1)
    if not mask.any():
        raise EmptyInterior("radius-1 interior is empty")
    tau = tension_field(phi)
    if phi.target.embedded_sphere:
        sq = np.einsum("...a,...a->...", tau, tau)
    else:
        sq = np.einsum("...ab,...a,...b->...", phi.target_geometry.g, tau, tau)
    dens = sq * phi.domain.sqrt_det
    return float(np.sum(dens[mask]) * phi.lattice.cell_volume)


# -- reports ---------------------------------------------------------------

@dataclass
class TensionReport:
    phi: GridMap
    tau: np.ndarray
    tau2: dict
    theta: np.ndarray
    sup: dict = field(default_factory=dict)
    identities: dict = field(default_factory=dict)

    @classmethod
    def build(cls, phi: GridMap, routes=None, identities: str | None = None) -> "TensionReport":
        if routes is None:
            routes = ("sphere-extrinsic",) if phi.target.embedded_sphere \
                else ("intrinsic", "coordinate")
        for r in routes:
            if r not in ROUTES:
                raise BadParams(f"unknown route {r!r}")
        tau = tension_field(phi)
        tau2 = {r: bitension_field(phi, r) for r in routes}
        theta = np.einsum("...ai,...a->...i", phi.dphi, tau) if phi.target.embedded_sphere \
            else np.einsum("...ab,...ai,...b->...i", phi.target_geometry.g, phi.dphi, tau)
        m1, m2 = phi.lattice.interior_mask(1), phi.lattice.interior_mask(2)
        sup = {"tau": sup_norm(tau, m1)}
        for r, f in tau2.items():
            sup[f"tau2_{r}"] = sup_norm(f, m2)
        ids = {}
        if identities is not None:
            ids = identity_checks(phi, identities)[0]
        return cls(phi, tau, tau2, theta, sup, ids)

    def to_json(self) -> dict:
        return {"routes": list(self.tau2), "sup": dict(self.sup),
                "identity_residuals": dict(self.identities)}

    def write_csv(self, path) -> None:
        fields = {"tau": self.tau}
        fields.update({f"tau2_{r}_": f for r, f in self.tau2.items()})
        header, rows = field_rows(self.phi.lattice, fields, self.phi.lattice.interior_mask(2))
        write_csv(path, header, rows)
