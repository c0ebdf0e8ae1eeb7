"""Explicit bienergy descent and the bump-locality probe.

The update is ``phi <- phi + s dt tau_2`` on the radius-2 interior, with the
sign ``s`` chosen once by trying both.  The boundary band never moves.
Sphere-embedded maps are projected back to the unit sphere after each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BadParams, BaseNotBiharmonic, StepDiverged, SupportTooLarge
from .fields import GridMap, sup_norm
from .reduction import reduce, system_residual
from .tension import bienergy, bitension_field, tension_field

SLACK = 1e-12
MAX_HALVINGS = 30


@dataclass(frozen=True)
class FlowState:
    phi: GridMap
    dt: float
    iteration: int
    history: tuple          # ((E2, sup|tau2|, sup|tau|), ...)
    sign: int = 1
    route: str | None = None

    @property
    def energy(self) -> float:
        return self.history[-1][0]


def measure(phi: GridMap, route=None):
    lat = phi.lattice
    return (bienergy(phi), sup_norm(bitension_field(phi, route), lat.interior_mask(2)),
            sup_norm(tension_field(phi), lat.interior_mask(1)))


def default_dt(phi: GridMap, c: float = 0.1) -> float:
    return c * min(phi.lattice.spacing) ** 4


def _project(phi: GridMap, vals, moved):
    if phi.target.embedded_sphere:
        norms = np.linalg.norm(vals[moved], axis=-1, keepdims=True)
        vals[moved] = vals[moved] / norms
    return vals


def _advance(phi: GridMap, dt: float, sign: int, route) -> GridMap:
    mask = phi.lattice.interior_mask(2)
    vals = np.array(phi.values)
    vals[mask] += sign * dt * bitension_field(phi, route)[mask]
    return phi.with_values(_project(phi, vals, mask))


def start(phi: GridMap, dt: float | None = None, route=None) -> FlowState:
    dt = default_dt(phi) if dt is None else float(dt)
    if dt < 0:
        raise BadParams("dt must be nonnegative")
    return FlowState(phi, dt, 0, (measure(phi, route),), 1, route)


def choose_sign(state: FlowState) -> FlowState:
    """Probe both signs on one step and keep the one that lowers E2 more.

    ``dt`` is halved until one sign does not increase E2; if both signs raise
    E2 by more than 10% at every tried step size, :class:`StepDiverged`.
    """
    e0 = state.energy
    dt = state.dt
    if dt == 0:
        return state
    for _ in range(MAX_HALVINGS):
        trial = {s: bienergy(_advance(state.phi, dt, s, state.route)) for s in (1, -1)}
        s = min(trial, key=trial.get)
        if trial[s] <= e0 + SLACK:
            return replace(state, sign=s, dt=dt)
        dt /= 2
    if min(trial.values()) > 1.1 * e0:
        raise StepDiverged("E2 increases for both signs", state)
    raise StepDiverged("no step size decreases E2", state)


def flow_step(state: FlowState) -> FlowState:
    """One descent step, halving ``dt`` while the bienergy would increase."""
    if state.dt == 0:
        return replace(state, iteration=state.iteration + 1,
                       history=state.history + (state.history[-1],))
    e0 = state.energy
    dt = state.dt
    for _ in range(MAX_HALVINGS):
        phi = _advance(state.phi, dt, state.sign, state.route)
        rec = measure(phi, state.route)
        if rec[0] <= e0 + SLACK:
            return FlowState(phi, dt, state.iteration + 1, state.history + (rec,), state.sign,
                             state.route)
        dt /= 2
    raise StepDiverged(f"E2 increased at step {state.iteration + 1} for every step size",
                       state)


def run_flow(initial: GridMap, dt: float | None = None, steps: int = 100,
             route=None) -> FlowState:
    if not isinstance(steps, (int, np.integer)) or steps < 1:
        raise BadParams(f"steps must be a positive integer, got {steps!r}")
    state = choose_sign(start(initial, dt, route))
    for _ in range(steps):
        state = flow_step(state)
    return state


# -- bumps -----------------------------------------------------------------

@dataclass(frozen=True)
class BumpSpec:
    center: tuple           # node index
    radius: float           # chart units
    amplitude: float
    index: int = 0          # target coordinate

    def to_json(self) -> dict:
        return {"center": list(self.center), "radius": self.radius,
                "amplitude": self.amplitude, "index": self.index}


def bump_profile(d, radius):
    """``exp(1 - 1/(1 - (d/r)^2))`` inside the ball, 0 outside; peak value 1."""
    d = np.asarray(d, dtype=float)
    q = np.clip(d / radius, 0.0, 1.0)
    inside = q < 1.0
    out = np.zeros_like(q)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside] ** 2))
    return out


def bump_values(phi: GridMap, bump: BumpSpec):
    lat = phi.lattice
    if len(bump.center) != lat.m or not lat.in_interior(bump.center, 0):
        raise SupportTooLarge(f"bump center {bump.center} is not a lattice node")
    if not 0 <= bump.index < phi.n or not bump.radius > 0:
        raise BadParams("bump index out of range or radius not positive")
    coords = lat.coords()
    diff = coords - coords[tuple(bump.center)]
    for i, (p, n, h) in enumerate(zip(lat.periodic, lat.counts, lat.spacing)):
        if p:
            period = n * h
            diff[..., i] = (diff[..., i] + period / 2) % period - period / 2
    d = np.linalg.norm(diff, axis=-1)
    return bump_profile(d, bump.radius), d < bump.radius


def perturb(phi: GridMap, bump: BumpSpec) -> GridMap:
    """Add ``amplitude * bump`` to one target coordinate."""
    b, support = bump_values(phi, bump)
    if np.any(support & ~phi.lattice.interior_mask(2)):
        raise SupportTooLarge("bump support reaches the boundary band")
    vals = np.array(phi.values)
    vals[..., bump.index] += bump.amplitude * b
    return phi.with_values(_project(phi, vals, support))


def dilate(mask, radius: int = 2):
    """Chebyshev dilation by ``radius`` nodes (wrapping on every axis)."""
    out = np.array(mask, dtype=bool)
    base = out.copy()
    m = base.ndim
    for shift in np.ndindex(*([2 * radius + 1] * m)):
        s = tuple(k - radius for k in shift)
        out |= np.roll(base, s, axis=tuple(range(m)))
    return out


@dataclass
class LocalityReport:
    differ: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)
    base_residual: float = 0.0
    threshold: float = 0.0
    nonempty: bool = False
    contained: bool = False
    passed: bool = False

    def to_json(self) -> dict:
        return {"differ_nodes": [list(map(int, k)) for k in zip(*np.nonzero(self.differ))],
                "residual_nodes": [list(map(int, k)) for k in zip(*np.nonzero(self.residual))],
                "base_residual": self.base_residual, "threshold": self.threshold,
                "nonempty": self.nonempty, "contained": self.contained, "passed": self.passed}


def uc_probe(base: GridMap, bump: BumpSpec, tol: float | None = None,
             factor: float = 3.0) -> LocalityReport:
    """Where does a bump make the bitension field light up?

    The residual set is where ``|tau_2|`` of the perturbed map exceeds
    ``factor`` times the base map's sup.  It must be nonempty (for a nonzero
    bump) and lie within two nodes of the nodes that moved.
    """
    tol = 10.0 * max(base.lattice.spacing) ** 2 if tol is None else tol
    res = system_residual(reduce(base))
    if res > tol:
        raise BaseNotBiharmonic(f"base residual {res:.3e} exceeds {tol:.3e}")
    mask = base.lattice.interior_mask(2)
    t_base = bitension_field(base)
    base_sup = sup_norm(t_base, mask)
    pert = perturb(base, bump)
    differ = np.any(pert.values != base.values, axis=-1)
    mag = np.linalg.norm(bitension_field(pert), axis=-1)
    thr = factor * base_sup
    residual = mask & (mag > thr)
    contained = not np.any(residual & ~dilate(differ, 2))
    nonempty = bool(residual.any())
    passed = contained and (nonempty or not differ.any())
    return LocalityReport(differ, residual, base_sup, thr, nonempty, contained, passed)


def random_bumps(phi: GridMap, count: int, rng: np.random.Generator, radius_nodes=(3, 6),
                 amplitude=(0.05, 0.2), index=None):
    """Bumps with random centers whose support stays inside the radius-2 interior."""
    lat = phi.lattice
    h = max(lat.spacing)
    out = []
    while len(out) < count:
        r = rng.uniform(*radius_nodes) * h
        margin = [0 if p else 2 + int(math.ceil(r / hi)) + 1
                  for p, hi in zip(lat.periodic, lat.spacing)]
        if any(2 * mg >= n for mg, n in zip(margin, lat.counts)):
            raise SupportTooLarge("lattice too small for the requested bump radius")
        center = tuple(int(rng.integers(mg, n - mg)) for mg, n in zip(margin, lat.counts))
        amp = float(rng.uniform(*amplitude)) * (1 if rng.random() < 0.5 else -1)
        idx = int(rng.integers(phi.n)) if index is None else index
        out.append(BumpSpec(center, float(r), amp, idx))
    return out
