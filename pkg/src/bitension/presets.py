"""Closed-form map initializers, addressed by name.

Each preset is a function of the source coordinates written with the
:mod:`bitension.jets` functions, so it can be sampled on a lattice or
differentiated exactly.
"""

from __future__ import annotations

import math

import numpy as np

from . import jets
from .errors import BadParams, ConfigInvalid
from .fields import GridMap, Lattice
from .geometry import MetricChart, sphere_polar_embedding

PRESETS = ("identity", "constant", "great-circle", "cubic", "random-smooth")


def _target_family(target: MetricChart):
    if target.embedded_sphere:
        return "sphere-embedded", target.dim - 1
    if target.kind == "sphere-polar":
        return "sphere-polar", target.dim
    return "chart", target.dim


def _polar_rest(n):
    # equator of every nested factor
    return [math.pi / 2] * (n - 1)


def identity(source, target, params=None):
    if source.dim != target.dim:
        raise BadParams("identity needs equal source and target dimensions")
    return lambda x: list(x)


def constant(source, target, params=None):
    p = (params or {}).get("p")
    fam, n = _target_family(target)
    if p is None:
        if fam == "sphere-embedded":
            p = [0.0] * n + [1.0]
        elif fam == "sphere-polar":
            p = [0.3] + _polar_rest(n)
        else:
            p = [0.0] * n
    p = [float(c) for c in p]
    if len(p) != target.dim:
        raise BadParams(f"constant point needs {target.dim} coordinates")
    return lambda x: [c + 0.0 * x[0] for c in p]


def great_circle(source, target, params=None):
    """Unit-speed-times-``c`` geodesic along the first source coordinate."""
    c = float((params or {}).get("c", 1.0))
    fam, n = _target_family(target)
    if fam == "sphere-embedded":
        return lambda x: [jets.cos(c * x[0]), jets.sin(c * x[0])] + [0.0 * x[0]] * (n - 1)
    if fam == "sphere-polar":
        return lambda x: [c * x[0]] + [math.pi / 2 + 0.0 * x[0]] * (n - 1)
    raise BadParams("great-circle needs a sphere target")


def cubic(source, target, params=None):
    """``phi^a = (x^k)^3`` with ``k = min(a, m - 1)``."""
    m, n = source.dim, target.dim
    if target.embedded_sphere:
        raise BadParams("cubic needs a chart target")
    return lambda x: [x[min(a, m - 1)] * x[min(a, m - 1)] * x[min(a, m - 1)] for a in range(n)]


def _trig_sum(rng, m, count, amplitude):
    freq = rng.integers(1, 3, size=(count, m)).astype(float)
    phase = rng.uniform(0, 2 * math.pi, size=count)
    amp = rng.uniform(-1, 1, size=count) * amplitude / count

    def f(x):
        out = 0.0
        for k in range(count):
            arg = phase[k]
            for i in range(m):
                arg = arg + freq[k, i] * x[i]
            out = out + amp[k] * jets.sin(arg)
        return out
    return f


def random_smooth(source, target, params=None):
    """Seeded smooth map built from a few low-frequency sines.

    Sphere targets: polar angles ``(theta, s_2, ...)`` are perturbations of
    ``(x^1, pi/2, ...)`` with amplitude ``amplitude`` (default 0.4), kept away
    from the poles; embedded targets compose with the standard embedding.
    """
    params = params or {}
    rng = np.random.default_rng(int(params.get("seed", 0)))
    amplitude = float(params.get("amplitude", 0.4))
    terms = int(params.get("terms", 3))
    fam, n = _target_family(target)
    m = source.dim
    sums = [_trig_sum(rng, m, terms, amplitude) for _ in range(n)]
    if fam == "chart":
        return lambda x: [x[a % m] + sums[a](x) for a in range(n)]
    if amplitude >= 1.2:
        raise BadParams("random-smooth amplitude must stay below 1.2 for sphere targets")

    def polar(x):
        return [x[0] + sums[0](x)] + [math.pi / 2 + sums[a](x) for a in range(1, n)]
    if fam == "sphere-polar":
        return polar
    emb = sphere_polar_embedding(n)
    return lambda x: emb(polar(x))


_TABLE = {
    "identity": identity,
    "constant": constant,
    "great-circle": great_circle,
    "cubic": cubic,
    "random-smooth": random_smooth,
}


def parse_preset(name: str):
    """Split ``"great-circle:2.0"`` into ``("great-circle", {"c": 2.0})``."""
    if not isinstance(name, str):
        raise ConfigInvalid(f"preset must be a string, got {name!r}")
    base, _, arg = name.partition(":")
    base = base.strip()
    if base not in _TABLE:
        raise ConfigInvalid(f"unknown preset {name!r}")
    params = {}
    if arg:
        try:
            if base == "great-circle":
                params["c"] = float(arg)
            elif base == "constant":
                params["p"] = [float(v) for v in arg.split(",")]
            elif base == "random-smooth":
                params["seed"] = int(arg)
            else:
                raise ConfigInvalid(f"preset {base!r} takes no argument")
        except ValueError as exc:
            raise ConfigInvalid(f"bad preset argument in {name!r}") from exc
    return base, params


def preset_function(name: str, source: MetricChart, target: MetricChart, params=None):
    base, parsed = parse_preset(name)
    parsed.update(params or {})
    return _TABLE[base](source, target, parsed)


def build_map(name: str, source: MetricChart, target: MetricChart, lattice: Lattice,
              params=None) -> GridMap:
    func = preset_function(name, source, target, params)
    return GridMap.from_function(source, target, lattice, func)
