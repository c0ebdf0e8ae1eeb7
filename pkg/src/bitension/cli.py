"""Command line entry point: ``bitension <command> --config <path> [--out <dir>]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 when the
configuration is invalid.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import flow as F
from . import reduction as R
from . import tension as T
from . import warped as W
from .errors import (BadDimension, BadParams, BitensionError, ChartEscape, ConfigInvalid,
                     NotOnSphere, PointOutsideChart, SingularMetric, StepDiverged, UnknownChart)
from .fields import GridMap, Lattice, sup_norm
from .geometry import (ChartGeometry, chart_catalog, christoffel_derivative_fd, riemann_from,
                       a_from, sample_interior, sectional_curvatures,
                       sphere_polar_christoffel_closed_form)
from .presets import build_map, parse_preset
from .serialize import config_hash, field_rows, write_csv, write_json

COMMANDS = ("verify-geometry", "verify-identities", "warped", "reduce", "flow", "uc-demo")
CONFIG_ERRORS = (ConfigInvalid, UnknownChart, BadParams, BadDimension, PointOutsideChart,
                 SingularMetric, NotOnSphere, ChartEscape)


class Report:
    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.checks = []
        self.data = {}

    def check(self, name, value, tolerance, passed=None, relation="<="):
        if passed is None:
            passed = value is not None and math.isfinite(value) and value <= tolerance
        self.checks.append({"name": name, "value": value, "tolerance": tolerance,
                            "relation": relation, "passed": bool(passed)})
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> dict:
        return {"command": self.command, "config": self.config,
                "config_hash": config_hash(self.config), "checks": self.checks,
                "passed": self.passed, "data": self.data}


# -- config helpers --------------------------------------------------------

def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config must be a JSON object")
    return cfg


def get_chart(name):
    try:
        return chart_catalog(name)
    except (UnknownChart, BadParams) as exc:
        raise ConfigInvalid(str(exc)) from exc


def tolerances(cfg, defaults: dict) -> dict:
    tol = dict(defaults)
    given = cfg.get("tolerances", {})
    if not isinstance(given, dict):
        raise ConfigInvalid("tolerances must be an object")
    for k, v in given.items():
        if not isinstance(v, (int, float)) or not v > 0:
            raise ConfigInvalid(f"tolerance {k!r} must be a positive number")
        tol[k] = float(v)
    return tol


def get_lattice(spec, source) -> Lattice:
    if not isinstance(spec, dict) or "counts" not in spec:
        raise ConfigInvalid("lattice needs at least 'counts'")
    counts = spec["counts"]
    m = len(counts)
    if m != source.dim:
        raise ConfigInvalid(f"lattice has {m} axes, source {source.name} has {source.dim}")
    periodic = spec.get("periodic")
    if periodic is None and "boundary" in spec:
        bad = [b for b in spec["boundary"] if b not in ("periodic", "interior-shrink")]
        if bad:
            raise ConfigInvalid(f"unknown boundary policy {bad[0]!r}")
        periodic = [b == "periodic" for b in spec["boundary"]]
    periodic = periodic or [False] * m
    try:
        if "bounds" in spec:
            lat = Lattice.over(spec["bounds"], counts, periodic)
        else:
            lat = Lattice(tuple(counts), tuple(spec["spacing"]), tuple(periodic),
                          tuple(spec.get("origin", [0.0] * m)))
    except (KeyError, TypeError, ValueError, BadParams) as exc:
        raise ConfigInvalid(f"bad lattice spec: {exc}") from exc
    if not np.all(source.contains(lat.coords())):
        raise ConfigInvalid(f"lattice nodes leave the source chart {source.name}")
    return lat


def get_profile(spec) -> W.ProfileAlpha:
    if not isinstance(spec, dict):
        raise ConfigInvalid("profile must be an object {m, c1..c4}")
    m = spec.get("m")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ConfigInvalid(f"profile m must be a positive integer, got {m!r}")
    try:
        return W.ProfileAlpha(m, *(float(spec.get(f"c{i}", 0.0)) for i in range(1, 5)))
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad profile coefficients: {exc}") from exc


def profile_grid(p: W.ProfileAlpha, spec) -> Lattice:
    spec = spec or {}
    n = int(spec.get("n", 64 if p.m == 1 else 24))
    h = 2 * math.pi / n
    n_t = int(spec.get("n_t", n))
    t0 = float(spec.get("t0", 0.0))
    if p.m == 1:
        return W.profile_lattice(1, n, (t0, t0 + (n_t - 1) * h), n_t)
    n_s = int(spec.get("n_s", max(5, n // 2)))
    s_lo = float(spec.get("s_lo", 0.5))
    s_range = (s_lo, s_lo + (n_s - 1) * h)
    return W.profile_lattice(p.m, n, (t0, t0 + (n_t - 1) * h), n_t, s_range, n_s)


def get_map(cfg) -> GridMap:
    """Map from either ``{"profile": ...}`` or ``source``/``target``/``lattice``/``map``."""
    if "profile" in cfg and "map" not in cfg:
        p = get_profile(cfg["profile"])
        if p.m not in (1, 2):
            raise ConfigInvalid("grid embedding needs m in {1, 2}")
        return W.embed_on_grid(p, profile_grid(p, cfg.get("grid")))
    for key in ("source", "target", "lattice", "map"):
        if key not in cfg:
            raise ConfigInvalid(f"config is missing {key!r}")
    source, target = get_chart(cfg["source"]), get_chart(cfg["target"])
    lat = get_lattice(cfg["lattice"], source)
    spec = cfg["map"]
    if isinstance(spec, str):
        spec = {"preset": spec}
    if "profile" in spec:
        p = get_profile(spec["profile"])
        return W.embed_on_grid(p, lat)
    name = spec.get("preset")
    parse_preset(name)
    params = dict(spec.get("params", {}))
    params.setdefault("seed", cfg.get("seed", 0))
    try:
        return build_map(name, source, target, lat, params)
    except CONFIG_ERRORS as exc:
        raise ConfigInvalid(f"cannot build map: {exc}") from exc


def get_bump(spec, phi: GridMap) -> F.BumpSpec:
    try:
        b = F.BumpSpec(tuple(int(k) for k in spec["center"]), float(spec["radius"]),
                       float(spec.get("amplitude", 0.05)), int(spec.get("index", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad bump spec: {exc}") from exc
    if len(b.center) != phi.m or not 0 <= b.index < phi.n:
        raise ConfigInvalid("bump center or index does not fit the map")
    return b


# -- commands --------------------------------------------------------------

GEOMETRY_TOL = {"inverse": 1e-12, "christoffel": 1e-10, "ricci": 1e-8, "sectional": 1e-8,
                "fd_curvature": 1e-6, "fd_a": 1e-6, "bianchi": 1e-10, "symmetry": 1e-12}


def cmd_verify_geometry(cfg, out, rep: Report):
    names = cfg.get("charts") or ([cfg["chart"]] if "chart" in cfg else None)
    if not names:
        raise ConfigInvalid("verify-geometry needs 'charts' or 'chart'")
    charts = [get_chart(n) for n in names]
    samples = int(cfg.get("samples", 100))
    if samples < 1:
        raise ConfigInvalid("samples must be positive")
    tol = tolerances(cfg, GEOMETRY_TOL)
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    for chart in charts:
        pts = sample_interior(chart, samples, rng, float(cfg.get("margin", 0.2)))
        geo = ChartGeometry.at(chart, pts)
        n = chart.dim
        tag = chart.name
        eye = np.eye(n)
        rep.check(f"{tag}: g g^-1 = I", float(np.max(np.abs(geo.g @ geo.ginv - eye))),
                  tol["inverse"])
        G, A, B, Rm = geo.gamma, geo.A, geo.B, geo.riemann
        sym = max(np.max(np.abs(G - np.swapaxes(G, -1, -2))),
                  np.max(np.abs(A - np.swapaxes(A, -3, -2))),
                  np.max(np.abs(B - np.swapaxes(B, -4, -3))),
                  np.max(np.abs(B - np.swapaxes(B, -2, -1))))
        rep.check(f"{tag}: index symmetries of Gamma, A, B", float(sym), tol["symmetry"])
        bianchi = Rm + np.einsum("...twba->...tbaw", Rm) + np.einsum("...twba->...tawb", Rm)
        rep.check(f"{tag}: first Bianchi identity", float(np.max(np.abs(bianchi))),
                  tol["bianchi"])
        dG_fd = christoffel_derivative_fd(chart, pts)
        rep.check(f"{tag}: curvature vs finite-difference oracle",
                  float(np.max(np.abs(riemann_from(G, dG_fd) - Rm))), tol["fd_curvature"])
        rep.check(f"{tag}: A vs finite-difference oracle",
                  float(np.max(np.abs(a_from(G, dG_fd) - A))), tol["fd_a"])
        if chart.kind == "sphere-polar":
            cf = sphere_polar_christoffel_closed_form(n, pts)
            rep.check(f"{tag}: Christoffel autodiff vs closed form",
                      float(np.max(np.abs(G - cf))), tol["christoffel"])
            rep.check(f"{tag}: Ric = (n-1) g",
                      float(np.max(np.abs(geo.ricci - (n - 1) * geo.g))), tol["ricci"])
            if n >= 2:
                sec = sectional_curvatures(geo)
                rep.check(f"{tag}: coordinate sectional curvatures = 1",
                          float(np.nanmax(np.abs(sec - 1.0))), tol["sectional"])
        if chart.flat and chart.kind != "sphere-polar":
            z = max(np.max(np.abs(x)) for x in (G, Rm, geo.ricci, A, B))
            rep.check(f"{tag}: flat chart has all-zero geometry", float(z), 0.0,
                      passed=(z == 0.0), relation="==")
        rep.data[tag] = {"samples": samples, "max_abs_gamma": float(np.max(np.abs(G)))}


IDENTITY_TOL = {"exact": 1e-8, "order_min": 1.5, "order_max": 2.5, "local_coordinates": 1e-8,
                "floor": 1e-9}


def _sphere_map(cfg):
    target = get_chart(cfg.get("target", ""))
    if not (target.embedded_sphere or target.kind == "sphere-polar"):
        raise ConfigInvalid(f"sphere identities need a sphere target, got {target.name}")
    return target


def _embedded(phi: GridMap) -> GridMap:
    if phi.target.embedded_sphere:
        return phi
    return T.embed_map(phi, get_chart(f"sphere-embedded:{phi.target.dim}"))


def cmd_verify_identities(cfg, out, rep: Report):
    target = _sphere_map(cfg)
    phi = _embedded(get_map(cfg))
    tol = tolerances(cfg, IDENTITY_TOL)
    base, _ = parse_preset(cfg["map"] if isinstance(cfg["map"], str) else cfg["map"]["preset"])
    mode = cfg.get("mode", "auto")
    if mode == "auto":
        mode = "exact" if base in ("great-circle", "constant") else "convergence"
    if mode not in ("exact", "convergence"):
        raise ConfigInvalid(f"unknown identity mode {mode!r}")
    rep.data["mode"] = mode
    if mode == "exact":
        res, fields = T.identity_checks(phi, "exact")
        for name in T.IDENTITIES:
            rep.check(f"{name} residual (exact derivatives)", res[name], tol["exact"])
        rep.data["residuals"] = res
        lat, mask = phi.lattice, phi.lattice.interior_mask(2)
    else:
        fine = _embedded(_refined_map(cfg))
        coarse_res, fields = T.identity_checks(phi, "stencil")
        _, fine_fields = T.identity_checks(fine, "stencil")
        lat = phi.lattice
        mask = lat.interior_mask(2)
        sl = lat.coarse_slice()
        orders, fine_res = {}, {}
        for name in T.IDENTITIES:
            r_h = coarse_res[name]
            r_h2 = sup_norm(fine_fields[name][sl], mask)
            fine_res[name] = r_h2
            if r_h <= tol["floor"]:
                rep.check(f"{name} residual at floor", r_h, tol["floor"])
                orders[name] = None
                continue
            order = math.log2(r_h / r_h2) if r_h2 > 0 else math.inf
            orders[name] = order
            rep.check(f"{name} convergence order", order, tol["order_min"],
                      passed=tol["order_min"] <= order <= tol["order_max"], relation="in")
        rep.data.update({"residual_h": coarse_res, "residual_h2": fine_res, "orders": orders,
                         "spacing": list(lat.spacing)})
    # symmetric-contraction identity on the polar chart of the same sphere
    n = target.dim - 1 if target.embedded_sphere else target.dim
    if n >= 2:
        polar = get_chart(f"sphere-polar:{n}")
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        k = int(cfg.get("samples", 100))
        m = phi.m
        y = sample_interior(polar, k, rng)
        P = rng.normal(size=(k, n, m))
        L = rng.normal(size=(k, m, m))
        gi = L @ np.swapaxes(L, -1, -2) + m * np.eye(m)
        swapped = float(np.max(T.local_coordinates_check(polar, y, P, gi, "swapped")))
        literal = float(np.max(T.local_coordinates_check(polar, y, P, gi, "literal")))
        rep.check("local-coordinates contraction identity", swapped, tol["local_coordinates"])
        rep.data["local_coordinates"] = {"swapped_reading": swapped, "literal_reading": literal}
    header, rows = field_rows(lat, fields, mask)
    write_csv(os.path.join(out, "fields.csv"), header, rows)


def _refined_map(cfg):
    c = json.loads(json.dumps(cfg))
    source = get_chart(c["source"])
    lat = get_lattice(c["lattice"], source).refine()
    c["lattice"] = {"counts": list(lat.counts), "spacing": list(lat.spacing),
                    "periodic": list(lat.periodic), "origin": list(lat.origin)}
    return get_map(c)


WARPED_TOL = {"bitension": 1e-11, "extremum": 1e-10, "grid_factor": 10.0}


def cmd_warped(cfg, out, rep: Report):
    if "profile" not in cfg:
        raise ConfigInvalid("warped needs a 'profile'")
    p = get_profile(cfg["profile"])
    tol = tolerances(cfg, WARPED_TOL)
    interval = cfg.get("interval", [-2.0, 5.0])
    try:
        lo, hi = float(interval[0]), float(interval[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigInvalid("interval must be [lo, hi]") from exc
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ConfigInvalid("interval must be finite with lo < hi")
    ts = np.linspace(lo, hi, 1000)
    b = W.bitension_profile(p, ts)
    scale = float(np.max(np.abs(W.alpha_eval(p, ts, 4)) + 2 * p.m * np.abs(W.alpha_eval(p, ts, 2))
                         + p.m ** 2 * np.abs(W.alpha_eval(p, ts, 0))))
    rel = float(np.max(np.abs(b))) / max(1.0, scale)
    rep.check("ODE residual of bitension profile (relative)", rel, tol["bitension"])
    tp = float(np.max(np.abs(W.tension_profile(p, ts))))
    rep.check("tension profile vanishes exactly iff c2 = c4 = 0", tp, 0.0,
              passed=((tp == 0.0) == p.harmonic), relation="iff")
    ext = W.extrema(p, (lo, hi))
    rep.data["extrema"] = [r.to_json() for r in ext]
    rep.data["harmonic"] = p.harmonic
    if p.harmonic:
        try:
            W.harmonic_extremum_property(p, (lo, hi))
            ok = True
        except BitensionError:
            ok = False
        rep.check("positive extrema of harmonic profiles are minima", None, None, passed=ok,
                  relation="property")
    if p.c1 == p.c2 == p.c3 == 0 and p.c4 > 0:
        cert = W.concave_side_certificate(p.m)
        t0 = 1.0 / p.k
        rep.data["certificate"] = cert
        rep.check("maximum location t0 = 1/sqrt(m)",
                  abs(cert["t0"] - t0) if cert["t0"] is not None else None, tol["extremum"])
        rep.check("maximum value = c4/(sqrt(m) e)",
                  abs(cert["value"] * 1.0 - p.c4 * cert["radius"]) / p.c4
                  if cert["value"] is not None else None, tol["extremum"])
    for i, exp in enumerate(cfg.get("expect", [])):
        best = min(ext, key=lambda r: abs(r.t0 - float(exp["t0"])), default=None)
        err = abs(best.t0 - float(exp["t0"])) if best else None
        ok = best is not None and err <= tol["extremum"] and best.kind == exp.get("kind", best.kind)
        if best is not None and "value" in exp:
            ok = ok and abs(best.value - float(exp["value"])) <= tol["extremum"]
        rep.check(f"expected extremum #{i} ({exp.get('kind', 'any')} at t0={exp['t0']})", err,
                  tol["extremum"], passed=ok)
    if cfg.get("grid", {}) is not False and p.m in (1, 2):
        lat = profile_grid(p, cfg.get("grid") or {})
        phi = W.embed_on_grid(p, lat)
        tau_e, tau2_e = W.expected_fields(p, phi)
        h = max(lat.spacing)
        window = lat.coords()[..., -1]
        amp = max(1.0, float(np.max(np.abs(W.alpha_eval(p, window, 0)))))
        bound = tol["grid_factor"] * h * h * amp
        m1, m2 = lat.interior_mask(1), lat.interior_mask(2)
        tau = T.tension_field(phi)
        tau2 = T.bitension_field(phi)
        e1 = sup_norm(tau - tau_e, m1)
        e2 = sup_norm(tau2 - tau2_e, m2)
        rep.check("grid tau vs (alpha'' - m alpha) x", e1, bound)
        rep.check("grid tau2 vs 0", e2, bound)
        rep.data["grid"] = {"counts": list(lat.counts), "h": h, "bound": bound}
        header, rows = field_rows(lat, {"phi": phi.values, "tau": tau, "tau_expected": tau_e,
                                        "tau2": tau2}, m2)
        write_csv(os.path.join(out, "fields.csv"), header, rows)


REDUCE_TOL = {"residual": 1e-8, "blocks": 1e-8}


def cmd_reduce(cfg, out, rep: Report):
    phi = get_map(cfg)
    tol = tolerances(cfg, REDUCE_TOL)
    state = R.reduce(phi)
    total, per = R.system_residual(state, blocks=True)
    rep.check("system residual |Delta y - F|", total, tol["residual"])
    rep.data.update({"kind": state.kind, "components": state.size, "block_residuals": per})
    if phi.source.flat:
        rep.check("block 1 (Delta phi = w)", per[0], tol["blocks"])
        rep.check("block 2 (Delta v = -dw)", per[1], tol["blocks"])
    if "compare" in cfg:
        other_cfg = dict(cfg)
        other_cfg["map"] = cfg["compare"]
        other_cfg.pop("profile", None)
        if isinstance(cfg["compare"], dict) and "profile" in cfg["compare"] and "map" not in cfg:
            other_cfg = {"profile": cfg["compare"]["profile"], "grid": cfg.get("grid")}
        other = R.reduce(get_map(other_cfg))
        u = R.difference_u(state, other)
        ratio = R.aronszajn_ratio(u, phi.lattice.interior_mask(2))
        rep.data["aronszajn"] = ratio.to_json()
        rep.check("Aronszajn ratio finite", ratio.value, math.inf,
                  passed=not ratio.infinite, relation="finite")
    lat = phi.lattice
    res = R.stack_blocks(R.block_residuals(state))
    header, rows = field_rows(lat, {"y": state.y, "residual": res}, lat.interior_mask(2))
    write_csv(os.path.join(out, "fields.csv"), header, rows)


FLOW_TOL = {"slack": 1e-12, "final_ratio": 1.0}


def cmd_flow(cfg, out, rep: Report):
    phi = get_map(cfg)
    tol = tolerances(cfg, FLOW_TOL)
    fcfg = cfg.get("flow", {})
    steps = fcfg.get("steps", 100)
    if not isinstance(steps, int) or steps < 1:
        raise ConfigInvalid("flow.steps must be a positive integer")
    if "bump" in cfg:
        phi = F.perturb(phi, get_bump(cfg["bump"], phi))
    dt = fcfg.get("dt")
    if dt is None:
        dt = F.default_dt(phi, float(fcfg.get("dt_factor", 0.1)))
    if not isinstance(dt, (int, float)) or dt < 0:
        raise ConfigInvalid("flow.dt must be nonnegative")
    route = fcfg.get("route")
    try:
        state = F.run_flow(phi, dt, steps, route)
        hist = state.history
        diverged = None
    except StepDiverged as exc:
        hist = exc.state.history if exc.state is not None else ()
        diverged = str(exc)
        state = exc.state
    E = [h[0] for h in hist]
    worst = max((b - a for a, b in zip(E, E[1:])), default=0.0)
    rep.check("E2 history nonincreasing (max increase)", worst, tol["slack"],
              passed=(diverged is None and worst <= tol["slack"]))
    if E:
        rep.check("final E2 / initial E2", E[-1] / E[0] if E[0] > 0 else 0.0,
                  tol["final_ratio"])
    rep.data.update({"steps": len(hist) - 1, "initial_E2": E[0] if E else None,
                     "final_E2": E[-1] if E else None, "diverged": diverged,
                     "dt": state.dt if state is not None else dt,
                     "sign": state.sign if state is not None else None})
    write_csv(os.path.join(out, "history.csv"), ["step", "E2", "sup_tau", "sup_tau2"],
              [[i, h[0], h[2], h[1]] for i, h in enumerate(hist)])


def cmd_uc_demo(cfg, out, rep: Report):
    phi = get_map(cfg)
    if "bumps" in cfg:
        bumps = [get_bump(b, phi) for b in cfg["bumps"]]
    elif "bump" in cfg:
        bumps = [get_bump(cfg["bump"], phi)]
    else:
        spec = cfg.get("random_bumps", {"count": 10})
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        bumps = F.random_bumps(phi, int(spec.get("count", 10)), rng,
                               tuple(spec.get("radius_nodes", (3, 6))),
                               tuple(spec.get("amplitude", (0.05, 0.2))))
    base_tol = cfg.get("base_tol")
    results = []
    for i, b in enumerate(bumps):
        r = F.uc_probe(phi, b, base_tol)
        rep.check(f"bump #{i}: residual set nonempty and within 2 nodes of support",
                  int(r.residual.sum()), None, passed=r.passed, relation="locality")
        results.append({"bump": b.to_json(), **r.to_json()})
    rep.data["probes"] = results


HANDLERS = {
    "verify-geometry": cmd_verify_geometry,
    "verify-identities": cmd_verify_identities,
    "warped": cmd_warped,
    "reduce": cmd_reduce,
    "flow": cmd_flow,
    "uc-demo": cmd_uc_demo,
}


def run(command: str, cfg: dict, out: str) -> tuple[int, Report]:
    os.makedirs(out, exist_ok=True)
    rep = Report(command, cfg)
    t0 = time.perf_counter()
    try:
        HANDLERS[command](cfg, out, rep)
    except CONFIG_ERRORS as exc:
        if isinstance(exc, ConfigInvalid) or not rep.checks:
            raise ConfigInvalid(str(exc)) from exc
        rep.check(f"error: {type(exc).__name__}: {exc}", None, None, passed=False)
    except BitensionError as exc:
        rep.check(f"error: {type(exc).__name__}: {exc}", None, None, passed=False)
    write_json(os.path.join(out, "report.json"), rep.to_json())
    write_json(os.path.join(out, "timing.json"),
               {"command": command, "wall_time_s": time.perf_counter() - t0})
    return (0 if rep.passed else 1), rep


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bitension",
                                     description="Tension/bitension field engine")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default="out")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        code, rep = run(args.command, cfg, args.out)
    except ConfigInvalid as exc:
        print(f"config invalid: {exc}", file=sys.stderr)
        return 2
    for c in rep.checks:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['value']}")
    print("PASS" if code == 0 else "FAIL")
    return code


if __name__ == "__main__":
    sys.exit(main())
