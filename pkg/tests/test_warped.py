import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitension.errors import BadDimension, BadOrder, BadParams, SliceOutsideChart
from bitension.fields import GridMap, Lattice, sup_norm
from bitension.geometry import chart_catalog
from bitension.presets import build_map
from bitension.tension import bitension_field, tension_field
from bitension.warped import (ProfileAlpha, alpha_eval, bitension_profile,
                              compose_totally_geodesic_check, concave_side_certificate,
                              embed_on_grid, expected_fields, extrema, generic_bitension,
                              generic_tension, harmonic_extremum_property, profile_lattice,
                              source_chart, tension_profile, totally_geodesic_conditions,
                              unit_vector_field)
from bitension import jets
from bitension.jets import Jet3, stack_jets

from conftest import line, order

coeff = st.floats(-2, 2, allow_nan=False)
profiles = st.builds(ProfileAlpha, st.sampled_from([1, 2, 3, 4]), coeff, coeff, coeff, coeff)


def test_alpha_examples():
    p = ProfileAlpha(1, c4=1.0)
    assert alpha_eval(p, 1.0) == pytest.approx(1 / math.e, abs=1e-15)
    zero = ProfileAlpha(3)
    for k in range(5):
        assert alpha_eval(zero, 0.4, k) == 0.0
    with pytest.raises(BadOrder):
        alpha_eval(p, 0.0, 5)
    with pytest.raises(BadParams):
        ProfileAlpha(0)


@settings(max_examples=40, deadline=None)
@given(profiles, st.floats(-1.5, 1.5))
def test_derivatives_match_finite_differences(p, t):
    h = 1e-5
    for k in range(4):
        fd = (alpha_eval(p, t + h, k) - alpha_eval(p, t - h, k)) / (2 * h)
        scale = 1 + abs(alpha_eval(p, t, k + 1)) + abs(alpha_eval(p, t, k))
        assert abs(fd - alpha_eval(p, t, k + 1)) <= 1e-8 * scale * (1 + p.m) ** 2


def test_derivatives_match_jets():
    p = ProfileAlpha(2, 0.3, -1.1, 0.7, 2.0)
    t = 0.37
    v, d1, d2, d3 = stack_jets([p.jet(Jet3.variable(t, 0, 1))], 1)
    got = [alpha_eval(p, t, k) for k in range(4)]
    assert np.allclose(got, [v[0], d1[0, 0], d2[0, 0, 0], d3[0, 0, 0, 0]], rtol=1e-13)


def test_tension_profile_examples():
    ts = np.linspace(-3, 3, 101)
    assert not np.any(tension_profile(ProfileAlpha(1, c1=1.0), ts))
    assert tension_profile(ProfileAlpha(1, c4=1.0), 0.0) == pytest.approx(-2.0, abs=1e-15)
    assert not np.any(tension_profile(ProfileAlpha(1), ts))


def test_bitension_profile_examples():
    ts = np.linspace(-3, 3, 101)
    assert np.max(np.abs(bitension_profile(ProfileAlpha(1, c4=1.0), ts))) <= 1e-12
    p = ProfileAlpha(2, c1=1.0, c4=3.0)
    assert abs(bitension_profile(p, 0.7)) <= 1e-12


def test_generic_probe_on_a_non_solution():
    # alpha = t^2 at t = 1, m = 1: 0 - 2 * 2 + 1 = -3
    derivs = {0: 1.0, 1: 2.0, 2: 2.0, 3: 0.0, 4: 0.0}
    assert generic_bitension(derivs.get, 1) == -3.0
    assert generic_tension(derivs.get, 1) == 1.0


@settings(max_examples=60, deadline=None)
@given(profiles)
def test_every_profile_solves_the_ode(p):
    ts = np.linspace(-2, 2, 1000)
    scale = max(1.0, float(np.max(np.abs(alpha_eval(p, ts, 4)))))
    assert np.max(np.abs(bitension_profile(p, ts))) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(profiles)
def test_harmonic_iff_no_t_terms(p):
    ts = np.linspace(-2, 2, 1000)
    vanishes = np.all(tension_profile(p, ts) == 0.0)
    assert vanishes == p.harmonic


def test_extrema_examples():
    (r,) = extrema(ProfileAlpha(1, c4=1.0), (0, 5))
    assert r.kind == "max" and abs(r.t0 - 1) <= 1e-10 and abs(r.value - 1 / math.e) <= 1e-10
    (r,) = extrema(ProfileAlpha(1, c1=1.0, c4=-1.0), (-2, 2))
    assert r.kind == "min" and abs(r.t0) <= 1e-10 and r.value == pytest.approx(1.0, abs=1e-12)
    (r,) = extrema(ProfileAlpha(4, c4=1.0), (0, 3))
    assert r.kind == "max" and abs(r.t0 - 0.5) <= 1e-10
    assert extrema(ProfileAlpha(1, c1=1.0), (-2, 2)) == []
    with pytest.raises(BadParams):
        extrema(ProfileAlpha(1, c1=1.0), (1, 1))


def test_kind_matches_second_derivative_sign():
    p = ProfileAlpha(1, 0.2, -0.5, 1.3, 2.0)
    for r in extrema(p, (-4, 4)):
        assert (r.kind == "max") == (r.second_derivative < 0)


def test_harmonic_extremum_property():
    rep = harmonic_extremum_property(ProfileAlpha(1, c1=1.0, c3=1.0), (-2, 2))
    (e,) = rep["extrema"]
    assert e["kind"] == "min" and abs(e["t0"]) <= 1e-10 and e["value"] == pytest.approx(2.0)
    assert harmonic_extremum_property(ProfileAlpha(1, c1=1.0), (-2, 2))["extrema"] == []
    rep = harmonic_extremum_property(ProfileAlpha(2, c1=3.0, c3=5.0), (-3, 3))
    assert len(rep["extrema"]) == 1 and rep["extrema"][0]["kind"] == "min"
    with pytest.raises(BadParams):
        harmonic_extremum_property(ProfileAlpha(1, c4=1.0), (0, 1))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_concave_side_certificate(m):
    cert = concave_side_certificate(m)
    assert abs(cert["scan_max"] - 1 / (math.sqrt(m) * math.e)) <= 1e-10
    assert abs(cert["t0"] - 1 / math.sqrt(m)) <= 1e-10


def _window(m, n):
    h = 2 * math.pi / n
    if m == 1:
        return profile_lattice(1, n, (0.0, (n // 2 - 1) * h), n // 2)
    return profile_lattice(2, n, (0.0, 7 * h), 8, (0.9, 0.9 + 7 * h), 8)


@pytest.mark.parametrize("m", [1, 2])
def test_grid_tension_matches_profile(m):
    p = ProfileAlpha(m, c1=0.3, c4=1.0)
    lat = _window(m, 32 if m == 1 else 24)
    mask = lat.interior_mask(1)
    sl = tuple(slice(None, None, 2) for _ in range(lat.m))
    errs = []
    for k in range(2):
        phi = embed_on_grid(p, lat)
        tau_e, tau2_e = expected_fields(p, phi)
        diff = tension_field(phi) - tau_e
        errs.append(sup_norm(diff[sl] if k else diff, mask))
        lat = lat.refine()
    assert order(*errs) >= 1.9


def test_harmonic_profile_has_small_discrete_tension():
    lat = _window(1, 64)
    phi = embed_on_grid(ProfileAlpha(1, c1=1.0), lat)
    h = max(lat.spacing)
    assert sup_norm(tension_field(phi), lat.interior_mask(1)) <= 10 * h * h * math.e ** math.pi


def test_counterexample_grid_fields():
    lat = _window(1, 64)
    phi = embed_on_grid(ProfileAlpha(1, c4=1.0), lat)
    h = max(lat.spacing)
    x = unit_vector_field(phi)
    t = lat.coords()[..., 1]
    tau_e = (-2 * np.exp(-t))[..., None] * x
    assert sup_norm(tension_field(phi) - tau_e, lat.interior_mask(1)) <= 10 * h * h
    assert sup_norm(bitension_field(phi), lat.interior_mask(2)) <= 10 * h * h


def test_constant_profile_tension_is_minus_x():
    lat = _window(1, 64)
    phi = GridMap.from_function(source_chart(1), chart_catalog("euclidean:2"), lat,
                                lambda y: [jets.cos(y[0]), jets.sin(y[0])])
    x = unit_vector_field(phi)
    h = max(lat.spacing)
    assert sup_norm(tension_field(phi) + x, lat.interior_mask(1)) <= h * h


def test_embedding_dimension_errors():
    with pytest.raises(BadDimension):
        source_chart(3)
    with pytest.raises(BadDimension):
        embed_on_grid(ProfileAlpha(1, c1=1.0), _window(2, 24))


def test_totally_geodesic_conditions():
    S2 = chart_catalog("sphere-polar:2")
    th = np.linspace(-3, 3, 7)
    pts = np.stack([th, np.full(7, math.pi / 2)], axis=-1)
    rep = totally_geodesic_conditions(S2, [1], pts, [math.pi / 2])
    assert rep["gamma"] <= 1e-15 and rep["dgamma"] <= 1e-15 and rep["d2gamma"] <= 1e-15
    off = np.stack([th, np.full(7, 1.0)], axis=-1)
    with pytest.raises(SliceOutsideChart):
        totally_geodesic_conditions(S2, [1], off, [math.pi / 2])
    E3 = chart_catalog("euclidean:3")
    pts3 = np.column_stack([np.linspace(0, 1, 5), np.linspace(-1, 0, 5), np.zeros(5)])
    rep = totally_geodesic_conditions(E3, [2], pts3)
    assert rep["gamma"] == rep["dgamma"] == rep["d2gamma"] == 0.0
    S3 = chart_catalog("sphere-polar:3")
    pts = np.column_stack([th, np.full(7, 1.2), np.full(7, math.pi / 2)])
    rep = totally_geodesic_conditions(S3, [2], pts, [math.pi / 2])
    assert rep["gamma"] <= 1e-15 and rep["dgamma"] <= 1e-15 and rep["d2gamma"] <= 1e-15
    with pytest.raises(BadParams):
        totally_geodesic_conditions(S2, [2], pts)


def test_compose_with_equator():
    S1 = chart_catalog("sphere-polar:1")
    E1 = chart_catalog("euclidean:1")
    gc = build_map("great-circle", E1, S1, line(0, 1, 41), {"c": 1.0})
    rep = compose_totally_geodesic_check(gc)
    assert rep["residual"] <= 1e-8 and rep["sup_lhs"] <= 1e-8
    cub = build_map("cubic", E1, S1, line(0, 1, 41))
    for route in ("intrinsic", "coordinate"):
        rep = compose_totally_geodesic_check(cub, route)
        assert rep["residual"] <= 1e-8
    const = build_map("constant", E1, S1, line(0, 1, 11))
    assert compose_totally_geodesic_check(const)["residual"] == 0.0
    S2 = chart_catalog("sphere-polar:2")
    lat = Lattice.over([(0, 1), (1, 2)], (17, 17))
    phi = build_map("random-smooth", S2, S2, lat, {"seed": 5})
    rep = compose_totally_geodesic_check(phi)
    assert rep["residual"] <= 1e-10 * max(1.0, rep["sup_rhs"])
    with pytest.raises(BadParams):
        compose_totally_geodesic_check(build_map("cubic", E1, E1, line(0, 1, 11)))
