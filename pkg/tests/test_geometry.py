import math

import numpy as np
import pytest

from bitension.errors import BadParams, PointOutsideChart, PoleSingular, SingularMetric, UnknownChart
from bitension.geometry import (ChartGeometry, a_from, ab_tensors, chart_catalog, christoffel,
                                christoffel_derivative_fd, curvature, curvature_pack, metric_at,
                                riemann_from, sample_interior, sectional_curvatures,
                                sphere_polar_chart_of, sphere_polar_christoffel_closed_form,
                                sphere_polar_embedding)
from bitension.jets import Jet3, stack_jets

CHARTS = ["euclidean:2", "sphere-polar:2", "sphere-polar:3", "sphere-polar:4", "flat-torus:2",
          "product(sphere-polar:1, euclidean:1)", "product(sphere-polar:2, euclidean:1)"]


def test_metric_examples():
    g, gi = metric_at(chart_catalog("euclidean:2"), [0.3, 0.7])
    assert np.array_equal(g, np.eye(2))
    g, gi = metric_at(chart_catalog("sphere-polar:2"), [0.4, math.pi / 3])
    assert np.allclose(g, np.diag([0.75, 1.0]), atol=1e-15)
    assert np.allclose(g @ gi, np.eye(2), atol=1e-12)
    with pytest.raises(SingularMetric):
        metric_at(chart_catalog("sphere-polar:2"), [0.4, 1e-9])
    with pytest.raises(PointOutsideChart):
        metric_at(chart_catalog("sphere-polar:2"), [0.4, -0.1])


def test_christoffel_examples():
    assert not np.any(christoffel(chart_catalog("euclidean:3"), [0.1, 0.2, 0.3]))
    s = math.pi / 3
    G = christoffel(chart_catalog("sphere-polar:2"), [0.2, s])
    assert G[0, 0, 1] == pytest.approx(1 / math.sqrt(3), abs=1e-14)
    assert G[0, 1, 0] == pytest.approx(1 / math.sqrt(3), abs=1e-14)
    assert G[1, 0, 0] == pytest.approx(-math.sqrt(3) / 4, abs=1e-14)
    G = christoffel(chart_catalog("sphere-polar:2"), [0.2, math.pi / 2])
    assert abs(G[1, 0, 0]) < 1e-15


def test_closed_form_examples():
    G = sphere_polar_christoffel_closed_form(2, [0.0, math.pi / 4])
    assert G[0, 0, 1] == pytest.approx(1.0, abs=1e-15)
    assert G[1, 0, 0] == pytest.approx(-0.5, abs=1e-15)
    G = sphere_polar_christoffel_closed_form(2, [0.0, math.pi / 2])
    assert abs(G[1, 0, 0]) < 1e-15 and abs(G[0, 0, 1]) < 1e-15
    for n in (2, 3):
        y = [0.1] * (n - 1) + [0.0]
        with pytest.raises(PoleSingular):
            sphere_polar_christoffel_closed_form(n, y)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_autodiff_christoffel_matches_closed_form(n, rng):
    chart = chart_catalog(f"sphere-polar:{n}")
    y = sample_interior(chart, 100, rng)
    err = np.max(np.abs(christoffel(chart, y) - sphere_polar_christoffel_closed_form(n, y)))
    assert err <= 1e-10


def test_curvature_examples(rng):
    R, Ric = curvature(chart_catalog("euclidean:3"), [0.1, 0.2, 0.3])
    assert not R.any() and not Ric.any()
    chart = chart_catalog("sphere-polar:2")
    y = sample_interior(chart, 50, rng)
    geo = ChartGeometry.at(chart, y)
    s = y[:, 1]
    assert np.allclose(geo.ricci[:, 0, 0], np.sin(s) ** 2, atol=1e-12)
    assert np.allclose(geo.ricci[:, 1, 1], 1.0, atol=1e-12)
    assert np.allclose(geo.ricci[:, 0, 1], 0.0, atol=1e-12)
    geo3 = ChartGeometry.at(chart_catalog("sphere-polar:3"),
                            sample_interior(chart_catalog("sphere-polar:3"), 50, rng))
    sec = sectional_curvatures(geo3)
    assert np.nanmax(np.abs(sec - 1.0)) <= 1e-8


@pytest.mark.parametrize("n", [2, 3, 4])
def test_round_sphere_ricci(n, rng):
    chart = chart_catalog(f"sphere-polar:{n}")
    geo = ChartGeometry.at(chart, sample_interior(chart, 100, rng))
    assert np.max(np.abs(geo.ricci - (n - 1) * geo.g)) <= 1e-8


@pytest.mark.parametrize("name", CHARTS)
def test_curvature_against_finite_difference_oracle(name, rng):
    chart = chart_catalog(name)
    y = sample_interior(chart, 30, rng)
    geo = ChartGeometry.at(chart, y)
    dG = christoffel_derivative_fd(chart, y)
    assert np.max(np.abs(riemann_from(geo.gamma, dG) - geo.riemann)) <= 1e-6
    assert np.max(np.abs(a_from(geo.gamma, dG) - geo.A)) <= 1e-6


def test_second_christoffel_derivative_against_fd(rng):
    chart = chart_catalog("sphere-polar:3")
    y = sample_interior(chart, 20, rng)
    h = 1e-3
    geo = ChartGeometry.at(chart, y)
    for d in range(3):
        e = np.zeros(3)
        e[d] = h
        D = [ChartGeometry.at(chart, y + k * e).dgamma for k in (-2, -1, 1, 2)]
        fd = (D[0] - 8 * D[1] + 8 * D[2] - D[3]) / (12 * h)
        assert np.max(np.abs(fd - geo.d2gamma[..., d])) <= 1e-6


@pytest.mark.parametrize("name", CHARTS)
def test_index_symmetries(name, rng):
    chart = chart_catalog(name)
    geo = ChartGeometry.at(chart, sample_interior(chart, 30, rng))
    G, A, B, R = geo.gamma, geo.A, geo.B, geo.riemann
    assert np.max(np.abs(G - np.swapaxes(G, -1, -2))) <= 1e-13
    assert np.max(np.abs(A - np.swapaxes(A, -3, -2))) <= 1e-13
    assert np.max(np.abs(B - np.swapaxes(B, -4, -3))) <= 1e-12
    assert np.max(np.abs(B - np.swapaxes(B, -2, -1))) <= 1e-12
    assert np.max(np.abs(R + np.swapaxes(R, -3, -2))) <= 1e-13


def test_first_bianchi(rng):
    chart = chart_catalog("sphere-polar:3")
    R = ChartGeometry.at(chart, sample_interior(chart, 100, rng)).riemann
    cyc = R + np.einsum("...twba->...tbaw", R) + np.einsum("...twba->...tawb", R)
    assert np.max(np.abs(cyc)) <= 1e-10


@pytest.mark.parametrize("name", ["euclidean:3", "flat-torus:2", "sphere-embedded:2",
                                  "product(sphere-polar:1, euclidean:1)"])
def test_flat_charts_are_exactly_zero(name, rng):
    chart = chart_catalog(name)
    pack = curvature_pack(chart, sample_interior(chart, 10, rng))
    for arr in (pack.gamma, pack.dgamma, pack.d2gamma, pack.riemann, pack.ricci, pack.A, pack.B):
        assert not np.any(arr)


def test_ab_examples():
    chart = chart_catalog("sphere-polar:2")
    A, B = ab_tensors(chart, [0.3, math.pi / 4])
    assert abs(A[1, 0, 0, 1]) < 1e-15
    geo = ChartGeometry.at(chart, [0.3, math.pi / 2])
    assert abs(geo.A[1, 0, 0, 0]) < 1e-15
    assert abs(geo.d2gamma[1, 0, 0, 0, 0]) < 1e-15


def test_b_definition_by_hand(rng):
    chart = chart_catalog("sphere-polar:3")
    y = sample_interior(chart, 1, rng)[0]
    geo = ChartGeometry.at(chart, y)
    G, dG, d2G, B = geo.gamma, geo.dgamma, geo.d2gamma, geo.B
    n = 3
    t, a, b, d, c = 2, 0, 1, 2, 1
    val = d2G[t, a, b, d, c]
    for w in range(n):
        val += dG[w, d, c, a] * G[t, w, b] + dG[w, d, c, b] * G[t, w, a]
        val += G[w, d, c] * dG[t, a, b, w]
        for s in range(n):
            val += G[w, d, c] * G[s, a, b] * G[t, w, s]
    assert B[t, a, b, d, c] == pytest.approx(val, abs=1e-13)


def test_catalog():
    g, _ = metric_at(chart_catalog("sphere-polar:2"), [1.0, 1.0])
    assert np.allclose(g, np.diag([math.sin(1.0) ** 2, 1.0]))
    prod = chart_catalog("product(sphere-polar:1, euclidean:1)")
    assert prod.dim == 2 and prod.flat
    g, _ = metric_at(prod, [0.5, 3.0])
    assert np.array_equal(g, np.eye(2))
    with pytest.raises(BadParams):
        chart_catalog("euclidean:0")
    with pytest.raises(UnknownChart):
        chart_catalog("klein-bottle:2")
    with pytest.raises(BadParams):
        chart_catalog("sphere-polar:5")


def test_product_metric_is_block_diagonal(rng):
    chart = chart_catalog("product(sphere-polar:2, euclidean:1)")
    y = sample_interior(chart, 5, rng)
    g = ChartGeometry.at(chart, y).g
    assert np.all(g[:, :2, 2] == 0) and np.all(g[:, 2, 2] == 1)
    assert np.allclose(g[:, 0, 0], np.sin(y[:, 1]) ** 2)


def test_evaluation_is_deterministic(rng):
    chart = chart_catalog("sphere-polar:3")
    y = sample_interior(chart, 10, rng)
    a, b = curvature_pack(chart, y), curvature_pack(chart, y)
    assert np.array_equal(a.B, b.B) and np.array_equal(a.riemann, b.riemann)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polar_embedding_is_isometric(n, rng):
    chart = chart_catalog(f"sphere-polar:{n}")
    y = sample_interior(chart, 20, rng)
    _, J, _, _ = stack_jets(sphere_polar_embedding(n)(Jet3.variables(y, n)), n, (20,))
    pull = np.einsum("...Ai,...Aj->...ij", J, J)
    assert np.allclose(pull, ChartGeometry.at(chart, y).g, atol=1e-13)
    x = np.stack(sphere_polar_embedding(n)([y[:, i] for i in range(n)]), axis=-1)
    assert np.allclose(np.linalg.norm(x, axis=-1), 1.0)
    back = sphere_polar_chart_of(x)
    assert np.allclose(np.cos(back[:, 0]), np.cos(y[:, 0]))
    assert np.allclose(back[:, 1:], y[:, 1:])
