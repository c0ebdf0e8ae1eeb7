import math

import numpy as np
import pytest

from bitension.errors import EmptyInterior, EmptyMask, LatticeMismatch
from bitension.fields import GridMap, Lattice, sup_norm
from bitension.flow import BumpSpec, perturb
from bitension.geometry import chart_catalog
from bitension.presets import build_map
from bitension.reduction import (DifferenceField, aronszajn_ratio, block_residuals, difference_u,
                                 reduce, rhs_F, system_residual)
from bitension.tension import bitension_field
from bitension.warped import ProfileAlpha, embed_on_grid, profile_lattice

from conftest import cubic_1d, great_circle_1d, line, sphere_map

E1 = chart_catalog("euclidean:1")
E2 = chart_catalog("euclidean:2")


def scalar_state(func, lat):
    return reduce(GridMap.from_function(E1, E1, lat, func))


def test_reduce_cubic():
    st = reduce(cubic_1d(101))
    x = st.lattice.coords()[..., 0]
    m1 = st.lattice.interior_mask(1)
    assert np.allclose(st.y[..., 0], x ** 3)
    assert np.max(np.abs(st.y[..., 1] - 3 * x ** 2)[m1]) <= 1e-4 + 1e-12
    assert np.max(np.abs(st.y[..., 2] - 6 * x)[m1]) <= 1e-10
    assert st.size == 3 and st.y.shape == (101, 3)


def test_reduce_constant():
    phi = build_map("constant", E2, E2, Lattice.over([(0, 1), (0, 1)], (9, 9)), {"p": [2.0, -1.0]})
    st = reduce(phi)
    m1 = st.lattice.interior_mask(1)
    y = st.y[m1]
    assert np.allclose(y[:, :2], [2.0, -1.0]) and not y[:, 2:].any()
    F = rhs_F(st, (4, 4))
    assert not np.any(F)
    assert system_residual(st) == 0.0


def test_reduce_great_circle_embedded():
    errs = []
    for n in (41, 81):
        st = reduce(great_circle_1d(n, c=1.5, embedded=True))
        m1 = st.lattice.interior_mask(1)
        errs.append(sup_norm(st.w + 1.5 ** 2 * st.phi.values, m1))
    assert errs[0] < 1e-3 and errs[0] / errs[1] > 3.5


def test_component_counts():
    st = reduce(sphere_map(9, embedded=True))
    assert st.kind == "sphere-embedded" and st.size == 3 * 4 == st.y.shape[-1]
    st = reduce(sphere_map(9))
    assert st.kind == "general-chart" and st.size == 2 * 4 == st.y.shape[-1]


def test_rhs_cubic():
    st = reduce(cubic_1d(21))
    x = st.lattice.coords()[10, 0]
    F = rhs_F(st, (10,))
    assert np.allclose(F, [6 * x, -6.0, 0.0], atol=1e-8)
    assert system_residual(st) <= 1e-8
    # at h = 0.01 the fourth difference sits on a rounding floor near eps / h^4
    assert system_residual(reduce(cubic_1d(101))) <= 1e-6


def test_bump_perturbed_cubic_is_not_biharmonic():
    phi = perturb(cubic_1d(101), BumpSpec((50,), 0.1, 0.1))
    assert system_residual(reduce(phi)) > 0.01


def test_profile_grid_residual_is_second_order():
    p = ProfileAlpha(1, c4=1.0)
    lat = profile_lattice(1, 32, (0.0, 15 * 2 * math.pi / 32), 16)
    mask = lat.interior_mask(2)
    errs = []
    for k in range(2):
        st = reduce(embed_on_grid(p, lat))
        _, blocks = system_residual(st, blocks=True)
        res = np.concatenate([b.reshape(b.shape[:2] + (-1,)) for b in block_residuals(st)], -1)
        errs.append(sup_norm(res[::2 ** k, ::2 ** k], mask))
        assert max(blocks[:2]) <= 1e-8
        lat = lat.refine()
    assert errs[1] <= 10 * max(lat.spacing) ** 2 * 4
    assert math.log2(errs[0] / errs[1]) >= 1.9


def test_first_blocks_are_definitional():
    lat = Lattice.over([(0, 1), (0, 1)], (17, 17))
    phi = build_map("random-smooth", E2, E2, lat, {"seed": 9})
    _, blocks = system_residual(reduce(phi), blocks=True)
    assert blocks[0] <= 1e-8 and blocks[1] <= 1e-8
    emb = build_map("random-smooth", E2, chart_catalog("sphere-embedded:2"), lat, {"seed": 2})
    _, blocks = system_residual(reduce(emb), blocks=True)
    assert blocks[0] <= 1e-8 and blocks[1] <= 1e-8


def test_curved_source_second_block_converges():
    b = []
    for n in (17, 33):
        _, blocks = system_residual(reduce(sphere_map(n)), blocks=True)
        b.append(blocks)
    assert b[0][0] <= 1e-8
    assert b[0][1] / b[1][1] > 3.0


def test_residual_tracks_bitension():
    # small residual <=> small bitension on the same interior
    for phi in (cubic_1d(101), great_circle_1d(41),
                perturb(cubic_1d(101), BumpSpec((50,), 0.1, 0.1))):
        res = system_residual(reduce(phi))
        tau2 = sup_norm(bitension_field(phi), phi.lattice.interior_mask(2))
        assert (res <= 1e-6) == (tau2 <= 1e-6)


def test_difference_examples():
    st = reduce(cubic_1d(51))
    u = difference_u(st, st)
    assert not u.u.any()
    c = 0.7
    const = reduce(build_map("constant", E1, E1, line(0, 1, 51), {"p": [c]}))
    u = difference_u(st, const)
    phi_b, v_b, w_b = u.blocks()
    x = st.lattice.coords()[..., 0]
    m1 = st.lattice.interior_mask(1)
    assert np.allclose(phi_b[..., 0], x ** 3 - c)
    assert np.allclose(v_b[m1, 0], 3 * x[m1] ** 2, atol=1e-3)
    assert np.allclose(w_b[m1, 0], 6 * x[m1], atol=1e-9)


def test_difference_of_harmonic_profiles_is_nonzero():
    lat = profile_lattice(1, 32, (0.2, 1.5), 12)
    s1 = reduce(embed_on_grid(ProfileAlpha(1, c1=1.0), lat))
    s2 = reduce(embed_on_grid(ProfileAlpha(1, c3=1.0), lat))
    u = difference_u(s1, s2)
    phi_b, _, _ = u.blocks()
    assert np.all(np.linalg.norm(phi_b, axis=-1) > 1e-3)


def test_difference_mismatch():
    with pytest.raises(LatticeMismatch):
        difference_u(reduce(cubic_1d(51)), reduce(cubic_1d(41)))
    with pytest.raises(LatticeMismatch):
        difference_u(reduce(great_circle_1d(41)), reduce(great_circle_1d(41, embedded=True)))


def field_of(values, lat):
    vals = np.asarray(values, dtype=float)[..., None]
    return DifferenceField(vals, lat, E1, 1, 1)


def test_ratio_examples():
    lat = line(0.5 - 2e-3, 1.5 + 2e-3, 1005)
    x = lat.coords()[..., 0]
    mask = lat.interior_mask(2) & (x >= 0.5 - 1e-12) & (x <= 1.5 + 1e-12)
    assert aronszajn_ratio(field_of(x, lat), mask).value <= 1e-9
    r = aronszajn_ratio(field_of(x ** 2, lat), mask)
    assert r.value == pytest.approx(1.6, abs=0.01) and not r.infinite
    z = aronszajn_ratio(field_of(0 * x, lat), mask)
    assert z.value == 0.0 and z.evaluated == 0 and z.skipped == int(mask.sum())


def test_ratio_infinite_flag():
    lat = line(-1, 1, 41)
    u = np.zeros(41)
    u[18] = u[20] = 1.0
    # at node 19: u = 0 and the central gradient is 0, but Au = 2/h^2
    mask = np.zeros(41, bool)
    mask[19] = True
    r = aronszajn_ratio(field_of(u, lat), mask)
    assert r.infinite and math.isinf(r.value)
    assert r.to_json()["C"] is None


def test_ratio_mask_errors():
    lat = line(0, 1, 21)
    f = field_of(lat.coords()[..., 0], lat)
    with pytest.raises(EmptyMask):
        aronszajn_ratio(f, np.zeros(21, bool))
    with pytest.raises(EmptyMask):
        aronszajn_ratio(f, np.ones(21, bool))


def test_empty_interior():
    with pytest.raises(EmptyInterior):
        reduce(cubic_1d(4))
