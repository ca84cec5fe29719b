import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import polynomial as P

from leakyscm.spectral import (
    GridError,
    cheb_diff_matrices,
    interpolate,
    map_guide,
    map_half_space,
    reference_grid,
)


def lagrange_derivatives(s):
    """Dense D1, D2 from explicit Lagrange basis polynomials."""
    n = len(s)
    d1 = np.empty((n, n))
    d2 = np.empty((n, n))
    for j in range(n):
        others = np.delete(s, j)
        coef = P.polyfromroots(others) / np.prod(s[j] - others)
        d1[:, j] = P.polyval(s, P.polyder(coef))
        d2[:, j] = P.polyval(s, P.polyder(coef, 2))
    return d1, d2


def test_three_point_matrix():
    ref = reference_grid(3)
    np.testing.assert_allclose(ref.s, [-1.0, 0.0, 1.0], atol=1e-15)
    expected = [[-1.5, 2.0, -0.5], [-0.5, 0.0, 0.5], [0.5, -2.0, 1.5]]
    np.testing.assert_allclose(ref.d1, expected, atol=1e-14)


def test_two_point_matrix():
    s, (d1,) = cheb_diff_matrices(2, order=1)
    np.testing.assert_allclose(s, [-1.0, 1.0])
    np.testing.assert_allclose(d1, [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15)
    with pytest.raises(GridError):
        reference_grid(2)


@pytest.mark.parametrize("n", [4, 7, 12, 17])
def test_matches_lagrange_basis(n):
    ref = reference_grid(n)
    d1, d2 = lagrange_derivatives(ref.s)
    np.testing.assert_allclose(ref.d1, d1, atol=1e-9 * n**2)
    np.testing.assert_allclose(ref.d2, d2, atol=1e-9 * n**4)


def test_nodes_ordered_and_row_sums():
    ref = reference_grid(50)
    assert np.all(np.diff(ref.s) > 0)
    assert ref.s[0] == -1.0 and ref.s[-1] == 1.0
    assert np.max(np.abs(ref.d1.sum(axis=1))) < 1e-10
    assert np.max(np.abs(ref.d2.sum(axis=1))) < 1e-7


@settings(max_examples=30, deadline=None)
@given(coef=st.lists(st.floats(-5, 5), min_size=1, max_size=12))
def test_exact_on_polynomials(coef):
    ref = reference_grid(14)
    c = np.array(coef)
    f = P.polyval(ref.s, c)
    scale = 1 + np.abs(c).sum() * 14**4
    np.testing.assert_allclose(ref.d1 @ f, P.polyval(ref.s, P.polyder(c)), atol=1e-11 * scale)
    np.testing.assert_allclose(ref.d2 @ f, P.polyval(ref.s, P.polyder(c, 2)), atol=1e-11 * scale)


def test_guide_map():
    ref = reference_grid(30)
    g = map_guide(ref, 0.5)
    y = g.y.real
    f = np.sin(3 * y)
    np.testing.assert_allclose(g.d1 @ f, 3 * np.cos(3 * y), atol=1e-10)
    np.testing.assert_allclose(g.d2 @ f, -9 * f, atol=1e-8)
    assert g.y[g.interface_index] == -0.5


def test_half_space_exponential():
    d = 0.5
    grid = map_half_space(reference_grid(50), "side_b", d, 10.0)
    fin = grid.finite
    g = np.zeros(50, dtype=complex)
    g[fin] = np.exp(-(grid.y[fin] - d))
    err1 = np.abs(grid.d1 @ g + g)[fin].max()
    err2 = np.abs(grid.d2 @ g - g)[fin].max()
    assert err1 < 1e-6 and err2 < 1e-6
    assert grid.y[grid.interface_index] == d
    assert np.isinf(grid.y[grid.infinity_index])


@pytest.mark.parametrize("zeta", [10.0, 10j, 3 + 4j])
def test_chain_rule_identity(zeta):
    # metric written in s against the same quantities written in y
    d = 0.5
    ref = reference_grid(40)
    grid = map_half_space(ref, "side_b", d, zeta)
    fin = grid.finite
    y = grid.y[fin]
    m1 = 2 * zeta / (zeta + y - d) ** 2
    m2 = -4 * zeta / (zeta + y - d) ** 3
    d1 = m1[:, None] * ref.d1[fin]
    d2 = m2[:, None] * ref.d1[fin] + (m1**2)[:, None] * ref.d2[fin]
    np.testing.assert_allclose(grid.d1[fin], d1, rtol=1e-13, atol=1e-13 * np.abs(d1).max())
    np.testing.assert_allclose(grid.d2[fin], d2, rtol=1e-13, atol=1e-13 * np.abs(d2).max())


@pytest.mark.parametrize("zeta", [10.0, 10j])
def test_mirror_symmetry(zeta):
    ref = reference_grid(25)
    a = map_half_space(ref, "side_a", 0.5, zeta)
    b = map_half_space(ref, "side_b", 0.5, zeta)
    fin = b.finite
    np.testing.assert_allclose(a.y[::-1][fin], -b.y[fin], rtol=1e-14)
    # reversing the node order flips y, so d/dy picks up a sign and d2/dy2 does not
    np.testing.assert_allclose(a.d1[::-1, ::-1], -b.d1, atol=1e-12 * np.abs(b.d1).max())
    np.testing.assert_allclose(a.d2[::-1, ::-1], b.d2, atol=1e-12 * np.abs(b.d2).max())


def test_complex_path_decays_leaky_wave():
    # exp(i k y) with real k grows nowhere along y = d + i * t
    d, k = 0.5, 2.0
    grid = map_half_space(reference_grid(50), "side_b", d, 10j)
    fin = grid.finite
    g = np.zeros(50, dtype=complex)
    g[fin] = np.exp(1j * k * (grid.y[fin] - d))
    assert np.abs(g).max() <= 1.0 + 1e-12
    err = np.abs(grid.d1 @ g - 1j * k * g)[fin].max()
    assert err < 1e-5


def test_bad_zeta():
    ref = reference_grid(5)
    with pytest.raises(GridError):
        map_half_space(ref, "side_b", 0.5, 0.0)
    with pytest.raises(GridError):
        map_half_space(ref, "side_b", 0.5, -1.0)
    with pytest.raises(GridError):
        map_guide(ref, 0.0)


def test_interpolate():
    ref = reference_grid(20)
    f = np.cos(2 * ref.s)
    x = np.linspace(-1, 1, 37)
    np.testing.assert_allclose(interpolate(ref.s, f, x), np.cos(2 * x), atol=1e-12)
    np.testing.assert_allclose(interpolate(ref.s, f, ref.s), f)
