import numpy as np
import pytest

from isonets import quat
from isonets.errors import DegenerateNetError
from isonets.lattice import (
    LatticeWindow,
    Net,
    elementary_cross_ratios,
    gen_clifford_torus,
    gen_cylinder,
    gen_planar_grid,
    is_curvature_line_net,
    is_isothermic,
)


def net_from_function(M, N, fn, **kw):
    vals = np.zeros((M, N, 4))
    for m in range(M):
        for n in range(N):
            vals[m, n] = fn(m, n)
    return Net(LatticeWindow(0, 0, M, N, **kw), vals)


class TestWindow:
    def test_too_small(self):
        with pytest.raises(ValueError):
            LatticeWindow(0, 0, 1, 5)

    def test_contains_and_index(self):
        w = LatticeWindow(2, -1, 4, 3)
        assert w.contains(2, -1)
        assert w.contains(5, 1)
        assert not w.contains(6, 0)
        assert w.index(3, 0) == (1, 1)
        with pytest.raises(IndexError):
            w.index(6, 0)

    def test_wrap_index(self):
        w = LatticeWindow(0, 0, 4, 3, wrap_m=True)
        assert w.index(4, 0) == (0, 0)
        assert w.index(-1, 2) == (3, 2)
        with pytest.raises(IndexError):
            w.index(0, 3)  # n not wrapped

    def test_dual_index_counts(self):
        assert len(list(LatticeWindow(0, 0, 4, 3).dual_indices())) == 3 * 2
        assert len(list(LatticeWindow(0, 0, 4, 3, wrap_m=True).dual_indices())) == 4 * 2
        assert len(list(
            LatticeWindow(0, 0, 4, 3, wrap_m=True, wrap_n=True).dual_indices()
        )) == 4 * 3

    def test_interior_sites(self):
        w = LatticeWindow(0, 0, 4, 3)
        assert list(w.interior_sites()) == [(1, 1), (2, 1)]
        ww = LatticeWindow(0, 0, 4, 3, wrap_m=True)
        assert len(list(ww.interior_sites())) == 4 * 1


class TestNet:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Net(LatticeWindow(0, 0, 3, 3), np.zeros((3, 4, 4)))

    def test_values_read_only(self):
        net = gen_planar_grid(3, 3)
        with pytest.raises(ValueError):
            net.values[0, 0, 0] = 5.0

    def test_point_wraps(self):
        cyl = gen_cylinder(6, 4)
        assert np.array_equal(cyl.point(6, 0), cyl.point(0, 0))

    def test_diameter(self):
        net = gen_planar_grid(3, 4)
        assert net.diameter() == pytest.approx(np.sqrt(4 + 9))

    def test_edges_counts(self):
        cyl = gen_cylinder(6, 4)
        assert len(cyl.edges("m")) == 6 * 4   # seam included
        assert len(cyl.edges("n")) == 6 * 3
        with pytest.raises(ValueError):
            cyl.edges("k")


class TestPlanarGrid:
    def test_all_cross_ratios_minus_one(self):
        crs = elementary_cross_ratios(gen_planar_grid(6, 5))
        assert len(crs) == 5 * 4
        for v in crs.values():
            assert v == pytest.approx(-1.0, abs=1e-12)

    def test_predicates(self):
        g = gen_planar_grid(6, 5)
        assert is_isothermic(g)
        assert is_curvature_line_net(g)

    def test_anisotropic_grid(self):
        # F = m + 2 n i: rectangles with side ratio 1 : 2, ratio -1/4
        g = net_from_function(6, 5, lambda m, n: quat.quat(m, 2 * n))
        crs = elementary_cross_ratios(g)
        for v in crs.values():
            assert v == pytest.approx(-0.25, abs=1e-12)
        assert is_curvature_line_net(g)
        assert not is_isothermic(g)


class TestCylinder:
    def test_isothermic(self):
        cyl = gen_cylinder(12, 6)
        assert is_isothermic(cyl, tol=1e-10)

    def test_imaginary(self):
        assert gen_cylinder(12, 6).is_imaginary(tol=1e-12)

    def test_seam_quads_present_and_square(self):
        cyl = gen_cylinder(8, 4)
        crs = elementary_cross_ratios(cyl)
        assert len(crs) == 8 * 3
        for n in range(3):
            assert crs[(7, n)] == pytest.approx(-1.0, abs=1e-12)

    def test_edge_lengths_matched(self):
        M, r = 10, 1.3
        cyl = gen_cylinder(M, 5, r=r)
        h = 2.0 * r * np.sin(np.pi / M)
        _, a, b = cyl.edge_vectors("m")
        assert np.allclose(quat.norm(b - a), h, atol=1e-12)
        _, a, b = cyl.edge_vectors("n")
        assert np.allclose(quat.norm(b - a), h, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_cylinder(2, 5)
        with pytest.raises(ValueError):
            gen_cylinder(8, 5, r=0.0)


class TestCliffordTorus:
    def test_square_torus_isothermic(self):
        t = gen_clifford_torus(12, 12)
        assert is_isothermic(t, tol=1e-9)
        crs = elementary_cross_ratios(t)
        assert len(crs) == 12 * 12

    def test_rectangular_torus_constant_ratio(self):
        M, N = 12, 8
        t = gen_clifford_torus(M, N)
        want = -np.sin(np.pi / M) ** 2 / np.sin(np.pi / N) ** 2
        for v in elementary_cross_ratios(t).values():
            assert v == pytest.approx(want, abs=1e-9)
        assert is_curvature_line_net(t)
        assert not is_isothermic(t)

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_clifford_torus(2, 8)


class TestPredicatesNegative:
    def test_perturbed_grid_rejected(self, rng):
        g = gen_planar_grid(6, 5)
        vals = g.values + 0.1 * rng.standard_normal(g.values.shape)
        noisy = g.with_values(vals)
        assert not is_curvature_line_net(noisy)
        assert not is_isothermic(noisy)

    def test_degenerate_quad_raises(self):
        g = gen_planar_grid(3, 3)
        vals = g.values.copy()
        vals[1, 1] = vals[1, 0]  # collapse one edge used in an inverse
        with pytest.raises(DegenerateNetError):
            elementary_cross_ratios(g.with_values(vals))


class TestSimilarityInvariance:
    def test_cross_ratios_preserved(self, rng):
        net = gen_cylinder(8, 4)
        q = rng.standard_normal(4)
        p = rng.standard_normal(4)
        t = rng.standard_normal(4)
        moved = net.with_values(quat.mul(quat.mul(q, net.values), p) + t)
        a = elementary_cross_ratios(net)
        b = elementary_cross_ratios(moved)
        for k in a:
            assert abs(a[k] - b[k]) <= 1e-10 * max(1.0, abs(a[k]))
