import dataclasses

import numpy as np
import pytest

from isonets import quat
from isonets.crossratio import cross_ratio, is_concircular
from isonets.errors import (
    DegenerateQuadrupleError,
    NotConcircularError,
    SolveDegenerateError,
    SphereFitError,
)
from isonets.hexa import (
    TrapezoidClass,
    build_hexahedron,
    fit_two_sphere,
    solve_fourth_point,
    solve_vertex,
    supplement_check,
    trapezoid_class,
)
from tests.conftest import circle_points

ONE, I, J, K = quat.ONE, quat.I, quat.J, quat.K
ZERO = quat.quat()


def real_ratio_quadruple(rng):
    """Concircular quadruple with a generic real cross ratio."""
    while True:
        q1, q2, q3 = circle_points(rng, k=3)
        r = float(rng.uniform(0.2, 3.0)) * (1 if rng.random() < 0.5 else -1)
        try:
            q4 = solve_fourth_point(r, q1, q2, q3)
        except (SolveDegenerateError, DegenerateQuadrupleError):
            continue
        return (q1, q2, q3, q4), r


class TestSolveFourthPoint:
    def test_harmonic_square(self):
        got = solve_fourth_point(-1.0, ZERO, ONE, ONE + I)
        assert np.allclose(got, I, atol=1e-12)

    def test_collinear(self):
        got = solve_fourth_point(-1.0 / 3.0, ZERO, ONE, 2 * ONE)
        assert np.allclose(got, 3 * ONE, atol=1e-12)

    def test_prescribed_ratio_holds(self, rng):
        for _ in range(300):
            (q1, q2, q3, q4), r = real_ratio_quadruple(rng)
            v = cross_ratio(q1, q2, q3, q4)
            assert abs(v - r) <= 1e-9 * max(1.0, abs(r))
            assert is_concircular(q1, q2, q3, q4, tol=1e-7)

    def test_harmonic_of_collinear_triple_is_at_infinity(self):
        # DV(0, 1, 2, x) = -1 has no finite solution
        with pytest.raises(SolveDegenerateError):
            solve_fourth_point(-1.0, ZERO, ONE, 2 * ONE)

    def test_zero_ratio_rejected(self):
        with pytest.raises(ValueError):
            solve_fourth_point(0.0, ZERO, ONE, I)

    def test_coincident_inputs_rejected(self):
        with pytest.raises(DegenerateQuadrupleError):
            solve_fourth_point(-1.0, ZERO, ZERO, I)
        with pytest.raises(DegenerateQuadrupleError):
            solve_fourth_point(-1.0, ZERO, ONE, ZERO)

    def test_batched(self, rng):
        q1 = rng.standard_normal((50, 4))
        q2 = q1 + rng.standard_normal((50, 4))
        q3 = q2 + rng.standard_normal((50, 4))
        r = rng.uniform(0.5, 2.0, size=50)
        q4 = solve_fourth_point(r, q1, q2, q3)
        v = cross_ratio(q1, q2, q3, q4)
        assert np.all(np.abs(v - r) <= 1e-8 * np.maximum(1.0, np.abs(r)))


class TestSolveVertex:
    def test_position3_square(self):
        got = solve_vertex(3, -1.0, ZERO, ONE, I)
        assert np.allclose(got, ONE + I, atol=1e-12)

    def test_position4_matches_fourth_point(self, rng):
        (q1, q2, q3, _), r = real_ratio_quadruple(rng)
        a = solve_vertex(4, r, q1, q2, q3)
        b = solve_fourth_point(r, q1, q2, q3)
        assert np.allclose(a, b)

    def test_all_positions_roundtrip(self, rng):
        for _ in range(200):
            (q1, q2, q3, q4), r = real_ratio_quadruple(rng)
            scale = max(np.linalg.norm(p) for p in (q1, q2, q3, q4))
            recovered = [
                solve_vertex(1, r, q2, q3, q4),
                solve_vertex(2, r, q1, q3, q4),
                solve_vertex(3, r, q1, q2, q4),
                solve_vertex(4, r, q1, q2, q3),
            ]
            for got, want in zip(recovered, (q1, q2, q3, q4)):
                assert np.linalg.norm(got - want) <= 1e-9 * max(1.0, scale)

    def test_bad_position(self):
        with pytest.raises(ValueError):
            solve_vertex(5, -1.0, ZERO, ONE, I)

    def test_zero_ratio(self):
        with pytest.raises(ValueError):
            solve_vertex(2, 0.0, ZERO, ONE, I)


class TestBuildHexahedron:
    BASE = (ZERO, ONE, ONE + I, I)  # mu = -1

    def test_square_base(self):
        h = build_hexahedron(*self.BASE, lam=2.0, z1=J)
        assert h.mu == pytest.approx(-1.0, abs=1e-12)
        assert h.residual_side <= 1e-9
        assert h.residual_top <= 1e-9
        assert h.sphere_residual <= 1e-9
        assert h.sphere.contains(h.vertices, tol=1e-9)

    def test_all_six_ratios(self):
        h = build_hexahedron(*self.BASE, lam=2.0, z1=J)
        x1, x2, x3, x4 = h.x
        z1, z2, z3, z4 = h.z
        mu, lam = h.mu, h.lam
        checks = [
            (cross_ratio(x1, x2, x3, x4), mu),
            (cross_ratio(z1, z2, z3, z4), mu),
            (cross_ratio(z1, z2, x2, x1), mu * lam),
            (cross_ratio(z2, z3, x3, x2), lam),
            (cross_ratio(z3, z4, x4, x3), mu * lam),
            (cross_ratio(z4, z1, x1, x4), lam),
        ]
        for got, want in checks:
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want))

    def test_lam_one_folds_top(self):
        # lam = 1 over a square base folds the far top vertices back onto
        # the base (Z3 = X2, Z4 = X1); every residual still vanishes
        h = build_hexahedron(*self.BASE, lam=1.0, z1=J)
        assert h.residual_side <= 1e-9
        assert h.residual_top <= 1e-9
        assert h.sphere_residual <= 1e-9
        assert np.allclose(h.z[0], J, atol=1e-12)
        assert np.allclose(h.z[1], ONE + J, atol=1e-9)
        assert np.allclose(h.z[2], h.x[1], atol=1e-9)
        assert np.allclose(h.z[3], h.x[0], atol=1e-9)

    def test_exchange_symmetry(self):
        # rebuilding over the Z face with the same lam recovers the X face
        h = build_hexahedron(*self.BASE, lam=2.0, z1=J)
        back = build_hexahedron(*h.z, lam=2.0, z1=h.x[0])
        for got, want in zip(back.z, h.x):
            assert np.linalg.norm(got - want) <= 1e-8

    def test_random_admissible(self, rng):
        for _ in range(100):
            base = circle_points(rng)
            z1 = rng.standard_normal(4)
            lam = float(rng.uniform(0.3, 2.5)) * (1 if rng.random() < 0.5 else -1)
            try:
                h = build_hexahedron(*base, lam=lam, z1=z1)
            except (SolveDegenerateError, DegenerateQuadrupleError, SphereFitError):
                continue
            scale = max(1.0, float(np.linalg.norm(h.vertices, axis=1).max()))
            assert h.residual_side <= 1e-8 * scale
            assert h.residual_top <= 1e-8 * scale
            assert h.sphere_residual <= 1e-8

    def test_non_concircular_base(self):
        with pytest.raises(NotConcircularError):
            build_hexahedron(ZERO, ONE, ONE + I + J, J, lam=2.0, z1=K)

    def test_zero_lam(self):
        with pytest.raises(ValueError):
            build_hexahedron(*self.BASE, lam=0.0, z1=J)

    def test_z1_on_base_vertex(self):
        with pytest.raises(DegenerateQuadrupleError):
            build_hexahedron(*self.BASE, lam=2.0, z1=ONE)


class TestFitTwoSphere:
    def test_known_sphere_in_flat(self, rng):
        # points on a sphere of known center/radius inside the (1, i, j) flat
        center = quat.quat(0.7, -1.2, 0.4, 0.0)
        radius = 1.75
        dirs = rng.standard_normal((5, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        pts = center + radius * np.hstack([dirs, np.zeros((5, 1))])
        sphere, res = fit_two_sphere(pts)
        assert res <= 1e-10
        assert np.linalg.norm(sphere.center - center) <= 1e-10
        assert sphere.radius == pytest.approx(radius, abs=1e-10)
        assert abs(abs(sphere.flat_normal[3]) - 1.0) <= 1e-10

    def test_generic_r4_points_rejected(self, rng):
        pts = rng.standard_normal((5, 4))
        with pytest.raises(SphereFitError):
            fit_two_sphere(pts)

    def test_four_points_always_fit(self, rng):
        for _ in range(50):
            pts = rng.standard_normal((4, 4))
            sphere, res = fit_two_sphere(pts)
            assert res <= 1e-8
            assert sphere.contains(pts)

    def test_coplanar_square(self):
        pts = np.array([ZERO, ONE, ONE + I, I])
        sphere, res = fit_two_sphere(pts)
        assert res <= 1e-12
        assert sphere.radius == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_two_sphere([ZERO, ONE, I])

    def test_coincident_points(self):
        with pytest.raises(SphereFitError):
            fit_two_sphere([ONE, ONE, ONE, ONE])


class TestTrapezoidClass:
    def test_unit_square(self):
        assert trapezoid_class(ZERO, ONE, ONE + I, I) is TrapezoidClass.ISOSCELES_EMBEDDED
        assert cross_ratio(ZERO, ONE, ONE + I, I) == pytest.approx(-1.0)

    def test_rectangle(self):
        got = trapezoid_class(ZERO, ONE, ONE + 2 * I, 2 * I)
        assert got is TrapezoidClass.ISOSCELES_EMBEDDED
        assert cross_ratio(ZERO, ONE, ONE + 2 * I, 2 * I) == pytest.approx(-0.25)

    def test_generic_skew(self, rng):
        pts = rng.standard_normal((4, 4))
        assert trapezoid_class(*pts) is TrapezoidClass.NOT_TRAPEZOID

    def test_uneven_legs(self):
        # parallel sides but legs 1 vs sqrt(2): trapezoid, not isosceles
        got = trapezoid_class(ZERO, ONE, ONE + I, 2 * I)
        assert got is TrapezoidClass.TRAPEZOID

    def test_skew_parallelogram_not_isosceles(self):
        # equal legs and parallel sides, but no circle: the closed-form
        # cross ratio test must reject it
        u, v = ONE, ONE + 2 * I
        got = trapezoid_class(ZERO, u, u + v, v)
        assert got is TrapezoidClass.TRAPEZOID

    def test_crossed_isosceles(self):
        # swap the parallel-side endpoints: legs now cross, |leg| > |diag|
        got = trapezoid_class(ZERO, ONE + I, ONE, I)
        assert got in (TrapezoidClass.ISOSCELES_CROSSED, TrapezoidClass.ISOSCELES_EMBEDDED)
        assert got is TrapezoidClass.ISOSCELES_CROSSED

    def test_closed_form_value(self, rng):
        # isosceles trapezoids from parallel chords of random circles
        for _ in range(100):
            t1, t2 = rng.uniform(0.1, np.pi / 2 - 0.1, size=2)
            if abs(t1 - t2) < 1e-2:
                continue
            pts = circle_points(
                rng, angles=np.array([t1, t2, np.pi - t2, np.pi - t1])
            )
            q1, q2, q3, q4 = pts
            cls = trapezoid_class(q1, q2, q3, q4)
            assert cls in (
                TrapezoidClass.ISOSCELES_EMBEDDED,
                TrapezoidClass.ISOSCELES_CROSSED,
            )
            leg2 = quat.norm2(q1 - q2)
            diag2 = quat.norm2(q1 - q3)
            want = -leg2 / (diag2 - leg2)
            got = cross_ratio(q1, q2, q3, q4)
            assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


class TestSupplement:
    def _prism(self):
        # unit cube as a hand-built hexahedron: all faces are squares,
        # hence isosceles trapezoids in both orientations
        from isonets.hexa import Hexahedron

        base = (ZERO, ONE, ONE + I, I)
        top = tuple(p + J for p in base)
        return Hexahedron(x=base, z=top, mu=-1.0, lam=1.0)

    def test_prism_all_faces_isosceles(self):
        assert supplement_check(self._prism())

    def test_built_hexahedron_passes(self):
        h = build_hexahedron(ZERO, ONE, ONE + I, I, lam=1.0, z1=J)
        assert supplement_check(h)

    def test_generic_hexahedron_vacuous(self, rng):
        base = circle_points(rng)
        h = build_hexahedron(*base, lam=1.7, z1=rng.standard_normal(4))
        assert supplement_check(h)

    def test_broken_hexahedron_fails(self):
        h = self._prism()
        z1, z2, z3, z4 = h.z
        fake = dataclasses.replace(h, z=(z1, z2, z3 + 0.3 * K, z4))
        assert not supplement_check(fake)
