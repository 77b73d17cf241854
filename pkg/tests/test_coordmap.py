import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptpoisson.coordmap import (
    MapKind,
    SingularProximityWarning,
    StripGrid,
    boundary_pullback,
    cauchy_riemann_residual,
    conformal_factor,
    conjugation_residual,
    hyp_map,
    map_point,
    residual_at_step,
    trig_map,
)


class TestMaps:
    def test_trig_examples(self):
        X, Y = trig_map(math.pi / 2, 0.0)
        assert (X, Y) == pytest.approx((2.0, 0.0), abs=1e-15)
        X, Y = trig_map(math.pi / 2, 40.0)
        assert X == pytest.approx(0.0, abs=1e-15) and Y == pytest.approx(2.0, abs=1e-15)

    def test_trig_is_the_tangent_map(self):
        w = 0.9 + 0.4j
        f = 2 * np.tan(w / 2)
        assert trig_map(w.real, w.imag) == pytest.approx((f.real, f.imag), abs=1e-14)

    def test_hyp_conformal_is_the_tanh_map(self):
        w = 1.3 + 0.8j
        f = 2 * np.tanh(w / 2)
        assert hyp_map("hyp_conformal", w.real, w.imag) == pytest.approx((f.real, f.imag), abs=1e-14)

    def test_hyp_paper_examples(self):
        for x in (0.2, 1.0, 3.0):
            assert hyp_map("hyp_paper", x, 0.0) == pytest.approx((2 * math.tanh(x / 2), 0.0), abs=1e-15)
            X, Y = hyp_map("hyp_paper", x, x)
            assert X == Y

    def test_hyp_conformal_domain(self):
        with pytest.raises(ValueError):
            hyp_map("hyp_conformal", 1.0, math.pi)
        with pytest.raises(ValueError):
            hyp_map("trig", 1.0, 0.5)

    def test_labels(self):
        assert MapKind.HYP_PAPER.label == "literal non-conformal map"
        assert MapKind("hyp_conformal").label == "derived conformal map"

    def test_cauchy_riemann(self):
        assert max(cauchy_riemann_residual("trig", math.pi / 3, 0.7)) <= 1e-8
        assert max(cauchy_riemann_residual("hyp_conformal", 1.0, 0.5)) <= 1e-8
        first, second = cauchy_riemann_residual("hyp_paper", 1.0, 0.5)
        assert second > 0.1

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.2, 2.9), st.floats(0.05, 2.0))
    def test_cauchy_riemann_everywhere(self, theta, y):
        # each central difference errs by about h^2/6 times the third derivative of f = 2 tan(w/2),
        # which blows up near w = pi
        h = 1e-4
        f = 2 * cmath.tan(complex(theta, y) / 2)
        d1 = 1 + f * f / 4
        d3 = (d1 * d1 + f * f * d1 / 2) / 2
        bound = 1.5 * 2 * h * h / 6 * abs(d3) + 1e-10 * (1 + abs(f)) / h
        assert max(cauchy_riemann_residual("trig", theta, y, h=h)) <= bound


class TestPullback:
    def test_examples(self):
        assert boundary_pullback("trig", math.pi / 2) == pytest.approx((2.0, 2.0), rel=1e-14)
        Xp, jac = boundary_pullback("hyp_paper", 40.0)
        assert Xp == pytest.approx(2.0) and jac < 1e-15
        Xp, jac = boundary_pullback("trig", 1e-6)
        assert Xp == pytest.approx(1e-6, rel=1e-12) and jac == pytest.approx(1.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            boundary_pullback("trig", math.pi)
        with pytest.raises(ValueError):
            boundary_pullback("hyp_conformal", 0.0)

    @pytest.mark.parametrize("kind", list(MapKind))
    def test_boundary_consistency(self, kind):
        s = np.array([0.3, 1.0, 2.5])
        X, Y = map_point(kind, s, 0.0)
        assert np.allclose(Y, 0.0, atol=1e-15)
        assert np.allclose(X, boundary_pullback(kind, s)[0], rtol=1e-14)

    @pytest.mark.parametrize("kind", list(MapKind))
    def test_jacobian_is_derivative(self, kind):
        s, h = 1.1, 1e-5
        d = (boundary_pullback(kind, s + h)[0] - boundary_pullback(kind, s - h)[0]) / (2 * h)
        assert boundary_pullback(kind, s)[1] == pytest.approx(d, rel=1e-9)

    def test_conformal_factor_is_derivative_modulus(self):
        w = 0.7 + 0.3j
        d = 1 / np.cos(w / 2) ** 2
        assert conformal_factor("trig", w.real, w.imag) == pytest.approx(abs(d) ** 2, rel=1e-13)


class TestConjugation:
    @pytest.mark.parametrize("nu", [1.0, 1.5, 2.0])
    def test_trig_unit_coefficient_converges(self, nu):
        rep = conjugation_residual("trig", 1.0, nu)
        assert rep.empirical_order >= 1.9
        assert set(rep.to_dict()) >= {"max_residual", "l2_residual", "empirical_order", "kind", "c", "nu", "h"}

    def test_trig_sixteenth_coefficient_fails(self):
        good = residual_at_step("trig", 1.0, 1.5, 1e-3)
        bad = residual_at_step("trig", 1 / 16, 1.5, 1e-3)
        assert bad >= 10 * good
        rep = conjugation_residual("trig", 1 / 16, 1.5)
        assert rep["max_residual"] > 0.1
        assert rep.empirical_order < 0.5

    def test_hyp_conformal_converges(self):
        assert conjugation_residual("hyp_conformal", 1.0, 1.5).empirical_order >= 1.9

    def test_hyp_paper_is_reported(self):
        rep = conjugation_residual("hyp_paper", 1.0, 1.5)
        assert rep["max_residual"] > 0 and rep.meta["kind"] == "hyp_paper"

    @pytest.mark.parametrize("kind", ["trig", "hyp_conformal", "hyp_paper"])
    def test_zero_potential_is_coefficient_independent(self, kind):
        a = residual_at_step(kind, 1.0, 0.5, 0.01)
        b = residual_at_step(kind, 1 / 16, 0.5, 0.01)
        assert a == b

    def test_singular_proximity_warning(self):
        grid = StripGrid(np.array([0.01, 1.0]), np.array([0.5, 1.0]))
        with pytest.warns(SingularProximityWarning):
            rep = conjugation_residual("trig", 1.0, 1.5, grid=grid, refinements=1)
        assert rep.warnings
