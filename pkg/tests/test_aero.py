import numpy as np
import pytest

from airfoilgen import aero
from airfoilgen.errors import (
    DegenerateGeometry,
    ExecutableMissing,
    NonPositiveTarget,
    ParseFailure,
)

from corpus import naca4_loop


class TestFlowConditions:
    def test_defaults(self):
        cond = aero.FlowConditions()
        assert cond.reynolds == 2e6
        assert cond.mach == 0.02
        assert cond.alpha == 0.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"reynolds": 0.0},
            {"reynolds": -1.0},
            {"mach": 0.5},
            {"mach": -0.1},
            {"alpha": 45.0},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            aero.FlowConditions(**kwargs)


class TestFitness:
    def test_perfect_match(self):
        t = aero.FitnessTargets(0.6, 0.006)
        assert aero.fitness(0.6, 0.006, t) == 0.0

    def test_known_value(self):
        t = aero.FitnessTargets(0.6, 0.006)
        # 10% high on both: -(0.1^2 + 0.1^2)
        assert aero.fitness(0.66, 0.0066, t) == pytest.approx(-0.02)

    def test_always_non_positive(self):
        t = aero.FitnessTargets(0.5, 0.01)
        rng = np.random.default_rng(0)
        for _ in range(50):
            cl, cd = rng.uniform(-2, 2), rng.uniform(1e-4, 0.1)
            assert aero.fitness(cl, cd, t) <= 0.0

    def test_unconverged_penalty(self):
        t = aero.FitnessTargets(0.6, 0.006)
        bad = aero.AeroResult(np.nan, np.nan, converged=False, source="xfoil")
        assert aero.fitness_of_result(bad, t) == aero.PENALTY_FITNESS

    def test_nonpositive_targets(self):
        with pytest.raises(NonPositiveTarget):
            aero.FitnessTargets(0.0, 0.006)
        with pytest.raises(NonPositiveTarget):
            aero.FitnessTargets(0.6, -0.001)


class TestGeometryChecks:
    def test_thickness_naca0012(self):
        assert aero.max_thickness_ratio(naca4_loop("0012")) == pytest.approx(
            0.12, abs=2e-3
        )

    def test_thickness_naca2415(self):
        assert aero.max_thickness_ratio(naca4_loop("2415")) == pytest.approx(
            0.15, abs=2e-3
        )

    def test_self_intersection_rejected(self):
        # bow-tie contour
        loop = np.array(
            [[1.0, 0.0], [0.0, 0.1], [1.0, 0.12], [0.0, -0.1], [1.0, 0.0]]
        )
        with pytest.raises(DegenerateGeometry):
            aero._panel_cl(loop, 0.0)

    def test_degenerate_contour_rejected(self):
        loop = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
        with pytest.raises(DegenerateGeometry):
            aero._panel_cl(loop, 0.0)


class TestPanelMethod:
    def test_symmetric_zero_alpha(self):
        cl = aero._panel_cl(naca4_loop("0012"), 0.0)
        assert cl == pytest.approx(0.0, abs=1e-6)

    def test_antisymmetry_in_alpha(self):
        loop = naca4_loop("0009")
        assert aero._panel_cl(loop, 4.0) == pytest.approx(
            -aero._panel_cl(loop, -4.0), rel=1e-6
        )

    def test_naca0012_five_degrees(self):
        # thin-airfoil theory gives 2*pi*alpha = 0.548; thickness raises it
        cl = aero._panel_cl(naca4_loop("0012"), 5.0)
        assert 0.55 < cl < 0.65

    def test_lift_slope_near_2pi(self):
        loop = naca4_loop("0006")
        slope = (aero._panel_cl(loop, 2.0) - aero._panel_cl(loop, -2.0)) / np.deg2rad(
            4.0
        )
        assert slope == pytest.approx(2 * np.pi, rel=0.08)

    def test_cambered_positive_lift_at_zero(self):
        assert aero._panel_cl(naca4_loop("4412"), 0.0) > 0.3

    def test_scale_invariance(self):
        loop = naca4_loop("2412")
        assert aero._panel_cl(loop * 3.0, 4.0) == pytest.approx(
            aero._panel_cl(loop, 4.0), rel=1e-8
        )

    def test_empirical_cd(self):
        re = 2e6
        cf = 0.074 * re ** (-0.2)
        assert aero._empirical_cd(re, 0.12) == pytest.approx(2 * cf * 1.24)
        # thicker sections pay more drag
        assert aero._empirical_cd(re, 0.20) > aero._empirical_cd(re, 0.08)

    def test_eval_panel_result(self):
        res = aero.eval_panel(naca4_loop("2412"), aero.FlowConditions(alpha=2.0))
        assert res.converged
        assert res.source == "panel"
        assert 0.2 < res.cl < 1.0
        assert 0.005 < res.cd < 0.02


class TestXfoilAdapter:
    def test_missing_executable(self, monkeypatch):
        monkeypatch.delenv("XFOIL_PATH", raising=False)
        with pytest.raises(ExecutableMissing):
            aero.find_xfoil("definitely-not-a-real-binary-name")

    def test_parse_polar(self):
        text = """
       XFOIL         Version 6.99

 Calculated polar for: airfoil

 xtrf =   1.000 (top)        1.000 (bottom)
 Mach =   0.020     Re =     2.000 e 6     Ncrit =   9.000

  alpha    CL        CD       CDp       CM     Top_Xtr  Bot_Xtr
 ------- -------- --------- --------- -------- -------- --------
   0.000   0.2459   0.00557   0.00112  -0.0531   0.6665   0.9947
"""
        rows = aero.parse_polar(text)
        assert rows == [(0.0, 0.2459, 0.00557)]

    def test_parse_polar_bad_row(self):
        with pytest.raises(ParseFailure):
            aero.parse_polar(" ------\n 0.0 abc 0.1\n")

    def test_parse_polar_short_row(self):
        with pytest.raises(ParseFailure):
            aero.parse_polar(" ------\n 0.0 0.2\n")

    def test_make_evaluator(self):
        assert aero.make_evaluator("panel") is aero.eval_panel
        with pytest.raises(ValueError):
            aero.make_evaluator("nonsense")

    def test_auto_falls_back_without_binary(self, monkeypatch):
        monkeypatch.setenv("XFOIL_PATH", "no-such-xfoil-here")
        ev = aero.make_evaluator("auto")
        assert ev is aero.eval_panel
