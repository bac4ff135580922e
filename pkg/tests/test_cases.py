"""Benchmark definitions, convergence driver, and report output."""

import io

import numpy as np
import pytest

from klshell import make_uniform, surface_eval
from klshell.cases import (ConvergenceReport, make_case, run_convergence,
                           write_report_csv)


class TestGeometryExactness:
    @pytest.mark.parametrize("case_id,tol", [
        ("strip", 1e-10), ("hemisphere", 1e-10),
        ("scordelis", 1e-10), ("hypar", 1e-12),
    ])
    def test_implicit_equation_after_refinement(self, case_id, tol):
        case = make_case(case_id)
        rng = np.random.default_rng(17)
        for mesh in ((1, 1), (6, 5), (16, 3)):
            s = make_uniform(case.surface, *mesh)
            for t1, t2 in rng.random((40, 2)):
                r, = surface_eval(s, t1, t2, order=0)
                assert abs(case.implicit_residual(r)) < tol

    def test_monitor_point_on_patch(self):
        for case_id in ("strip", "hemisphere", "scordelis", "hypar"):
            case = make_case(case_id)
            t1, t2 = case.monitor_theta
            assert 0.0 <= t1 <= 1.0 and 0.0 <= t2 <= 1.0
            r, = surface_eval(case.surface, t1, t2, order=0)
            assert abs(case.implicit_residual(r)) < 1e-10

    def test_hemisphere_monitor_is_loaded_corner(self):
        case = make_case("hemisphere")
        r, = surface_eval(case.surface, *case.monitor_theta, order=0)
        assert np.allclose(r, [10.0, 0.0, 0.0], atol=1e-12)


class TestCaseFactories:
    def test_slenderness_to_thickness(self):
        case = make_case("strip", slenderness=1e2)
        assert abs(case.material.t - 0.1) < 1e-14
        case = make_case("hypar", slenderness=1e3)
        assert abs(case.material.t - 1e-3) < 1e-18

    def test_exclusive_selectors(self):
        with pytest.raises(ValueError):
            make_case("strip", thickness=0.1, slenderness=1e2)
        with pytest.raises(ValueError):
            make_case("nosuch")

    def test_reference_lookup(self):
        assert make_case("strip", slenderness=1e2).reference == -9.4250e-1
        assert make_case("scordelis", slenderness=1e3).reference == -3.2010e1
        assert make_case("strip", thickness=0.123).reference is None

    def test_mesh_levels(self):
        strip = make_case("strip")
        assert strip.mesh_at_level(0) == (2, 1)
        assert strip.mesh_at_level(3) == (16, 1)
        hypar = make_case("hypar")
        assert hypar.mesh_at_level(2) == (8, 4)


class TestCurvedCantileverOracle:
    def test_thin_limit_tip_deflection(self, bench):
        """Unit-force energy method for a quarter-circle cantilever.

        delta = integral of M dM/dP / (E I) ds with M = P R sin(phi),
        evaluated by quadrature, independent of the shell kernel.
        """
        R, E, b, t = 10.0, 1.0e3, 1.0, 0.01
        P = 0.1 * t ** 3
        inertia = b * t ** 3 / 12.0
        phi = np.linspace(0.0, np.pi / 2.0, 20001)
        delta = np.trapezoid(P * (R * np.sin(phi)) ** 2 / (E * inertia), phi) * R
        lvl = bench.strip_level("cas", 3, 1e3, 64)
        assert abs(abs(lvl["deflection"]) - delta) <= 1e-3 * delta


class TestConvergenceDriver:
    def test_single_level_report(self):
        case = make_case("strip", slenderness=1e2)
        report = run_convergence(case, "cas", 3, 1)
        assert len(report.rows) == 1
        row = report.rows[0]
        assert row["n_el_u"] == 2 and row["n_el_v"] == 1
        assert row["e_n11"] is not None and row["Em"] is not None

    def test_levels_increase(self):
        case = make_case("scordelis", slenderness=1e2)
        report = run_convergence(case, "cas", 3, 2, with_errors=False,
                                 with_energies=False)
        assert [r["n_el_u"] for r in report.rows] == [4, 8]

    def test_invalid_levels(self):
        with pytest.raises(ValueError):
            run_convergence(make_case("strip"), "cas", 3, 0)

    def test_locking_free_normalized_window(self, bench):
        """cas deflections stay within 10% of the reference once every
        direction carries at least 8 elements."""
        for slend in (1e1, 1e3):
            for n in (8, 16):
                lvl = bench.strip_level("cas", 3, slend, n)
                assert 0.9 <= lvl["normalized"] <= 1.1
        for case_id, slend, mesh in (("scordelis", 1e2, (8, 8)),
                                     ("hemisphere", 2.5e2, (8, 8)),
                                     ("hypar", 1e2, (16, 8))):
            case, res = bench.solve(case_id, slend, mesh, "cas")
            assert 0.9 <= res.normalized <= 1.1

    def test_strip_membrane_energy_fraction_matches_fine_mesh(self, bench):
        """8-element membrane energy fraction tracks the converged one."""
        for slend in (1e1, 1e2, 1e3):
            c8 = bench.strip_level("cas", 3, slend, 8)
            c256 = bench.strip_level("cas", 3, slend, 256)
            f8 = c8["Em"] / c8["Et"]
            f256 = c256["Em"] / c256["Et"]
            assert abs(f8 - f256) <= 0.02 * f256


class TestReportCsv:
    def _report(self):
        case = make_case("strip", slenderness=1e2)
        return run_convergence(case, "cas", 3, 2)

    def test_csv_shape_and_parse(self):
        report = self._report()
        buf = io.StringIO()
        write_report_csv(report, buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == ",".join(ConvergenceReport.COLUMNS)
        assert len(lines) == 3
        first = lines[1].split(",")
        assert int(first[0]) == 0
        assert float(first[4]) == report.rows[0]["deflection"]

    def test_csv_bitwise_deterministic(self):
        a, b = io.StringIO(), io.StringIO()
        write_report_csv(self._report(), a)
        write_report_csv(self._report(), b)
        assert a.getvalue() == b.getvalue()


class TestConvergedResultantFields:
    """Converged strip fields against the closed-form force and moment."""

    def test_effective_membrane_field(self, bench):
        case, res = bench.solve("strip", 1e3, (64, 1), "cas")
        from klshell.fields import l2_resultant_error
        err = l2_resultant_error(res.solution, case.analytic["neff11"], "neff11")
        assert err < 0.02

    def test_pointwise_signs_match_closed_form(self, bench):
        import klshell
        case, res = bench.solve("strip", 1e3, (64, 1), "cas")
        qx, R = -0.1 * case.material.t ** 3, 10.0
        for t1 in (0.2, 0.5, 0.8):
            n, m, neff = klshell.resultants_at(res.solution, t1, 0.5)
            r, = surface_eval(res.solution.patch.surface, t1, 0.5, order=0)
            phi = np.arctan2(r[0], r[1])
            assert abs(neff.c11 - qx * np.cos(phi)) < 0.02 * abs(qx)
            assert abs(m.c11 - (-qx * R * np.cos(phi))) < 0.02 * abs(qx * R)
            assert abs(n.c11 - 2 * qx * np.cos(phi)) < 0.02 * abs(qx)

    def test_cas_deflection_converges_by_16_elements(self, bench):
        for slend in (1e1, 1e2, 1e3):
            lvl = bench.strip_level("cas", 3, slend, 16)
            assert lvl["normalized"] >= 0.99

    def test_cs_membrane_error_grows_under_early_refinement(self, bench):
        errs = [bench.strip_level("cs", 3, 1e3, n)["e_n11"] for n in (8, 16, 32)]
        assert errs[1] > errs[0]
