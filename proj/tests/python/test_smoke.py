import math

import numpy as np
import pytest

import liouville as lv


def test_parse_and_differentiate():
    e = lv.parse("sin(x)^2 + m*x", ["m"])
    assert e(0.3, {"m": 2.0}) == pytest.approx(math.sin(0.3) ** 2 + 0.6)
    d = e.differentiate()
    assert d(0.3, {"m": 2.0}) == pytest.approx(math.sin(0.6) + 2.0)
    values = e(np.linspace(-1, 1, 5), {"m": 1.0})
    assert values.shape == (5,)


def test_parse_errors_are_typed():
    with pytest.raises(lv.UnknownIdentifier):
        lv.parse("sech(x)")
    with pytest.raises(lv.Error):
        lv.parse("1 +")


def test_constant_data_stays_uniform():
    m = 2.0
    data = lv.CauchyData.from_expressions("log(16/m^2)", "0", {"m": m})
    grid = lv.SpacetimeGrid(-1, 1, 5, -2, 2, 9)
    sol = lv.solve(data, m, grid, lv.SolveOptions(margin=0.5))
    table = lv.evaluate_grid(sol, grid)
    phi = table["phi"]
    assert phi.shape == (5, 9)
    assert np.max(np.abs(phi[2] - math.log(4.0))) < 1e-10
    # Uniform in x, and even in t because pi vanishes.
    assert np.max(np.abs(phi - phi[:, :1])) < 1e-10
    assert np.max(np.abs(phi - phi[::-1])) < 1e-10
    assert sol.chi_drift < 1e-8 and sol.psi_drift < 1e-8


def test_corpus_datum_residual_and_round_trip():
    entry = lv.smooth_corpus()[0]
    data = entry.data()
    grid = lv.SpacetimeGrid(-1, 1, 11, -2, 2, 21)
    sol = lv.solve(data, entry.mass, grid, lv.SolveOptions(margin=0.5))
    report = lv.residual(sol, grid, lv.ResidualMethod.light_cone)
    assert report.sup_residual < 1e-5
    xs = np.linspace(-1, 1, 41)
    back = lv.restrict_to_slice(sol, xs)
    assert np.max(np.abs(back.phi(xs) - data.phi(xs))) < 1e-8
    assert np.max(np.abs(back.pi(xs) - data.pi(xs))) < 1e-6


def test_potentials_agree_for_static_data():
    data = lv.CauchyData.from_expressions("-x^2/8", "0")
    pots = lv.compute_potentials(data, 1.0)
    s = np.linspace(-2, 2, 9)
    assert np.allclose(pots.u(s), pots.w(s))


def test_zero_curve_of_linear_family():
    sol = lv.solution_from_families("1", "x", "1", "x", lv.Interval(-6, 6))
    with pytest.raises(lv.SingularSolution):
        sol.eval_phi(0.5, 0.0)
    seeds = lv.find_seed_zeros(sol, 0.0, lv.Interval(-1, 1))
    assert len(seeds) == 1
    curve = lv.track(sol, seeds[0], lv.Interval(-2, 2))
    report = lv.lemma_report(curve)
    assert report.coverage == pytest.approx(1.0)
    assert report.max_abs_F < 1e-10
    assert max(abs(x) for x in curve.x) < 1e-10


def test_continuity_probe_decreases():
    entry = lv.smooth_corpus()[0]
    grid = lv.SpacetimeGrid(-0.5, 0.5, 5, -1, 1, 9)
    table = lv.continuity_probe(entry.data(), entry.mass, [1e-1, 1e-2, 1e-3], grid)
    assert table.strictly_decreasing()
    assert len(table.rows) == 3
