import math

import numpy as np
import pytest

import homog_mcf as hm


def test_version():
    assert hm.version() == hm.__version__


def test_constant_force_effective_value():
    f = hm.ForcingField.constant(1, 1.0)
    for p in (0.0, 0.5, -1.0):
        ev = hm.effective_value(f, np.array([p]), delta=0.5, gradient_bound=2.0, cell_points=32)
        assert abs(ev["value"] + math.sqrt(1 + p * p)) < 1e-6
        assert np.max(np.abs(ev["corrector"])) < 1e-6


def test_coercivity_certificate_and_error():
    f = hm.ForcingField.sinusoid(1, 1.0, 0.5)
    cert = hm.check_coercivity(f, 0.2)
    assert cert["min_margin"] == pytest.approx(0.25, abs=1e-6)
    with pytest.raises(hm.HomogError) as info:
        hm.check_coercivity(hm.ForcingField.sinusoid(1, 0.0, 1.0), 0.1)
    assert info.value.code == "coercivity-violation"


def test_flat_front_translates():
    f = hm.ForcingField.constant(1, 1.5)
    grid = hm.GridSpec.torus(1, 32)
    tr = hm.evolve(f, grid, np.zeros(32), 0.5, delta=0.5)
    assert tr["times"][-1] == 0.5
    assert np.allclose(tr["snapshots"][-1], 0.75, atol=1e-10)


def test_effective_closed_form_away_from_kink():
    grid = hm.GridSpec.box(1, 400, 2.0, 2.0)
    x = np.array(grid.coordinates())
    tr = hm.solve_effective(constant_force=1.0, grid=grid, initial=-np.abs(x), horizon=0.5, lipschitz_bound=1.0)
    u = tr["snapshots"][-1]
    far = (np.abs(x) > 1.0) & (np.abs(x) < 1.5)
    assert np.allclose(u[far], -np.abs(x[far]) + math.sqrt(2) * 0.5, atol=1e-12)


def test_table_matches_constant_force():
    f = hm.ForcingField.constant(1, 1.0)
    t = hm.build_table(f, 2.0, 9, delta=0.5, gradient_bound=2.0, cell_points=16)
    assert t.coverage == 2.0
    # Nodes sit at multiples of 0.5; between them the table interpolates linearly.
    assert t(np.array([0.5])) == pytest.approx(-math.sqrt(1.25), abs=1e-6)
    assert t(np.array([0.25])) == pytest.approx(0.5 * (-1.0 - math.sqrt(1.25)), abs=1e-6)


def test_fit_exponent():
    fit = hm.fit_exponent([(0.25, 0.5), (1 / 16, 0.25), (1 / 64, 0.125)])
    assert fit["exponent"] == pytest.approx(0.5, abs=1e-14)


CONSTANT_RATE = """
[force]
family = constant
coefficients = 1
delta = 0.5
[grid]
half_extent = 1
[experiment]
horizon = 0.25
eps_list = 1/4, 1/8, 1/16
"""


def test_rate_sweep_degenerate_and_config_round_trip():
    rep = hm.rate_sweep(CONSTANT_RATE)
    assert rep["fit"] is None
    assert "degenerate: zero error" in rep["notes"]
    assert all(r["error"] < 1e-10 for r in rep["records"])
    text = hm.parse_config(CONSTANT_RATE)
    assert hm.parse_config(text) == text
    with pytest.raises(hm.HomogError):
        hm.parse_config(CONSTANT_RATE, ["experiment.eps_list=1.5"])


def test_monitor_suite_constant_force():
    rep = hm.monitor_suite("""
[force]
family = constant
coefficients = 1
delta = 0.5
[grid]
points = 32
[experiment]
initial = flat
horizon = 0.25
""")
    assert rep["passed"]
    assert rep["estimates"]["M_emp"] == 0.0
