import numpy as np
import pytest

import lindrate


def test_reference_equilibrium():
    p = lindrate.reference_params()
    c = lindrate.coefficients(p)
    assert c["p"] == pytest.approx(0.375, rel=1e-12)
    assert c["z1_plus"] == pytest.approx(1 / 3, rel=1e-12)
    assert c["z2_plus"] == pytest.approx(0.1, rel=1e-12)
    m = lindrate.twolevel_model(p)
    assert (m.n, m.d, m.d1, m.d2) == (2, 2, 2, 0)
    eta = lindrate.equilibrium(m)
    closed = lindrate.equilibrium_closed_form(p)
    for a, b in zip(eta, closed):
        np.testing.assert_allclose(a, b, atol=1e-10)
    residual = lindrate.rate_generator(m, eta)
    assert max(np.abs(r).max() for r in residual) < 1e-10


def test_generator_is_trace_preserving():
    m = lindrate.twolevel_model(lindrate.reference_params())
    G = lindrate.vectorized_rate_generator(m)
    assert G.shape == (8, 8)
    trace_row = np.zeros(8)
    trace_row[[0, 3, 4, 7]] = 1.0
    np.testing.assert_allclose(trace_row @ G, 0.0, atol=1e-12)


def test_evolution_relaxes():
    p = lindrate.reference_params()
    m = lindrate.twolevel_model(p)
    start = [np.diag([1.0, 0.0]).astype(complex), np.zeros((2, 2), complex)]
    states = lindrate.evolve(m, start, [0.0, 1.0, 200.0])
    assert len(states) == 3
    assert sum(np.trace(b).real for b in states[1]) == pytest.approx(1.0, abs=1e-12)
    for a, b in zip(states[-1], lindrate.equilibrium_closed_form(p)):
        np.testing.assert_allclose(a, b, atol=1e-8)


def test_spectrum_forms_agree():
    p = lindrate.reference_params()
    nus = np.linspace(0.0, 2.5, 101)
    a = np.array(lindrate.spectrum(p, nus, "a"))
    b = np.array(lindrate.spectrum(p, nus, "b"))
    np.testing.assert_allclose(a, b, rtol=1e-10)
    assert (b >= 0).all()
    with pytest.raises(ValueError):
        lindrate.spectrum(p, nus, "c")


def test_weighted_unravelling_is_deterministic():
    m = lindrate.twolevel_model(lindrate.reference_params())
    eta0 = lindrate.equilibrium(m)
    a = lindrate.unravel_weighted(m, eta0, [0.5], dt=1e-2, ntraj=50, seed=4, workers=1)
    b = lindrate.unravel_weighted(m, eta0, [0.5], dt=1e-2, ntraj=50, seed=4, workers=3)
    np.testing.assert_array_equal(a["mean"][0][0], b["mean"][0][0])
    assert a["p_mean"] == b["p_mean"]


def test_invalid_parameters_raise():
    p = lindrate.reference_params()
    p.epsilon = 0.0
    assert p.check()
    with pytest.raises(lindrate.ModelError):
        lindrate.twolevel_model(p)
    with pytest.raises(lindrate.ModelParseError):
        lindrate.parse_model("n: 1\nd: [1\n")


def test_run_writes_artifacts(tmp_path):
    status, summary, error = lindrate.run("equilibrium", tmp_path / "eq", verify=True)
    assert status == 0, error
    assert summary["result"]["p"] == pytest.approx(0.375)
    assert summary["verify_pass"]
    assert (tmp_path / "eq" / "summary.json").exists()
    status, _, error = lindrate.run("ode", tmp_path / "bad", dt=0.0)
    assert status == 2 and error
