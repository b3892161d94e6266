import json
import math

import numpy as np
import pytest

import proxflow


LASSO = {"name": "lasso", "M": [[1]], "y": [1], "mu": 0.5}


def test_lipschitz_constants():
    assert proxflow.lipschitz_l1(2.0, 0.1) == pytest.approx(3.0, abs=1e-12)
    assert proxflow.lipschitz_l2(2.0, 0.1) == pytest.approx(math.sqrt(9.2), abs=1e-12)


def test_derive_params():
    p = proxflow.derive_params(1.0, 0.005, 3.0)
    assert p.rho_feasible
    assert p.corollary_feasible
    assert p.L == min(p.L1, p.L2)
    assert p.m < 0
    q = proxflow.derive_params(1.0, 1.0, 3.0)
    assert not q.rho_feasible
    assert q.m is None
    assert json.loads(q.to_json())["m"] is None
    with pytest.raises(ValueError):
        proxflow.derive_params(-1.0, 1.0, 1.0)


def test_problem_and_prox():
    obj = proxflow.make_problem(LASSO)
    assert obj.dim == 1
    assert obj.beta == pytest.approx(1.0)
    assert obj.prox(1.0, np.array([2.0]))[0] == pytest.approx(1.5)
    assert obj.residual(0.5, np.array([0.5])) == 0.0
    same = proxflow.make_problem(json.dumps(LASSO))
    assert same.value(np.array([0.3])) == obj.value(np.array([0.3]))
    with pytest.raises(ValueError):
        proxflow.make_problem({"name": "nope"})


def test_critically_damped_flow():
    obj = proxflow.make_problem({"name": "zero_quad", "Q": [[1]], "b": [0]})
    p = proxflow.derive_params(1.0, 0.25, obj.beta)
    t = proxflow.integrate(obj, p, np.array([1.0]), np.array([0.0]), 5.0, 1e-3)
    assert len(t) == 5001
    exact = (1 + 0.5 * t.times) * np.exp(-0.5 * t.times)
    assert np.max(np.abs(t.xs[:, 0] - exact)) <= 1e-6
    back = proxflow.trajectory_from_csv(t.to_csv())
    assert np.array_equal(back.xs, t.xs)
    with pytest.raises(ValueError, match="step guard"):
        proxflow.integrate(obj, p, np.array([1.0]), np.array([0.0]), 5.0, 1.0)


def test_energy_is_monotone_on_a_feasible_run():
    obj = proxflow.make_problem(LASSO)
    p = proxflow.derive_params(0.1695, 0.007185, obj.beta)
    t = proxflow.integrate(obj, p, np.array([0.0]), np.array([0.0]), 20.0, 1e-2)
    e = proxflow.monitor(obj, p, t)
    assert len(e) == len(t)
    assert np.all(np.diff(e.energy) <= 1e-6 * (1 + abs(e.energy[0])))
    assert proxflow.energy_violations(e, 1e-6 * (1 + abs(e.energy[0]))) == 0


def test_classify_rate():
    obj = proxflow.make_problem({"name": "zero_quad", "Q": [[1, 0], [0, 1]], "b": [1, -1]})
    p = proxflow.derive_params(1.0, 0.16, obj.beta)
    t = proxflow.integrate(obj, p, np.zeros(2), np.zeros(2), 100.0, 1e-3)
    r = proxflow.classify_rate(t, np.array([1.0, -1.0]))
    assert r["regime"] == "exponential"
    assert r["a2"] == pytest.approx(0.2, rel=0.1)
    short = proxflow.integrate(obj, p, np.zeros(2), np.zeros(2), 5.0, 1e-3)
    with pytest.raises(ValueError):
        proxflow.classify_rate(short)


def test_run_inertial():
    obj = proxflow.make_problem(LASSO)
    h = proxflow.run_inertial(obj, 0.5, 2.0, np.array([0.0]), np.array([0.0]), 500, 1e-8)
    assert h["converged"]
    assert h["residuals"][-1] <= 1e-8
    assert h["x"][0] == pytest.approx(0.5, abs=1e-8)


def test_cli_entry_point():
    code, out, err = proxflow.run_cli(["check-params", "--gamma", "2", "--lambda", "0.1", "--beta", "1", "--json"])
    assert code == 0
    assert json.loads(out)["L1"] == pytest.approx(3.0, abs=1e-12)
    code, _, err = proxflow.run_cli(["check-params", "--gamma", "0", "--lambda", "0.1", "--beta", "1"])
    assert code == 1
    assert err
