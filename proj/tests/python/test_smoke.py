import math

import pytest

import pymmbm as mm


def scalar_model(mu, sigma2=1.0):
    return mm.Model([[0.0]], [mu], [sigma2])


def test_model_validation():
    with pytest.raises(ValueError):
        mm.Model([[0.0]], [1.0], [-1.0])
    with pytest.raises(ValueError):
        mm.Model([[-1.0, 1.0], [0.0, 0.0]], [1.0, -1.0], [1.0, 1.0])


def test_scalar_passage():
    mu, q = 0.4, 0.9
    gamma = math.sqrt(mu * mu + 2 * q)
    pair = mm.passage_matrices(scalar_model(mu), q, mm.Direction.up)
    assert pair.Lambda[0][0] == pytest.approx(mu - gamma, abs=1e-12)
    assert mm.crossing_probability(pair, 1.0)[0][0] == pytest.approx(
        math.exp(mu - gamma), abs=1e-12
    )


def test_stationary_law_uniform():
    law = mm.stationary_law(scalar_model(0.0), 2.0, grid_points=11)
    for k, x in enumerate(law.grid):
        assert law.cdf[k][0] == pytest.approx(x / 2.0, abs=1e-8)


def test_two_state_fluid_roundtrip():
    model = mm.Model(
        [[-1.0, 1.0], [1.0, -1.0]], [1.0, -2.0], [0.0, 0.0], labels=["on", "off"]
    )
    assert mm.asymptotic_drift(model) == pytest.approx(-0.5)
    e_plus, e_minus = mm.phase_classes(model)
    assert e_plus == [0] and e_minus == [1]
    rates = mm.overflow_rates(model, 2.0)
    assert rates.kappaU - rates.kappaL == pytest.approx(-0.5, abs=1e-9)


def test_localtime_transform():
    model = scalar_model(0.3)
    lo, hi = mm.admissible_alpha(model, 1.0)
    lt = mm.localtime_transform(model, 1.0, 0.5, 1.0, 0.5 * (lo + hi))
    assert lt.kL < 0 and lt.kU < 0


def test_epoch_law_bounds():
    model = scalar_model(-0.2)
    joint = mm.exp_epoch_law(model, 1.0, 2.0, False, 0.5)
    assert 0.0 <= joint[0][0] <= 1.0


def test_simulation_identity():
    cfg = mm.SimConfig()
    cfg.horizon = 2.0
    cfg.seed = 5
    rec = mm.simulate_path(scalar_model(0.0), 1.0, 0.5, 0, cfg)
    for k in range(len(rec.W)):
        assert rec.W[k] == pytest.approx(0.5 + rec.X[k] + rec.L[k] - rec.U[k], abs=1e-12)
        assert 0.0 <= rec.W[k] <= 1.0


def test_parse_model_document():
    doc = mm.parse_model_document(
        '{"states": [{"mu": 0.0, "sigma2": 1.0}], "Q": [[0.0]], "B": 1.5}'
    )
    assert doc["B"] == 1.5
    assert len(doc["model"]) == 1
    with pytest.raises(ValueError):
        mm.parse_model_document("{}")
