import math

import pytest

import cloudchaos as cc


def test_iterate_origin_stays_put():
    rows = cc.iterate(0.5, [1.0, 1.0], 0.0, [0.0, 0.0], 5)
    assert [r[0] for r in rows] == [1, 2, 3, 4, 5]
    assert all(r[1] == 0.0 and r[2] == [0.0, 0.0] for r in rows)


def test_iterate_hand_step():
    (_, v, x), = cc.iterate(0.5, [1.0, 1.0], 1.0, [0.5, 0.25], 1)
    assert v == pytest.approx(0.75)
    assert x == pytest.approx([-0.75, 0.75])


def test_divergence_raises():
    with pytest.raises(cc._core.Divergence):
        cc.iterate(1.0, [3.0, 3.0], 10.0, [10.0, -10.0], 100)


def test_jacobian_and_coefficients():
    j = cc.jacobian_at(0.5, 0.2, 0.3, (1.0, 1.0, 1.0))
    assert j[1] == pytest.approx((-0.2, -0.2, -0.3))
    assert cc.characteristic_coeffs(0.5, 0.2, 0.5) == pytest.approx((-0.8, 0.225, 0.1))
    assert cc.routh_classify(0.1, 0.2, 0.01) == "stable"
    assert cc.hopf_alpha(1.4, 0.8) == pytest.approx(5.56 / 1.8)


def test_fixed_points():
    (r,) = cc.find_fixed_points(0.5, 0.1, 0.1, [(0.05, -0.03, 0.02)])
    assert r["converged"]
    assert max(abs(c) for c in r["point"]) < 1e-10


def test_lyapunov_analytic():
    ex = cc.lyapunov_spectrum(0.5, 0.1, 0.1, iterations=20000)
    assert ex[0] == pytest.approx(math.log(0.5), abs=1e-2)
    assert cc.classify_attractor(ex) == "fixed/periodic"


def test_bifurcation_single_point():
    pts = cc.bifurcation_scan(0.6, 1.28, 1.23, "alpha", 0.6, 0.6, 1,
                              transient=100, samples=5, lyapunov_iterations=1000)
    assert len(pts) == 1 and len(pts[0]["v_samples"]) == 5


def test_placement_and_polynomial():
    plan = cc.build_placement(3)
    assert plan["machines"] == 21
    assert plan["owner_blocks"][0][0] == ["P_1", "S1_2", "S2_3"]
    coeffs = cc.loss_polynomial(30)
    assert sum(coeffs) == 105 ** 30
    assert list(cc.verify_coefficients()) == [1, 7, 21, 34, 30, 12, 0, 0]
    assert cc.prob_no_loss(3, 3) == pytest.approx(1327 / 1330)


def test_loss_methods_agree():
    p = 0.01
    closed = 1 - (1 - p**3 - p**4 + p**7) ** 10
    for method in ("exact-bigint", "log-domain", "closed-form"):
        assert cc.prob_data_loss(10, p, method) == pytest.approx(closed, rel=1e-9)
    rows = cc.loss_curve([10, 20], p)
    assert rows[0][2] < rows[1][2]


def test_monte_carlo_deterministic():
    a = cc.mc_estimate(10, 0.1, 20000, seed=3, workers=1)
    b = cc.mc_estimate(10, 0.1, 20000, seed=3, workers=4)
    assert a == b
