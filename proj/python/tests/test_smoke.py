import json

import numpy as np
import pytest

import lapreg


def test_sample_cloud_shapes_and_determinism():
    a = lapreg.sample_cloud("unit_square", 500, 3)
    b = lapreg.sample_cloud("unit_square", 500, 3)
    assert a.shape == (500, 2)
    assert np.array_equal(a, b)
    s = lapreg.sample_cloud("sphere", 200, 1)
    assert s.shape == (200, 3)
    assert np.allclose(np.linalg.norm(s, axis=1), 1.0, atol=1e-12)


def test_laplacian_matches_brute_force():
    pts = lapreg.sample_cloud("flat_torus", 150, 2)
    eps = 0.3
    g = lapreg.build_graph(pts, "flat_torus", eps)
    d = np.abs(pts[:, None, :] - pts[None, :, :])
    d = np.minimum(d, 1.0 - d)
    r = np.sqrt((d**2).sum(-1))
    eta = np.where(r < eps, (3 / np.pi) * (1 - r / eps), 0.0) / (150 * eps**2)
    np.fill_diagonal(eta, 0.0)
    w = 2.0 / (0.15 * eps**2) * eta
    u = np.sin(2 * np.pi * pts[:, 0])
    ref = w.sum(1) * u - w @ u
    assert np.allclose(g.laplacian(u), ref, rtol=1e-10, atol=1e-9)
    assert g.edge_count == int((w > 0).sum())


def test_quadratic_solve_matches_dense():
    pts, y, _ = lapreg.generate("unit_square", 200, seed=4)
    g = lapreg.build_graph(pts, "unit_square", 0.25)
    beta = 0.1
    rep = lapreg.solve(g, y, beta)
    assert rep["converged"]
    L = np.column_stack([g.laplacian(e) for e in np.eye(200)])
    ref = np.linalg.solve(beta * L + np.eye(200), y)
    assert np.max(np.abs(rep["u"] - ref)) < 1e-8
    assert np.max(np.abs(lapreg.residual(g, rep["u"], y, beta))) < 1e-9
    assert lapreg.pde_beta(lapreg.variational_beta(beta)) == beta


def test_quartic_solve_stays_in_label_range():
    pts, y, _ = lapreg.generate("sphere", 400, seed=5, noise="asym:0.3:0.8")
    g = lapreg.build_graph(pts, "sphere", 0.4)
    rep = lapreg.solve(g, y, 0.05, loss="quartic")
    assert rep["converged"]
    assert y.min() - 1e-12 <= rep["u"].min() and rep["u"].max() <= y.max() + 1e-12
    hist = np.array(rep["objective_history"])
    assert np.all(np.diff(hist) <= 0)


def test_semisupervised_helpers():
    pts, y, _ = lapreg.generate("unit_square", 300, q=50, seed=6)
    owner, ext = lapreg.voronoi_extend(pts, "unit_square", y)
    assert len(owner) == 300
    assert list(owner[:50]) == list(range(50))
    d = ((pts[:, None, :] - pts[None, :50, :]) ** 2).sum(-1)
    assert np.array_equal(np.asarray(owner), d.argmin(1))
    assert np.array_equal(ext, y[owner])
    pred = lapreg.out_of_sample(pts, "unit_square", ext, pts[:10] + 1e-9)
    assert np.array_equal(pred, ext[:10])


def test_experiment_and_errors():
    rep = lapreg.run_experiment(json.dumps({"n": 800}), seed=2)
    assert rep["converged"]
    assert rep["points"].shape == (800, 2)
    assert rep["sup_error"] == pytest.approx(np.max(np.abs(rep["u"] - rep["mu_f"])))
    with pytest.raises(lapreg.LapregError):
        lapreg.run_experiment(json.dumps({"n": 10, "q": 20}))
    with pytest.raises(ValueError):
        lapreg.sample_cloud("klein_bottle", 10, 1)


def test_modified_trend_and_bias():
    assert lapreg.modified_trend("quadratic", "asym:0.3:0.8", 0.2) == pytest.approx(0.2)
    shift = lapreg.modified_trend("quartic", "asym:0.3:0.8", 0.0)
    assert shift < 0
    b = lapreg.bias_check(0.05, grid=64)
    assert b["status"] == "converged"
    assert 0 < b["sup_dev"] <= b["bound"]
