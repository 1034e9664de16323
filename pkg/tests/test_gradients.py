"""Analytic gradients versus central finite differences.

Configurations are drawn randomly but nudged so no example sits numerically
on a clip or hinge kink, where a two-sided difference quotient is meaningless.
Across the sampled configs both sides of each kink must occur, so the checks
genuinely cover active and inactive loss regions.
"""

import numpy as np
import pytest

from oracles import finite_difference_grads
from relatekit.model import ModelConfig, TrainConfig, init_params
from relatekit.model.network import batch_loss, batch_loss_and_grads, forward_batch, assemble_inputs

H_FD = 1e-4
REL_TOL = 1e-4
KINK_CLEARANCE = 30 * H_FD


def random_setup(seed: int):
    rng = np.random.default_rng(seed)
    cfg = ModelConfig(
        F=int(rng.integers(1, 9)),
        D=int(rng.integers(1, 9)),
        C=int(rng.integers(1, 9)),
        H=int(rng.integers(2, 9)),
        H2=int(rng.integers(2, 9)),
        num_listeners=int(rng.integers(1, 4)),
        seed=seed,
    )
    tcfg = TrainConfig(tau=0.25, alpha=0.1, beta=1.0, gamma=0.5)
    params = init_params(cfg)
    # give the network nonzero embeddings and biases so every path is live
    params["emb"] = rng.normal(0, 0.3, params["emb"].shape)
    for name in params:
        if "_b" in name or name in ("b1", "b2"):
            params[name] = rng.normal(0, 0.2, params[name].shape)
    b = int(rng.integers(2, 4))
    t_len = int(rng.integers(1, 6))
    audio = [rng.normal(0, 1, (cfg.F, t_len)) for _ in range(b)]
    text = [rng.normal(0, 1, cfg.D) for _ in range(b)]
    lidx = rng.integers(0, cfg.num_listeners + 1, b)
    y = rng.uniform(-1, 1, b)
    w = rng.uniform(0.3, 2.0, b)
    return cfg, tcfg, params, audio, text, lidx, y, w


def kink_distances(cfg, tcfg, params, audio, text, lidx, y):
    m = assemble_inputs(params, cfg, audio, text, lidx)
    y_hat, _ = forward_batch(params, cfg, m)
    err = np.abs(y_hat - y)
    dist = [abs(e - tcfg.tau) for e in err]
    n = len(y)
    clip_active = [e > tcfg.tau for e in err]
    hinge_active = []
    for i in range(n):
        for j in range(i + 1, n):
            d = abs((y_hat[i] - y_hat[j]) - (y[i] - y[j]))
            dist.append(abs(d - tcfg.alpha))
            hinge_active.append(d > tcfg.alpha)
    return min(dist), clip_active, hinge_active


def rel_error(a: np.ndarray, b: np.ndarray) -> float:
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-6)
    return float(np.max(np.abs(a - b) / scale))


@pytest.mark.slow
def test_gradients_match_finite_differences_many_configs():
    checked = 0
    clip_sides = set()
    hinge_sides = set()
    seed = 0
    while checked < 20:
        seed += 1
        cfg, tcfg, params, audio, text, lidx, y, w = random_setup(seed)
        clearance, clip_active, hinge_active = kink_distances(
            cfg, tcfg, params, audio, text, lidx, y
        )
        if clearance < KINK_CLEARANCE:
            continue  # too close to a kink for a valid two-sided difference
        clip_sides.update(clip_active)
        hinge_sides.update(hinge_active)
        _, grads, _ = batch_loss_and_grads(params, cfg, tcfg, audio, text, lidx, y, w)
        fd = finite_difference_grads(
            lambda: batch_loss(params, cfg, tcfg, audio, text, lidx, y, w), params, h=H_FD
        )
        for name in params:
            assert rel_error(grads[name], fd[name]) <= REL_TOL, (seed, name)
        checked += 1
    assert clip_sides == {True, False}
    assert hinge_sides == {True, False}


def test_flat_region_gives_exactly_zero_gradients():
    cfg = ModelConfig(F=3, D=2, C=2, H=4, H2=3, num_listeners=2, seed=77)
    tcfg = TrainConfig(tau=0.25, alpha=0.1, gamma=0.0)
    params = init_params(cfg)
    rng = np.random.default_rng(78)
    audio = [rng.normal(0, 1, (3, 4)) for _ in range(3)]
    text = [rng.normal(0, 1, 2) for _ in range(3)]
    lidx = np.array([0, 1, 2])
    m = assemble_inputs(params, cfg, audio, text, lidx)
    y_hat, _ = forward_batch(params, cfg, m)
    y = y_hat + 0.01  # every example inside the clip
    _, grads, _ = batch_loss_and_grads(params, cfg, tcfg, audio, text, lidx, y, np.ones(3))
    for name, g in grads.items():
        assert np.all(g == 0.0), name


def test_unused_listener_rows_have_zero_gradient():
    cfg = ModelConfig(F=2, D=2, C=3, H=3, H2=3, num_listeners=5, seed=79)
    tcfg = TrainConfig()
    params = init_params(cfg)
    rng = np.random.default_rng(80)
    audio = [rng.normal(0, 1, (2, 3)) for _ in range(2)]
    text = [rng.normal(0, 1, 2) for _ in range(2)]
    _, grads, _ = batch_loss_and_grads(
        params, cfg, tcfg, audio, text, np.array([2, 2]),
        rng.uniform(-1, 1, 2), np.ones(2),
    )
    for row in (0, 1, 3, 4, 5):
        assert np.all(grads["emb"][row] == 0.0)
    assert np.any(grads["emb"][2] != 0.0)


def test_weighted_loss_gradients_scale_with_weights():
    cfg = ModelConfig(F=2, D=2, C=2, H=3, H2=3, num_listeners=1, seed=81)
    tcfg = TrainConfig(gamma=0.0)
    params = init_params(cfg)
    rng = np.random.default_rng(82)
    audio = [rng.normal(0, 1, (2, 3))]
    text = [rng.normal(0, 1, 2)]
    lidx = np.array([0])
    y = np.array([0.9])
    _, g1, _ = batch_loss_and_grads(params, cfg, tcfg, audio, text, lidx, y, np.array([1.0]))
    _, g2, _ = batch_loss_and_grads(params, cfg, tcfg, audio, text, lidx, y, np.array([2.0]))
    for name in g1:
        assert np.allclose(g2[name], 2.0 * g1[name], atol=1e-14)
