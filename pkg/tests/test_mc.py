import json
import math

import pytest

from cirmax.inversion import cir_running_max_cdf
from cirmax.mc_oracle import (
    BLOCK,
    McEstimate,
    SimConfig,
    default_threads,
    mc_running_max_tail,
    mc_terminal_mean,
    rate_check,
    run_json,
)
from cirmax.params import CirParams, marginal_tail_rate

P = CirParams(1, 1, 1, 0.5, 1, 3.0)


def test_same_seed_same_answer():
    cfg = SimConfig(n_paths=3000, n_steps=64, seed=7)
    assert mc_running_max_tail(P, cfg) == mc_running_max_tail(P, cfg)


def test_thread_count_does_not_change_result():
    cfg = SimConfig(n_paths=2 * BLOCK + 100, n_steps=16, seed=11)
    one = mc_running_max_tail(P, cfg, levels=[1.0, 2.0], threads=1)
    three = mc_running_max_tail(P, cfg, levels=[1.0, 2.0], threads=3)
    assert one == three


def test_different_seeds_differ():
    a = mc_running_max_tail(P.replace(z=1.2), SimConfig(4000, 32, seed=1))
    b = mc_running_max_tail(P.replace(z=1.2), SimConfig(4000, 32, seed=2))
    assert a.n_hits != b.n_hits


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("CIRMAX_THREADS", "4")
    assert default_threads() == 4
    monkeypatch.setenv("CIRMAX_THREADS", "many")
    with pytest.raises(ValueError):
        default_threads()


def test_exact_transition_mean():
    mean, se, exact = mc_terminal_mean(P, SimConfig(20000, 8, seed=3))
    assert abs(mean - exact) < 4 * se


def test_euler_scheme_runs():
    est = mc_running_max_tail(P.replace(z=1.5), SimConfig(4000, 64, seed=5, scheme="full_truncation_euler"))
    assert 0 < est.p_hat < 1


def test_levels_at_start_always_hit():
    est = mc_running_max_tail(P, SimConfig(500, 4, seed=1), levels=[0.5, 0.1])
    assert all(e.p_hat == 1.0 for e in est)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n_paths=0)
    with pytest.raises(ValueError):
        SimConfig(scheme="milstein")


def test_estimate_stderr():
    e = McEstimate.from_hits(25, 100)
    assert e.p_hat == 0.25 and e.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 100))


def test_run_json_schema():
    doc = json.loads(run_json(P, SimConfig(1000, 8, seed=1), levels=[2.0, 3.0]))
    assert doc["schema"] == 1 and len(doc["estimates"]) == 2


def test_coarse_monitoring_underestimates():
    # the discretely monitored maximum misses crossings between grid points
    cfg_c = SimConfig(20000, 8, seed=9)
    cfg_f = SimConfig(20000, 256, seed=9)
    coarse = mc_running_max_tail(P.replace(z=2.0), cfg_c)
    fine = mc_running_max_tail(P.replace(z=2.0), cfg_f)
    exact = cir_running_max_cdf(P.replace(z=2.0))
    assert coarse.p_hat < fine.p_hat < exact + 3 * fine.stderr


def test_rate_check_small_start():
    rep = rate_check(CirParams(1, 1, 1, 0.01, 1, 20.0), [20, 30, 40])
    assert rep.ok and rep.approaching
    assert rep.target == pytest.approx(marginal_tail_rate(1, 1, 1))
    assert rep.to_dict()["schema"] == 1


@pytest.mark.slow
def test_far_level_agrees_with_inversion():
    # P ~ 1e-7 at z = 8: 1e5 paths see no hit; use the binomial standard error at the inverted value
    p8 = P.replace(z=8.0)
    exact = cir_running_max_cdf(p8)
    est = mc_running_max_tail(p8, SimConfig(100_000, 4096))
    se = math.sqrt(exact * (1 - exact) / est.n_paths)
    assert abs(est.p_hat - exact) <= 3 * max(se, est.stderr)
