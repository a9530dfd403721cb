import numpy as np
import pytest

from ctrlscape.domains import Domain, DomainPoint, standard_tangent_chart
from ctrlscape.landscape import CriticalPointSpec, j_canonical, make_critical_point
from ctrlscape.optimizer import (AscentConfig, Termination, ascent_step, height_gain, run_batch,
                                 run_trial)
from ctrlscape.sampling import SeededStream, coe_sample, cse_sample, random_rotation, random_tangent


def test_config_validation_and_replace():
    c = AscentConfig()
    assert c.max_iters == 5000 and c.grad_tol == 1e-8
    assert c.replace(max_iters=3).max_iters == 3
    with pytest.raises(ValueError):
        AscentConfig(backtrack_factor=1.5)
    with pytest.raises(ValueError):
        AscentConfig(escape_mode="other")


def test_height_gain_matches_direct_difference():
    p = coe_sample(4, SeededStream(0, 0))
    chart = standard_tangent_chart(p)
    A = chart.generator(random_tangent(chart, SeededStream(0, 1)))
    from ctrlscape.domains import curve
    for t in (1e-3, 0.2, 1.0):
        assert abs(height_gain(p, A, t) - (j_canonical(curve(p, A, t)) - j_canonical(p))) < 1e-12


def test_zero_step_at_critical_point():
    d = Domain("sym", 3)
    p = make_critical_point(CriticalPointSpec(d, 1, random_rotation(d, SeededStream(1, 0))))
    q, stats = ascent_step(p)
    assert q is p and stats.converged and stats.step == 0.0


def test_step_increases_height():
    p = coe_sample(5, SeededStream(2, 0))
    q, stats = ascent_step(p)
    assert not stats.converged
    assert j_canonical(q) > j_canonical(p)
    assert stats.gain >= AscentConfig().armijo_c * stats.step * stats.grad_norm ** 2


def test_escape_from_global_minimum():
    p = DomainPoint(Domain("sym", 3), -np.eye(3))
    trace = run_trial(p, AscentConfig(), SeededStream(3, 0))
    assert trace.saddle_visits[0] == (0, 0)
    assert trace.termination is Termination.CONVERGED_GLOBAL
    assert trace.final_j >= 3 - 1e-6


def test_identity_converges_immediately():
    trace = run_trial(DomainPoint(Domain("sym", 4), np.eye(4)))
    assert trace.termination is Termination.CONVERGED_GLOBAL
    assert trace.iterations == 0 and not trace.escapes


def test_coe_start_converges_monotonically():
    trace = run_trial(coe_sample(4, SeededStream(4, 0)), AscentConfig(), SeededStream(4, 1))
    assert trace.termination is Termination.CONVERGED_GLOBAL
    assert trace.final_j >= 4 - 1e-6
    assert all(b >= a for a, b in zip(trace.j_values, trace.j_values[1:]))


def test_cse_start_converges():
    trace = run_trial(cse_sample(3, SeededStream(5, 0)), AscentConfig(), SeededStream(5, 1))
    assert trace.termination is Termination.CONVERGED_GLOBAL
    assert trace.final_j >= 6 - 1e-6


@pytest.mark.parametrize("mode", ["random", "hessian"])
def test_saddle_start_escapes(mode):
    d = Domain("sym", 4)
    p = make_critical_point(CriticalPointSpec(d, 2, random_rotation(d, SeededStream(6, 0))))
    trace = run_trial(p, AscentConfig(escape_mode=mode), SeededStream(6, 1))
    assert trace.saddle_visits[0] == (0, 2)
    assert trace.termination is Termination.CONVERGED_GLOBAL


def test_no_escapes_allowed_stops_at_saddle():
    d = Domain("sym", 4)
    p = make_critical_point(CriticalPointSpec(d, 2))
    trace = run_trial(p, AscentConfig(max_escapes=0))
    assert trace.termination is Termination.CONVERGED_CRITICAL and trace.critical_n == 2


def test_long_run_is_monotone_between_escapes():
    # Tiny steps and a tight tolerance make the run last about 1000 iterations.
    cfg = AscentConfig(initial_step=2e-3, grad_tol=1e-12, max_iters=1000)
    trace = run_trial(coe_sample(4, SeededStream(7, 0)), cfg, SeededStream(7, 1))
    js, anchors = trace.j_values, set(trace.anchors)
    assert len(js) > 500
    assert all(js[k] >= js[k - 1] for k in range(1, len(js)) if k not in anchors)


def test_max_iters_one():
    trace = run_trial(coe_sample(4, SeededStream(8, 0)), AscentConfig(max_iters=1))
    assert trace.termination is Termination.MAX_ITERS and trace.iterations == 1


def test_batch_is_deterministic_and_order_free():
    d = Domain("sym", 3)
    a = run_batch(d, 6, AscentConfig(), seed=9)
    b = run_batch(d, 6, AscentConfig(), seed=9, jobs=2)
    assert [r.__dict__ for r in a.trials] == [r.__dict__ for r in b.trials]
    assert a.all_global and a.termination_counts() == {"ConvergedGlobal": 6}
    with pytest.raises(ValueError):
        run_batch(d, 0)
