import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctrlscape.domains import Domain, DomainPoint, curve, standard_tangent_chart
from ctrlscape.errors import DimensionError, DomainError
from ctrlscape.landscape import (CriticalPointSpec, classify_critical_point, critical_values,
                                 gradient, j_canonical, j_metric, make_critical_point,
                                 metric_distance, reduce_to_canonical)
from ctrlscape.sampling import (SeededStream, coe_sample, cse_sample, random_rotation,
                                random_tangent, sample_point)

from conftest import max_abs


def test_metric_distance_extremes():
    S = coe_sample(3, SeededStream(0, 0))
    assert abs(metric_distance(S, S)) < 1e-12
    assert abs(metric_distance(S.matrix, -S.matrix) - 12) < 1e-12


def test_metric_distance_is_frobenius_squared():
    S = coe_sample(4, SeededStream(0, 1)).matrix
    W = coe_sample(4, SeededStream(0, 2)).matrix
    assert abs(metric_distance(S, W) - np.sum(np.abs(S - W) ** 2)) < 1e-12
    assert abs(j_metric(S, W) - np.trace(W.conj().T @ S).real) < 1e-12


def test_size_mismatch():
    with pytest.raises(DimensionError):
        j_metric(np.eye(2), np.eye(3))


def test_j_canonical_examples():
    assert j_canonical(np.eye(5)) == 5.0
    assert j_canonical(np.diag([1, -1, -1])) == -1.0


def test_reduce_to_canonical_matches_metric():
    for k in range(10):
        S = coe_sample(4, SeededStream(1, 2 * k))
        W = coe_sample(4, SeededStream(1, 2 * k + 1))
        assert abs(j_metric(S, W) - j_canonical(reduce_to_canonical(S, W))) < 1e-10
    with pytest.raises(DomainError):
        reduce_to_canonical(S, DomainPoint(Domain("full", 4), np.eye(4)))


def test_critical_values():
    assert critical_values(Domain("sym", 3)) == [-3, -1, 1, 3]
    assert critical_values(Domain("full", 2)) == [-2, 0, 2]
    assert critical_values(Domain("sympl", 2)) == [-4, 0, 4]


def test_make_critical_point_identity_rotation():
    p = make_critical_point(CriticalPointSpec(Domain("sym", 3), 1))
    assert np.array_equal(p.matrix, np.diag([1, -1, -1]).astype(complex))
    p = make_critical_point(CriticalPointSpec(Domain("sympl", 2), 1))
    assert np.array_equal(p.matrix.real, np.diag([1, -1, 1, -1]))


def test_spec_bounds():
    with pytest.raises(ValueError):
        CriticalPointSpec(Domain("sym", 2), 3)


def test_bad_rotation_rejected():
    with pytest.raises(DomainError):
        make_critical_point(CriticalPointSpec(Domain("sym", 2), 1, np.diag([1.0, -1.0])))


def test_gradient_at_identity_vanishes():
    for kind, N in (("sym", 4), ("sympl", 3), ("full", 3)):
        d = Domain(kind, N)
        assert max_abs(gradient(DomainPoint(d, np.eye(d.size)))) == 0


@pytest.mark.parametrize("phi", [0.3, -1.2, 2.5, np.pi / 2])
def test_one_by_one_gradient_is_minus_sine(phi):
    p = DomainPoint(Domain("sym", 1), np.array([[np.exp(1j * phi)]]))
    assert abs(gradient(p)[0] + np.sin(phi)) < 1e-15


@pytest.mark.parametrize("kind,N", [("sym", 5), ("sympl", 3), ("full", 4)])
def test_gradient_matches_finite_differences(kind, N):
    d = Domain(kind, N)
    stream = SeededStream(2, 0)
    for _ in range(10):
        p = sample_point(d, stream)
        chart = standard_tangent_chart(p)
        c = random_tangent(chart, stream)
        A = chart.generator(c)
        h = 1e-5
        fd = (j_canonical(curve(p, A, h)) - j_canonical(curve(p, A, -h))) / (2 * h)
        g = gradient(p, chart)
        assert abs(g @ c - fd) < 1e-8 * max(1.0, np.linalg.norm(g))


@pytest.mark.parametrize("kind,Nmax", [("sym", 8), ("full", 6), ("sympl", 4)])
def test_classification_roundtrip(kind, Nmax):
    for N in range(1, Nmax + 1):
        d = Domain(kind, N)
        for n in range(N + 1):
            for r in range(20):
                X = random_rotation(d, SeededStream(3, 1000 * N + 50 * n + r))
                p = make_critical_point(CriticalPointSpec(d, n, X))
                assert np.linalg.norm(gradient(p)) < 1e-10
                assert abs(j_canonical(p) - critical_values(d)[n]) < 1e-10
                assert classify_critical_point(p) == n


def test_generic_samples_are_not_critical():
    assert classify_critical_point(coe_sample(4, SeededStream(4, 0))) is None
    assert classify_critical_point(cse_sample(3, SeededStream(4, 0))) is None


def test_target_invariance_small():
    d = Domain("sym", 4)
    W = coe_sample(4, SeededStream(5, 0))
    Rw = W.root
    for n in range(5):
        base = make_critical_point(CriticalPointSpec(d, n, random_rotation(d, SeededStream(5, n + 1))))
        moved = DomainPoint(d, Rw @ base.matrix @ Rw)
        assert np.linalg.norm(gradient(moved, target=W)) < 1e-8
        assert abs(j_metric(moved, W) - j_canonical(base)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), t=st.floats(-3, 3))
def test_height_bounded_by_size(seed, t):
    p = coe_sample(3, SeededStream(seed, 0))
    chart = standard_tangent_chart(p)
    q = curve(p, chart.generator(random_tangent(chart, SeededStream(seed, 1))), t)
    assert -3 - 1e-12 <= j_canonical(q) <= 3 + 1e-12
