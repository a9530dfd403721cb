import numpy as np
import pytest

from ctrlscape.domains import Domain, DomainPoint, domain_dim
from ctrlscape.hessian import (HessianSignature, analytic_hessian, closed_form_signature,
                               grassmannian_dim, hqf_at_critical, numerical_hessian,
                               paper_signature, signature, sum_rule_holds)
from ctrlscape.landscape import CriticalPointSpec, make_critical_point
from ctrlscape.sampling import SeededStream, random_rotation


def test_hqf_examples():
    d = Domain("sym", 2)
    q = hqf_at_critical(CriticalPointSpec(d, 2))
    assert sorted(q.coefficients) == [-2, -1, -1]
    q = hqf_at_critical(CriticalPointSpec(d, 1))
    assert sorted(q.coefficients) == [-1, 0, 1]
    assert q.signature().as_tuple() == (1, 1, 1)


def test_hqf_labels_follow_chart():
    from ctrlscape.domains import standard_tangent_chart
    for kind, N in (("sym", 3), ("sympl", 3), ("full", 3)):
        d = Domain(kind, N)
        q = hqf_at_critical(CriticalPointSpec(d, 1))
        assert q.labels == standard_tangent_chart(DomainPoint(d, np.eye(d.size))).labels


def test_global_max_hessian_sym():
    # At S = I the chart Hessian is -1 on diagonal units and -1 on off-diagonal units.
    H = analytic_hessian(DomainPoint(Domain("sym", 3), np.eye(3)))
    assert np.allclose(H, -np.eye(6))


@pytest.mark.parametrize("kind,N,n", [("sym", 4, 1), ("sympl", 3, 1), ("full", 3, 2)])
def test_hqf_in_chart_matches_numerical_at_identity_rotation(kind, N, n):
    spec = CriticalPointSpec(Domain(kind, N), n)
    H = numerical_hessian(make_critical_point(spec))
    assert np.max(np.abs(H - np.diag(hqf_at_critical(spec).in_chart()))) < 1e-6


@pytest.mark.parametrize("kind,N", [("sym", 4), ("sympl", 2), ("full", 3)])
def test_numerical_agrees_with_analytic_generic_point(kind, N):
    from ctrlscape.sampling import sample_point
    p = sample_point(Domain(kind, N), SeededStream(1, 0))
    assert np.max(np.abs(numerical_hessian(p) - analytic_hessian(p))) < 1e-5


def test_h_range_enforced():
    p = DomainPoint(Domain("sym", 1), np.eye(1))
    with pytest.raises(ValueError):
        numerical_hessian(p, h=0.1)


def test_signature_counts():
    assert signature(np.diag([1.0, -1.0, 0.0])).as_tuple() == (1, 1, 1)
    assert signature(np.diag([1.0, 1e-6, -3.0])).as_tuple() == (1, 1, 1)
    with pytest.raises(ValueError):
        signature(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_signature_invariant_under_congruence():
    rng = np.random.default_rng(2)
    D = np.diag([3.0, 1.0, -2.0, -0.5, 0.0, 0.0])
    for _ in range(50):
        T = rng.standard_normal((6, 6))
        assert signature(T.T @ D @ T).as_tuple() == (2, 2, 2)


def test_closed_forms_by_hand():
    assert closed_form_signature(Domain("sym", 3), 1).as_tuple() == (3, 1, 2)
    assert closed_form_signature(Domain("sympl", 3), 1).as_tuple() == (6, 1, 8)
    assert closed_form_signature(Domain("full", 3), 1).as_tuple() == (4, 1, 4)
    assert paper_signature(Domain("sympl", 3), 1).as_tuple() == (12, 4, 24)
    assert paper_signature(Domain("full", 3), 1) is None
    assert grassmannian_dim(Domain("sym", 3), 1) == 2
    assert grassmannian_dim(Domain("sympl", 3), 1) == 8
    assert grassmannian_dim(Domain("full", 3), 1) == 4


@pytest.mark.parametrize("kind", ["sym", "sympl", "full"])
def test_sum_rule_for_certified_triples(kind):
    for N in range(1, 8):
        d = Domain(kind, N)
        for n in range(N + 1):
            sig = closed_form_signature(d, n)
            assert sum_rule_holds(d, sig)
            assert sig.d_zero == grassmannian_dim(d, n)
            assert sig.as_tuple() == hqf_at_critical(CriticalPointSpec(d, n)).signature().as_tuple()


def test_published_self_dual_triples_break_sum_rule():
    for N in range(1, 6):
        d = Domain("sympl", N)
        for n in range(N + 1):
            assert not sum_rule_holds(d, paper_signature(d, n))


@pytest.mark.parametrize("kind,Nmax", [("sym", 6), ("full", 4), ("sympl", 3)])
def test_measured_signature_matches_closed_form(kind, Nmax):
    for N in range(2, Nmax + 1):
        d = Domain(kind, N)
        for n in range(N + 1):
            for r in range(10):
                X = random_rotation(d, SeededStream(3, 100 * N + 10 * n + r))
                p = make_critical_point(CriticalPointSpec(d, n, X))
                assert signature(analytic_hessian(p)) == closed_form_signature(d, n)
            assert signature(numerical_hessian(p)) == closed_form_signature(d, n)


def test_signature_dataclass():
    s = HessianSignature(1, 2, 3, note="x")
    assert s == HessianSignature(1, 2, 3) and s.total == 6 and s.is_saddle()
    assert not HessianSignature(0, 3, 0).is_saddle()
    assert domain_dim(Domain("sym", 3)) == 6

