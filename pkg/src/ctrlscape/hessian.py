"""Hessians of the landscape at critical points and their inertia.

Chart convention: the orthonormal charts of :mod:`ctrlscape.domains` scale
off-diagonal generator units by 1/sqrt(2) (symmetric, full) or 1/2
(self-dual). The monomial form of the Hessian instead puts one unit weight on
each independent entry of ``A``, so an off-diagonal monomial coefficient is
twice the matching chart eigenvalue while diagonal coefficients agree.
Signatures do not care; spectra do, and :meth:`QuadraticFormDiagonal.in_chart`
does the conversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domains import (Domain, DomainKind, DomainPoint, TangentChart, curve_matrix,
                      domain_dim, standard_tangent_chart)
from .errors import DomainError
from .landscape import CriticalPointSpec, _gradient_kernel

DEFAULT_H = 1e-3
DEFAULT_ZERO_TOL = 1e-4

SELF_DUAL_CORRECTION_NOTE = (
    "self-dual triple recounted from the quaternion monomials of the Hessian form; "
    "the published triple (2(N-n)^2+2(N-n), 2n^2+2n, 4N(N-n)) violates the sum rule "
    "D+ + D- + D0 = N(2N-1)")


@dataclass(frozen=True)
class HessianSignature:
    d_plus: int
    d_minus: int
    d_zero: int
    note: str = field(default="", compare=False)

    @property
    def total(self) -> int:
        return self.d_plus + self.d_minus + self.d_zero

    def as_tuple(self) -> tuple:
        return (self.d_plus, self.d_minus, self.d_zero)

    def is_saddle(self) -> bool:
        return self.d_plus > 0 and self.d_minus > 0


@dataclass(frozen=True)
class QuadraticFormDiagonal:
    """Diagonal Hessian form: ``coefficients[k]`` multiplies the squared monomial ``labels[k]``."""

    coefficients: np.ndarray
    labels: tuple

    def in_chart(self) -> np.ndarray:
        """Coefficients rescaled to the orthonormal chart (off-diagonal halved)."""
        scale = np.array([1.0 if lab[0] == "diag" else 0.5 for lab in self.labels])
        return self.coefficients * scale

    def signature(self) -> HessianSignature:
        c = self.coefficients
        return HessianSignature(int(np.sum(c > 0)), int(np.sum(c < 0)), int(np.sum(c == 0)))


def hqf_at_critical(spec: CriticalPointSpec) -> QuadraticFormDiagonal:
    """Monomial coefficients of the Hessian form at a critical point.

    In rotated coordinates ``A~ = X A X^{-1}`` the form is
    ``-sum_i w_i A~_ii^2 - sum_{i<j} (w_i + w_j) |A~_ij|^2``, where each
    off-diagonal entry contributes one monomial per real component (one for
    the symmetric domain, two for the full domain, four quaternion components
    on the self-dual domain). Labels follow the standard chart order.
    """
    w = spec.omegas
    N = spec.domain.n
    coeffs, labels = [], []
    for i in range(N):
        coeffs.append(-w[i])
        labels.append(("diag", i))
    if spec.domain.kind is DomainKind.SELF_DUAL:
        comps = ("alpha", "beta", "gamma", "delta")
    elif spec.domain.kind is DomainKind.FULL:
        comps = ("re", "im")
    else:
        comps = (None,)
    for i in range(N):
        for j in range(i + 1, N):
            for c in comps:
                coeffs.append(-(w[i] + w[j]))
                labels.append(("off", i, j) if c is None else ("off", i, j, c))
    return QuadraticFormDiagonal(np.array(coeffs, dtype=float), tuple(labels))


def analytic_hessian(point: DomainPoint, chart: Optional[TangentChart] = None,
                     target: Optional[DomainPoint] = None) -> np.ndarray:
    """Exact second derivatives ``-Re Tr(sym(A_a A_b) M)`` in chart coordinates.

    Agrees with :func:`numerical_hessian`; only chart-independent at critical points.
    """
    chart = chart or standard_tangent_chart(point)
    M = _gradient_kernel(point, target)
    B = chart.basis
    prods = np.einsum("aij,bjk,ki->ab", B, B, M)
    H = -prods.real
    return (H + H.T) / 2


def numerical_hessian(point: DomainPoint, chart: Optional[TangentChart] = None,
                      h: float = DEFAULT_H, target: Optional[DomainPoint] = None) -> np.ndarray:
    """Mixed central second differences of the landscape along the two-parameter curve.

    ``H[a, b]`` differentiates ``J(sqrt(S) expm(i(s A_a + t A_b)) sqrt(S))`` at
    ``s = t = 0`` with step ``h``; truncation error is O(h^2).
    """
    if not isinstance(point, DomainPoint):
        raise DomainError("numerical_hessian needs a DomainPoint")
    if not 1e-6 <= h <= 1e-2:
        raise ValueError("h must lie in [1e-6, 1e-2]")
    chart = chart or standard_tangent_chart(point)
    Wd = None if target is None else target.matrix.conj().T

    def f(B):
        C = curve_matrix(point, B, 1.0)
        return np.trace(C).real if Wd is None else np.trace(Wd @ C).real

    basis = chart.basis
    d = chart.dim
    H = np.empty((d, d))
    for a in range(d):
        for b in range(a, d):
            Aa, Ab = basis[a], basis[b]
            val = (f(h * Aa + h * Ab) - f(h * Aa - h * Ab)
                   - f(-h * Aa + h * Ab) + f(-h * Aa - h * Ab)) / (4 * h * h)
            H[a, b] = H[b, a] = val
    return (H + H.T) / 2


def signature(H, zero_tol: float = DEFAULT_ZERO_TOL) -> HessianSignature:
    """Inertia of a symmetric matrix; ``|lambda| < zero_tol * max(1, |lambda|_max)`` counts as zero."""
    H = np.asarray(H, dtype=float)
    if H.size and np.max(np.abs(H - H.T)) > 1e-10:
        raise ValueError("signature needs a symmetric matrix")
    ev = np.linalg.eigvalsh((H + H.T) / 2) if H.size else np.array([])
    cut = zero_tol * max(1.0, float(np.max(np.abs(ev))) if ev.size else 0.0)
    return HessianSignature(int(np.sum(ev >= cut)), int(np.sum(ev <= -cut)),
                            int(np.sum(np.abs(ev) < cut)))


def _check_n(domain: Domain, n: int):
    if not 0 <= n <= domain.n:
        raise ValueError(f"n={n} outside [0, {domain.n}]")


def closed_form_signature(domain: Domain, n: int) -> HessianSignature:
    """Signature certified for the orbit with n (+1)-eigenvalues.

    Symmetric: ((m^2+m)/2, (n^2+n)/2, n m) with m = N - n. Self-dual:
    (m(2m-1), n(2n-1), 4nm), which replaces the published self-dual triple.
    Full unitary: (m^2, n^2, 2nm).
    """
    _check_n(domain, n)
    m = domain.n - n
    if domain.kind is DomainKind.SYMMETRIC:
        return HessianSignature((m * m + m) // 2, (n * n + n) // 2, n * m)
    if domain.kind is DomainKind.SELF_DUAL:
        return HessianSignature(m * (2 * m - 1), n * (2 * n - 1), 4 * n * m,
                                note=SELF_DUAL_CORRECTION_NOTE)
    return HessianSignature(m * m, n * n, 2 * n * m)


def paper_signature(domain: Domain, n: int) -> Optional[HessianSignature]:
    """Triple exactly as published; None for the full-unitary baseline."""
    _check_n(domain, n)
    N, m = domain.n, domain.n - n
    if domain.kind is DomainKind.SYMMETRIC:
        return HessianSignature((m * m + m) // 2, (n * n + n) // 2, n * m)
    if domain.kind is DomainKind.SELF_DUAL:
        return HessianSignature(2 * m * m + 2 * m, 2 * n * n + 2 * n, 4 * N * m)
    return None


def grassmannian_dim(domain: Domain, n: int) -> int:
    """Dimension of the critical orbit: n(N-n), 4n(N-n) or 2n(N-n)."""
    _check_n(domain, n)
    N = domain.n
    if domain.kind is DomainKind.SYMMETRIC:
        return n * (N - n)
    if domain.kind is DomainKind.SELF_DUAL:
        return N * (2 * N - 1) - (N - n) * (2 * (N - n) - 1) - n * (2 * n - 1)
    return 2 * n * (N - n)


def sum_rule_holds(domain: Domain, sig: HessianSignature) -> bool:
    return sig.total == domain_dim(domain)
