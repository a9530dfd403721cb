"""Landscape metrics, gradients and critical points.

The target-dependent fidelity is ``J(S, W) = Re Tr(W^dagger S)``. Transporting
``S -> sqrt(W^dagger) S sqrt(W^dagger)`` turns it into the target-free height
``Re Tr(S)``, which the rest of the package optimizes and analyses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .domains import (Domain, DomainKind, DomainPoint, TangentChart, principal_sqrt,
                      standard_tangent_chart)
from .errors import DimensionError, DomainError, InconsistencyError

# Phases of a critical point must sit this close to a multiple of pi.
PHASE_BAND = 0.1


def _matrix(S) -> np.ndarray:
    return S.matrix if isinstance(S, DomainPoint) else linalg.as_square(S)


def _same_size(S, W):
    S, W = _matrix(S), _matrix(W)
    if S.shape != W.shape:
        raise DimensionError(f"size mismatch: {S.shape} vs {W.shape}")
    return S, W


def j_canonical(S) -> float:
    """Target-free landscape height ``Re Tr(S)``."""
    return float(np.trace(_matrix(S)).real)


def j_metric(S, W) -> float:
    """Landscape fidelity ``Re Tr(W^dagger S)``."""
    S, W = _same_size(S, W)
    return float(np.vdot(W, S).real)


def metric_distance(S, W) -> float:
    """Squared Hilbert-Schmidt distance ``2 size - 2 Re Tr(W^dagger S)``."""
    S, W = _same_size(S, W)
    return 2 * S.shape[0] - 2 * j_metric(S, W)


def reduce_to_canonical(S: DomainPoint, W: DomainPoint) -> DomainPoint:
    """Map ``S`` to ``sqrt(W^dagger) S sqrt(W^dagger)`` so that J(S, W) = Re Tr(result)."""
    if not (isinstance(S, DomainPoint) and isinstance(W, DomainPoint)):
        raise DomainError("reduce_to_canonical needs DomainPoints")
    if S.domain != W.domain:
        raise DomainError(f"S on {S.domain} but W on {W.domain}")
    R = principal_sqrt(DomainPoint(W.domain, linalg.dagger(W.matrix))).matrix
    return DomainPoint(S.domain, R @ S.matrix @ R)


def critical_values(domain: Domain) -> list[float]:
    """Ascending critical values of ``Re Tr`` on the domain, one per n = 0..N."""
    scale = 2 if domain.kind is DomainKind.SELF_DUAL else 1
    return [float(scale * (2 * n - domain.n)) for n in range(domain.n + 1)]


@dataclass(frozen=True, eq=False)
class CriticalPointSpec:
    """Critical orbit label: ``n`` eigenvalues (Kramers pairs) equal to +1.

    ``rotation`` is the conjugating matrix X; None means the identity.
    """

    domain: Domain
    n: int
    rotation: Optional[np.ndarray] = None

    def __post_init__(self):
        if not 0 <= self.n <= self.domain.n:
            raise ValueError(f"n={self.n} outside [0, {self.domain.n}]")

    @property
    def omegas(self) -> np.ndarray:
        """Signs of the canonical element, +1 first (one per block)."""
        return np.concatenate([np.ones(self.n), -np.ones(self.domain.n - self.n)])


def canonical_element(domain: Domain, n: int) -> np.ndarray:
    """``diag(I_n, -I_{N-n})``, doubled blockwise on the self-dual domain."""
    w = CriticalPointSpec(domain, n).omegas
    if domain.kind is DomainKind.SELF_DUAL:
        w = np.concatenate([w, w])
    return np.diag(w).astype(complex)


def _check_rotation(domain: Domain, X: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    X = linalg.as_square(X)
    if X.shape[0] != domain.size:
        raise DimensionError(f"rotation size {X.shape[0]} does not match {domain}")
    if not linalg.is_unitary(X, tol):
        raise DomainError("rotation is not unitary")
    if domain.kind is DomainKind.SYMMETRIC:
        if linalg.max_abs(X.imag) > tol or np.linalg.det(X.real) < 0:
            raise DomainError("rotation must be in SO(N)")
        return X.real
    if domain.kind is DomainKind.SELF_DUAL and linalg.quaternion_real_residual(X) > tol:
        raise DomainError("rotation must be unitary-symplectic")
    return X


def make_critical_point(spec: CriticalPointSpec) -> DomainPoint:
    """Critical point ``X^T Omega X`` (``X^R Omega X``; ``X^dagger Omega X`` on U(N))."""
    domain = spec.domain
    Omega = canonical_element(domain, spec.n)
    if spec.rotation is None:
        return DomainPoint(domain, Omega)
    X = _check_rotation(domain, spec.rotation)
    if domain.kind is DomainKind.SYMMETRIC:
        S = X.T @ Omega @ X
        S = (S + S.T) / 2
    elif domain.kind is DomainKind.SELF_DUAL:
        S = linalg.symplectic_dual(X) @ Omega @ X
        S = (S + linalg.symplectic_dual(S)) / 2
    else:
        S = linalg.dagger(X) @ Omega @ X
    return DomainPoint(domain, S)


def _gradient_kernel(point: DomainPoint, target: Optional[DomainPoint]) -> np.ndarray:
    """Matrix M with d/dt J(curve(point, A, t))|_0 = -Im Tr(A M)."""
    if target is None:
        return point.matrix
    if target.domain != point.domain:
        raise DomainError("target lives on a different domain")
    R = point.root
    return R @ linalg.dagger(target.matrix) @ R


def gradient(point: DomainPoint, chart: Optional[TangentChart] = None,
             target: Optional[DomainPoint] = None) -> np.ndarray:
    """Chart coordinates of the gradient of ``Re Tr(S)`` (or of ``J(S, target)``).

    The k-th entry is the derivative along ``curve(point, A_k, t)`` at ``t = 0``,
    i.e. ``-Im Tr(A_k S)``.
    """
    if not isinstance(point, DomainPoint):
        raise DomainError("gradient needs a DomainPoint")
    chart = chart or standard_tangent_chart(point)
    M = _gradient_kernel(point, target)
    return -np.einsum("kij,ji->k", chart.basis, M).imag


def gradient_canonical(point: DomainPoint, chart: Optional[TangentChart] = None) -> np.ndarray:
    return gradient(point, chart)


def classify_critical_point(point: DomainPoint, tol: float = 1e-8) -> Optional[int]:
    """Return the orbit label n of a critical point, or None if not critical.

    n counts eigenphases (Kramers pairs on the self-dual domain) that round
    to an even multiple of pi.

    Raises
    ------
    InconsistencyError
        The gradient is below ``tol`` but some phase is farther than 0.1 rad
        from every multiple of pi.
    """
    g = gradient(point)
    if np.linalg.norm(g) > tol:
        return None
    phases = point.phases
    k = np.round(phases / np.pi)
    off = np.max(np.abs(phases - k * np.pi))
    if off > PHASE_BAND:
        raise InconsistencyError(
            f"gradient {np.linalg.norm(g):.2e} <= tol but a phase is {off:.3f} rad from k*pi")
    return int(np.count_nonzero(k.astype(int) % 2 == 0))
