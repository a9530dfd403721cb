"""Seeded random matrices: Haar unitaries, COE/CSE members, rotations, tangents.

Every draw comes from a :class:`SeededStream`, a counter-based Philox
generator keyed by ``(seed, stream_id)``. Trials own one stream each, so
results do not depend on scheduling order.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .domains import Domain, DomainKind, DomainPoint, TangentChart
from .errors import NumericalError

_U64 = 2 ** 64


class SeededStream:
    """An independent random stream identified by ``(seed, stream_id)``."""

    def __init__(self, seed: int, stream_id: int = 0):
        if not (0 <= int(seed) < _U64 and 0 <= int(stream_id) < _U64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.rng = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"SeededStream(seed={self.seed}, stream_id={self.stream_id})"

    def complex_normal(self, shape) -> np.ndarray:
        """Standard complex Gaussian entries, E|z|^2 = 1."""
        return (self.rng.standard_normal(shape) + 1j * self.rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(N: int, stream: SeededStream) -> np.ndarray:
    """Haar-distributed U(N) element (QR of a Ginibre matrix, phases fixed)."""
    Z = stream.complex_normal((N, N))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def haar_orthogonal(N: int, stream: SeededStream) -> np.ndarray:
    """Haar-distributed SO(N) element."""
    Z = stream.rng.standard_normal((N, N))
    Q, R = np.linalg.qr(Z)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def haar_symplectic(N: int, stream: SeededStream) -> np.ndarray:
    """Haar-distributed unitary-symplectic 2N x 2N matrix (X^R X = I).

    Quaternionic Gram-Schmidt of a quaternion Gaussian matrix; only the first
    N columns are drawn, their partners ``-J conj(v)`` complete the basis.
    """
    G = stream.complex_normal((N, 2 * N))
    firsts, partners = [], []
    if linalg.extend_kramers(firsts, partners, G, N, min_norm=1e-8) != N:
        raise NumericalError("degenerate quaternion Gaussian draw")
    return np.column_stack(firsts + partners)


def coe_sample(N: int, stream: SeededStream) -> DomainPoint:
    """Circular orthogonal ensemble member ``U^T U``."""
    U = haar_unitary(N, stream)
    S = U.T @ U
    return DomainPoint(Domain(DomainKind.SYMMETRIC, N), (S + S.T) / 2)


def cse_sample(N: int, stream: SeededStream) -> DomainPoint:
    """Circular symplectic ensemble member ``U^R U`` (size 2N)."""
    U = haar_unitary(2 * N, stream)
    S = linalg.symplectic_dual(U) @ U
    return DomainPoint(Domain(DomainKind.SELF_DUAL, N), (S + linalg.symplectic_dual(S)) / 2)


def cue_sample(N: int, stream: SeededStream) -> DomainPoint:
    return DomainPoint(Domain(DomainKind.FULL, N), haar_unitary(N, stream))


def sample_point(domain: Domain, stream: SeededStream) -> DomainPoint:
    """Ensemble sample matching the domain (COE, CSE or CUE)."""
    if domain.kind is DomainKind.SYMMETRIC:
        return coe_sample(domain.n, stream)
    if domain.kind is DomainKind.SELF_DUAL:
        return cse_sample(domain.n, stream)
    return cue_sample(domain.n, stream)


def random_rotation(domain: Domain, stream: SeededStream) -> np.ndarray:
    """Conjugating matrix for critical-point orbits.

    SO(N) for the symmetric domain, unitary-symplectic for the self-dual
    domain, and a Haar unitary for the full domain.
    """
    if domain.kind is DomainKind.SYMMETRIC:
        return haar_orthogonal(domain.n, stream)
    if domain.kind is DomainKind.SELF_DUAL:
        return haar_symplectic(domain.n, stream)
    return haar_unitary(domain.n, stream)


def random_tangent(chart: TangentChart, stream: SeededStream, norm: float = 1.0) -> np.ndarray:
    """Uniform point on the sphere of radius ``norm`` in chart coordinates."""
    if norm <= 0:
        raise ValueError("norm must be positive")
    v = stream.rng.standard_normal(chart.dim)
    return norm * v / np.linalg.norm(v)
