"""Landscape domains, on-manifold points, tangent charts and the curve construction.

Three domains are supported:

=========  ===============================  ===========  ==============
kind       matrices                         size         real dimension
=========  ===============================  ===========  ==============
``sym``    symmetric unitary, U(N)/O(N)     N            N(N+1)/2
``sympl``  self-dual unitary, U(2N)/Sp(2N)  2N           N(2N-1)
``full``   all of U(N)                      N            N^2
=========  ===============================  ===========  ==============

Every curve is ``sqrt(S) @ expm(1j*t*A) @ sqrt(S)`` with ``A`` drawn from the
domain's generator space (real symmetric, Hermitian self-dual, Hermitian),
which keeps the curve inside the domain exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import linalg
from .errors import DimensionError, DomainError, NumericalError

POINT_TOL = 1e-9


class DomainKind(enum.Enum):
    SYMMETRIC = "sym"
    SELF_DUAL = "sympl"
    FULL = "full"

    @classmethod
    def parse(cls, value) -> "DomainKind":
        if isinstance(value, cls):
            return value
        aliases = {
            "sym": cls.SYMMETRIC, "symmetric": cls.SYMMETRIC, "symmetricunitary": cls.SYMMETRIC,
            "sympl": cls.SELF_DUAL, "selfdual": cls.SELF_DUAL, "selfdualunitary": cls.SELF_DUAL,
            "self-dual": cls.SELF_DUAL, "symplectic": cls.SELF_DUAL,
            "full": cls.FULL, "fullunitary": cls.FULL, "unitary": cls.FULL,
        }
        key = str(value).strip().lower().replace("_", "")
        if key not in aliases:
            raise ValueError(f"unknown domain {value!r}; expected one of sym, sympl, full")
        return aliases[key]


@dataclass(frozen=True)
class Domain:
    """A landscape domain of a given kind and block count ``n``.

    The matrix size is ``n`` except for the self-dual domain, where it is ``2n``.
    """

    kind: DomainKind
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind.parse(self.kind))
        if int(self.n) < 1:
            raise ValueError("domain needs n >= 1")
        object.__setattr__(self, "n", int(self.n))

    @property
    def size(self) -> int:
        return 2 * self.n if self.kind is DomainKind.SELF_DUAL else self.n

    @property
    def dim(self) -> int:
        return domain_dim(self)

    def __str__(self):
        return f"{self.kind.value}(N={self.n})"


def domain_dim(domain: Domain) -> int:
    """Real dimension of the domain manifold."""
    N = domain.n
    if domain.kind is DomainKind.SYMMETRIC:
        return (N * N + N) // 2
    if domain.kind is DomainKind.SELF_DUAL:
        return N * (2 * N - 1)
    return N * N


def tangent_rank_at_identity(domain: Domain, tol: float = 1e-9) -> int:
    """Brute-force dimension of the linearized domain at the identity.

    Solves for real-parameterized complex perturbations ``M`` of ``I`` with
    ``M + M^dagger = 0`` and ``M = M^T`` (or ``M = M^R``) and returns the
    nullity of that linear constraint system.
    """
    n = domain.size
    cols = []
    for k in range(2 * n * n):
        M = np.zeros(n * n, dtype=complex)
        M[k % (n * n)] = 1 if k < n * n else 1j
        M = M.reshape(n, n)
        parts = [M + linalg.dagger(M)]
        if domain.kind is DomainKind.SYMMETRIC:
            parts.append(M - M.T)
        elif domain.kind is DomainKind.SELF_DUAL:
            parts.append(M - linalg.symplectic_dual(M))
        flat = np.concatenate([p.ravel() for p in parts])
        cols.append(np.concatenate([flat.real, flat.imag]))
    C = np.array(cols).T
    sv = np.linalg.svd(C, compute_uv=False)
    return C.shape[1] - int(np.sum(sv > tol * sv[0]))


def structure_residual(domain: Domain, M: np.ndarray) -> float:
    """Symmetry (or self-duality) residual; zero for the full domain."""
    if domain.kind is DomainKind.SYMMETRIC:
        return linalg.symmetry_residual(M)
    if domain.kind is DomainKind.SELF_DUAL:
        return linalg.self_duality_residual(M)
    return 0.0


def domain_residual(domain: Domain, M: np.ndarray) -> float:
    return max(linalg.unitarity_residual(M), structure_residual(domain, M))


def contains(domain: Domain, M, tol: float = POINT_TOL) -> bool:
    """True iff ``M`` is a unitary of the right size with the domain's symmetry."""
    M = np.asarray(M, dtype=complex)
    if M.shape != (domain.size, domain.size) or not np.all(np.isfinite(M)):
        return False
    return domain_residual(domain, M) <= tol


@dataclass(frozen=True, eq=False)
class DomainPoint:
    """A matrix that lies on ``domain`` to within ``POINT_TOL``."""

    domain: Domain
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = linalg.as_square(self.matrix)
        if M.shape[0] != self.domain.size:
            raise DimensionError(f"{self.domain} needs size {self.domain.size}, got {M.shape[0]}")
        if not contains(self.domain, M, POINT_TOL):
            raise DomainError(f"matrix is not on {self.domain} "
                              f"(residual {domain_residual(self.domain, M):.2e})")
        M = M.copy()
        M.flags.writeable = False
        object.__setattr__(self, "matrix", M)

    @cached_property
    def factorization(self):
        """Spectral form (symmetric and self-dual domains only)."""
        if self.domain.kind is DomainKind.SYMMETRIC:
            return linalg.factor_symmetric_unitary(self.matrix)
        if self.domain.kind is DomainKind.SELF_DUAL:
            return linalg.factor_self_dual_unitary(self.matrix)
        raise DomainError("the full unitary domain has no real spectral form")

    @cached_property
    def phases(self) -> np.ndarray:
        """Eigenphases; one per Kramers pair on the self-dual domain."""
        if self.domain.kind is DomainKind.FULL:
            return linalg.unitary_eigenphases(self.matrix)
        return np.sort(self.factorization.phases)

    @cached_property
    def root(self) -> np.ndarray:
        """Principal square root (eigenphases halved) as a plain array."""
        if self.domain.kind is DomainKind.FULL:
            return linalg.sqrt_unitary(self.matrix)
        fact = self.factorization
        return fact.reconstruct(fact.phases / 2)


def principal_sqrt(point: DomainPoint) -> DomainPoint:
    """Same-domain square root with phases in (-pi, pi] halved; -1 maps to +i."""
    if not isinstance(point, DomainPoint):
        raise DomainError("principal_sqrt needs a DomainPoint")
    return DomainPoint(point.domain, point.root)


# --------------------------------------------------------------------------
# tangent charts
# --------------------------------------------------------------------------

PAULI_NAMES = ("alpha", "beta", "gamma", "delta")


@lru_cache(maxsize=None)
def _standard_basis(kind: DomainKind, N: int):
    mats, labels = [], []
    if kind is DomainKind.SELF_DUAL:
        size = 2 * N
        for i in range(N):
            A = np.zeros((size, size), dtype=complex)
            A[i, i] = A[i + N, i + N] = 1 / np.sqrt(2)
            mats.append(A)
            labels.append(("diag", i))
        for i in range(N):
            for j in range(i + 1, N):
                for c, u in enumerate(linalg.QUATERNION_UNITS):
                    A = np.zeros((size, size), dtype=complex)
                    A[np.ix_([i, i + N], [j, j + N])] = u / 2
                    A[np.ix_([j, j + N], [i, i + N])] = linalg.dagger(u) / 2
                    mats.append(A)
                    labels.append(("off", i, j, PAULI_NAMES[c]))
    else:
        for i in range(N):
            A = np.zeros((N, N), dtype=complex)
            A[i, i] = 1
            mats.append(A)
            labels.append(("diag", i))
        for i in range(N):
            for j in range(i + 1, N):
                A = np.zeros((N, N), dtype=complex)
                A[i, j] = A[j, i] = 1 / np.sqrt(2)
                mats.append(A)
                labels.append(("off", i, j, "re") if kind is DomainKind.FULL else ("off", i, j))
                if kind is DomainKind.FULL:
                    A = np.zeros((N, N), dtype=complex)
                    A[i, j] = 1j / np.sqrt(2)
                    A[j, i] = -1j / np.sqrt(2)
                    mats.append(A)
                    labels.append(("off", i, j, "im"))
    basis = np.array(mats)
    basis.flags.writeable = False
    return basis, tuple(labels)


@dataclass(frozen=True, eq=False)
class TangentChart:
    """Orthonormal basis of generator matrices at a point.

    Coordinates ``c`` map to the generator ``sum_k c[k] * basis[k]``; the inner
    product is ``Re Tr(A^dagger B)``.
    """

    base: DomainPoint
    basis: np.ndarray = field(repr=False)
    labels: tuple

    @property
    def dim(self) -> int:
        return len(self.labels)

    def generator(self, coords) -> np.ndarray:
        return np.tensordot(np.asarray(coords, dtype=float), self.basis, axes=1)

    def coordinates(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=complex)
        return np.einsum("kij,ij->k", self.basis.conj(), A).real

    def gram(self) -> np.ndarray:
        flat = self.basis.reshape(self.dim, -1)
        return (flat.conj() @ flat.T).real


def standard_tangent_chart(point: DomainPoint) -> TangentChart:
    if not isinstance(point, DomainPoint):
        raise DomainError("a tangent chart needs a DomainPoint")
    basis, labels = _standard_basis(point.domain.kind, point.domain.n)
    return TangentChart(point, basis, labels)


def check_generator(domain: Domain, A, tol: float = 1e-10) -> np.ndarray:
    """Validate that ``A`` lies in the domain's generator space and return it."""
    A = linalg.as_square(A)
    if A.shape[0] != domain.size:
        raise DimensionError(f"generator size {A.shape[0]} does not match {domain}")
    if linalg.max_abs(A - linalg.dagger(A)) > tol:
        raise DomainError("generator is not Hermitian")
    if domain.kind is DomainKind.SYMMETRIC and linalg.max_abs(A.imag) > tol:
        raise DomainError("symmetric-unitary generators must be real symmetric")
    if domain.kind is DomainKind.SELF_DUAL and linalg.self_duality_residual(A) > tol:
        raise DomainError("self-dual generators must satisfy A = A^R")
    return A


def curve_matrix(point: DomainPoint, A: np.ndarray, t: float) -> np.ndarray:
    """Unchecked ``sqrt(S) expm(i t A) sqrt(S)`` as a plain array."""
    R = point.root
    return R @ linalg.exp_i_generator(A, t) @ R


def curve(point: DomainPoint, A, t: float) -> DomainPoint:
    """The on-domain curve ``sqrt(S) @ expm(1j*t*A) @ sqrt(S)``; ``t = 0`` gives ``point``."""
    A = check_generator(point.domain, A)
    if t == 0:
        return point
    return DomainPoint(point.domain, curve_matrix(point, A, t))


# --------------------------------------------------------------------------
# drift control
# --------------------------------------------------------------------------

def _project_structure(domain: Domain, M: np.ndarray) -> np.ndarray:
    if domain.kind is DomainKind.SYMMETRIC:
        return (M + M.T) / 2
    if domain.kind is DomainKind.SELF_DUAL:
        return (M + linalg.symplectic_dual(M)) / 2
    return M


def _polar(M: np.ndarray) -> np.ndarray:
    U, _, Vh = np.linalg.svd(M)
    return U @ Vh


def renormalize(point, matrix=None, target: float = 1e-12, rounds: int = 5,
                accept: float = 1e-6) -> DomainPoint:
    """Pull a slightly drifted matrix back onto its domain.

    Call as ``renormalize(point)`` or ``renormalize(domain, matrix)``. Structure
    projection and polar re-unitarization alternate for at most ``rounds``.
    """
    if matrix is None:
        domain, M = point.domain, np.array(point.matrix)
    else:
        domain, M = point, linalg.as_square(matrix)
    start = domain_residual(domain, M)
    if start > accept:
        raise DomainError(f"matrix is {start:.2e} away from {domain}; too far to renormalize")
    if start < target:
        return point if matrix is None else DomainPoint(domain, M)
    for _ in range(rounds):
        M = _polar(_project_structure(domain, M))
        M = _project_structure(domain, M)
        if domain_residual(domain, M) < target:
            return DomainPoint(domain, M)
    raise NumericalError(f"renormalize did not converge in {rounds} rounds",
                         domain_residual(domain, M))
