"""Dense complex matrix helpers and structure-aware factorizations.

Two spectral forms are provided:

* symmetric unitary ``S = X.T @ diag(exp(1j*phi)) @ X`` with ``X`` in SO(N),
  obtained by simultaneously diagonalizing the commuting real symmetric
  matrices ``Re S`` and ``Im S``;
* self-dual unitary ``S = X^R @ Omega @ X`` with ``X`` unitary-symplectic and
  ``Omega = diag(omega, omega)`` (every eigenphase appears twice).

Self-dual matrices use the block ordering in which the antisymmetric form is
``J = [[0, I_N], [-I_N, 0]]``. The quaternion element ``(i, j)`` of a 2N x 2N
matrix is therefore the 2 x 2 submatrix on rows ``(i, i+N)`` and columns
``(j, j+N)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, NumericalError

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Quaternion units realized as 2x2 complex matrices: 1, i*sx, i*sy, i*sz.
QUATERNION_UNITS = (SIGMA_0, 1j * SIGMA_X, 1j * SIGMA_Y, 1j * SIGMA_Z)

# Phases this close to -pi are stored as +pi.
BRANCH_SNAP = 1e-12


def as_square(M) -> np.ndarray:
    """Return ``M`` as a finite square complex array, or raise."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def dagger(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def max_abs(M: np.ndarray) -> float:
    return float(np.max(np.abs(M))) if M.size else 0.0


def canonical_phase(phi):
    """Map angles into (-pi, pi]; values within BRANCH_SNAP of -pi become +pi."""
    phi = np.angle(np.exp(1j * np.asarray(phi, dtype=float)))
    return np.where(phi <= -np.pi + BRANCH_SNAP, np.pi, phi)


# --------------------------------------------------------------------------
# symplectic dual and quaternion blocks
# --------------------------------------------------------------------------

def symplectic_form(N: int) -> np.ndarray:
    """The antisymmetric form ``[[0, I_N], [-I_N, 0]]``."""
    J = np.zeros((2 * N, 2 * N))
    J[:N, N:] = np.eye(N)
    J[N:, :N] = -np.eye(N)
    return J


def symplectic_dual(M) -> np.ndarray:
    """Return ``M^R = -J M^T J``.

    The dual is an involutive anti-automorphism: ``(MN)^R = N^R M^R``.
    """
    M = as_square(M)
    if M.shape[0] % 2:
        raise DimensionError(f"symplectic dual needs an even size, got {M.shape[0]}")
    J = symplectic_form(M.shape[0] // 2)
    return -J @ M.T @ J


def is_unitary(M, tol: float = 1e-10) -> bool:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    eye = np.eye(M.shape[0])
    return max_abs(dagger(M) @ M - eye) <= tol and max_abs(M @ dagger(M) - eye) <= tol


def unitarity_residual(M: np.ndarray) -> float:
    eye = np.eye(M.shape[0])
    return max(max_abs(dagger(M) @ M - eye), max_abs(M @ dagger(M) - eye))


def symmetry_residual(M: np.ndarray) -> float:
    return max_abs(M - M.T)


def self_duality_residual(M: np.ndarray) -> float:
    return max_abs(M - symplectic_dual(M))


class QuaternionBlockMatrix:
    """A 2N x 2N complex matrix viewed as an N x N array of 2 x 2 blocks.

    Block ``(i, j)`` is expanded as
    ``a*1 + b*(i sx) + c*(i sy) + d*(i sz)``; the matrix is quaternion-real
    when every coefficient is real.
    """

    def __init__(self, realization):
        M = as_square(realization)
        if M.shape[0] % 2:
            raise DimensionError("quaternion block matrices have even size")
        self.realization = M
        self.block_dim = M.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        N = self.block_dim
        idx_r = [i, i + N]
        idx_c = [j, j + N]
        return self.realization[np.ix_(idx_r, idx_c)]

    def coefficients(self, i: int, j: int) -> np.ndarray:
        """Complex coefficients ``(alpha, beta, gamma, delta)`` of block (i, j)."""
        q = self.block(i, j)
        # The units are orthogonal under <P, Q> = Tr(P^dagger Q) with norm 2.
        return np.array([np.trace(dagger(u) @ q) / 2 for u in QUATERNION_UNITS])

    def quaternion_real_residual(self) -> float:
        N = self.block_dim
        worst = 0.0
        for i in range(N):
            for j in range(N):
                worst = max(worst, float(np.max(np.abs(self.coefficients(i, j).imag))))
        return worst

    def is_quaternion_real(self, tol: float = 1e-10) -> bool:
        return self.quaternion_real_residual() <= tol

    @classmethod
    def from_coefficients(cls, coeffs) -> "QuaternionBlockMatrix":
        """Build from an (N, N, 4) array of block coefficients."""
        coeffs = np.asarray(coeffs)
        N = coeffs.shape[0]
        M = np.zeros((2 * N, 2 * N), dtype=complex)
        for i in range(N):
            for j in range(N):
                q = sum(c * u for c, u in zip(coeffs[i, j], QUATERNION_UNITS))
                M[np.ix_([i, i + N], [j, j + N])] = q
        return cls(M)


def quaternion_real_residual(M) -> float:
    """Distance of ``M`` from commuting with the antiunitary ``v -> J conj(v)``."""
    M = as_square(M)
    J = symplectic_form(M.shape[0] // 2)
    return max_abs(M.conj() - J @ M @ J.T)


# --------------------------------------------------------------------------
# spectral forms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralFactorization:
    """``S = rotation.T @ diag(exp(1j*phases)) @ rotation`` with real SO(N) rotation."""

    rotation: np.ndarray
    phases: np.ndarray

    def reconstruct(self, phases=None) -> np.ndarray:
        phases = self.phases if phases is None else phases
        X = self.rotation
        return (X.T * np.exp(1j * np.asarray(phases))) @ X


@dataclass(frozen=True)
class SelfDualFactorization:
    """``S = X^R @ diag(w, w) @ X`` with X unitary-symplectic; ``phases`` has N entries."""

    rotation: np.ndarray
    phases: np.ndarray

    @property
    def doubled_phases(self) -> np.ndarray:
        return np.concatenate([self.phases, self.phases])

    def reconstruct(self, phases=None) -> np.ndarray:
        phases = self.phases if phases is None else np.asarray(phases)
        X = self.rotation
        # X^R = X^dagger for unitary-symplectic X; the dual is used as written.
        return (symplectic_dual(X) * np.exp(1j * np.concatenate([phases, phases]))) @ X


def _clusters(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Index groups of a sorted 1-d array split wherever consecutive gaps exceed ``gap``."""
    breaks = np.nonzero(np.diff(values) > gap)[0] + 1
    return np.split(np.arange(values.size), breaks)


def _joint_jacobi(A: np.ndarray, B: np.ndarray, sweeps: int = 30, threshold: float = 1e-15):
    """Jacobi joint diagonalization of two commuting real symmetric matrices.

    Returns the orthogonal V with ``V.T @ A @ V`` and ``V.T @ B @ V`` diagonal.
    """
    mats = np.array([A, B], dtype=float)
    m = A.shape[0]
    V = np.eye(m)
    for _ in range(sweeps):
        rotated = False
        for p in range(m - 1):
            for q in range(p + 1, m):
                am = mats[:, p, p] - mats[:, q, q]
                ap = mats[:, p, q] + mats[:, q, p]
                ton = am @ am - ap @ ap
                toff = 2 * am @ ap
                theta = 0.5 * np.arctan2(toff, ton + np.hypot(ton, toff))
                c, s = np.cos(theta), np.sin(theta)
                if abs(s) <= threshold:
                    continue
                rotated = True
                G = np.array([[c, -s], [s, c]])
                cols = [p, q]
                mats[:, :, cols] = mats[:, :, cols] @ G
                mats[:, cols, :] = np.einsum("ji,kjl->kil", G, mats[:, cols, :])
                V[:, cols] = V[:, cols] @ G
        if not rotated:
            break
    return V


def _order_rows(X: np.ndarray, phases: np.ndarray, degenerate_tol: float):
    """Sort by phase; within a degenerate phase cluster sort rows lexicographically."""
    order = np.argsort(phases, kind="stable")
    X, phases = X[order], phases[order]
    out = []
    for idx in _clusters(phases, degenerate_tol):
        rows = X[idx]
        keys = np.lexsort(np.round(rows, 12).T[::-1])
        out.extend(idx[keys])
    out = np.array(out)
    return X[out], phases[out]


def factor_symmetric_unitary(S, tol: float = 1e-8, cluster_gap: float = 1e-8,
                             residual_tol: float = 1e-9) -> SpectralFactorization:
    """Factor a symmetric unitary as ``X.T @ diag(exp(1j*phi)) @ X``.

    ``Re S`` is diagonalized first; inside each eigenvalue cluster (gap
    ``cluster_gap``) the projected ``Im S`` is diagonalized. A Jacobi joint
    diagonalization sweep polishes the basis if near-degenerate clusters left
    residual coupling.

    Raises
    ------
    DomainError
        ``S`` is not symmetric unitary to ``tol``.
    NumericalError
        The reconstruction residual exceeds ``residual_tol``.
    """
    S = as_square(S)
    if symmetry_residual(S) > tol or unitarity_residual(S) > tol:
        raise DomainError("matrix is not symmetric unitary")
    re = (S.real + S.real.T) / 2
    im = (S.imag + S.imag.T) / 2

    evals, Q = np.linalg.eigh(re)
    for idx in _clusters(evals, cluster_gap):
        if idx.size > 1:
            sub = Q[:, idx]
            _, W = np.linalg.eigh(sub.T @ im @ sub)
            Q[:, idx] = sub @ W

    D = Q.T @ S @ Q
    if max_abs(D - np.diag(np.diag(D))) > 1e-13:
        Q = Q @ _joint_jacobi(Q.T @ re @ Q, Q.T @ im @ Q)
        D = Q.T @ S @ Q

    X = Q.T.copy()
    for k in range(X.shape[0]):
        pivot = np.flatnonzero(np.abs(X[k]) > 1e-8)[0]
        if X[k, pivot] < 0:
            X[k] = -X[k]
    phases = canonical_phase(np.angle(np.diag(D)))
    X, phases = _order_rows(X, phases, cluster_gap)
    if np.linalg.det(X) < 0:
        X[-1] = -X[-1]

    fact = SpectralFactorization(X, phases)
    residual = max_abs(fact.reconstruct() - S)
    if residual > residual_tol:
        raise NumericalError(
            f"simultaneous diagonalization residual {residual:.3e} too large", residual)
    return fact


def extend_kramers(firsts: list, partners: list, candidates, pairs: int,
                   min_norm: float = 0.5) -> int:
    """Symplectic Gram-Schmidt: grow ``firsts``/``partners`` by up to ``pairs`` pairs.

    Each accepted candidate ``v`` (orthogonalized and normalized) is stored with
    its partner ``-J conj(v)``, so the columns ``firsts + partners`` form a
    quaternion-real orthonormal set. Candidates whose residual falls below
    ``min_norm`` times their length are skipped. Returns the number of pairs added.
    """
    added = 0
    for b in candidates:
        if added == pairs:
            break
        v = np.array(b, dtype=complex)
        J = symplectic_form(v.size // 2)
        for _ in range(2):
            for u in firsts + partners:
                v -= (u.conj() @ v) * u
        nv = np.linalg.norm(v)
        if nv < min_norm * np.linalg.norm(b):
            continue
        v /= nv
        firsts.append(v)
        partners.append(-J @ v.conj())
        added += 1
    return added


def factor_self_dual_unitary(S, tol: float = 1e-8, pair_tol: float = 1e-8,
                             residual_tol: float = 1e-9) -> SelfDualFactorization:
    """Factor a self-dual unitary as ``X^R @ diag(w, w) @ X``.

    Each eigenspace of ``S`` is invariant under the antiunitary
    ``T v = J conj(v)`` with ``T^2 = -1``, so it carries Kramers pairs
    ``(v, -T v)``. A symplectic Gram-Schmidt inside every eigenspace yields the
    quaternion-real unitary ``V = X^dagger``.

    ``S`` may be passed as an array or a QuaternionBlockMatrix.
    """
    if isinstance(S, QuaternionBlockMatrix):
        S = S.realization
    S = as_square(S)
    if S.shape[0] % 2:
        raise DimensionError("self-dual matrices have even size")
    if self_duality_residual(S) > tol or unitarity_residual(S) > tol:
        raise DomainError("matrix is not self-dual unitary")
    N = S.shape[0] // 2
    T, Z = scipy.linalg.schur(S, output="complex")
    raw = np.angle(np.diag(T))
    # Rotate the branch cut into the widest spectral gap so no cluster straddles it.
    srt = np.sort(raw)
    gaps = np.diff(np.concatenate([srt, [srt[0] + 2 * np.pi]]))
    cut = srt[np.argmax(gaps)] + gaps.max() / 2
    shifted = np.mod(raw - cut, 2 * np.pi)
    order = np.argsort(shifted)
    shifted, Z = shifted[order], Z[:, order]

    firsts, partners = [], []
    for idx in _clusters(shifted, pair_tol):
        if idx.size % 2:
            raise NumericalError(
                f"unpaired eigenphase near {float(shifted[idx[0]] + cut):.6f}",
                float(np.min(np.abs(np.diff(shifted)))) if shifted.size > 1 else None)
        if extend_kramers(firsts, partners, Z[:, idx].T, idx.size // 2) != idx.size // 2:
            raise NumericalError("eigenspace is not closed under time reversal")

    V = np.column_stack(firsts + partners)
    phases = np.array([
        np.angle((v.conj() @ S @ v + w.conj() @ S @ w) / 2) for v, w in zip(firsts, partners)
    ])
    phases = canonical_phase(phases)
    order = np.argsort(phases, kind="stable")
    V = V[:, np.concatenate([order, order + N])]
    fact = SelfDualFactorization(dagger(V), phases[order])
    residual = max_abs(fact.reconstruct() - S)
    if residual > residual_tol:
        raise NumericalError(f"self-dual factorization residual {residual:.3e} too large",
                             residual)
    return fact


def unitary_eigenphases(S) -> np.ndarray:
    """Eigenphases of a normal matrix via the complex Schur form, in (-pi, pi]."""
    T, _ = scipy.linalg.schur(as_square(S), output="complex")
    return np.sort(canonical_phase(np.angle(np.diag(T))))


# --------------------------------------------------------------------------
# matrix functions
# --------------------------------------------------------------------------

def sqrt_symmetric_unitary(S) -> np.ndarray:
    """Principal square root of a symmetric unitary; stays symmetric."""
    return _halve(factor_symmetric_unitary(S))


def _halve(fact) -> np.ndarray:
    return fact.reconstruct(fact.phases / 2)


def sqrt_self_dual_unitary(S) -> np.ndarray:
    """Principal square root of a self-dual unitary; stays self-dual."""
    return _halve(factor_self_dual_unitary(S))


def sqrt_unitary(S) -> np.ndarray:
    """Principal square root of a generic unitary via its Schur vectors."""
    S = as_square(S)
    if unitarity_residual(S) > 1e-8:
        raise DomainError("matrix is not unitary")
    T, Z = scipy.linalg.schur(S, output="complex")
    phases = canonical_phase(np.angle(np.diag(T)))
    return (Z * np.exp(0.5j * phases)) @ dagger(Z)


def exp_i_generator(A, t: float = 1.0, kind: str | None = None,
                    tol: float = 1e-10) -> np.ndarray:
    """Return ``expm(1j * t * A)`` for a Hermitian generator ``A``.

    ``kind`` optionally tightens the structure check: ``"sym"`` requires a
    real symmetric ``A``, ``"sympl"`` a self-dual Hermitian ``A``.
    """
    A = as_square(A)
    if max_abs(A - dagger(A)) > tol:
        raise DomainError("generator is not Hermitian")
    if kind == "sym" and max_abs(A.imag) > tol:
        raise DomainError("generator is not real symmetric")
    if kind == "sympl" and self_duality_residual(A) > tol:
        raise DomainError("generator is not self-dual")
    if t == 0:
        return np.eye(A.shape[0], dtype=complex)
    if kind == "sym" or not np.any(A.imag):
        w, V = np.linalg.eigh(A.real)
        return (V * np.exp(1j * t * w)) @ V.T
    w, V = np.linalg.eigh((A + dagger(A)) / 2)
    return (V * np.exp(1j * t * w)) @ dagger(V)
