"""Dense complex-matrix kernels: eigenpairs, Hermitian matrix functions,
vectorization, partial trace and trace norm.

Everything here is a pure function of its inputs. Matrices are plain
``numpy`` arrays of complex dtype; no wrapper classes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguity, DegeneratePairing, NotPositive, ShapeMismatch

# Eigenvalue gap below which left/right pairing is refused.
PAIRING_GAP = 1e-9
# Negative eigenvalue magnitude tolerated (and clamped) in PSD inputs.
PSD_CLAMP = 1e-12
PSD_FAIL = 1e-8


@dataclass(frozen=True)
class EigenSystem:
    """Eigendecomposition A v_i = w_i v_i, optionally with left eigenvectors.

    ``right[:, i]`` is the right eigenvector for ``values[i]``. When present,
    ``left[:, i]`` satisfies A† l_i = conj(w_i) l_i and the sets are
    biorthonormal: <l_i|r_j> = delta_ij.
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray | None = None


def _square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def eig(a: np.ndarray, want_left: bool = False) -> EigenSystem:
    """Eigendecomposition with optional biorthonormal left eigenvectors.

    Left eigenvectors are computed as right eigenvectors of A†, paired to the
    right set by conjugate eigenvalue (greedy nearest match) and rescaled so
    that <l_i|r_j> = delta_ij. Raises DegeneratePairing when two eigenvalues
    of A are closer than 1e-9, since the pairing is then ambiguous.
    """
    a = _square(a)
    values, right = np.linalg.eig(a)
    if not want_left:
        return EigenSystem(values, right)

    n = len(values)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) < PAIRING_GAP:
                raise DegeneratePairing(
                    f"eigenvalues {values[i]} and {values[j]} within {PAIRING_GAP}"
                )
    lvals, lvecs = np.linalg.eig(a.conj().T)
    left = np.empty_like(right)
    taken: set[int] = set()
    for i in range(n):
        dists = [
            (abs(np.conj(lvals[j]) - values[i]), j) for j in range(n) if j not in taken
        ]
        _, j = min(dists)
        taken.add(j)
        overlap = np.vdot(lvecs[:, j], right[:, i])
        if abs(overlap) < PAIRING_GAP:
            raise DegeneratePairing(
                f"left/right overlap {abs(overlap):.2e} too small at eigenvalue {values[i]}"
            )
        left[:, i] = lvecs[:, j] / np.conj(overlap)
    return EigenSystem(values, right, left)


def herm_sqrt(a: np.ndarray) -> np.ndarray:
    """Unique positive square root of a Hermitian PSD matrix.

    Eigenvalues in [-1e-8, 0) are clamped to zero (floating-point dust left
    by similarity transforms); anything below -1e-8 raises NotPositive.
    """
    a = _square(a)
    if np.abs(a - a.conj().T).max() > 1e-10:
        raise ValueError("input is not Hermitian to 1e-10")
    w, v = np.linalg.eigh(a)
    if w.min() < -PSD_FAIL:
        raise NotPositive(f"minimum eigenvalue {w.min():.3e} below -{PSD_FAIL}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def unitary_log(a: np.ndarray) -> np.ndarray:
    """Generator H with exp(-i H) = a, eigenvalue phases on the principal branch.

    For a diagonalizable ``a`` with spectrum on (or near) the unit circle this
    is the effective Hamiltonian of the one-step evolution ``a``. Phases are
    taken in (-pi, pi]; a phase within 1e-9 of the cut at +-pi raises
    BranchAmbiguity rather than silently choosing a sheet.
    """
    a = _square(a)
    values, right = np.linalg.eig(a)
    if np.any(np.abs(values) == 0.0):
        raise ValueError("matrix is singular; no logarithm")
    phases = np.angle(values)
    if np.any(np.pi - np.abs(phases) < 1e-9):
        raise BranchAmbiguity("eigenvalue phase within 1e-9 of the branch cut at +-pi")
    h_values = 1j * np.log(values)
    return (right * h_values) @ np.linalg.inv(right)


def vec(m: np.ndarray) -> np.ndarray:
    """Row-major vectorization: vec([[a,b],[c,d]]) = (a, b, c, d)."""
    m = _square(m)
    return m.reshape(-1)


def devec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`; length must be a perfect square."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ShapeMismatch(f"length {v.size} is not a perfect square")
    return v.reshape(n, n)


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Partial trace of an operator on H_A (x) H_B.

    ``keep='A'`` traces out B and returns a dA x dA matrix; ``keep='B'``
    traces out A. Preserves trace and Hermiticity.
    """
    da, db = dims
    rho = _square(rho)
    if rho.shape[0] != da * db:
        raise ShapeMismatch(f"matrix of size {rho.shape[0]} != {da}*{db}")
    r = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijik->jk", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def trace_norm(a: np.ndarray) -> float:
    """Schatten 1-norm: sum of singular values."""
    a = _square(a)
    return float(np.linalg.svd(a, compute_uv=False).sum())
