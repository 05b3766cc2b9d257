"""Dense algebra for operators on two spin-1/2 ground-state qubits.

Matrices are 4x4 complex numpy arrays in the product basis ordered

    |+1/2,+1/2>, |+1/2,-1/2>, |-1/2,+1/2>, |-1/2,-1/2>

with atom 1 the left tensor factor. Every function also accepts stacks of
shape ``(..., 4, 4)`` and broadcasts over the leading axes.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import NotHermitianError

HERMITIAN_TOL = 1e-10
EIGEN_TOL = 1e-10

BASIS_LABELS = ("++", "+-", "-+", "--")


class Atom(enum.Enum):
    ATOM1 = 1
    ATOM2 = 2


class Axis(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2


_I2 = np.eye(2, dtype=complex)
_PAULI_2x2 = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

IDENTITY = np.eye(4, dtype=complex)
# SIGMA1[i] = sigma_i (x) 1, SIGMA2[i] = 1 (x) sigma_i
SIGMA1 = np.stack([np.kron(s, _I2) for s in _PAULI_2x2])
SIGMA2 = np.stack([np.kron(_I2, s) for s in _PAULI_2x2])
for _arr in (IDENTITY, SIGMA1, SIGMA2):
    _arr.setflags(write=False)

# two-qubit swap |m1 m2> -> |m2 m1>
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
SWAP.setflags(write=False)

LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0
LEVI_CIVITA.setflags(write=False)


def pauli(atom: Atom, axis: Axis) -> np.ndarray:
    """Single-atom Pauli component embedded in the two-qubit space."""
    table = SIGMA1 if atom is Atom.ATOM1 else SIGMA2
    return table[Axis(axis)].copy()


def pauli_dot(vector, atom: Atom) -> np.ndarray:
    """``vector . sigma_atom`` for a (possibly complex) 3-vector or stack of them."""
    table = SIGMA1 if atom is Atom.ATOM1 else SIGMA2
    return np.einsum("...i,ijk->...jk", np.asarray(vector), table)


def multiply(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return np.matmul(lhs, rhs)


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def trace(m: np.ndarray):
    return np.trace(m, axis1=-2, axis2=-1)


def sandwich(t: np.ndarray, rho: np.ndarray, t2: np.ndarray | None = None) -> np.ndarray:
    """``t @ rho @ t2^dagger``, with ``t2`` defaulting to ``t``."""
    return t @ rho @ adjoint(t if t2 is None else t2)


def hermiticity_residual(m: np.ndarray):
    return np.max(np.abs(m - adjoint(m)), axis=(-2, -1))


def _check_hermitian(m: np.ndarray, tol: float) -> None:
    residual = np.max(hermiticity_residual(m))
    if residual > tol:
        raise NotHermitianError(f"max |M - M^dagger| = {residual:.3e} exceeds {tol:.1e}")


def hermitian_eigenvalues(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, in descending order.

    Raises NotHermitianError when any entry of ``M - M^dagger`` exceeds
    ``tol`` in magnitude. Only the Hermitian part is handed to LAPACK.
    """
    m = np.asarray(m, dtype=complex)
    _check_hermitian(m, tol)
    herm = 0.5 * (m + adjoint(m))
    return np.linalg.eigvalsh(herm)[..., ::-1]


def hermitian_eigh(m: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs in descending eigenvalue order; columns of the second array are eigenvectors."""
    m = np.asarray(m, dtype=complex)
    _check_hermitian(m, tol)
    vals, vecs = np.linalg.eigh(0.5 * (m + adjoint(m)))
    return vals[..., ::-1], vecs[..., ::-1]


def trace_norm(m: np.ndarray, tol: float = HERMITIAN_TOL):
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return np.sum(np.abs(hermitian_eigenvalues(m, tol)), axis=-1)


def swap_conjugate(m: np.ndarray) -> np.ndarray:
    """Relabel atoms 1 <-> 2, i.e. ``S M S``."""
    return SWAP @ m @ SWAP
