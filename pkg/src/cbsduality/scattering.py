"""Initial two-atom states, double-scattering path operators and path weights.

The effective single-scattering operator between ground states of a
1/2 <-> 1/2 transition is the dyad ``(sigma sigma)``. Path A scatters off
atom 1 first and atom 2 second:

    T_A = (e_out^* . sigma_2) [sigma_2 . (1 - n n) . sigma_1] (sigma_1 . e_in)

and T_B is the same with the atom labels exchanged. Overall constants and
the common propagation phase of both paths are dropped; only ratios of the
quantities built here carry meaning.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qop
from .errors import (
    NegativeWeightError,
    OutOfRangeError,
    WrongPropagationError,
    ZeroWeightError,
)
from .polarization import Polarization, Propagation

P_MIN = -1.0 / 3.0
P_MAX = 1.0
UNIT_TOL = 1e-12
# relative to the scale of the operators involved
WEIGHT_TOL = 1e-12
NEGATIVE_WEIGHT_TOL = 1e-10
IMAG_TOL = 1e-12

_SPIN_SPIN = np.einsum("ijk,ikl->jl", qop.SIGMA1, qop.SIGMA2)


class Path(enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True, eq=False)
class InitialState:
    """``rho = (1 - p sigma_1 . sigma_2) / 4`` with ``-1/3 <= p <= 1``."""

    p: float
    rho: np.ndarray

    @property
    def is_swap_symmetric(self) -> bool:
        return bool(np.max(np.abs(qop.swap_conjugate(self.rho) - self.rho)) <= 1e-12)


def build_initial_state(p: float) -> InitialState:
    p = float(p)
    if not P_MIN - 1e-15 <= p <= P_MAX:
        raise OutOfRangeError(f"p = {p} outside [-1/3, 1]; the state would not be positive")
    rho = 0.25 * (qop.IDENTITY - p * _SPIN_SPIN)
    rho.setflags(write=False)
    return InitialState(p, rho)


@dataclass(frozen=True, eq=False)
class Geometry:
    n: np.ndarray

    def __post_init__(self):
        n = np.array(self.n, dtype=float)
        if n.shape[-1:] != (3,):
            raise ValueError(f"n must have trailing length 3, got shape {n.shape}")
        if np.any(np.abs(np.linalg.norm(n, axis=-1) - 1.0) > UNIT_TOL):
            raise ValueError(f"n = {n} is not a unit vector")
        n.setflags(write=False)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_vector(cls, v) -> "Geometry":
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v, axis=-1, keepdims=True))


PERPENDICULAR = Geometry(np.array([1.0, 0.0, 0.0]))


@dataclass(frozen=True, eq=False)
class PathOperators:
    t_a: np.ndarray
    t_b: np.ndarray


def _middle_factor(n: np.ndarray, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """``sigma_second . (1 - n n) . sigma_first`` for unit vectors ``n`` of shape (..., 3)."""
    dyad = np.einsum("ijk,ikl->jl", second, first)
    n_second = np.einsum("...i,ijk->...jk", n, second)
    n_first = np.einsum("...i,ijk->...jk", n, first)
    return dyad - n_second @ n_first


def _check_propagation(eps_in: Polarization, eps_out: Polarization) -> None:
    if eps_in.propagation is not Propagation.PLUS_Z:
        raise WrongPropagationError("incoming polarization must propagate along +z")
    if eps_out.propagation is not Propagation.MINUS_Z:
        raise WrongPropagationError("outgoing polarization must propagate along -z")


def build_path_operator(
    path: Path, eps_in: Polarization, eps_out: Polarization, geom: Geometry
) -> np.ndarray:
    """Double-scattering operator on the two ground-state qubits.

    Leading axes of the Jones vectors and of ``geom.n`` broadcast, so a
    whole grid of configurations can be assembled in one call.
    """
    _check_propagation(eps_in, eps_out)
    first, second = (qop.SIGMA1, qop.SIGMA2) if Path(path) is Path.A else (qop.SIGMA2, qop.SIGMA1)
    absorb = np.einsum("...i,ijk->...jk", eps_in.vector, first)
    emit = np.einsum("...i,ijk->...jk", np.conj(eps_out.vector), second)
    return emit @ _middle_factor(geom.n, first, second) @ absorb


def build_path_operator_cross(
    path: Path, eps_in: Polarization, eps_out: Polarization, geom: Geometry
) -> np.ndarray:
    """Same operator assembled from ``-(sigma_2 x n) . (n x sigma_1)``.

    Kept as an independent construction for cross-checking.
    """
    _check_propagation(eps_in, eps_out)
    first, second = (qop.SIGMA1, qop.SIGMA2) if Path(path) is Path.A else (qop.SIGMA2, qop.SIGMA1)
    n = geom.n
    eps = qop.LEVI_CIVITA
    # (sigma_second x n)_i = eps_ijk sigma_second_j n_k
    second_cross_n = np.einsum("ijk,...k,jab->...iab", eps, n, second)
    # (n x sigma_first)_i = eps_ijk n_j sigma_first_k
    n_cross_first = np.einsum("ijk,...j,kab->...iab", eps, n, first)
    middle = -np.einsum("...iab,...ibc->...ac", second_cross_n, n_cross_first)
    absorb = np.einsum("...i,ijk->...jk", eps_in.vector, first)
    emit = np.einsum("...i,ijk->...jk", np.conj(eps_out.vector), second)
    return emit @ middle @ absorb


def build_path_operators(eps_in: Polarization, eps_out: Polarization, geom: Geometry) -> PathOperators:
    return PathOperators(
        build_path_operator(Path.A, eps_in, eps_out, geom),
        build_path_operator(Path.B, eps_in, eps_out, geom),
    )


def _as_rho(rho) -> np.ndarray:
    return rho.rho if isinstance(rho, InitialState) else np.asarray(rho)


def path_weight(t: np.ndarray, rho) -> np.ndarray | float:
    """``tr(T rho T^dagger)``; real and nonnegative."""
    w = qop.trace(qop.sandwich(t, _as_rho(rho)))
    scale = np.maximum(np.sum(np.abs(t) ** 2, axis=(-2, -1)), 1.0)
    if np.any(np.abs(w.imag) > IMAG_TOL * scale):
        raise NegativeWeightError(f"weight has imaginary part {np.max(np.abs(w.imag)):.3e}")
    if np.any(w.real < -NEGATIVE_WEIGHT_TOL * scale):
        raise NegativeWeightError(f"weight {np.min(w.real):.3e} is negative")
    w = np.maximum(w.real, 0.0)
    return float(w) if np.ndim(w) == 0 else w


def operator_scale(*ts: np.ndarray):
    """Natural size of the weights produced by ``ts``: the sum of squared Frobenius norms."""
    return sum(np.sum(np.abs(t) ** 2, axis=(-2, -1)) for t in ts)


def is_dark(weight, *ts: np.ndarray):
    """True where ``weight`` is negligible against the operators that produced it."""
    return np.asarray(weight) <= WEIGHT_TOL * operator_scale(*ts)


def final_state(t: np.ndarray, rho) -> np.ndarray:
    """Conditional two-atom state ``T rho T^dagger / w`` after the path."""
    w = path_weight(t, rho)
    if np.any(is_dark(w, t)):
        raise ZeroWeightError("dark channel: no double-scattering events to condition on")
    out = qop.sandwich(t, _as_rho(rho))
    return out / np.asarray(w)[..., None, None]
