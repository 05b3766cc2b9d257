"""Path distinguishability, fringe visibility and their consistency checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qop
from .errors import (
    NotSymmetricStateError,
    OutOfRangeError,
    ResidualTooLargeError,
    ZeroWeightError,
)
from .scattering import P_MAX, P_MIN, InitialState, _as_rho, is_dark, path_weight

RESIDUAL_TOL = 1e-10
SYMMETRY_TOL = 1e-12

# Orthogonal operator bases for antisymmetric two-qubit operators:
# tr[(s1_i - s2_i)(s1_j - s2_j)] = tr[(s1 x s2)_i (s1 x s2)_j] = 8 delta_ij
DIFFERENCE_BASIS = qop.SIGMA1 - qop.SIGMA2
CROSS_BASIS = np.einsum("ijk,jab,kbc->iac", qop.LEVI_CIVITA, qop.SIGMA1, qop.SIGMA2)


@dataclass(frozen=True, eq=False)
class DualityResult:
    """Outcome for one configuration, or a stack of them when fields are arrays.

    Dark entries carry NaN for ``d``, ``v``, ``a`` and ``b``.
    """

    w_a: np.ndarray | float
    w_b: np.ndarray | float
    d: np.ndarray | float
    v: np.ndarray | float
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    dark: np.ndarray | bool = False

    @property
    def w_sum(self):
        return self.w_a + self.w_b


def _weights(t_a, t_b, rho):
    w_a = np.asarray(path_weight(t_a, rho))
    w_b = np.asarray(path_weight(t_b, rho))
    dark = is_dark(w_a + w_b, t_a, t_b)
    return w_a, w_b, dark


def _require_bright(dark) -> None:
    if np.any(dark):
        raise ZeroWeightError("dark channel: w_A + w_B vanishes")


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def difference_operator(t_a, t_b, rho) -> np.ndarray:
    """Unnormalized ``T_A rho T_A^dagger - T_B rho T_B^dagger``."""
    rho = _as_rho(rho)
    return qop.sandwich(t_a, rho) - qop.sandwich(t_b, rho)


def interference_term(t_a, t_b, rho):
    """``tr(T_A rho T_B^dagger)``, the cross term between the two path amplitudes."""
    return qop.trace(qop.sandwich(t_a, _as_rho(rho), t_b))


def distinguishability(t_a, t_b, rho):
    w_a, w_b, dark = _weights(t_a, t_b, rho)
    _require_bright(dark)
    return _scalar(qop.trace_norm(difference_operator(t_a, t_b, rho)) / (w_a + w_b))


def visibility(t_a, t_b, rho):
    w_a, w_b, dark = _weights(t_a, t_b, rho)
    _require_bright(dark)
    return _scalar(2.0 * np.abs(interference_term(t_a, t_b, rho)) / (w_a + w_b))


def _project(delta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = np.einsum("...ab,iba->...i", delta, DIFFERENCE_BASIS).real / 8.0
    b = np.einsum("...ab,iba->...i", delta, CROSS_BASIS).real / 8.0
    rebuilt = np.einsum("...i,iab->...ab", a, DIFFERENCE_BASIS) + np.einsum(
        "...i,iab->...ab", b, CROSS_BASIS
    )
    residual = np.max(np.abs(delta - rebuilt), axis=(-2, -1))
    return a, b, residual


def _is_symmetric(rho) -> bool:
    if isinstance(rho, InitialState):
        return rho.is_swap_symmetric
    r = np.asarray(rho)
    return bool(np.max(np.abs(qop.swap_conjugate(r) - r)) <= SYMMETRY_TOL)


def decompose_difference(t_a, t_b, rho):
    """Expand the normalized difference operator as ``a.(s1 - s2) + b.(s1 x s2)``.

    Returns ``(a, b, residual)``; the residual is the largest entry of what
    the two vectors fail to reproduce.
    """
    if not _is_symmetric(rho):
        raise NotSymmetricStateError("initial state is not invariant under atom exchange")
    w_a, w_b, dark = _weights(t_a, t_b, rho)
    _require_bright(dark)
    delta = difference_operator(t_a, t_b, rho) / (w_a + w_b)[..., None, None]
    a, b, residual = _project(delta)
    if np.any(residual > RESIDUAL_TOL):
        raise ResidualTooLargeError(f"decomposition residual {np.max(residual):.3e}")
    return a, b, _scalar(residual)


def analyze(t_a, t_b, rho, decompose: bool = True) -> DualityResult:
    """Weights, D, V and (for symmetric states) the a, b vectors, without raising on dark entries."""
    w_a, w_b, dark = _weights(t_a, t_b, rho)
    w_sum = np.where(dark, np.nan, w_a + w_b)
    delta = difference_operator(t_a, t_b, rho)
    delta = np.where(dark[..., None, None], 0.0, delta / np.where(dark, 1.0, w_sum)[..., None, None])
    d = np.where(dark, np.nan, qop.trace_norm(delta))
    v = np.where(dark, np.nan, 2.0 * np.abs(interference_term(t_a, t_b, rho)) / w_sum)
    a = b = None
    if decompose and _is_symmetric(rho):
        a, b, residual = _project(delta)
        if np.any(residual > RESIDUAL_TOL):
            raise ResidualTooLargeError(f"decomposition residual {np.max(residual):.3e}")
        a = np.where(dark[..., None], np.nan, a)
        b = np.where(dark[..., None], np.nan, b)
    return DualityResult(_scalar(w_a), _scalar(w_b), _scalar(d), _scalar(v), a, b, bool(dark) if np.ndim(dark) == 0 else dark)


def _check_range(name, value, lo, hi):
    value = np.asarray(value, dtype=float)
    if np.any(value < lo - 1e-15) or np.any(value > hi + 1e-15):
        raise OutOfRangeError(f"{name} = {value} outside [{lo}, {hi}]")


def closed_form_perpendicular(p, u, u_prime):
    """Exact D and V for n perpendicular to the backscattering axis.

    ``u`` and ``u_prime`` are the Stokes components along n of the incoming
    and outgoing polarizations. At ``p = 1, u = -1`` the configuration is
    dark and ZeroWeightError is raised.
    """
    _check_range("p", p, P_MIN, P_MAX)
    _check_range("u", u, -1.0, 1.0)
    _check_range("u'", u_prime, -1.0, 1.0)
    p, u, u_prime = (np.asarray(x, dtype=float) for x in (p, u, u_prime))
    denom = 2.0 * (1.0 + p * u)
    if np.any(denom <= 0.0):
        raise ZeroWeightError("dark channel: 1 + p u = 0")
    d = (1.0 + p + 2.0 * p * u) / denom * np.sqrt(np.clip(1.0 - u_prime**2, 0.0, None))
    v = np.abs((1.0 + p) * (1.0 + u * u_prime) - 2.0 * p * (1.0 - u_prime)) / denom
    return _scalar(d), _scalar(v)


def duality_check(d, v):
    """Slack ``1 - D^2 - V^2`` of the duality relation; negative means violated."""
    return _scalar(1.0 - np.asarray(d) ** 2 - np.asarray(v) ** 2)


def duality_bound(p, v):
    """Upper bound on D for given visibility in the perpendicular geometry."""
    _check_range("p", p, P_MIN, P_MAX)
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    offset = np.where(p >= 0.0, 2.0 * p / (1.0 + p), 0.0)
    return _scalar(np.sqrt(np.clip((1.0 - v) * (offset + v), 0.0, None)))


def bound_check(p, d, v):
    """Slack of the D-V bound: ``bound(p, V) - D``."""
    return _scalar(duality_bound(p, v) - np.asarray(d))


def guessing_odds(d):
    """Probability of naming the path correctly with the optimal measurement."""
    return _scalar((1.0 + np.asarray(d)) / 2.0)
