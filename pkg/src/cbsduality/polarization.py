"""Transverse photon polarizations, Stokes components and CBS detection channels.

Conventions (fixed lab frame, photons along +z in and -z out):

* Jones vectors list the x and y components of the field.
* ``s1 = |e_x|^2 - |e_y|^2``, ``s2 = 2 Re(e_x* e_y)``, ``s3 = 2 Im(e_x* e_y)``.
* Left-circular along +z is ``(x + i y)/sqrt(2)``. Helicity of the returning
  photon is taken relative to its own direction (-z), so the same helicity
  reads ``(x - i y)/sqrt(2)`` in the lab frame.
* Outgoing polarizations are stored as the analyzed ket; the complex
  conjugate is taken where the path operator is assembled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAxisError, NotNormalizedError

NORM_TOL = 1e-9
AXIS_TOL = 1e-9

_SQRT_HALF = np.sqrt(0.5)


class Propagation(enum.Enum):
    PLUS_Z = "+z"
    MINUS_Z = "-z"


@dataclass(frozen=True, eq=False)
class Polarization:
    """Pure transverse polarization.

    ``jones`` has shape ``(2,)`` or, for vectorized work, ``(..., 2)``.
    """

    jones: np.ndarray
    propagation: Propagation = Propagation.PLUS_Z

    def __post_init__(self):
        jones = np.array(self.jones, dtype=complex)
        if jones.shape[-1:] != (2,):
            raise ValueError(f"Jones vector must have trailing length 2, got shape {jones.shape}")
        norm = np.sum(np.abs(jones) ** 2, axis=-1)
        if np.any(np.abs(norm - 1.0) > NORM_TOL):
            raise NotNormalizedError(f"|jones|^2 = {norm} is not 1")
        jones.setflags(write=False)
        object.__setattr__(self, "jones", jones)

    @classmethod
    def normalized(cls, jones, propagation: Propagation = Propagation.PLUS_Z) -> "Polarization":
        jones = np.asarray(jones, dtype=complex)
        norm = np.sqrt(np.sum(np.abs(jones) ** 2, axis=-1, keepdims=True))
        if np.any(norm == 0):
            raise NotNormalizedError("zero Jones vector")
        return cls(jones / norm, propagation)

    @property
    def vector(self) -> np.ndarray:
        """The field as a complex 3-vector with vanishing z component."""
        out = np.zeros(self.jones.shape[:-1] + (3,), dtype=complex)
        out[..., :2] = self.jones
        return out

    def with_phase(self, phi) -> "Polarization":
        return Polarization(np.exp(1j * np.asarray(phi))[..., None] * self.jones, self.propagation)

    def __repr__(self):
        return f"Polarization({np.array2string(self.jones, precision=6)}, {self.propagation.value})"


@dataclass(frozen=True)
class StokesVector:
    s1: float
    s2: float
    s3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3])


def stokes(pol: Polarization) -> StokesVector:
    j = pol.jones
    norm = np.sum(np.abs(j) ** 2, axis=-1)
    if np.any(np.abs(norm - 1.0) > NORM_TOL):
        raise NotNormalizedError(f"|jones|^2 = {norm} is not 1")
    ex, ey = j[..., 0], j[..., 1]
    cross = np.conj(ex) * ey
    return StokesVector(np.abs(ex) ** 2 - np.abs(ey) ** 2, 2.0 * cross.real, 2.0 * cross.imag)


def u_component(pol: Polarization, n) -> float:
    """Linear-polarization degree along the transverse projection of ``n``.

    Returns ``|e . a|^2 - |e . b|^2`` where ``a`` is the unit projection of
    ``n`` onto the xy plane and ``b = z x a``. For ``n`` along x this equals
    the Stokes ``s1``.
    """
    n = np.asarray(n, dtype=float)
    transverse = np.array([n[0], n[1]])
    length = np.hypot(*transverse)
    if length <= AXIS_TOL * max(np.linalg.norm(n), 1.0):
        raise DegenerateAxisError(f"n = {n} is parallel to the z axis")
    a = transverse / length
    b = np.array([-a[1], a[0]])
    j = pol.jones
    return np.abs(j @ a) ** 2 - np.abs(j @ b) ** 2


X_HAT = np.array([1.0, 0.0], dtype=complex)
Y_HAT = np.array([0.0, 1.0], dtype=complex)
LEFT_PLUS_Z = np.array([_SQRT_HALF, 1j * _SQRT_HALF])
RIGHT_PLUS_Z = np.array([_SQRT_HALF, -1j * _SQRT_HALF])


class Channel(enum.Enum):
    LIN_PARALLEL = "linpar"
    LIN_PERPENDICULAR = "linperp"
    HELICITY_PRESERVING = "hpres"
    HELICITY_FLIPPING = "hflip"


_CHANNEL_JONES = {
    Channel.LIN_PARALLEL: (X_HAT, X_HAT),
    Channel.LIN_PERPENDICULAR: (X_HAT, Y_HAT),
    # same helicity relative to -z is the opposite lab-frame rotation sense
    Channel.HELICITY_PRESERVING: (LEFT_PLUS_Z, RIGHT_PLUS_Z),
    Channel.HELICITY_FLIPPING: (LEFT_PLUS_Z, LEFT_PLUS_Z),
}


def incoming(jones) -> Polarization:
    return Polarization(jones, Propagation.PLUS_Z)


def outgoing(jones) -> Polarization:
    return Polarization(jones, Propagation.MINUS_Z)


def resolve_channel(channel: Channel | str) -> tuple[Polarization, Polarization]:
    channel = Channel(channel)
    e_in, e_out = _CHANNEL_JONES[channel]
    return incoming(e_in), outgoing(e_out)


def parse_jones(text: str) -> np.ndarray:
    """Parse ``"re_x,im_x,re_y,im_y"`` into a normalized Jones vector."""
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected four comma-separated reals, got {text!r}")
    jones = np.array([parts[0] + 1j * parts[1], parts[2] + 1j * parts[3]])
    norm = np.linalg.norm(jones)
    if norm == 0:
        raise NotNormalizedError("zero Jones vector")
    return jones / norm


def perpendicular_pair(u, u_prime) -> tuple[Polarization, Polarization]:
    """Polarizations realizing prescribed ``u``, ``u'`` for n along x.

    Linear input ``sqrt((1+u)/2) x + sqrt((1-u)/2) y`` and elliptical output
    ``sqrt((1+u')/2) x + i sqrt((1-u')/2) y``. Array arguments broadcast.
    """
    u, u_prime = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(u_prime, dtype=float))
    e_in = np.stack([np.sqrt((1 + u) / 2), np.sqrt((1 - u) / 2)], axis=-1).astype(complex)
    e_out = np.stack([np.sqrt((1 + u_prime) / 2), 1j * np.sqrt((1 - u_prime) / 2)], axis=-1)
    return incoming(e_in), outgoing(e_out)
