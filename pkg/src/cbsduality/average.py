"""Angular averages over the inter-atomic direction.

Two weightings are available:

``"event"`` (default)
    Every direction contributes in proportion to its double-scattering
    probability ``w_A + w_B``. The averaged difference operator is
    ``sum_k q_k Delta_k / sum_k q_k W_k`` with unnormalized ``Delta_k`` and
    the averaged visibility is ``2 sum_k q_k |c_k| / sum_k q_k W_k``. This is
    the average over detected photons.
``"direction"``
    Each direction is normalized on its own before the uniform average.

In both cases the averaged distinguishability is the trace norm of the
averaged difference operator, not the mean of pointwise values.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import qop
from .duality import difference_operator, interference_term
from .errors import AllDarkError, BadResolutionError, OutOfRangeError
from .polarization import Polarization
from .scattering import Geometry, build_initial_state, build_path_operators, is_dark, path_weight

DEFAULT_RESOLUTION = 32
WEIGHTINGS = ("event", "direction")


class Scheme(enum.Enum):
    PRODUCT_GRID = "grid"
    MONTE_CARLO = "mc"


@dataclass(frozen=True, eq=False)
class Quadrature:
    """Directions on the unit sphere with normalized weights."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if not np.isclose(self.weights.sum(), 1.0, rtol=0, atol=1e-12):
            raise ValueError(f"weights sum to {self.weights.sum()}, not 1")

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> float:
        """Weighted sum of one scalar per node, in node order."""
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class AveragedResult:
    d_avg: float
    v_avg: float
    n_nodes: int
    skipped_dark: int
    weighting: str = "event"


def _unit(theta_cos, phi):
    sin = np.sqrt(np.clip(1.0 - theta_cos**2, 0.0, None))
    return np.stack([sin * np.cos(phi), sin * np.sin(phi), theta_cos], axis=-1)


def build_quadrature(
    scheme: Scheme | str = Scheme.PRODUCT_GRID,
    resolution: int = DEFAULT_RESOLUTION,
    *,
    hemisphere: bool = False,
    seed: int | None = 0,
) -> Quadrature:
    """Quadrature over directions, normalized to the mean over the sphere.

    ``PRODUCT_GRID`` uses ``resolution`` Gauss-Legendre nodes in cos(theta)
    times ``2 * resolution`` equally spaced azimuths. The grid is symmetric
    under ``n -> -n``; with ``hemisphere`` only its nodes with cos(theta) >= 0
    are kept (off-equator weights doubled), which gives the same sum for
    integrands even under ``n -> -n``. ``MONTE_CARLO`` draws ``resolution`` uniform
    directions from ``numpy.random.default_rng(seed)``.
    """
    scheme = Scheme(scheme)
    if int(resolution) != resolution or resolution < 2:
        raise BadResolutionError(f"resolution must be an integer >= 2, got {resolution}")
    resolution = int(resolution)

    if scheme is Scheme.MONTE_CARLO:
        rng = np.random.default_rng(seed)
        v = rng.standard_normal((resolution, 3))
        nodes = v / np.linalg.norm(v, axis=1, keepdims=True)
        return Quadrature(nodes, np.full(resolution, 1.0 / resolution))

    x, w = np.polynomial.legendre.leggauss(resolution)
    if hemisphere:
        keep = x >= 0.0
        w = np.where(x > 0.0, 2.0 * w, w)[keep]
        x = x[keep]
    w = w / w.sum()
    n_phi = 2 * resolution
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    cos_grid, phi_grid = np.meshgrid(x, phi, indexing="ij")
    weights = np.repeat(w, n_phi) / n_phi
    return Quadrature(_unit(cos_grid.ravel(), phi_grid.ravel()), weights)


@dataclass(frozen=True, eq=False)
class NodeTerms:
    """Per-direction ingredients of the average."""

    w_sum: np.ndarray
    delta: np.ndarray  # unnormalized difference operators, (N, 4, 4)
    cross: np.ndarray  # |tr(T_A rho T_B^dagger)|
    dark: np.ndarray


def node_terms(p: float, eps_in: Polarization, eps_out: Polarization, quad: Quadrature) -> NodeTerms:
    state = build_initial_state(p)
    ops = build_path_operators(eps_in, eps_out, Geometry(quad.nodes))
    w_sum = path_weight(ops.t_a, state) + path_weight(ops.t_b, state)
    return NodeTerms(
        w_sum=w_sum,
        delta=difference_operator(ops.t_a, ops.t_b, state),
        cross=np.abs(interference_term(ops.t_a, ops.t_b, state)),
        dark=is_dark(w_sum, ops.t_a, ops.t_b),
    )


def averaged_duality(
    p: float,
    eps_in: Polarization,
    eps_out: Polarization,
    quad: Quadrature | None = None,
    weighting: str = "event",
) -> AveragedResult:
    """Averaged distinguishability and visibility for one polarization channel."""
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    if not -1.0 / 3.0 - 1e-15 <= p <= 1.0:
        raise OutOfRangeError(f"p = {p} outside [-1/3, 1]")
    if quad is None:
        quad = build_quadrature()
    terms = node_terms(p, eps_in, eps_out, quad)
    bright = ~terms.dark
    if not np.any(bright):
        raise AllDarkError("every direction is dark for this channel")

    q = quad.weights[bright]
    q = q / q.sum()
    w_sum = terms.w_sum[bright]
    if weighting == "event":
        norm = np.dot(q, w_sum)
        delta = np.tensordot(q, terms.delta[bright], axes=1) / norm
        v_avg = 2.0 * np.dot(q, terms.cross[bright]) / norm
    else:
        delta = np.tensordot(q / w_sum, terms.delta[bright], axes=1)
        v_avg = 2.0 * np.dot(q, terms.cross[bright] / w_sum)
    return AveragedResult(
        d_avg=float(qop.trace_norm(delta)),
        v_avg=float(v_avg),
        n_nodes=len(quad),
        skipped_dark=int(np.count_nonzero(terms.dark)),
        weighting=weighting,
    )


def pointwise_mean(
    p: float,
    eps_in: Polarization,
    eps_out: Polarization,
    quad: Quadrature,
    weighting: str = "event",
) -> tuple[float, float]:
    """Mean of the direction-resolved D and V under the same weighting.

    The averaged D can never exceed the first value (trace-norm triangle
    inequality).
    """
    terms = node_terms(p, eps_in, eps_out, quad)
    bright = ~terms.dark
    w_sum = terms.w_sum[bright]
    d = qop.trace_norm(terms.delta[bright]) / w_sum
    v = 2.0 * terms.cross[bright] / w_sum
    q = quad.weights[bright]
    if weighting == "event":
        q = q * w_sum
    q = q / q.sum()
    return float(np.dot(q, d)), float(np.dot(q, v))


def monte_carlo_estimate(
    p: float,
    eps_in: Polarization,
    eps_out: Polarization,
    samples: int = 100_000,
    batches: int = 20,
    seed: int = 0,
    weighting: str = "event",
) -> tuple[AveragedResult, float, float]:
    """Monte Carlo average with batch-means standard errors for D and V."""
    if samples < 2 * batches:
        raise BadResolutionError("need at least two samples per batch")
    full = build_quadrature(Scheme.MONTE_CARLO, samples, seed=seed)
    result = averaged_duality(p, eps_in, eps_out, full, weighting)
    per_batch = samples // batches
    estimates = []
    for k in range(batches):
        sl = slice(k * per_batch, (k + 1) * per_batch)
        sub = Quadrature(full.nodes[sl], np.full(per_batch, 1.0 / per_batch))
        r = averaged_duality(p, eps_in, eps_out, sub, weighting)
        estimates.append((r.d_avg, r.v_avg))
    est = np.array(estimates)
    stderr = est.std(axis=0, ddof=1) / np.sqrt(batches)
    return result, float(stderr[0]), float(stderr[1])
