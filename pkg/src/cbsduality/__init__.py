"""Which-path distinguishability and interference visibility for a photon
doubly scattered by two spin-1/2 atoms (coherent backscattering).

Typical use::

    from cbsduality import resolve_channel, build_path_operators, build_initial_state
    from cbsduality import Geometry, analyze

    e_in, e_out = resolve_channel("hpres")
    ops = build_path_operators(e_in, e_out, Geometry.from_vector([1, 0, 0]))
    result = analyze(ops.t_a, ops.t_b, build_initial_state(0.0))
"""

from .average import AveragedResult, Quadrature, Scheme, averaged_duality, build_quadrature
from .duality import (
    DualityResult,
    analyze,
    bound_check,
    closed_form_perpendicular,
    decompose_difference,
    distinguishability,
    duality_check,
    visibility,
)
from .errors import CBSError, ZeroWeightError
from .polarization import (
    Channel,
    Polarization,
    Propagation,
    StokesVector,
    incoming,
    outgoing,
    resolve_channel,
    stokes,
    u_component,
)
from .scattering import (
    Geometry,
    InitialState,
    Path,
    PathOperators,
    build_initial_state,
    build_path_operator,
    build_path_operators,
    final_state,
    path_weight,
)

__all__ = [
    "AveragedResult",
    "CBSError",
    "Channel",
    "DualityResult",
    "Geometry",
    "InitialState",
    "Path",
    "PathOperators",
    "Polarization",
    "Propagation",
    "Quadrature",
    "Scheme",
    "StokesVector",
    "ZeroWeightError",
    "analyze",
    "averaged_duality",
    "bound_check",
    "build_initial_state",
    "build_path_operator",
    "build_path_operators",
    "build_quadrature",
    "closed_form_perpendicular",
    "decompose_difference",
    "distinguishability",
    "duality_check",
    "final_state",
    "incoming",
    "outgoing",
    "path_weight",
    "resolve_channel",
    "stokes",
    "u_component",
    "visibility",
]
