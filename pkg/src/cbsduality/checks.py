"""Self-verification suite behind ``cbsduality verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import duality, qop
from .average import averaged_duality, build_quadrature
from .polarization import Channel, incoming, outgoing, perpendicular_pair, resolve_channel
from .scattering import (
    P_MIN,
    PERPENDICULAR,
    Geometry,
    build_initial_state,
    build_path_operators,
)

TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def perpendicular_grid(p: float, n_u: int = 41, n_uprime: int = 41):
    """Matrix-pipeline and closed-form D, V over a (u, u') grid at n along x.

    Returns ``(u, u', result, d_closed, v_closed)``; closed-form entries are
    NaN where the configuration is dark.
    """
    u, up = np.meshgrid(np.linspace(-1, 1, n_u), np.linspace(-1, 1, n_uprime), indexing="ij")
    e_in, e_out = perpendicular_pair(u, up)
    ops = build_path_operators(e_in, e_out, PERPENDICULAR)
    result = duality.analyze(ops.t_a, ops.t_b, build_initial_state(p))
    bright = 1.0 + p * u > 0
    d_cf = np.full(u.shape, np.nan)
    v_cf = np.full(u.shape, np.nan)
    d_cf[bright], v_cf[bright] = duality.closed_form_perpendicular(p, u[bright], up[bright])
    return u, up, result, d_cf, v_cf


def _p_values(count: int = 15) -> np.ndarray:
    return np.linspace(P_MIN, 1.0, count)


def check_closed_form_oracle() -> CheckResult:
    worst = 0.0
    for p in _p_values():
        _, _, res, d_cf, v_cf = perpendicular_grid(p)
        if not np.array_equal(np.isnan(res.d), np.isnan(d_cf)):
            return CheckResult("eq9-oracle", False, f"dark sets disagree at p={p}")
        bright = ~np.isnan(d_cf)
        worst = max(worst, np.max(np.abs(res.d - d_cf)[bright]), np.max(np.abs(res.v - v_cf)[bright]))
    return CheckResult("eq9-oracle", bool(worst <= TOL), f"max |pipeline - closed form| = {worst:.2e}")


def _random_configuration(rng: np.random.Generator, count: int):
    n = rng.standard_normal((count, 3))
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    jin = rng.standard_normal((count, 2)) + 1j * rng.standard_normal((count, 2))
    jout = rng.standard_normal((count, 2)) + 1j * rng.standard_normal((count, 2))
    jin /= np.linalg.norm(jin, axis=1, keepdims=True)
    jout /= np.linalg.norm(jout, axis=1, keepdims=True)
    p = rng.uniform(P_MIN, 1.0, count)
    return n, jin, jout, p


def random_results(count: int, seed: int = 0):
    """Pipeline results on random (n, e_in, e_out, p), grouped per p value."""
    rng = np.random.default_rng(seed)
    n, jin, jout, p = _random_configuration(rng, count)
    e_in, e_out = incoming(jin), outgoing(jout)
    ops = build_path_operators(e_in, e_out, Geometry(n))
    rho = 0.25 * (qop.IDENTITY - p[:, None, None] * np.einsum("ijk,ikl->jl", qop.SIGMA1, qop.SIGMA2))
    return p, ops, rho, duality.analyze(ops.t_a, ops.t_b, rho)


def check_duality() -> CheckResult:
    _, _, _, res = random_results(10_000)
    bright = ~res.dark
    slack = duality.duality_check(res.d[bright], res.v[bright])
    worst = float(np.min(slack))
    return CheckResult("duality-eq1", bool(worst >= -TOL), f"min slack = {worst:.2e} over {bright.sum()} inputs")


def check_bound() -> CheckResult:
    worst = np.inf
    for p in _p_values():
        _, _, res, _, _ = perpendicular_grid(p)
        bright = ~res.dark
        worst = min(worst, np.min(duality.bound_check(p, res.d[bright], res.v[bright])))
    return CheckResult("bound-eq10", bool(worst >= -TOL), f"min slack = {worst:.2e}")


def check_decomposition() -> CheckResult:
    _, ops, rho, res = random_results(1_000, seed=1)
    bright = ~res.dark
    lam = 2.0 * np.sqrt(np.sum(res.a**2 + res.b**2, axis=-1))
    d_err = np.max(np.abs(res.d - 2.0 * lam)[bright])
    delta = duality.difference_operator(ops.t_a, ops.t_b, rho)[bright] / res.w_sum[bright][:, None, None]
    eig = qop.hermitian_eigenvalues(delta)
    pattern = np.stack([lam[bright], np.zeros(bright.sum()), np.zeros(bright.sum()), -lam[bright]], axis=1)
    eig_err = np.max(np.abs(eig - pattern))
    worst = max(d_err, eig_err)
    return CheckResult("decomposition-eq8", bool(worst <= TOL), f"max deviation = {worst:.2e}")


def check_weight_symmetry() -> CheckResult:
    _, _, _, res = random_results(1_000, seed=2)
    rel = np.abs(res.w_a - res.w_b) / np.maximum(res.w_a + res.w_b, 1e-300)
    bright = ~res.dark
    worst = float(np.max(rel[bright]))
    return CheckResult("weight-symmetry", worst <= 1e-12, f"max relative |w_A - w_B| = {worst:.2e}")


def check_average() -> CheckResult:
    e_in, e_out = resolve_channel(Channel.HELICITY_PRESERVING)
    r = averaged_duality(0.0, e_in, e_out)
    ok = abs(r.d_avg - 0.5) <= 1e-3 and abs(r.v_avg - 0.4) <= 1e-3
    return CheckResult("average-hpres", ok, f"D = {r.d_avg:.6f}, V = {r.v_avg:.6f}")


def check_convergence() -> CheckResult:
    worst = 0.0
    for channel in Channel:
        e_in, e_out = resolve_channel(channel)
        coarse = averaged_duality(0.0, e_in, e_out, build_quadrature(resolution=16))
        fine = averaged_duality(0.0, e_in, e_out, build_quadrature(resolution=32))
        worst = max(worst, abs(coarse.d_avg - fine.d_avg), abs(coarse.v_avg - fine.v_avg))
    return CheckResult("average-convergence", worst < 1e-6, f"max change 16 -> 32 = {worst:.2e}")


ALL_CHECKS = (
    check_closed_form_oracle,
    check_duality,
    check_bound,
    check_decomposition,
    check_weight_symmetry,
    check_average,
    check_convergence,
)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
