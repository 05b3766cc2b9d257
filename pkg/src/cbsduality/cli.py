"""Command-line front end: point evaluations, sweeps, angular averages, self-verification."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import checks, duality
from .average import DEFAULT_RESOLUTION, Scheme, averaged_duality, build_quadrature
from .errors import AllDarkError, CBSError, ZeroWeightError
from .polarization import (
    Channel,
    Polarization,
    incoming,
    outgoing,
    parse_jones,
    perpendicular_pair,
    resolve_channel,
    stokes,
    u_component,
)
from .scattering import P_MIN, PERPENDICULAR, Geometry, build_initial_state, build_path_operators

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DARK = 2
EXIT_VERIFY = 3

CSV_FIELDS = ("p", "pol_in", "pol_out", "u", "uprime", "nx", "ny", "nz", "w_sum", "d", "v", "duality_slack")

CONVENTIONS = """\
basis order      |m1 m2> = ++, +-, -+, -- (m along z, atom 1 = left tensor factor)
pauli            sigma_z = diag(+1, -1) in the (+1/2, -1/2) basis
photons          incoming along +z, outgoing along -z; Jones vectors in the fixed x, y frame
stokes           s1 = |e_x|^2 - |e_y|^2, s2 = 2 Re(e_x* e_y), s3 = 2 Im(e_x* e_y)
u, u'            |e.a|^2 - |e.b|^2 with a = transverse unit projection of n, b = z x a
handedness       left circular along +z = (x + i y)/sqrt(2)
channels         linpar  in x, out x
                 linperp in x, out y
                 hpres   in (x + i y)/sqrt(2), out (x - i y)/sqrt(2)  (same helicity w.r.t. own direction)
                 hflip   in (x + i y)/sqrt(2), out (x + i y)/sqrt(2)
outgoing pol     stored as analyzed ket; conjugated inside the path operator
path A           atom 1 scatters first, atom 2 second
average          uniform over the sphere of n; 'event' weighting by w_A + w_B (default) or per-direction
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    x = float(x)
    return repr(x + 0.0) if x == x else "nan"


@dataclass
class SweepRecord:
    p: float
    pol_in: str
    pol_out: str
    u: float | None
    uprime: float | None
    n: tuple[float, float, float] | None  # None for an angular average
    w_sum: float | None
    d: float | None
    v: float | None
    duality_slack: float | None
    extra: dict = field(default_factory=dict)

    @property
    def dark(self) -> bool:
        return self.d is None

    def csv_row(self) -> list[str]:
        def opt(x):
            return "" if x is None else fmt(x)

        nx, ny, nz = ("avg", "", "") if self.n is None else tuple(fmt(c) for c in self.n)
        slack = "dark" if self.dark else fmt(self.duality_slack)
        return [fmt(self.p), self.pol_in, self.pol_out, opt(self.u), opt(self.uprime),
                nx, ny, nz, opt(self.w_sum), opt(self.d), opt(self.v), slack]

    def as_json(self) -> dict:
        def num(x):
            return None if x is None else float(x)

        nx, ny, nz = ("avg", None, None) if self.n is None else tuple(float(c) for c in self.n)
        out = {
            "p": float(self.p),
            "pol_in": self.pol_in,
            "pol_out": self.pol_out,
            "u": num(self.u),
            "uprime": num(self.uprime),
            "nx": nx,
            "ny": ny,
            "nz": nz,
            "w_sum": num(self.w_sum),
            "d": num(self.d),
            "v": num(self.v),
            "duality_slack": num(self.duality_slack),
            "dark": self.dark,
        }
        out.update(self.extra)
        return out


def render(records: list[SweepRecord], fmt_name: str, meta: dict | None = None) -> str:
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow(rec.csv_row())
        return buf.getvalue()
    doc = {"meta": meta or {}, "records": [r.as_json() for r in records]}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _jones_label(jones: np.ndarray) -> str:
    return ",".join(fmt(x) for x in (jones[0].real, jones[0].imag, jones[1].real, jones[1].imag))


def _parse_triplet(text: str) -> np.ndarray:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None
    if len(parts) != 3 or not np.all(np.isfinite(parts)) or not any(parts):
        raise UsageError(f"expected three finite reals, not all zero: {text!r}")
    return np.array(parts)


def _parse_p(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise UsageError(f"cannot parse p = {text!r}") from None
    if not P_MIN - 1e-15 <= p <= 1.0:
        raise UsageError(f"p = {p} outside [-1/3, 1]")
    return p


def _polarizations(args) -> tuple[Polarization, Polarization, str, str]:
    if args.channel is not None:
        if args.jones is not None or args.jones_out is not None:
            raise UsageError("--channel cannot be combined with --jones/--jones-out")
        e_in, e_out = resolve_channel(args.channel)
        return e_in, e_out, args.channel, args.channel
    if args.jones is None or args.jones_out is None:
        raise UsageError("give either --channel or both --jones and --jones-out")
    try:
        jin, jout = parse_jones(args.jones), parse_jones(args.jones_out)
    except (ValueError, CBSError) as exc:
        raise UsageError(str(exc)) from None
    return incoming(jin), outgoing(jout), _jones_label(jin), _jones_label(jout)


def _optional_u(pol: Polarization, n: np.ndarray) -> float | None:
    try:
        return float(u_component(pol, n))
    except CBSError:
        return None


def cmd_point(args) -> tuple[list[SweepRecord], dict]:
    p = _parse_p(args.p)
    e_in, e_out, label_in, label_out = _polarizations(args)
    n = _parse_triplet(args.n)
    geom = Geometry.from_vector(n)
    state = build_initial_state(p)
    ops = build_path_operators(e_in, e_out, geom)
    res = duality.analyze(ops.t_a, ops.t_b, state)
    if res.dark:
        raise ZeroWeightError("dark channel")
    extra = {"a": [float(x) for x in res.a], "b": [float(x) for x in res.b]}
    along_x = np.allclose(np.abs(geom.n), [1.0, 0.0, 0.0], atol=1e-12)
    if along_x:
        d_cf, v_cf = duality.closed_form_perpendicular(p, stokes(e_in).s1, stokes(e_out).s1)
        extra["closed_form"] = {"d": float(d_cf), "v": float(v_cf)}
    rec = SweepRecord(
        p=p, pol_in=label_in, pol_out=label_out,
        u=_optional_u(e_in, geom.n), uprime=_optional_u(e_out, geom.n),
        n=tuple(geom.n), w_sum=res.w_sum, d=res.d, v=res.v,
        duality_slack=duality.duality_check(res.d, res.v), extra=extra,
    )
    return [rec], {"command": "point"}


def cmd_sweep(args) -> tuple[list[SweepRecord], dict]:
    if args.p_grid is not None:
        if args.p is not None:
            raise UsageError("--p and --p-grid are mutually exclusive")
        if args.p_grid < 2:
            raise UsageError("--p-grid needs at least 2 points")
        p_values = list(np.linspace(P_MIN, 1.0, args.p_grid))
    elif args.p is not None:
        p_values = [_parse_p(x) for x in args.p.split(",")]
    else:
        raise UsageError("give --p or --p-grid")
    if args.u_grid < 2 or args.uprime_grid < 2:
        raise UsageError("grid sizes must be at least 2")

    u_vals = np.linspace(-1.0, 1.0, args.u_grid)
    up_vals = np.linspace(-1.0, 1.0, args.uprime_grid)
    u, up = np.meshgrid(u_vals, up_vals, indexing="ij")
    e_in, e_out = perpendicular_pair(u, up)
    ops = build_path_operators(e_in, e_out, PERPENDICULAR)
    records = []
    for p in p_values:
        res = duality.analyze(ops.t_a, ops.t_b, build_initial_state(p), decompose=False)
        for i in range(args.u_grid):
            for j in range(args.uprime_grid):
                dark = bool(res.dark[i, j])
                d = None if dark else float(res.d[i, j])
                v = None if dark else float(res.v[i, j])
                records.append(SweepRecord(
                    p=p,
                    pol_in=_jones_label(e_in.jones[i, j]),
                    pol_out=_jones_label(e_out.jones[i, j]),
                    u=u[i, j], uprime=up[i, j], n=(1.0, 0.0, 0.0),
                    w_sum=float(res.w_a[i, j] + res.w_b[i, j]),
                    d=d, v=v,
                    duality_slack=None if dark else duality.duality_check(d, v),
                ))
    return records, {"command": "sweep", "geometry": "n along x"}


def cmd_average(args) -> tuple[list[SweepRecord], dict]:
    p = _parse_p(args.p)
    e_in, e_out, label_in, label_out = _polarizations(args)
    try:
        quad = build_quadrature(Scheme(args.scheme), args.resolution, seed=args.seed)
    except CBSError as exc:
        raise UsageError(str(exc)) from None
    res = averaged_duality(p, e_in, e_out, quad, weighting=args.weighting)
    rec = SweepRecord(
        p=p, pol_in=label_in, pol_out=label_out, u=None, uprime=None, n=None,
        w_sum=None, d=res.d_avg, v=res.v_avg,
        duality_slack=duality.duality_check(res.d_avg, res.v_avg),
    )
    meta = {
        "command": "average",
        "scheme": args.scheme,
        "resolution": args.resolution,
        "weighting": res.weighting,
        "n_nodes": res.n_nodes,
        "skipped_dark": res.skipped_dark,
    }
    return [rec], meta


def cmd_verify(args, out) -> int:
    results = checks.run_all()
    for r in results:
        out.write(f"{r.name}: {'PASS' if r.passed else 'FAIL'}  ({r.detail})\n")
    failed = [r.name for r in results if not r.passed]
    if failed:
        out.write(f"verification failed: {', '.join(failed)}\n")
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cbsduality", description=__doc__)
    parser.add_argument("--conventions", action="store_true", help="print sign and basis conventions and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def output_flags(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", default=None, help="output path (default: standard output)")

    def pol_flags(sp):
        sp.add_argument("--channel", choices=[c.value for c in Channel])
        sp.add_argument("--jones", help="incoming Jones vector re_x,im_x,re_y,im_y")
        sp.add_argument("--jones-out", help="analyzed outgoing Jones vector re_x,im_x,re_y,im_y")

    sp = sub.add_parser("point", help="D and V for one configuration")
    sp.add_argument("--p", required=True)
    sp.add_argument("--n", required=True, help="direction between the atoms, x,y,z")
    pol_flags(sp)
    output_flags(sp)

    sp = sub.add_parser("sweep", help="perpendicular-geometry grid over p, u, u'")
    sp.add_argument("--p", help="comma-separated p values")
    sp.add_argument("--p-grid", type=int, help="number of evenly spaced p values over [-1/3, 1]")
    sp.add_argument("--u-grid", type=int, default=41)
    sp.add_argument("--uprime-grid", type=int, default=41)
    output_flags(sp)

    sp = sub.add_parser("average", help="angular average over the inter-atomic direction")
    sp.add_argument("--p", required=True)
    sp.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    sp.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.PRODUCT_GRID.value)
    sp.add_argument("--weighting", choices=("event", "direction"), default="event")
    sp.add_argument("--seed", type=int, default=0, help="Monte Carlo seed")
    pol_flags(sp)
    output_flags(sp)

    sub.add_parser("verify", help="run the self-verification suite")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    if args.conventions:
        sys.stdout.write(CONVENTIONS)
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command == "verify":
        return cmd_verify(args, sys.stdout)

    handler = {"point": cmd_point, "sweep": cmd_sweep, "average": cmd_average}[args.command]
    try:
        records, meta = handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"cbsduality: error: {exc}\n")
        return EXIT_USAGE
    except AllDarkError as exc:
        sys.stderr.write(f"cbsduality: dark channel: {exc}\n")
        return EXIT_DARK
    except ZeroWeightError:
        sys.stderr.write("cbsduality: dark channel\n")
        return EXIT_DARK

    text = render(records, args.format, meta)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
