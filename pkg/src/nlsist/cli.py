"""Command line entry point ``nlsist``.

Exit codes: 0 ok, 1 usage, 2 spectral singularity, 3 oracle boundary
contamination, 4 solver failure.  Every run writes a JSON manifest with the
arguments, a hash of them, the output files and the wall time.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .core import ComplexField, DiscreteSpectrum, ScatteringData, SpaceTimeCone
from .errors import (BoundaryContaminationWarning, ConditioningWarning, EigenvalueCountError,
                     IntegrationError, MultiplicityError, NLSError, ProportionalityError,
                     SpectralSingularityError)

log = logging.getLogger("nlsist")

EXIT_OK, EXIT_USAGE, EXIT_SINGULAR, EXIT_CONTAMINATION, EXIT_SOLVER = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)

    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ helpers

def _complex(text: str) -> complex:
    """'1.5', '0.5,2' or '0.5+2j'."""
    text = text.strip()
    if "," in text:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    return complex(text.replace("i", "j"))


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _write(path: Path, text: str, outputs: list):
    path.write_text(text)
    outputs.append(str(path))


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if not isinstance(v, (int, np.integer)) else str(v)
                              for v in row))
    return "\n".join(lines) + "\n"


def _load_data(path: str) -> ScatteringData:
    try:
        return ScatteringData.from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read scattering data {path}: {exc}") from exc


def _potential(args):
    from .scattering import Potential
    kind = args.potential
    if kind == "sech":
        return Potential.sech(args.amplitude, args.x0, args.velocity)
    if kind == "box":
        return Potential.box(args.q0, args.L)
    if kind == "zero":
        return Potential.zero()
    if kind == "field":
        if not args.field:
            raise UsageError("--potential field needs --field CSV")
        f = ComplexField.from_csv(Path(args.field).read_text())
        return Potential.from_samples(f.x, f.values, tag={})
    raise UsageError(f"unknown potential {kind!r}")


def _cone(text: str) -> SpaceTimeCone:
    vals = _floats(text)
    if len(vals) != 4:
        raise UsageError("--cone expects x1,x2,v1,v2")
    try:
        return SpaceTimeCone(*vals)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _initial_data(data: ScatteringData):
    """Callable psi0(x): the recorded potential, or the N-soliton for r = 0."""
    from .scattering import Potential
    from .solitons import soliton_psi
    tag = data.extra.get("potential")
    if tag and tag.get("kind") in ("sech", "box", "zero"):
        return Potential.from_tag(tag)
    if data.r.is_zero:
        spec = data.discrete
        return lambda x: soliton_psi(spec, x, 0.0)
    raise UsageError("initial data cannot be reconstructed: no potential record and r != 0")


def _max_speed(data: ScatteringData) -> tuple[float, float]:
    zs = data.discrete.zs
    v_sol = float(np.max(np.abs(2 * zs.real))) if zs.size else 0.0
    v_rad = 0.0
    if not data.r.is_zero:
        s = np.linspace(*data.r.support, 4001)
        big = s[np.abs(data.r(s)) > 1e-6]
        v_rad = float(2 * np.max(np.abs(big))) if big.size else 0.0
    return v_sol, v_rad


def _oracle_config(data, T, args, psi0, speed=None):
    from .oracle import EvolutionConfig, domain_half_width, initial_extent
    v_sol, v_rad = _max_speed(data)
    if speed is not None:
        v_sol = max(v_sol, speed)
    X = args.X or initial_extent(psi0) + domain_half_width(v_sol, T, v_rad)
    eta = float(data.discrete.zs.imag.max()) if len(data.discrete) else 1.0
    kmax = max(16.0, 2 * v_rad + 8.0, 40.0 * eta)
    n = args.n or 2 ** int(math.ceil(math.log2(max(256, 2 * X * kmax / math.pi))))
    return EvolutionConfig(X, n, args.dt, T, workers=args.threads, order=args.order)


# -------------------------------------------------------------- subcommands

def cmd_scatter(args, out: Path, outputs: list):
    from .scattering import default_box, find_discrete_spectrum, norming_constants, \
        sample_reflection, winding_number
    pot = _potential(args)
    box = default_box(pot)
    count = winding_number(pot, box)
    log.info("winding count %d in box %s", count, box)
    r = sample_reflection(pot, args.s_max)
    zs = find_discrete_spectrum(pot, box, tol=args.tol)
    pts = norming_constants(pot, zs)
    extra = {"potential": pot.tag} if pot.tag else {}
    extra["winding_count"] = int(count)
    data = ScatteringData(r, DiscreteSpectrum(tuple(pts)), extra)
    _write(out / "scatter.json", data.to_json(), outputs)
    s = np.linspace(*r.support, 801) if not r.is_zero else np.zeros(1)
    rv = data.r(s)
    _write(out / "reflection.csv", _csv(["s", "re", "im"], zip(s, rv.real, rv.imag)), outputs)
    print(f"eigenvalues: {len(pts)} (winding count {count})")
    for p in pts:
        print(f"  z = {p.z.real:.12g}{p.z.imag:+.12g}i  c = {p.c.real:.12g}{p.c.imag:+.12g}i")


def _grid(args):
    if args.n_x < 2:
        raise UsageError("--nx must be >= 2")
    return np.linspace(args.xmin, args.xmax, args.n_x)


def cmd_soliton(args, out: Path, outputs: list):
    from .solitons import soliton_psi
    if args.data:
        spec = _load_data(args.data).discrete
    else:
        if len(args.z) != len(args.c):
            raise UsageError("--z and --c must have the same count")
        spec = DiscreteSpectrum.from_pairs([_complex(z) for z in args.z],
                                           [_complex(c) for c in args.c])
    x = _grid(args)
    vals = soliton_psi(spec, x, args.t)
    field = ComplexField(float(x[0]), float(x[1] - x[0]), args.t, vals)
    _write(out / "soliton.csv", field.to_csv(), outputs)


def cmd_evolve(args, out: Path, outputs: list):
    from .oracle import conserved_mass, evolve, sample_field
    if args.data:
        data = _load_data(args.data)
        psi0 = _initial_data(data)
        speed = None
    else:
        psi0 = _potential(args)
        data = ScatteringData()
        speed = abs(args.velocity)
    cfg = _oracle_config(data, args.T, args, psi0, speed)
    f0 = sample_field(psi0, cfg)
    every = args.checkpoint_every
    checks = [every * j for j in range(1, int(round(args.T / every)) + 1)] if every else []
    res = evolve(f0, cfg, checkpoints=checks)
    final, saved = res if checks else (res, [])
    for f in saved:
        if f is not saved[-1] or not math.isclose(f.t, final.t):
            _write(out / f"evolve_t{f.t:.6g}.csv", f.to_csv(), outputs)
    _write(out / "evolve.csv", final.to_csv(), outputs)
    print(f"X = {cfg.X:.6g}, n = {cfg.n}, mass {conserved_mass(f0):.15g} -> "
          f"{conserved_mass(final):.15g}")


def cmd_asympt(args, out: Path, outputs: list):
    from .asymptotics import evaluate_theorem
    data = _load_data(args.data)
    cone = _cone(args.cone)
    if args.t < args.t_min:
        raise UsageError(f"--t must be >= --t-min = {args.t_min}")
    x = _grid(args)
    rows = []
    for xv in x:
        if not cone.contains(xv, args.t):
            continue
        ev = evaluate_theorem(data, cone, float(xv), args.t, t_min=args.t_min)
        rows.append((xv, ev.psi_total.real, ev.psi_total.imag, ev.psi_soliton.real,
                     ev.psi_soliton.imag, ev.radiation.real, ev.radiation.imag))
    if not rows:
        raise UsageError("no grid point lies inside the cone")
    _write(out / "asympt.csv", _csv(["x", "re", "im", "sol_re", "sol_im", "rad_re", "rad_im"],
                                    rows), outputs)


def cmd_compare(args, out: Path, outputs: list):
    from .asymptotics import evaluate_theorem
    from .oracle import evolve, sample_field
    data = _load_data(args.data)
    cone = _cone(args.cone)
    ts = sorted(_floats(args.t_list))
    if not ts or ts[0] < args.t_min:
        raise UsageError(f"--t-list times must be >= --t-min = {args.t_min}")
    psi0 = _initial_data(data)
    cfg = _oracle_config(data, ts[-1], args, psi0)
    f0 = sample_field(psi0, cfg)
    res = evolve(f0, cfg, checkpoints=ts)
    _, fields = res
    rows = []
    for f in fields:
        t = f.t
        lo, hi = cone.x1 + cone.v1 * t, cone.x2 + cone.v2 * t
        idx = np.flatnonzero((f.x >= lo) & (f.x <= hi))
        if idx.size > args.samples:
            idx = idx[np.linspace(0, idx.size - 1, args.samples).round().astype(int)]
        err = 0.0
        for i in idx:
            ev = evaluate_theorem(data, cone, float(f.x[i]), t, t_min=args.t_min)
            err = max(err, abs(f.values[i] - ev.psi_total))
        rows.append((t, err))
    tt = np.array([r[0] for r in rows])
    ee = np.array([r[1] for r in rows])
    good = ee > 0
    slope = float(np.polyfit(np.log(tt[good]), np.log(ee[good]), 1)[0]) if good.sum() >= 2 \
        else float("nan")
    text = _csv(["t", "max_abs_error"], rows) + f"# slope,{slope!r}\n"
    _write(out / "compare.csv", text, outputs)
    print(f"fitted log-log slope {slope:.4f}")


def cmd_pcmodel_check(args, out: Path, outputs: list):
    from .pcmodel import residual_table
    r0 = _complex(args.r0)
    rows = residual_table(r0, tuple(_floats(args.radii)))
    _write(out / "pcmodel_check.csv", _csv(["ray", "radius", "residual"], rows), outputs)
    worst = max(r[2] for r in rows)
    print(f"max jump residual {worst:.3e}")


COMMANDS = {"scatter": cmd_scatter, "soliton": cmd_soliton, "evolve": cmd_evolve,
            "asympt": cmd_asympt, "compare": cmd_compare, "pcmodel-check": cmd_pcmodel_check}


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (env NLSIST_OUT)")
    common.add_argument("--tol", type=float, default=1e-10, help="eigenvalue tolerance")
    common.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    common.add_argument("--manifest", default=None, help="manifest path")
    common.add_argument("-v", "--verbose", action="store_true")

    def pot_args(p):
        p.add_argument("--potential", choices=["sech", "box", "zero", "field"], default="sech")
        p.add_argument("--amplitude", type=float, default=1.0)
        p.add_argument("--x0", type=float, default=0.0)
        p.add_argument("--velocity", type=float, default=0.0)
        p.add_argument("--q0", type=float, default=1.0)
        p.add_argument("--L", type=float, default=1.0)
        p.add_argument("--field", default=None, help="CSV field for --potential field")

    def grid_args(p, t_default=0.0):
        p.add_argument("--t", type=float, default=t_default)
        p.add_argument("--xmin", type=float, default=-20.0)
        p.add_argument("--xmax", type=float, default=20.0)
        p.add_argument("--nx", dest="n_x", type=int, default=401)

    def oracle_args(p):
        p.add_argument("--dt", type=float, default=1e-3)
        p.add_argument("--X", type=float, default=None, help="half-width (default: rule)")
        p.add_argument("--n", type=int, default=None, help="grid size (default: rule)")
        p.add_argument("--order", type=int, choices=[2, 4], default=2)

    parser = _Parser(prog="nlsist", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("scatter", parents=[common], help="forward scattering")
    pot_args(p)
    p.add_argument("--s-max", type=float, default=None)

    p = sub.add_parser("soliton", parents=[common], help="exact N-soliton field")
    p.add_argument("--data", default=None)
    p.add_argument("--z", action="append", default=[])
    p.add_argument("--c", action="append", default=[])
    grid_args(p)

    p = sub.add_parser("evolve", parents=[common], help="split-step oracle")
    p.add_argument("--data", default=None)
    pot_args(p)
    oracle_args(p)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--checkpoint-every", type=float, default=None)

    p = sub.add_parser("asympt", parents=[common], help="long-time asymptotic formula")
    p.add_argument("--data", required=True)
    p.add_argument("--cone", default="-1e9,1e9,-1e3,1e3")
    p.add_argument("--t-min", type=float, default=1.0)
    grid_args(p, t_default=10.0)

    p = sub.add_parser("compare", parents=[common], help="oracle versus asymptotics")
    p.add_argument("--data", required=True)
    p.add_argument("--cone", default="-5,5,0,0")
    p.add_argument("--t-list", required=True)
    p.add_argument("--t-min", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=41)
    oracle_args(p)

    p = sub.add_parser("pcmodel-check", parents=[common], help="model problem jump table")
    p.add_argument("--r0", default="0.5")
    p.add_argument("--radii", default="0.1,0.25,0.5,1,2,3,4,5,6,8")
    return parser


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        print(f"nlsist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    out = Path(args.out or os.environ.get("NLSIST_OUT", "."))
    out.mkdir(parents=True, exist_ok=True)
    cfg = {k: v for k, v in vars(args).items() if k not in ("out", "manifest", "verbose")}
    outputs: list[str] = []
    start = time.perf_counter()
    code = EXIT_OK
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", BoundaryContaminationWarning)
            warnings.simplefilter("ignore", ConditioningWarning)
            COMMANDS[args.command](args, out, outputs)
    except (UsageError, OSError) as exc:
        print(f"nlsist: error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except SpectralSingularityError as exc:
        print(f"nlsist: spectral singularity at real z = {exc.z!r}", file=sys.stderr)
        code = EXIT_SINGULAR
    except BoundaryContaminationWarning as exc:
        print(f"nlsist: oracle boundary contamination: {exc}", file=sys.stderr)
        code = EXIT_CONTAMINATION
    except (IntegrationError, EigenvalueCountError, MultiplicityError, ProportionalityError,
            NLSError, np.linalg.LinAlgError, OverflowError) as exc:
        print(f"nlsist: solver failure: {exc}", file=sys.stderr)
        code = EXIT_SOLVER
    except ValueError as exc:
        print(f"nlsist: error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    manifest = {"subcommand": args.command, "inputs": cfg, "config_hash": _config_hash(cfg),
                "outputs": outputs, "wall_time": time.perf_counter() - start,
                "version": __version__, "exit_code": code}
    mpath = Path(args.manifest) if args.manifest else out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
