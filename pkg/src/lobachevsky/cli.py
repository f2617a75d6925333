"""Command-line interface.

    lobachevsky levels --b 3
    lobachevsky qfunction --b 3 --zeta-min -5 --zeta-max 9 --points 101
    lobachevsky spectrum --b 3 --alpha 0 --format csv
    lobachevsky wavefunction --b 3 --w 0,1 --level 1 --nx 41 --ny 41
    lobachevsky berry-connection --b 3 --w 0,2
    lobachevsky berry-phase --b 1 --circle 0,1,1 --samples 64
    lobachevsky verify --criteria 1,2,3

Every command writes JSON (default) or CSV to stdout or ``--out``. Exit codes:
0 success, 2 bad arguments or configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import LobachevskyError
from .geometry import (
    CoordinateEllipse,
    GeodesicCircle,
    Point,
    Polyline,
    sigma,
)
from .krein import (
    alpha_from_lambda,
    q_closed_form,
    q_derivative,
    q_threshold,
    resolve_convention,
    special_interval_solvable,
)
from .model import ModelParams, landau_levels, threshold
from .numerics import QuadratureSpec

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    alpha: float
    output_format: str
    rel_tol: float | None
    h_rel: float

    def as_dict(self) -> dict:
        d = self.params.as_dict()
        d["alpha"] = self.alpha
        d["lambda"] = math.exp(2.0 * math.pi * self.alpha)
        return d


# -- parsing helpers --------------------------------------------------------

def _pair(text: str, n: int = 2) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _point(text: str) -> Point:
    x, y = _pair(text)
    if not y > 0:
        raise argparse.ArgumentTypeError(f"point {text!r} is not in the upper half-plane")
    return Point(x, y)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def read_polyline(path: str) -> Polyline:
    pts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'u v'")
            u, v = float(parts[0]), float(parts[1])
            if not v > 0:
                raise ConfigError(f"{path}:{lineno}: v must be positive")
            pts.append(Point(u, v))
    if len(pts) < 3:
        raise ConfigError(f"{path}: a polyline needs at least three vertices")
    return Polyline(tuple(pts))


def build_config(ns) -> RunConfig:
    if ns.b is not None and ns.B is not None:
        raise ConfigError("give only one of --b and --B")
    if ns.b is None and ns.B is None:
        raise ConfigError("one of --b or --B is required")
    if not ns.a > 0:
        raise ConfigError("--a must be positive")
    params = ModelParams(a=ns.a, b=ns.b, nu=ns.nu) if ns.b is not None else \
        ModelParams.from_field(ns.B, ns.a, ns.nu)
    alpha = getattr(ns, "alpha", None)
    lam = getattr(ns, "lam", None)
    if alpha is not None and lam is not None:
        raise ConfigError("give only one of --alpha and --lambda")
    if lam is not None:
        if not lam > 0:
            raise ConfigError("--lambda must be positive")
        alpha = alpha_from_lambda(lam)
    if alpha is None:
        alpha = 0.0
    if ns.rel_tol is not None and not 0 < ns.rel_tol < 1:
        raise ConfigError("--rel-tol must lie in (0, 1)")
    return RunConfig(params, float(alpha), ns.format, ns.rel_tol, ns.h_rel)


def _loop(ns):
    given = [x for x in (ns.circle, ns.ellipse, ns.polyline) if x is not None]
    if len(given) > 1:
        raise ConfigError("give only one loop: --circle, --ellipse or --polyline")
    if ns.ellipse is not None:
        cx, cy, su, sv = ns.ellipse
        return CoordinateEllipse(Point(cx, cy), su, sv)
    if ns.polyline is not None:
        return read_polyline(ns.polyline)
    cx, cy, r = ns.circle if ns.circle is not None else (0.0, 1.0, 1.0)
    return GeodesicCircle(Point(cx, cy), r)


def _loop_dict(loop) -> dict:
    if isinstance(loop, GeodesicCircle):
        return {"type": "geodesic_circle", "center": [loop.center.x, loop.center.y],
                "radius": loop.radius}
    if isinstance(loop, CoordinateEllipse):
        return {"type": "coordinate_ellipse", "center": [loop.center.x, loop.center.y],
                "semi_u": loop.semi_u, "semi_v": loop.semi_v}
    return {"type": "polyline", "points": [[p.x, p.y] for p in loop.points]}


# -- output -----------------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def render_json(payload: dict) -> str:
    # floats keep Python's shortest round-trip repr; key order is fixed by construction
    return json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def render_csv(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(v) for v in r])
    return buf.getvalue()


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".lobachevsky-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(command: str, cfg: RunConfig) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "version": __version__,
            "params": cfg.as_dict()}


def _spec(cfg: RunConfig, base: QuadratureSpec) -> QuadratureSpec:
    if cfg.rel_tol is None:
        return base
    return QuadratureSpec(rel_tol=cfg.rel_tol, abs_tol=base.abs_tol,
                          max_subdivisions=base.max_subdivisions,
                          truncation_threshold=base.truncation_threshold,
                          n_phi=base.n_phi, max_n_phi=base.max_n_phi)


# -- commands ---------------------------------------------------------------
# Each returns (json payload, csv columns, csv rows).

def cmd_levels(ns, cfg):
    levs = landau_levels(cfg.params)
    th = threshold(cfg.params)
    payload = _header("levels", cfg)
    payload["levels"] = [{"n": n, "energy": e} for n, e in levs]
    payload["threshold"] = th
    rows = [["level", n, e] for n, e in levs] + [["threshold", None, th]]
    return payload, ["kind", "n", "energy"], rows


def _pole_free_grid(params, lo, hi, n):
    poles = [e for _, e in landau_levels(params)]
    th = threshold(params)
    grid = np.linspace(lo, hi, n)
    keep = grid < th
    for e in poles:
        keep &= np.abs(grid - e) > 1e-9
    return grid[keep]


def cmd_qfunction(ns, cfg):
    p = cfg.params
    th = threshold(p)
    hi = ns.zeta_max if ns.zeta_max is not None else th
    lo = ns.zeta_min if ns.zeta_min is not None else hi - 10.0 / p.a ** 2
    if not lo < hi:
        raise ConfigError("--zeta-min must be below --zeta-max")
    if ns.points < 2:
        raise ConfigError("--points must be at least 2")
    conv = resolve_convention(p)
    grid = _pole_free_grid(p, lo, hi, ns.points)
    rows = [[float(z), float(q_closed_form(z, p, conv)), float(q_derivative(z, p, conv))]
            for z in grid]
    payload = _header("qfunction", cfg)
    payload["convention"] = {"sign": conv.sign, "offset": conv.offset, "drift": conv.drift}
    payload["q_threshold"] = q_threshold(p, conv)
    payload["samples"] = [{"zeta": z, "Q": q, "dQ": d} for z, q, d in rows]
    return payload, ["zeta", "Q", "dQ"], rows


def cmd_spectrum(ns, cfg):
    from .spectral import IntervalKind, _dq_dzeta, intervals, solve_level
    p = cfg.params
    conv = resolve_convention(p)
    rows, items = [], []
    for iv in intervals(p):
        e = solve_level(iv, cfg.alpha, p, conv)
        item = {"k": iv.index, "kind": iv.kind.value, "lo": iv.lo, "hi": iv.hi}
        if e is None:
            item.update(status="unsolvable", energy=None, c_k=None, residual=None,
                        alpha=cfg.alpha, q_threshold=q_threshold(p, conv),
                        condition="alpha < Q(threshold-)")
            note = f"alpha = {cfg.alpha!r} not below Q(threshold-) = {float(item['q_threshold'])!r}"
            item["note"] = note
            rows.append([iv.index, iv.kind.value, iv.lo, iv.hi, None, None, None, "unsolvable",
                         note])
        else:
            t = 0.5 + math.sqrt(max(p.b ** 2 - p.a ** 2 * e, 0.0))
            c = float(np.real(_dq_dzeta(t, p, conv.sign))) ** -0.5
            res = abs(float(q_closed_form(e, p, conv)) - cfg.alpha)
            item.update(status="bound", energy=e, c_k=c, residual=res)
            if iv.kind is IntervalKind.SPECIAL:
                item["q_threshold"] = q_threshold(p, conv)
            rows.append([iv.index, iv.kind.value, iv.lo, iv.hi, e, c, res, "bound", None])
        items.append(item)
    payload = _header("spectrum", cfg)
    payload["w"] = [ns.w.x, ns.w.y]
    payload["convention"] = {"sign": conv.sign}
    payload["special_interval_solvable"] = special_interval_solvable(cfg.alpha, p, conv)
    payload["levels"] = items
    return payload, ["k", "kind", "lo", "hi", "energy", "c_k", "residual", "status",
                     "note"], rows


def _state(cfg, w, level):
    from .spectral import bound_states
    for s in bound_states(cfg.alpha, w, cfg.params):
        if s.k == level:
            return s
    raise LobachevskyError(f"no bound state for level {level} at alpha = {cfg.alpha}")


def cmd_wavefunction(ns, cfg):
    from .spectral import eigenfunction, norm_check
    state = _state(cfg, ns.w, ns.level)
    w = ns.w
    x0, x1, y0, y1 = ns.window if ns.window is not None else (
        w.x - 2 * w.y, w.x + 2 * w.y, 0.25 * w.y, 3.0 * w.y)
    if not (x0 < x1 and 0 < y0 < y1):
        raise ConfigError("--window needs x0 < x1 and 0 < y0 < y1")
    if ns.nx < 2 or ns.ny < 2:
        raise ConfigError("--nx and --ny must be at least 2")
    xs, ys = np.linspace(x0, x1, ns.nx), np.linspace(y0, y1, ns.ny)
    X, Y = np.meshgrid(xs, ys)
    Z = (X + 1j * Y).ravel()
    near = sigma(Z, w.z) - 1.0 < 1e-12
    vals = np.full(Z.shape, np.nan + 1j * np.nan)
    if np.any(~near):
        vals[~near] = eigenfunction(state, Z[~near])
    nrm = norm_check(state, _spec(cfg, QuadratureSpec()))
    rows = [[z.real, z.imag, v.real, v.imag, abs(v) ** 2] for z, v in zip(Z, vals)]
    payload = _header("wavefunction", cfg)
    payload.update(w=[w.x, w.y], level=ns.level, energy=state.energy, c_k=state.c_k, norm=nrm,
                   window=[x0, x1, y0, y1], nx=ns.nx, ny=ns.ny,
                   grid=[{"x": r[0], "y": r[1], "re": r[2], "im": r[3], "abs2": r[4]}
                         for r in rows])
    return payload, ["x", "y", "re", "im", "abs2"], rows


def cmd_berry_connection(ns, cfg):
    from .berry import DEFAULT_CONNECTION_SPEC, berry_connection_analytic, berry_connection_numeric
    state = _state(cfg, ns.w, ns.level)
    num = berry_connection_numeric(state, cfg.h_rel, _spec(cfg, DEFAULT_CONNECTION_SPEC))
    ana = berry_connection_analytic(ns.w, cfg.params)
    payload = _header("berry-connection", cfg)
    payload.update(w=[ns.w.x, ns.w.y], level=ns.level, energy=state.energy,
                   numeric={"u": num.u_component, "v": num.v_component,
                            "residue": list(num.residue)},
                   analytic={"u": ana.u_component, "v": ana.v_component},
                   deviation={"u": num.u_component - ana.u_component,
                              "v": num.v_component - ana.v_component})
    rows = [[ns.w.x, ns.w.y, ns.level, num.u_component, num.v_component,
             ana.u_component, ana.v_component]]
    return payload, ["u", "v", "level", "numeric_u", "numeric_v", "analytic_u", "analytic_v"], rows


def cmd_berry_phase(ns, cfg):
    from .berry import DEFAULT_CONNECTION_SPEC, alpha_independence_check, berry_phase
    loop = _loop(ns)
    spec = _spec(cfg, DEFAULT_CONNECTION_SPEC)
    rep = berry_phase(loop, cfg.params, ns.mode, alpha=cfg.alpha, level=ns.level,
                      samples=ns.samples, h_rel=cfg.h_rel, spec=spec)
    payload = _header("berry-phase", cfg)
    payload["loop"] = _loop_dict(loop)
    payload["mode"] = ns.mode
    payload.update(rep.as_dict())
    row = [ns.mode, cfg.alpha, ns.level, rep.numeric_phase, rep.analytic_phase, rep.flux,
           rep.flux_quanta, rep.deviation, rep.samples]
    if ns.alpha_sweep:
        sweep = alpha_independence_check(loop, ns.alpha_sweep, ns.level, cfg.params,
                                         samples=ns.samples, h_rel=cfg.h_rel, spec=spec)
        payload["alpha_sweep"] = sweep
        row.append(sweep["max_pairwise_relative_deviation"])
    cols = ["mode", "alpha", "level", "numeric_phase", "analytic_phase", "flux",
            "flux_quanta", "deviation", "samples"]
    if ns.alpha_sweep:
        cols.append("alpha_sweep_deviation")
    return payload, cols, [row]


def cmd_verify(ns, cfg):
    from .acceptance import run_all
    results = run_all(ns.criteria, report=lambda r: print(r.line(), file=sys.stderr, flush=True))
    payload = {"schema_version": SCHEMA_VERSION, "command": "verify", "version": __version__,
               "results": [r.as_dict() for r in results],
               "all_passed": all(r.passed for r in results)}
    rows = [[r.number, r.name, r.passed, r.elapsed] for r in results]
    return payload, ["criterion", "name", "passed", "seconds"], rows


COMMANDS = {
    "levels": cmd_levels,
    "qfunction": cmd_qfunction,
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "berry-connection": cmd_berry_connection,
    "berry-phase": cmd_berry_phase,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=1.0, help="curvature radius (default 1)")
    common.add_argument("--b", type=float, help="reduced field b = B a^2")
    common.add_argument("--B", type=float, help="field intensity B")
    common.add_argument("--nu", type=float, default=1.0)
    common.add_argument("--alpha", type=float, help="coupling (default 0)")
    common.add_argument("--lambda", dest="lam", type=float, help="scattering length, 2 pi alpha = ln lambda")
    common.add_argument("--w", type=_point, default=Point(0.0, 1.0), help="interaction site u,v")
    common.add_argument("--level", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    common.add_argument("--h-rel", type=float, default=1e-4, help="relative step in w")

    parser = argparse.ArgumentParser(prog="lobachevsky", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("levels", parents=[common], help="Landau levels and threshold")
    q = sub.add_parser("qfunction", parents=[common], help="sample Q and dQ/dzeta")
    q.add_argument("--zeta-min", type=float)
    q.add_argument("--zeta-max", type=float)
    q.add_argument("--points", type=int, default=201)
    sub.add_parser("spectrum", parents=[common], help="bound-state energies")
    wf = sub.add_parser("wavefunction", parents=[common], help="eigenfunction on a grid")
    wf.add_argument("--window", type=lambda s: _pair(s, 4), help="x0,x1,y0,y1")
    wf.add_argument("--nx", type=int, default=41)
    wf.add_argument("--ny", type=int, default=41)
    sub.add_parser("berry-connection", parents=[common], help="connection at --w")
    bp = sub.add_parser("berry-phase", parents=[common], help="phase around a loop")
    bp.add_argument("--circle", type=lambda s: _pair(s, 3), help="cx,cy,r (geodesic radius)")
    bp.add_argument("--ellipse", type=lambda s: _pair(s, 4), help="cx,cy,su,sv")
    bp.add_argument("--polyline", help="file with one 'u v' pair per line")
    bp.add_argument("--mode", choices=("numeric", "analytic"), default="numeric")
    bp.add_argument("--samples", type=int, default=256)
    bp.add_argument("--alpha-sweep", type=_floats, help="comma-separated couplings")
    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--criteria", type=_ints, help="comma-separated criterion numbers")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = None if ns.command == "verify" else build_config(ns)
        if ns.command == "berry-phase" and ns.samples < 4:
            raise ConfigError("--samples must be at least 4")
        payload, cols, rows = COMMANDS[ns.command](ns, cfg)
    except (ConfigError, ValueError) as exc:
        print(f"lobachevsky: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LobachevskyError as exc:
        print(f"lobachevsky: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render_json(payload) if ns.format == "json" else render_csv(cols, rows)
    try:
        emit(text, ns.out)
    except OSError as exc:
        print(f"lobachevsky: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if ns.command == "verify" and not payload["all_passed"]:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
