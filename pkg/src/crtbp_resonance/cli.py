"""Command-line front end.

Every subcommand writes its data (CSV or JSON) plus ``<name>.manifest.json``
with the full parameter set into ``--out``; curve-producing subcommands also
write an SVG plot. Exit status: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AssumptionAError, ConvergenceError, DomainError
from .return_map import ResonanceContext

TABLE1_ROWS = ((2, 3, 0.10), (1, 2, 0.13), (3, 7, 0.08), (2, 5, 0.08), (1, 3, 0.07), (1, 4, 0.09))
TABLE2_ROWS = ((7, 1, 0.365900), (6, 1, 0.320133), (5, 1, 0.265532), (4, 1, 0.199749), (3, 1, 0.121094), (2, 1, 0.036083))


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p: int = 1
    q: int = 3
    e: list = field(default_factory=lambda: [0.1])
    mu: float = 1e-5
    g0: float = 0.0
    grid: int | None = None
    tol: float | None = None
    out: Path = Path(".")
    fmt: str = "csv"
    extra: dict = field(default_factory=dict)

    def context(self, e=None, **kw) -> ResonanceContext:
        return ResonanceContext(self.p, self.q, float(self.e[0] if e is None else e), self.g0, **kw)

    def manifest(self) -> dict:
        return {
            "command": self.command,
            "p": self.p,
            "q": self.q,
            "e": list(self.e),
            "mu": self.mu,
            "section": "pi" if self.g0 else "0",
            "grid": self.grid,
            "tol": self.tol,
            "format": self.fmt,
            "options": self.extra,
            "version": __version__,
        }


# ----------------------------------------------------------------------------
# output helpers


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if not np.isfinite(v) else format(float(v), ".15g")
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(format(float(v), ".15g")) if np.isfinite(v) else None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_table(cfg: RunConfig, name: str, header, rows) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.fmt == "json":
        path = cfg.out / f"{name}.json"
        recs = [dict(zip(header, (_jsonable(v) for v in r))) for r in rows]
        path.write_text(json.dumps(recs, indent=1, sort_keys=False) + "\n")
    else:
        path = cfg.out / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
    return path


def write_manifest(cfg: RunConfig, name: str, files, results=None):
    body = dict(cfg.manifest())
    body["files"] = sorted(str(Path(f).name) for f in files)
    if results is not None:
        body["results"] = _jsonable(results)
    path = cfg.out / f"{name}.manifest.json"
    path.write_text(json.dumps(body, indent=1, sort_keys=True) + "\n")
    return path


def write_svg(cfg: RunConfig, name: str, draw) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "crtbp-resonance"
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    draw(ax)
    fig.tight_layout()
    path = cfg.out / f"{name}.svg"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


# ----------------------------------------------------------------------------
# subcommands


def cmd_phi(cfg):
    from .return_map import resonance_functions
    from .thresholds import check_assumption_a

    n = cfg.grid or 256
    full = cfg.extra.get("full_period", False)
    rows, curves, checks = [], [], {}
    for e in cfg.e:
        ctx = cfg.context(e)
        f = resonance_functions(ctx)
        hi = 2 * np.pi if full else 2 * np.pi / ctx.p
        x = np.linspace(0.0, hi, n + 1)
        ph, ps, ch = f.phi(x), f.psi(x), f.chi(x)
        rows += [(e, *r) for r in zip(x, ph, ps, ch)]
        curves.append((e, x, ph))
        rep = check_assumption_a(ctx)
        checks[str(e)] = {"assumption_a": rep.holds, "zeros": [z for z, _ in rep.zeros],
                          "slopes": [s for _, s in rep.zeros], "extra_zeros": [z for z, _ in rep.extra_zeros]}
    files = [write_table(cfg, "phi", ["e", "l", "phi", "psi", "chi"], rows)]

    def draw(ax):
        for e, x, y in curves:
            ax.plot(x, y, label=f"e = {e:g}")
        ax.axhline(0.0, color="0.6", lw=0.6)
        ax.set_xlabel("l")
        ax.set_ylabel("phi(l)")
        ax.set_title(f"q/p = {cfg.q}/{cfg.p}, section g = {'pi' if cfg.g0 else '0'}")
        ax.legend()

    files.append(write_svg(cfg, "phi", draw))
    write_manifest(cfg, "phi", files, checks)
    return 0


def cmd_separatrix(cfg):
    from .separatrix import hyperbolic_index, sample_curves, separatrix_expansion

    ctx = cfg.context()
    j = cfg.extra.get("j")
    exp = separatrix_expansion(ctx, hyperbolic_index(ctx) if j is None else j)
    n = cfg.grid or 201
    lo = -exp.half_width if cfg.extra.get("both_sides") else 0.0
    l, u, v, L = sample_curves(exp, cfg.mu, n=n, lo=lo)
    rows = list(zip(l, l - exp.shift, u, v, L))
    files = [write_table(cfg, "separatrix", ["l", "l_shifted", "u", "v", "L"], rows)]

    def draw(ax):
        ax.plot(l - exp.shift, 0.1 * u, label="0.1 u(l)")
        ax.plot(l - exp.shift, v, label="v(l)")
        ax.axhline(0.0, color="0.6", lw=0.6)
        ax.set_xlabel("l - j pi/p")
        ax.set_title(f"q/p = {cfg.q}/{cfg.p}, e = {ctx.e:g}, j = {exp.j}")
        ax.legend()

    files.append(write_svg(cfg, "separatrix", draw))
    res = {"j": exp.j, "u_slope": exp.alpha2, "v_slope": exp.v_slope, "c1": ctx.c1, "c2": ctx.c2}
    write_manifest(cfg, "separatrix", files, res)
    return 0


def cmd_fixed_points(cfg):
    from .return_map import find_fixed_points

    ctx = cfg.context()
    fps = find_fixed_points(ctx, cfg.mu)
    s = np.sqrt(cfg.mu)
    rows = []
    for f in fps:
        m1, m2 = (complex(w) for w in f.multipliers)
        rows.append((f.j, f.l, f.lam, ctx.Lstar + f.lam * s, f.kind, m1.real, m1.imag, m2.real, m2.imag))
    hdr = ["j", "l", "lambda", "L", "kind", "mult1_re", "mult1_im", "mult2_re", "mult2_im"]
    files = [write_table(cfg, "fixed_points", hdr, rows)]
    write_manifest(cfg, "fixed_points", files)
    return 0


def cmd_homoclinic(cfg):
    from .separatrix import homoclinic_point

    est = homoclinic_point(cfg.context(), cfg.mu)
    row = [est.section, est.j, est.l_h, est.L_h, est.L_graph]
    hdr = ["section", "j", "l_h", "L_h", "L_graph"]
    res = {}
    if cfg.extra.get("verify"):
        from .dynamics import numeric_homoclinic

        nh = numeric_homoclinic(cfg.context(), cfg.mu)
        row += [nh.L_stable, nh.L_unstable, nh.gap, nh.offset / cfg.mu]
        hdr += ["L_stable", "L_unstable", "gap", "offset_over_mu"]
        res = {"within_10_mu": abs(nh.offset) <= 10 * cfg.mu}
    files = [write_table(cfg, "homoclinic", hdr, [row])]
    write_manifest(cfg, "homoclinic", files, res)
    return 0


def cmd_table1(cfg):
    from .thresholds import boundary_threshold

    mu = cfg.mu
    rows = []
    for p, q, ref in TABLE1_ROWS:
        r = boundary_threshold(p, q, mu=mu, oracle=cfg.extra.get("oracle", False))
        rows.append((f"{q}/{p}", p, q, ref, r.e_min, r.e_min - ref, abs(r.e_min - ref) <= 0.02,
                     r.oracle, None if r.oracle is None else abs(r.oracle - ref) <= 0.02))
    hdr = ["q/p", "p", "q", "reference", "e_min", "difference", "within_band", "oracle", "oracle_within_band"]
    files = [write_table(cfg, "table1", hdr, rows)]
    write_manifest(cfg, "table1", files, {"criterion": "truncated fixed-point system keeps one root near each j pi/p",
                                          "band": 0.02})
    return 0


def cmd_table2(cfg):
    from .thresholds import MU_JUPITER, asymmetric_threshold

    rows = []
    for p, q, ref in TABLE2_ROWS:
        e = asymmetric_threshold(p, q, mu=MU_JUPITER)
        rows.append((f"{q}/{p}", p, q, ref, e, e - ref))
    files = [write_table(cfg, "table2", ["q/p", "p", "q", "reference", "e", "difference"], rows)]
    write_manifest(cfg, "table2", files, {"mu_geometry": MU_JUPITER})
    return 0


def cmd_fourier(cfg):
    from .fourier import c_star, fourier_table, phi_identity

    ctx = cfg.context()
    order = cfg.extra.get("order", 8)
    kw = {"grid": cfg.grid} if cfg.grid else {}
    if cfg.tol:
        kw["tol"] = cfg.tol
    table = fourier_table(ctx, order, order, **kw)
    files = [write_table(cfg, "fourier_c", ["m", "n", "c_mn"], list(table.rows()))]
    pairs = [(1, 2), (1, 3), (2, 3)]
    if (cfg.p, cfg.q) not in pairs:
        pairs.append((cfg.p, cfg.q))
    rows = []
    for p, q in pairs:
        r = c_star(p, q)
        rows.append((p, q, r.limit, r.closed, r.rel_error, r.agrees, r.rescaled, r.rescaled_rel_error))
    hdr = ["p", "q", "limit", "closed_form", "rel_error", "agrees", "rescaled_closed_form", "rescaled_rel_error"]
    files.append(write_table(cfg, "c_star", hdr, rows))
    ident = phi_identity(ctx)
    res = {"fft_grid": table.grid, "fft_change": table.change, "phi_identity_max_error": ident.max_error}
    write_manifest(cfg, "fourier", files, res)
    return 0


def cmd_validate(cfg):
    from .dynamics import NumericMap, perturbative_error_scan

    ctx = cfg.context()
    rows = []
    scan = perturbative_error_scan(ctx)
    rows.append(("first_order_exponent", scan.exponent, "[1.8, 2.2]", 1.8 <= scan.exponent <= 2.2))
    sc = perturbative_error_scan(ctx, point=(0.5, -0.3), scaled=True)
    rows.append(("scaled_map_exponent", sc.exponent, "[1.3, 1.7]", 1.3 <= sc.exponent <= 1.7))
    rng = np.random.default_rng(0)
    mu = min(cfg.mu, 1e-4)
    nm = NumericMap(ctx, mu)
    l0 = rng.uniform(0, 2 * np.pi, 20)
    L0 = ctx.Lstar + rng.uniform(-1e-2, 1e-3, 20)
    S0 = nm.states(l0, L0)
    S1 = nm.advance(S0, 1)
    back = nm.advance(np.column_stack([-S1[:, 0], S1[:, 1], S1[:, 2]]), 1)
    rev = float(np.max(np.abs(np.column_stack([-back[:, 0] - l0, back[:, 1] - L0]))))
    rows.append(("reversibility", rev, "<= 1e-9", rev <= 1e-9))
    Sp = nm.advance(S0, ctx.p)
    drift = float(np.max(np.abs(nm.energy(Sp) - nm.energy(S0))))
    rows.append(("energy_drift", drift, "<= 1e-10", drift <= 1e-10))
    files = [write_table(cfg, "validate", ["check", "value", "target", "ok"], rows)]
    write_manifest(cfg, "validate", files, {"errors_first_order": list(scan.errors), "errors_scaled": list(sc.errors),
                                            "mu_list": list(scan.mu)})
    return 0 if all(r[-1] for r in rows) else 1


COMMANDS = {
    "phi": cmd_phi,
    "separatrix": cmd_separatrix,
    "fixed-points": cmd_fixed_points,
    "homoclinic": cmd_homoclinic,
    "table1": cmd_table1,
    "table2": cmd_table2,
    "fourier": cmd_fourier,
    "validate": cmd_validate,
}


# ----------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, default=1)
    common.add_argument("--q", type=int, default=3)
    common.add_argument("--e", type=float, nargs="+", default=[0.1])
    common.add_argument("--mu", type=float, default=1e-5)
    common.add_argument("--section", choices=["0", "pi"], default="0")
    common.add_argument("--grid", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--out", type=Path, default=Path("."))
    common.add_argument("--format", choices=["csv", "json"], default="csv", dest="fmt")
    ap = _Parser(prog="crtbp-resonance", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("phi", parents=[common], help="phi, psi, chi curves").add_argument(
        "--full-period", action="store_true", help="sample [0, 2 pi) instead of [0, 2 pi/p)")
    sp = sub.add_parser("separatrix", parents=[common], help="u, v and the manifold graph")
    sp.add_argument("--j", type=int, help="hyperbolic index (default: the one on this section)")
    sp.add_argument("--both-sides", action="store_true", help="cover [-3 pi/2p, 3 pi/2p]")
    sub.add_parser("fixed-points", parents=[common], help="fixed points of the truncated map")
    sub.add_parser("homoclinic", parents=[common], help="predicted homoclinic point").add_argument(
        "--verify", action="store_true", help="grow numeric manifolds and compare")
    t1 = sub.add_parser("table1", parents=[common], help="minimum eccentricities at mu = 1e-3")
    t1.add_argument("--oracle", action="store_true", help="also run numeric continuation")
    t1.set_defaults(mu=1e-3)
    sub.add_parser("table2", parents=[common], help="onset of asymmetric librations")
    sub.add_parser("fourier", parents=[common], help="c_mn table and c* checks").add_argument(
        "--order", type=int, default=8)
    sub.add_parser("validate", parents=[common], help="error-scaling and symmetry suite")
    return ap


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    base = {"command", "p", "q", "e", "mu", "section", "grid", "tol", "out", "fmt"}
    extra = {k: v for k, v in vars(ns).items() if k not in base}
    cfg = RunConfig(ns.command, ns.p, ns.q, list(ns.e), ns.mu, np.pi if ns.section == "pi" else 0.0,
                    ns.grid, ns.tol, ns.out, ns.fmt, extra)
    if not 0 < cfg.mu <= 1e-3:
        raise UsageError("--mu must lie in (0, 1e-3]")
    if cfg.grid is not None and cfg.grid < 8:
        raise UsageError("--grid must be at least 8")
    if cfg.tol is not None and not cfg.tol > 0:
        raise UsageError("--tol must be positive")
    if cfg.command not in ("table1", "table2"):
        try:
            for e in cfg.e:
                cfg.context(e)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    return cfg


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"status": "error", "exit": code, "type": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        return _fail(2, "UsageError", str(exc))
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    t = time.perf_counter()
    try:
        code = COMMANDS[cfg.command](cfg)
    except (ConvergenceError, AssumptionAError, DomainError, np.linalg.LinAlgError) as exc:
        return _fail(1, type(exc).__name__, str(exc))
    sys.stderr.write(f"{cfg.command}: done in {time.perf_counter() - t:.1f} s, output in {cfg.out}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
