"""Command-line driver: ``hopfion solve | verify | sweep | export``.

Every option can also come from a flat ``key = value`` config file given by
``--config``; keys are the long option names without dashes (``hopf-grid``
or ``hopf_grid``).  Flags on the command line override the file.

Exit codes: 0 success, 1 runtime failure (including failed checks), 2 invalid
configuration.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .ansatz import (
    ETA_MAX,
    HopfionSolution,
    IntegrationConstants,
    ProfileError,
    SpecError,
    build_solution,
    general_profile,
    validate_spec,
)
from .dynamics import eom_residual, sample_region
from .energetics import energy_closed, energy_grid, energy_profile, energy_reduced
from .io import fmt, write_csv, write_profile_table, write_vtk_structured_points
from .topology import analytic_charges, analytic_vk_ratio, hopf_numeric, vk_bound
from .verify import boundary_residual, run_suite

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

DEFAULTS = {
    "alpha": "0.75",
    "m": "2",
    "n": "1",
    "a": "1",
    "tol": None,
    "grid": "256,64,8",
    "hopf_grid": "128,64,64",
    "out": None,
    "quick": "false",
    "k": None,
    "l": None,
    "anchor": "0",
    "perturb": "0",
    "box": None,
    "res": None,
    "format": None,
    "jobs": "1",
    "product": "false",
    "rows": "400",
}

SWEEP_COLUMNS = (
    "index",
    "N",
    "alpha",
    "m",
    "n",
    "a",
    "q",
    "q_constant",
    "e_closed",
    "e_reduced",
    "e_profile",
    "e_grid",
    "Q_analytic",
    "Q_numeric",
    "vk_bound",
    "vk_ratio",
    "vk_ratio_analytic",
    "eom_residual",
    "error",
)


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------- config


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment.  Errors cite path:line."""
    out: dict[str, str] = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config file: {exc.strerror}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in out:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = val
    return out


def _floats(text: str, key: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{key}: values must be finite, got {text!r}")
    return vals


def _ints(text: str, key: str) -> tuple[int, ...]:
    vals = _floats(text, key)
    if not all(v.is_integer() for v in vals):
        raise ConfigError(f"{key}: windings must be integers, got {text!r}")
    return tuple(int(v) for v in vals)


def _bool(text, key) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _triple(text: str, key: str) -> tuple[int, int, int]:
    vals = _ints(text, key)
    if len(vals) != 3 or min(vals) < 1:
        raise ConfigError(f"{key}: expected three positive integers 'a,b,c', got {text!r}")
    return vals


def _scalar(text: str, key: str, positive: bool = False, integer: bool = False) -> float:
    vals = _floats(text, key)
    if len(vals) != 1:
        raise ConfigError(f"{key}: expected a single number, got {text!r}")
    v = vals[0]
    if positive and not v > 0:
        raise ConfigError(f"{key}: must be positive, got {text!r}")
    if integer:
        if not v.is_integer():
            raise ConfigError(f"{key}: must be an integer, got {text!r}")
        return int(v)
    return v


@dataclass
class RunConfig:
    command: str
    raw: dict

    def get(self, key):
        return self.raw.get(key)

    def flag(self, key) -> bool:
        return _bool(self.raw.get(key), key)

    def spec(self):
        r = self.raw
        if any(";" in str(r[k]) for k in ("alpha", "m", "n", "a")):
            raise ConfigError("';'-separated alternatives are only accepted by 'sweep'")
        return _spec(r["alpha"], r["m"], r["n"], r["a"])

    def triple(self, key):
        return _triple(self.raw[key], key)


def _spec(alpha, m, n, a):
    try:
        return validate_spec(_floats(alpha, "alpha"), _ints(m, "m"), _ints(n, "n"), _scalar(a, "a"))
    except SpecError as exc:
        raise ConfigError(str(exc)) from None


def merge_config(ns: argparse.Namespace) -> RunConfig:
    raw = dict(DEFAULTS)
    if ns.config:
        raw.update(read_config(ns.config))
    for key in DEFAULTS:
        val = getattr(ns, key, None)
        if val is not None:
            raw[key] = val
    return RunConfig(ns.command, raw)


# --------------------------------------------------------------------------- commands


def _constants_from_config(cfg: RunConfig, spec) -> IntegrationConstants | None:
    if cfg.get("k") is None:
        if cfg.get("l") is not None:
            raise ConfigError("l: given without k")
        return None
    k = _floats(cfg.get("k"), "k")
    if len(k) == 1:
        k = k * spec.N
    if len(k) != spec.N:
        raise ConfigError(f"k: need 1 or {spec.N} values, got {len(k)}")
    if any(not kk > 0 for kk in k):
        raise ConfigError("k: integration constants must be positive")
    l = (1.0,) * spec.N if cfg.get("l") is None else _floats(cfg.get("l"), "l")
    if len(l) == 1:
        l = l * spec.N
    if len(l) != spec.N:
        raise ConfigError(f"l: need 1 or {spec.N} values, got {len(l)}")
    return IntegrationConstants(k, l, _scalar(cfg.get("anchor"), "anchor"))


def _solution(cfg: RunConfig) -> HopfionSolution:
    spec = cfg.spec()
    consts = _constants_from_config(cfg, spec)
    if consts is None:
        return build_solution(spec)
    try:
        profiles = tuple(general_profile(spec, j, consts.k, consts.l[j], consts.anchor) for j in range(spec.N))
    except ProfileError as exc:
        raise ConfigError(f"k, l: {exc}") from None
    return HopfionSolution(spec, profiles, consts)


def _show(x) -> str:
    if isinstance(x, (tuple, list)):
        return ",".join(_show(v) for v in x)
    return repr(float(x)) if isinstance(x, float) else str(x)


def cmd_solve(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    sol = _solution(cfg)
    spec = sol.spec
    tol = 1e-8 if cfg.get("tol") is None else _scalar(cfg.get("tol"), "tol", positive=True)
    qr = sol.qratio
    print(f"N = {spec.N}  alpha = {_show(spec.alpha)}  m = {_show(spec.m)}  n = {_show(spec.n)}  a = {_show(spec.a)}", file=out)
    print(f"q = {_show(qr.q)}  constant |q| branch: {'yes' if qr.is_constant else 'no'}", file=out)
    print(f"profiles: {', '.join(p.kind for p in sol.profiles)}", file=out)
    c = sol.constants
    print(f"k = {_show(c.k)}", file=out)
    print(f"l = {_show(c.l)}", file=out)
    print(f"anchor = {_show(c.anchor)}", file=out)
    ok = True
    for j, prof in enumerate(sol.profiles):
        s0 = float(prof.s(0.0))
        s_inf = 1.0 - float(prof.one_minus_s(np.inf))
        r = boundary_residual(sol, j)
        good = r < tol
        ok &= good
        print(f"{'PASS' if good else 'FAIL'}  boundary field {j + 1}: s(0) = {s0:.3e}, s(inf) = {s_inf:.17g}  (tol {tol:.1e})", file=out)
    path = cfg.get("out")
    if path:
        rows = _scalar(cfg.get("rows"), "rows", positive=True, integer=True)
        if cfg.flag("quick"):
            rows = min(rows, 50)
        eta = np.concatenate([[0.0], np.geomspace(1e-4, ETA_MAX, max(rows - 1, 1))])
        s = np.stack([p.s(eta) for p in sol.profiles])
        with open(path, "w") as fh:
            header = [
                f"alpha = {fmt(spec.alpha)}; m = {fmt(spec.m)}; n = {fmt(spec.n)}; a = {fmt(spec.a)}",
                f"k = {fmt(c.k)}; l = {fmt(c.l)}; anchor = {fmt(c.anchor)}",
                "s = 1/(1+f^2)",
            ]
            write_profile_table(fh, eta, s, header)
        print(f"profile table written to {path}", file=out)
    return EXIT_OK if ok else EXIT_RUNTIME


def cmd_verify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    sol = _solution(cfg)
    tols = {}
    if cfg.get("tol") is not None:
        tols["eom"] = _scalar(cfg.get("tol"), "tol", positive=True)
    perturb = _scalar(cfg.get("perturb"), "perturb")
    res = run_suite(
        sol,
        tols,
        quick=cfg.flag("quick"),
        grid=cfg.triple("grid"),
        hopf_grid=cfg.triple("hopf_grid"),
        perturb=perturb,
    )
    for c in res.checks:
        print(c.line(), file=out)
    failed = [c for c in res.checks if c.gating and not c.passed]
    print(f"{len(res.checks) - len(failed)}/{len(res.checks)} checks passed or informational in {res.elapsed:.2f} s", file=out)
    if failed:
        for c in failed:
            print(f"verify: {c.name} failed: measured {c.value:.6e}, tolerance {c.tol:.1e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def sweep_points(cfg: RunConfig) -> list[tuple[str, str, str, str]]:
    """Parameter tuples from ';'-separated alternatives, zipped or as a product."""
    keys = ("alpha", "m", "n", "a")
    alts = []
    for k in keys:
        text = str(cfg.get(k)).strip()
        alts.append([t.strip() for t in text.split(";")] if text else [])
    if any(not a for a in alts):
        return []
    if cfg.flag("product"):
        return list(itertools.product(*alts))
    lengths = {len(a) for a in alts} - {1}
    if len(lengths) > 1:
        raise ConfigError(f"sweep: alternative lists have incompatible lengths {sorted(lengths)}; use --product")
    size = lengths.pop() if lengths else 1
    return [tuple(a[i] if len(a) > 1 else a[0] for a in alts) for i in range(size)]


def sweep_row(args) -> dict:
    index, point, quick, grid, hopf_grid = args
    row = {"index": index}
    try:
        spec = _spec(*point)
        row.update(N=spec.N, alpha=spec.alpha, m=spec.m, n=spec.n, a=spec.a, q=spec.q)
        qr = spec.qratio
        row["q_constant"] = qr.is_constant
        sol = build_solution(spec)
        row["e_reduced"] = energy_reduced(spec, sol.constants)
        row["e_profile"] = energy_profile(sol)
        ref = row["e_reduced"]
        if qr.closed_form:
            row["e_closed"] = ref = energy_closed(spec)
            row["vk_ratio_analytic"] = analytic_vk_ratio(qr.abs_q)
        if not quick:
            row["e_grid"] = energy_grid(sol, *grid)
            row["Q_numeric"] = tuple(hopf_numeric(sol, i, hopf_grid) for i in range(spec.N))
        qa = analytic_charges(spec)
        row["Q_analytic"] = qa
        row["vk_bound"] = vk_bound(spec, qa)
        row["vk_ratio"] = ref / row["vk_bound"]
        pts = sample_region(20 if quick else 100)
        row["eom_residual"] = max(eom_residual(sol, j, pts).max_abs_residual for j in range(spec.N))
    except (ConfigError, SpecError, ProfileError, ArithmeticError, ValueError, RuntimeError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_sweep(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    points = sweep_points(cfg)
    quick = cfg.flag("quick")
    grid, hopf_grid = cfg.triple("grid"), cfg.triple("hopf_grid")
    jobs = _scalar(cfg.get("jobs"), "jobs", positive=True, integer=True)
    tasks = [(i, p, quick, grid, hopf_grid) for i, p in enumerate(points)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_row, tasks))
    else:
        rows = [sweep_row(t) for t in tasks]
    path = cfg.get("out")
    if path:
        with open(path, "w", newline="") as fh:
            write_csv(fh, SWEEP_COLUMNS, rows)
        print(f"{len(rows)} rows written to {path}", file=out)
    else:
        write_csv(out, SWEEP_COLUMNS, rows)
    bad = sum(1 for r in rows if r.get("error"))
    if bad:
        print(f"sweep: {bad} of {len(rows)} rows failed; see the error column", file=sys.stderr)
    return EXIT_OK


def cmd_export(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    from .fields import default_half_width, field_arrays, sample_box

    path = cfg.get("out")
    if not path:
        raise ConfigError("export: --out is required")
    fmt_name = cfg.get("format")
    if fmt_name is None:
        fmt_name = "csv" if str(path).lower().endswith(".csv") else "vtk"
    if fmt_name not in ("vtk", "csv"):
        raise ConfigError(f"format: expected 'vtk' or 'csv', got {fmt_name!r}")
    sol = _solution(cfg)
    a = sol.spec.a
    half = default_half_width(sol) if cfg.get("box") is None else _scalar(cfg.get("box"), "box", positive=True)
    default_res = 24 if cfg.flag("quick") else 64
    res = default_res if cfg.get("res") is None else _scalar(cfg.get("res"), "res", positive=True, integer=True)
    if res < 2:
        raise ConfigError("res: need at least 2 points per side")
    box = sample_box(sol, half, res)
    scalars, vectors = field_arrays(box)
    with open(path, "w", newline="") as fh:
        if fmt_name == "vtk":
            title = f"hopfion alpha={fmt(sol.spec.alpha)} m={fmt(sol.spec.m)} n={fmt(sol.spec.n)} a={fmt(a)}"
            write_vtk_structured_points(fh, box.dims, box.origin, box.spacing, scalars, vectors, title)
        else:
            X, Y, Z = np.meshgrid(*box.axes, indexing="ij")
            cols = {"x": X, "y": Y, "z": Z}
            for name, v in vectors.items():
                for c in range(3):
                    cols[f"{name}_{'xyz'[c]}"] = v[..., c]
            cols.update(scalars)
            # x fastest, matching the VTK point order
            flat = {k: np.asarray(v).transpose(2, 1, 0).ravel() for k, v in cols.items()}
            names = list(flat)
            rows = ({k: flat[k][p] for k in names} for p in range(res**3))
            write_csv(fh, names, rows)
    print(f"exported {res}^3 samples ({fmt_name}) to {path}", file=out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "sweep": cmd_sweep, "export": cmd_export}


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--alpha", help="comma-separated exponents, sum 3/4 (default 0.75)")
    g.add_argument("--m", help="comma-separated xi windings (default 2)")
    g.add_argument("--n", help="comma-separated phi windings (default 1)")
    g.add_argument("--a", help="toroidal scale a > 0 (default 1)")
    g.add_argument("--k", help="integration constants k_i (general profile)")
    g.add_argument("--l", help="integration constants l_i (default 1)")
    g.add_argument("--anchor", help="antiderivative value at infinity (default 0)")
    r = common.add_argument_group("run")
    r.add_argument("--config", help="flat key = value file; flags override it")
    r.add_argument("--tol", help="solve: boundary tolerance (1e-8); verify: residual tolerance (1e-5)")
    r.add_argument("--grid", help="energy grid n_eta,n_xi,n_phi (default 256,64,8)")
    r.add_argument("--hopf-grid", dest="hopf_grid", help="Hopf grid n_eta,n_xi,n_phi (default 128,64,64)")
    r.add_argument("--out", help="output path")
    r.add_argument("--quick", action="store_const", const="true", help="skip the 3-D grid checks")
    r.add_argument("--perturb", help="verify with f -> f (1 + eps sin eta)")
    r.add_argument("--rows", help="rows in the profile table (default 400)")
    r.add_argument("--box", help="export half-width L of the cube [-L, L]^3 (default: n3 = 0 torus plus 25%%)")
    r.add_argument("--res", help="export points per side (default 64, 24 with --quick)")
    r.add_argument("--format", choices=("vtk", "csv"), help="export format (default from suffix, else vtk)")
    r.add_argument("--jobs", help="sweep worker processes (default 1)")
    r.add_argument("--product", action="store_const", const="true", help="sweep the Cartesian product of alternatives")

    p = argparse.ArgumentParser(prog="hopfion", description="Toroidal hopfions of the O(3)^N sigma model.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="{solve,verify,sweep,export}")
    sub.add_parser("solve", parents=[common], help="build the solution and report constants")
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    sub.add_parser("sweep", parents=[common], help="energies and bounds over a parameter grid (';' separates alternatives)")
    sub.add_parser("export", parents=[common], help="write fields on a Cartesian box")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = merge_config(ns)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"hopfion {ns.command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        where = f": {exc.filename}" if exc.filename else ""
        print(f"hopfion {ns.command}: {exc.strerror or exc}{where}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"hopfion {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
