"""Command-line driver: ``generate | verify | export | report``.

Every run is described by a JSON config; flags override single entries::

    {
      "family": {"family": "param_family", "c": [0, 0], "k": [1, 0], "r": 1},
      "grid": {"u_min": -1, "u_max": 1, "v_min": -1, "v_max": 1, "nu": 101, "nv": 101},
      "tolerances": {"fd": 5e-4},
      "checks": ["spherical", "isotropic"],
      "out": "run1",
      "projection": "drop-t"
    }

Instead of ``family`` a config may name ``inputs``: a generators CSV written
by ``generate`` (columns x, y, mu). Exit status: 0 when every requested
check passes, 1 when some check fails, 2 on configuration or domain errors.
"""

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import gallery, holomin, surface
from .errors import ConfigError, NonHolomorphicError, SurfaceError, UnwrapError
from .grid import FLOAT_FMT, Grid, read_fields_csv, write_fields_csv
from .lightcone import w_vector
from .residuals import ConditionEntry, ConditionReport, Tolerances, residual_stats

HOLOMORPHIC_CHECKS = ("ode", "mobius", "theta", "argument")
KNOWN_CHECKS = surface.ALL_CHECKS + HOLOMORPHIC_CHECKS
PROJECTIONS = ("drop-t", "drop-x4", "central")
EPS_CENTRAL = 1e-9


@dataclass
class RunConfig:
    family: Optional[object] = None
    inputs: Optional[Path] = None
    grid: Optional[Grid] = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    checks: List[str] = field(default_factory=lambda: list(surface.STABLE_KEYS))
    out: Path = Path("out")
    projection: str = "drop-t"


def _parse_grid(spec, base: Optional[Grid]) -> Grid:
    if isinstance(spec, dict):
        doc = dict(base.to_dict()) if base is not None else {}
        doc.update(spec)
        try:
            return Grid(float(doc["u_min"]), float(doc["u_max"]), float(doc["v_min"]),
                        float(doc["v_max"]), int(doc["nu"]), int(doc["nv"]))
        except KeyError as exc:
            raise ConfigError(f"grid is missing {exc.args[0]!r}") from None
    if isinstance(spec, str):
        try:
            nu, nv = (int(t) for t in spec.lower().split("x"))
        except ValueError:
            raise ConfigError(f"grid must look like NUxNV, got {spec!r}") from None
        if base is None:
            return Grid(-1.0, 1.0, -1.0, 1.0, nu, nv)
        return Grid(base.u_min, base.u_max, base.v_min, base.v_max, nu, nv)
    raise ConfigError(f"cannot read grid spec {spec!r}")


def _parse_checks(value) -> List[str]:
    names = value.split(",") if isinstance(value, str) else list(value)
    names = [n.strip() for n in names if n.strip()]
    unknown = [n for n in names if n not in KNOWN_CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; known: {list(KNOWN_CHECKS)}")
    return names


def load_config(path=None, out=None, grid=None, tolerances=(), checks=None) -> RunConfig:
    """Read the JSON config and apply flag overrides."""
    doc = {}
    root = Path(".")
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        root = path.parent
    unknown = set(doc) - {"family", "inputs", "grid", "tolerances", "checks", "out", "projection"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    cfg = RunConfig()
    if "family" in doc:
        fam = doc["family"]
        cfg.family = gallery.family_from_dict({"family": fam} if isinstance(fam, str) else fam)
    if "inputs" in doc:
        cfg.inputs = (root / doc["inputs"]).resolve()
        if not cfg.inputs.exists():
            raise ConfigError(f"input file {cfg.inputs} does not exist")
    if cfg.family is not None and cfg.inputs is not None:
        raise ConfigError("give either 'family' or 'inputs', not both")
    base = gallery.default_grid(cfg.family) if cfg.family is not None else None
    if "grid" in doc:
        base = _parse_grid(doc["grid"], base)
    if grid is not None:
        base = _parse_grid(grid, base)
    cfg.grid = base
    tol = dict(doc.get("tolerances", {}))
    for item in tolerances:
        if "=" not in item:
            raise ConfigError(f"--tolerance expects NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        tol[k.strip()] = v
    try:
        cfg.tolerances = Tolerances().override(**{k: float(v) for k, v in tol.items()})
    except KeyError as exc:
        raise ConfigError(f"unknown tolerance {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ConfigError(f"bad tolerance value: {exc}") from None
    if "checks" in doc:
        cfg.checks = _parse_checks(doc["checks"])
    if checks is not None:
        cfg.checks = _parse_checks(checks)
    if "out" in doc:
        cfg.out = root / doc["out"]
    if out is not None:
        cfg.out = Path(out)
    cfg.projection = doc.get("projection", cfg.projection)
    if cfg.projection not in PROJECTIONS:
        raise ConfigError(f"unknown projection {cfg.projection!r}; known: {list(PROJECTIONS)}")
    return cfg


def load_generators(cfg: RunConfig) -> surface.SurfaceGenerators:
    if cfg.family is not None:
        return gallery.build(cfg.family, cfg.grid).generators
    if cfg.inputs is not None:
        grid, cols = read_fields_csv(cfg.inputs, ["x", "y", "mu"])
        return surface.SurfaceGenerators(cols["x"], cols["y"], cols["mu"],
                                         provenance={"inputs": cfg.inputs.name})
    raise ConfigError("config needs a 'family' or an 'inputs' file")


def _family_doc(cfg):
    if cfg.family is not None:
        return gallery.family_to_dict(cfg.family)
    return {"inputs": cfg.inputs.name}


def cmd_generate(cfg: RunConfig) -> int:
    """Write generators.csv (x, y, mu, theta) and frame.csv (f, nu, f_u, f_v, alpha, beta, F)."""
    gen = load_generators(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    g = gen.grid
    theta = np.angle(gen.mu.values)
    write_fields_csv(cfg.out / "generators.csv", g,
                     {"x": gen.x.values, "y": gen.y.values, "mu": gen.mu.values, "theta": theta},
                     mask=gen.mask)
    frame = surface.assemble_frame(gen, cfg.tolerances)
    write_fields_csv(cfg.out / "frame.csv", g,
                     {"f": frame.f, "nu": frame.nu, "f_u": frame.f_u, "f_v": frame.f_v,
                      "alpha": frame.alpha, "beta": frame.beta, "F": frame.F},
                     mask=frame.mask)
    meta = {"source": _family_doc(cfg), "grid": g.to_dict(), "derivatives": frame.derivative_method}
    (cfg.out / "provenance.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return 0


def _failed_entry(name, tol, message):
    e = ConditionEntry(name, tol)
    e.notes["error"] = message
    e.add("error", residual_stats(np.array([np.nan])))
    return e


def holomorphic_checks(gen, names, tol: Tolerances) -> ConditionReport:
    rep = ConditionReport()
    if "ode" in names:
        try:
            rep.add(holomin.ode_residual(gen.x, gen.y, tol))
        except NonHolomorphicError as exc:
            rep.add(_failed_entry("ode", tol.fd, str(exc)))
    if "mobius" in names:
        rep.add(holomin.mobius_fit(gen.x, gen.y, tol).to_entry())
    if "theta" in names or "argument" in names:
        try:
            theta, entry = holomin.theta_from_mu(gen.mu, gen.x, gen.y, tol)
        except UnwrapError as exc:
            for n in ("theta", "argument"):
                if n in names:
                    rep.add(_failed_entry(n, tol.fd, str(exc)))
            return rep
        if "theta" in names:
            rep.add(entry)
        if "argument" in names:
            rep.add(holomin.argument_condition_residual(theta, gen.x, gen.y, tol))
    return rep


def run_checks(gen, cfg: RunConfig) -> ConditionReport:
    surf = [c for c in cfg.checks if c in surface.ALL_CHECKS]
    rep = surface.verify(gen, surf, cfg.tolerances) if surf else ConditionReport()
    rep.update(holomorphic_checks(gen, [c for c in cfg.checks if c in HOLOMORPHIC_CHECKS],
                                  cfg.tolerances))
    return rep


def cmd_verify(cfg: RunConfig) -> int:
    """Write report.json; exit 0 iff every requested check passes."""
    gen = load_generators(cfg)
    rep = run_checks(gen, cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    text = rep.to_json(source=_family_doc(cfg), grid=gen.grid.to_dict(),
                       requested=list(cfg.checks), tolerances=dict(sorted(cfg.tolerances.__dict__.items())))
    (cfg.out / "report.json").write_text(text + "\n")
    return 0 if rep.passed else 1


def project(f, name):
    """Project points of R^4_1 to R^3; returns (points, valid mask)."""
    f = np.asarray(f)
    valid = np.all(np.isfinite(f), axis=-1)
    if name == "drop-t":
        return f[..., 1:], valid
    if name == "drop-x4":
        return f[..., :3], valid
    if name == "central":
        den = 1.0 + f[..., 0]
        ok = valid & (den > EPS_CENTRAL)
        if np.any(valid & ~ok):
            warnings.warn(f"central projection: {int(np.sum(valid & ~ok))} nodes with 1 + x1 <= "
                          f"{EPS_CENTRAL} masked", RuntimeWarning, stacklevel=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            return f[..., 1:] / den[..., None], ok
    raise ConfigError(f"unknown projection {name!r}; known: {list(PROJECTIONS)}")


def write_obj(path, grid: Grid, points, mask, comment=""):
    """ASCII OBJ: one vertex per node (u slowest), two triangles per valid quad."""
    nu, nv = grid.shape
    lines = [f"# {comment}" if comment else "# surface mesh", f"# grid {nu}x{nv}"]
    for i in range(nu):
        for j in range(nv):
            p = points[i, j] if mask[i, j] else (0.0, 0.0, 0.0)
            lines.append("v " + " ".join(FLOAT_FMT.format(float(c)) for c in p))
    nfaces = 0
    for i in range(nu - 1):
        for j in range(nv - 1):
            if mask[i, j] and mask[i + 1, j] and mask[i + 1, j + 1] and mask[i, j + 1]:
                a, b = i * nv + j + 1, (i + 1) * nv + j + 1
                lines.append(f"f {a} {b} {b + 1}")
                lines.append(f"f {a} {b + 1} {a + 1}")
                nfaces += 2
    Path(path).write_text("\n".join(lines) + "\n")
    return nu * nv, nfaces


def cmd_export(cfg: RunConfig) -> int:
    """Write mesh.obj of f projected to R^3."""
    gen = load_generators(cfg)
    m = gen.mask
    W = w_vector(np.where(m, gen.x.values, 0), np.where(m, gen.y.values, 1))
    f = np.where(m[..., None], (gen.mu.values[..., None] * W).real, np.nan)
    pts, ok = project(f, cfg.projection)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_obj(cfg.out / "mesh.obj", gen.grid, pts, ok & m, f"projection {cfg.projection}")
    return 0


def cmd_report(cfg: RunConfig) -> int:
    """Print a table of an existing report.json (running verify first if absent)."""
    path = cfg.out / "report.json"
    if not path.exists():
        cmd_verify(cfg)
    doc = json.loads(path.read_text())
    rows = []
    for name, e in sorted(doc["checks"].items()):
        rel = e["relative_max"]
        rel_s = "nan" if rel is None else f"{rel:.3e}"
        status = "PASS" if e["pass"] else "FAIL"
        if not e.get("applicable", True):
            status = "n/a"
        rows.append(f"{name:<16} {status:<5} relative_max={rel_s:<10} tolerance={e['tolerance']:.3e}")
    rows.append(f"overall: {'PASS' if doc['pass'] else 'FAIL'}")
    text = "\n".join(rows) + "\n"
    (cfg.out / "report.txt").write_text(text)
    sys.stdout.write(text)
    return 0 if doc["pass"] else 1


COMMANDS = {"generate": cmd_generate, "verify": cmd_verify, "export": cmd_export,
            "report": cmd_report}


def build_parser():
    p = argparse.ArgumentParser(prog="timelike", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE",
                   help="override a tolerance (repeatable)")
    p.add_argument("--grid", help="node counts NUxNV (keeps the configured domain)")
    p.add_argument("--checks", help="comma-separated check names")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.out, args.grid, args.tolerance, args.checks)
        return COMMANDS[args.command](cfg)
    except SurfaceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
