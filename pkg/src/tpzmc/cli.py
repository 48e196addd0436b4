"""Command line: ``generate``, ``verify``, ``periods`` and ``limits``.

Settings come from built-in defaults, then an optional INI file (section
``[run]``), then command-line flags.  Reports are JSON with sorted keys and
contain no timings unless ``--timings`` is given, so identical inputs give
byte-identical outputs.
"""
import argparse
import configparser
from dataclasses import asdict, dataclass, fields
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import families as fam
from .errors import ParameterError, PreconditionError, TPZMCError
from .io import atomic_write, export_mesh
from .lattice import lattice_detect, periodicity_classify
from .mesh import (
    CAUSAL_NAMES,
    assemble,
    boundary_geometry,
    graph_mesh,
    lattice_from_group,
    piece_generators,
    sample_fundamental_piece,
    sample_sector_mesh,
    self_intersection_report,
    sheet_cover_ops,
    symmetry_group,
    translation_invariance,
)
from .verification import (
    HELICOID_AS,
    NODAL_AS,
    SUITES,
    family_periods,
    run_suite,
    scherk_extension_residual,
)

SCHEMA = "tpzmc-report/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    family: str = fam.SCHWARZ_H_ZMC
    a: float = 0.5
    k: int = 3
    n_radial: int = 16
    n_angular: int = 16
    n_v: int = 32
    depth: int = 1
    lattice_depth: int = 6
    quad_tol: float = 1e-10
    verify_tol: float = 1e-8
    weld_tol: float = 1e-7
    lattice_tol: float = 1e-6
    sign: int = 1
    out: str = ""
    report: str = ""
    seed: int = 0
    suite: str = "all"
    timings: bool = False
    self_intersections: bool = False

    def validate(self):
        if self.family not in fam.FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        for name in ("quad_tol", "verify_tol", "weld_tol", "lattice_tol"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.sign not in (1, -1):
            raise ParameterError("sign must be +1 or -1")
        if self.depth < 0:
            raise ParameterError("depth must be non-negative")

    @property
    def parameter(self):
        if self.family in (fam.KARCHER_TOWER, fam.KARCHER_MAXFACE):
            return self.k
        if self.family == fam.SCHERK_ZMC:
            return 2
        return self.a


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _coerce(field_type, raw):
    if field_type is bool:
        return _BOOL[str(raw).strip().lower()]
    if field_type is int:
        return int(raw)
    if field_type is float:
        return float(raw)
    return str(raw)


def load_config(path=None, overrides=None):
    cfg = RunConfig()
    types = {f.name: f.type if isinstance(f.type, type) else eval(f.type) for f in fields(RunConfig)}
    if path:
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise ParameterError(f"cannot read config file {path!r}")
        section = parser["run"] if parser.has_section("run") else parser.defaults()
        for key, raw in section.items():
            key = key.replace("-", "_")
            if key not in types:
                raise ParameterError(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(types[key], raw))
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, _coerce(types[key], value))
    cfg.validate()
    return cfg


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def dump_report(report):
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def _base_report(command, cfg):
    return {"schema": SCHEMA, "version": __version__, "command": command, "config": asdict(cfg),
            "seed": cfg.seed}


def _lattice_dict(lat):
    return {"rank": lat.rank, "basis": lat.basis, "residual": lat.residual,
            "classification": periodicity_classify(lat).value}


def _mesh_stats(mesh):
    counts = {CAUSAL_NAMES[c]: int(np.sum(mesh.causal == c)) for c in sorted(CAUSAL_NAMES)}
    return {"vertices": mesh.n_vertices, "faces": mesh.n_faces, "causal_faces": counts,
            "copies": int(len(np.unique(mesh.copy))) if mesh.n_faces else 0}


# --------------------------------------------------------------------------
# commands


def _generate_zmc(cfg, report):
    piece = sample_fundamental_piece(cfg.a, cfg.n_radial, cfg.n_angular, None, cfg.n_v,
                                     tol=cfg.quad_tol, weld_tol=cfg.weld_tol)
    gens = piece_generators(piece)
    ops = symmetry_group(gens, cfg.depth)
    mesh = assemble(piece.mesh, ops, cfg.weld_tol)
    lat = lattice_from_group(symmetry_group(gens, cfg.lattice_depth), tol=cfg.lattice_tol)
    geo = boundary_geometry(piece)
    report["weld_gaps"] = piece.weld_gaps
    report["boundary"] = {k: {"kind": v["kind"], "residual": v["residual"], **({"causal": v["causal"]} if "causal" in v else {})}
                          for k, v in geo.items()}
    report["generators"] = [{"kind": g.kind, "linear": g.linear, "translation": g.translation} for g in gens]
    report["lattice"] = _lattice_dict(lat)
    inv = translation_invariance(mesh, ops, lat.basis)
    report["lattice_invariance"] = {str(i): {"max_distance": d, "matched_copies": n} for i, (d, n) in inv.items()}
    return mesh


def _generate_cover(cfg, spec, report):
    sample = sample_sector_mesh(spec.data, cfg.n_radial, cfg.n_angular, tol=cfg.quad_tol)
    ops, residuals = sheet_cover_ops(spec.data, sample, fam.psi_symmetries(), depth=cfg.depth)
    report["curve_symmetry_fit"] = residuals
    report["lattice"] = _lattice_dict(lattice_detect(family_periods(spec), tol=cfg.lattice_tol))
    return assemble(sample.mesh, ops, cfg.weld_tol)


def cmd_generate(cfg):
    report = _base_report("generate", cfg)
    spec = fam.family_spec(cfg.family, cfg.parameter)
    report["family"] = {"id": spec.family, "parameter": spec.parameter, "domain": spec.domain}
    t0 = time.perf_counter()
    if cfg.family == fam.SCHWARZ_H_ZMC:
        mesh = _generate_zmc(cfg, report)
    elif cfg.family in (fam.SCHWARZ_H_ZMC_CONJ, fam.SCHWARZ_H_R3):
        mesh = _generate_cover(cfg, spec, report)
    elif cfg.family == fam.SCHERK_ZMC:
        mesh = graph_mesh(fam.scherk_graph, 1.5, 3 * cfg.n_radial)
        res, lam, count = scherk_extension_residual(100, np.random.default_rng(cfg.seed))
        report["graph_check"] = {"max_residual": res, "fitted_scale": lam, "samples": count}
    elif cfg.family == fam.RPD:
        outer = 0.9 * min(cfg.a, 1.0 / cfg.a)
        mesh = sample_sector_mesh(spec.data, cfg.n_radial, cfg.n_angular, outer=outer, tol=cfg.quad_tol).mesh
        report["lattice"] = _lattice_dict(lattice_detect(family_periods(spec), tol=cfg.lattice_tol))
    else:  # Karcher tower / Karcher-type maxface: disc inside the punctures
        mesh = sample_sector_mesh(spec.data, cfg.n_radial, 6 * cfg.n_angular, angle=2 * np.pi,
                                  outer=0.9, tol=cfg.quad_tol).mesh
        mesh = assemble(mesh, symmetry_group([], 0), cfg.weld_tol)
        report["lattice"] = _lattice_dict(lattice_detect(family_periods(spec), tol=cfg.lattice_tol))
    report["mesh"] = _mesh_stats(mesh)
    if cfg.self_intersections:
        report["self_intersections"] = self_intersection_report(mesh)
    if cfg.timings:
        report["timings"] = {"generate_seconds": time.perf_counter() - t0}
    if cfg.out:
        for path in cfg.out.split(","):
            export_mesh(mesh, path.strip())
        report["outputs"] = [p.strip() for p in cfg.out.split(",")]
    report["status"] = "pass"
    return report, EXIT_OK


def cmd_verify(cfg):
    report = _base_report("verify", cfg)
    suites = SUITES if cfg.suite == "all" else tuple(s.strip() for s in cfg.suite.split(","))
    for s in suites:
        if s not in SUITES:
            raise PreconditionError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    results = {}
    ok = True
    t0 = time.perf_counter()
    for s in suites:
        checks = run_suite(s, cfg.family, cfg.parameter, seed=cfg.seed)
        results[s] = {"passed": all(c.passed for c in checks), "checks": [c.to_dict() for c in checks]}
        ok &= results[s]["passed"]
    report["suites"] = results
    report["failed_checks"] = [f"{s}:{c['name']}" for s in suites for c in results[s]["checks"] if not c["passed"]]
    if cfg.timings:
        report["timings"] = {"verify_seconds": time.perf_counter() - t0}
    report["status"] = "pass" if ok else "fail"
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_periods(cfg):
    report = _base_report("periods", cfg)
    spec = fam.family_spec(cfg.family, cfg.parameter)
    periods = family_periods(spec)
    lat = lattice_detect(periods, tol=cfg.lattice_tol)
    report["family"] = {"id": spec.family, "parameter": spec.parameter}
    report["periods"] = periods
    report["lattice"] = _lattice_dict(lat)
    if cfg.family == fam.SCHWARZ_H_ZMC:
        piece = sample_fundamental_piece(cfg.a, cfg.n_radial, cfg.n_angular, None, cfg.n_v, tol=cfg.quad_tol)
        glat = lattice_from_group(symmetry_group(piece_generators(piece), cfg.lattice_depth), tol=cfg.lattice_tol)
        report["zmc_lattice"] = _lattice_dict(glat)
    report["status"] = "pass"
    return report, EXIT_OK


def cmd_limits(cfg):
    report = _base_report("limits", cfg)
    hel = {repr(a): fam.helicoid_limit_deviation(a) for a in HELICOID_AS + (0.01,)}
    samples = fam.nodal_circle(0.5)
    nod = {repr(a): fam.nodal_limit_comparison(a, samples, sign=cfg.sign) for a in NODAL_AS}
    res, lam, count = scherk_extension_residual(100, np.random.default_rng(cfg.seed))
    hv = [hel[repr(a)] for a in HELICOID_AS]
    nv = [nod[repr(a)] for a in NODAL_AS]
    checks = {
        "helicoid_decreasing": all(x > y for x, y in zip(hv, hv[1:])),
        "nodal_decreasing": all(x > y for x, y in zip(nv, nv[1:])),
        "scherk_residual_below_1e-6": res <= 1e-6,
    }
    report["helicoid"] = hel
    report["nodal"] = {"samples": "|zeta| = 0.5, 24 points", "sign": cfg.sign, "deviation": nod}
    report["scherk"] = {"max_residual": res, "fitted_scale": lam, "samples": count}
    report["checks"] = checks
    ok = all(checks.values())
    report["status"] = "pass" if ok else "fail"
    return report, EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"generate": cmd_generate, "verify": cmd_verify, "periods": cmd_periods, "limits": cmd_limits}


def build_parser():
    p = argparse.ArgumentParser(prog="tpzmc", description="Triply periodic ZMC surfaces of H type.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="INI file with a [run] section")
        s.add_argument("--family", choices=fam.FAMILIES)
        s.add_argument("--a", type=float)
        s.add_argument("--k", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--report", help="write the JSON report here (default: stdout)")
        s.add_argument("--timings", action="store_const", const=True)
        s.add_argument("--quad-tol", dest="quad_tol", type=float)
        s.add_argument("--lattice-tol", dest="lattice_tol", type=float)
        s.add_argument("--n-radial", dest="n_radial", type=int)
        s.add_argument("--n-angular", dest="n_angular", type=int)
        s.add_argument("--n-v", dest="n_v", type=int)
        s.add_argument("--lattice-depth", dest="lattice_depth", type=int)
        if name == "generate":
            s.add_argument("--depth", type=int)
            s.add_argument("--out", help="mesh path(s), comma separated; .obj or .ply")
            s.add_argument("--weld-tol", dest="weld_tol", type=float)
            s.add_argument("--self-intersections", dest="self_intersections", action="store_const", const=True)
        if name == "verify":
            s.add_argument("--suite", help="suite name, comma list, or 'all'")
            s.add_argument("--verify-tol", dest="verify_tol", type=float)
        if name == "limits":
            s.add_argument("--sign", type=int, choices=(1, -1))
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    report_path = args.report
    try:
        cfg = load_config(args.config, overrides)
        report_path = cfg.report or report_path
        report, code = COMMANDS[args.command](cfg)
    except TPZMCError as exc:
        code = EXIT_USAGE if isinstance(exc, (ParameterError, PreconditionError)) else EXIT_FAIL
        report = {"schema": SCHEMA, "version": __version__, "command": args.command, "status": "error",
                  "error": {"category": exc.category, "message": str(exc)}}
    text = dump_report(report)
    if report_path:
        atomic_write(report_path, text)
    else:
        sys.stdout.write(text)
    if report.get("status") == "error":
        print(f"tpzmc: {report['error']['category']}: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
