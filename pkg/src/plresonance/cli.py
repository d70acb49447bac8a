"""Configuration ingestion, run orchestration, and report emission.

Config files are line-oriented: ``[section]`` headers, ``key = value``
pairs, ``#`` comment lines.  Expression values are quoted strings so the
format stays trivially diffable.  Four subcommands share the format:

* ``eig``       computes the first eigenpair.
* ``check``     eigenpair + hypothesis report.
* ``geometry``  eigenpair + mountain-pass geometry certificate.
* ``solve``     full pipeline: eig -> check -> geometry -> mountain pass
                -> verification, aborting at the first failed stage.

Exit codes: 0 success, 1 usage or config error, 2 hypothesis failure,
3 geometry failure, 4 non-convergence.  Every stage that started leaves
a status object in report.json, which is byte-reproducible for a fixed
config and seed except for its timestamp field.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import expr as ex
from .eigen import ConvergenceError, compute_first_eigenpair
from .functional import ProblemSpec, SpecError, cerami_measure, energy
from .hypotheses import PASS, SamplePlan, check_all
from .mesh import BCKind, build_interval_mesh, build_rectangle_mesh, sobolev_norm_1p, write_field_csv
from .mpsolve import (
    DegeneratePathError,
    GeometryCertificateError,
    LowPointNotFound,
    certify_ring,
    mountain_pass,
    verify_solution,
)

__all__ = ["RunConfig", "ConfigError", "load_config", "run", "main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_HYPOTHESES = 2
EXIT_GEOMETRY = 3
EXIT_NONCONVERGED = 4


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# Raw file parsing


def _parse_config_text(text: str) -> dict:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            if name in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{name}]")
            current = {}
            sections[name] = current
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside of any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        current[key] = (value, lineno)
    return sections


# --------------------------------------------------------------------------
# Typed config


@dataclass
class DomainConfig:
    dimension: int
    xmin: float
    xmax: float
    n: int = 0
    ymin: float = 0.0
    ymax: float = 0.0
    nx: int = 0
    ny: int = 0


@dataclass
class ProblemConfig:
    p: float
    bc: BCKind
    f: str
    F: str | None = None
    g: str | None = None
    G: str | None = None
    consistency_u_min: float = -2.0
    consistency_u_max: float = 2.0


@dataclass
class HypothesesConfig:
    theta: str
    mu: str
    h: str
    a: str
    c1: float
    h_boundary: str | None = None
    u_min: float = 1e-6
    u_max: float = 1e6
    signs: str = "both"
    ll_u_min: float = 10.0
    ll_u_max: float = 1e6
    vanish_u_min: float = 10.0
    vanish_u_max: float = 1e6


@dataclass
class SolverConfig:
    eig_tol: float = 1e-10
    eig_max_iter: int = 50_000
    tol: float = 1e-6
    max_iter: int = 20_000
    path_nodes: int = 21
    rho_grid: tuple = (0.05, 0.1, 0.2, 0.5, 1.0)
    directions: int = 8
    sphere_steps: int = 30
    a_max: float = 1e3
    low_point_steps: int = 48
    seed: int = 0


@dataclass
class RunConfig:
    domain: DomainConfig
    problem: ProblemConfig
    hypotheses: HypothesesConfig | None
    solver: SolverConfig
    expressions: dict = field(default_factory=dict)  # key -> parsed Expression


def _take(section: dict, key: str, required: bool, section_name: str):
    if key not in section:
        if required:
            raise ConfigError(f"[{section_name}] missing required key '{key}'")
        return None
    value, _ = section.pop(key)
    return value


def _as_float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"key '{key}': expected a number, got {value!r}") from None


def _as_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"key '{key}': expected an integer, got {value!r}") from None


def _as_expr_text(value: str, key: str) -> str:
    if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
        return value[1:-1]
    raise ConfigError(f"key '{key}': expression values must be quoted strings")


def _reject_unknown(section: dict, name: str):
    if section:
        key = sorted(section)[0]
        _, lineno = section[key]
        raise ConfigError(f"line {lineno}: unknown key '{key}' in section [{name}]")


def load_config(path) -> RunConfig:
    """Parse and validate a config file; expressions are parsed eagerly."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    sections = _parse_config_text(text)

    for required_section in ("domain", "problem"):
        if required_section not in sections:
            raise ConfigError(f"missing required section [{required_section}]")
    known_sections = {"domain", "problem", "hypotheses", "solver"}
    for name in sections:
        if name not in known_sections:
            raise ConfigError(f"unknown section [{name}]")

    dom_raw = sections["domain"]
    dimension = _as_int(_take(dom_raw, "dimension", True, "domain"), "dimension")
    if dimension not in (1, 2):
        raise ConfigError("key 'dimension': must be 1 or 2")
    xmin = _as_float(_take(dom_raw, "xmin", True, "domain"), "xmin")
    xmax = _as_float(_take(dom_raw, "xmax", True, "domain"), "xmax")
    if dimension == 1:
        n = _as_int(_take(dom_raw, "n", True, "domain"), "n")
        if n < 2:
            raise ConfigError("key 'n': must be >= 2")
        domain = DomainConfig(dimension, xmin, xmax, n=n)
    else:
        ymin = _as_float(_take(dom_raw, "ymin", True, "domain"), "ymin")
        ymax = _as_float(_take(dom_raw, "ymax", True, "domain"), "ymax")
        nx = _as_int(_take(dom_raw, "nx", True, "domain"), "nx")
        ny = _as_int(_take(dom_raw, "ny", True, "domain"), "ny")
        if nx < 2 or ny < 2:
            raise ConfigError("key 'nx'/'ny': must be >= 2")
        domain = DomainConfig(dimension, xmin, xmax, ymin=ymin, ymax=ymax, nx=nx, ny=ny)
    if not xmax > xmin:
        raise ConfigError("key 'xmax': must exceed xmin")
    if dimension == 2 and not domain.ymax > domain.ymin:
        raise ConfigError("key 'ymax': must exceed ymin")
    _reject_unknown(dom_raw, "domain")

    prob_raw = sections["problem"]
    p_val = _as_float(_take(prob_raw, "p", True, "problem"), "p")
    if p_val < 2:
        raise ConfigError(f"key 'p': must satisfy p >= 2, got {p_val}")
    bc_text = _take(prob_raw, "bc", True, "problem")
    try:
        bc = BCKind(bc_text)
    except ValueError:
        raise ConfigError(f"key 'bc': must be 'dirichlet' or 'neumann', got {bc_text!r}") from None
    f_text = _as_expr_text(_take(prob_raw, "f", True, "problem"), "f")
    big_f_raw = _take(prob_raw, "F", False, "problem")
    big_f = None
    if big_f_raw is not None and big_f_raw != "numeric":
        big_f = _as_expr_text(big_f_raw, "F")
    g_text = None
    big_g = None
    if bc is BCKind.NEUMANN:
        g_text = _as_expr_text(_take(prob_raw, "g", True, "problem"), "g")
        big_g_raw = _take(prob_raw, "G", False, "problem")
        if big_g_raw is not None and big_g_raw != "numeric":
            big_g = _as_expr_text(big_g_raw, "G")
    else:
        for forbidden in ("g", "G"):
            if forbidden in prob_raw:
                _, lineno = prob_raw[forbidden]
                raise ConfigError(f"line {lineno}: key '{forbidden}' is only valid for bc = neumann")
    problem = ProblemConfig(p=p_val, bc=bc, f=f_text, F=big_f, g=g_text, G=big_g)
    for key in ("consistency_u_min", "consistency_u_max"):
        raw = _take(prob_raw, key, False, "problem")
        if raw is not None:
            setattr(problem, key, _as_float(raw, key))
    if not problem.consistency_u_max > problem.consistency_u_min:
        raise ConfigError("key 'consistency_u_max': must exceed consistency_u_min")
    _reject_unknown(prob_raw, "problem")

    hypotheses = None
    if "hypotheses" in sections:
        hyp_raw = sections["hypotheses"]
        theta = _as_expr_text(_take(hyp_raw, "theta", True, "hypotheses"), "theta")
        mu = _as_expr_text(_take(hyp_raw, "mu", True, "hypotheses"), "mu")
        h_text = _as_expr_text(_take(hyp_raw, "h", True, "hypotheses"), "h")
        a_text = _as_expr_text(_take(hyp_raw, "a", True, "hypotheses"), "a")
        c1 = _as_float(_take(hyp_raw, "c1", True, "hypotheses"), "c1")
        if c1 < 0:
            raise ConfigError("key 'c1': must be >= 0")
        hb_raw = _take(hyp_raw, "h_boundary", False, "hypotheses")
        h_boundary = None
        if hb_raw is not None:
            if bc is not BCKind.NEUMANN:
                raise ConfigError("key 'h_boundary' is only valid for bc = neumann")
            h_boundary = _as_expr_text(hb_raw, "h_boundary")
        kwargs = {}
        for key, conv, cond, why in (
            ("u_min", _as_float, lambda v: v > 0, "must be > 0"),
            ("u_max", _as_float, lambda v: v > 0, "must be > 0"),
            ("ll_u_min", _as_float, lambda v: v > 0, "must be > 0"),
            ("ll_u_max", _as_float, lambda v: v > 0, "must be > 0"),
            ("vanish_u_min", _as_float, lambda v: v > 0, "must be > 0"),
            ("vanish_u_max", _as_float, lambda v: v > 0, "must be > 0"),
        ):
            raw = _take(hyp_raw, key, False, "hypotheses")
            if raw is not None:
                val = conv(raw, key)
                if not cond(val):
                    raise ConfigError(f"key '{key}': {why}")
                kwargs[key] = val
        signs_raw = _take(hyp_raw, "signs", False, "hypotheses")
        if signs_raw is not None:
            if signs_raw not in ("both", "positive", "negative"):
                raise ConfigError("key 'signs': must be both, positive, or negative")
            kwargs["signs"] = signs_raw
        hypotheses = HypothesesConfig(theta=theta, mu=mu, h=h_text, a=a_text, c1=c1, h_boundary=h_boundary, **kwargs)
        _reject_unknown(hyp_raw, "hypotheses")

    solver = SolverConfig()
    if "solver" in sections:
        sol_raw = sections["solver"]
        floats = {"eig_tol": (lambda v: v > 0), "tol": (lambda v: v > 0), "a_max": (lambda v: v > 0)}
        for key, cond in floats.items():
            raw = _take(sol_raw, key, False, "solver")
            if raw is not None:
                val = _as_float(raw, key)
                if not cond(val):
                    raise ConfigError(f"key '{key}': must be positive")
                setattr(solver, key, val)
        ints = {
            "eig_max_iter": (lambda v: v >= 1),
            "max_iter": (lambda v: v >= 1),
            "path_nodes": (lambda v: v >= 3),
            "directions": (lambda v: v >= 1),
            "sphere_steps": (lambda v: v >= 1),
            "low_point_steps": (lambda v: v >= 2),
            "seed": (lambda v: True),
        }
        for key, cond in ints.items():
            raw = _take(sol_raw, key, False, "solver")
            if raw is not None:
                val = _as_int(raw, key)
                if not cond(val):
                    raise ConfigError(f"key '{key}': out of range")
                setattr(solver, key, val)
        rho_raw = _take(sol_raw, "rho_grid", False, "solver")
        if rho_raw is not None:
            try:
                grid = tuple(float(tok) for tok in rho_raw.split(",") if tok.strip())
            except ValueError:
                raise ConfigError("key 'rho_grid': expected comma-separated numbers") from None
            if not grid or any(r <= 0 for r in grid):
                raise ConfigError("key 'rho_grid': needs positive entries")
            solver.rho_grid = grid
        _reject_unknown(sol_raw, "solver")

    config = RunConfig(domain=domain, problem=problem, hypotheses=hypotheses, solver=solver)
    _parse_expressions(config)
    return config


def _parse_expressions(config: RunConfig):
    """Parse every expression eagerly so syntax errors surface up front."""
    spatial = {"x"} if config.domain.dimension == 1 else {"x", "y"}
    with_u = spatial | {"u"}
    slots = [("f", config.problem.f, with_u), ("F", config.problem.F, with_u)]
    if config.problem.bc is BCKind.NEUMANN:
        slots += [("g", config.problem.g, with_u), ("G", config.problem.G, with_u)]
    if config.hypotheses is not None:
        hyp = config.hypotheses
        slots += [
            ("theta", hyp.theta, spatial),
            ("mu", hyp.mu, spatial),
            ("a", hyp.a, spatial),
            ("h", hyp.h, {"t"}),
            ("h_boundary", hyp.h_boundary, spatial),
        ]
    for key, text, allowed in slots:
        if text is None:
            continue
        try:
            config.expressions[key] = ex.parse(text, allowed)
        except ex.ExprError as err:
            raise ConfigError(f"key '{key}': {err}") from None


# --------------------------------------------------------------------------
# Orchestration

_PIPELINES = {
    "eig": ("eig",),
    "check": ("eig", "check"),
    "geometry": ("eig", "geometry"),
    "solve": ("eig", "check", "geometry", "solve", "verify"),
}


def _build_mesh(domain: DomainConfig):
    if domain.dimension == 1:
        return build_interval_mesh(domain.xmin, domain.xmax, domain.n)
    return build_rectangle_mesh((domain.xmin, domain.xmax), (domain.ymin, domain.ymax), domain.nx, domain.ny)


def _sample_plan(config: RunConfig) -> SamplePlan:
    hyp = config.hypotheses
    signs = {"both": (1.0, -1.0), "positive": (1.0,), "negative": (-1.0,)}[hyp.signs]
    return SamplePlan(
        growth_range=(hyp.u_min, hyp.u_max),
        vanish_range=(hyp.vanish_u_min, hyp.vanish_u_max),
        ll_range=(hyp.ll_u_min, hyp.ll_u_max),
        signs=signs,
    )


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, BCKind):
        return value.value
    return value


def _write_report(out_dir: Path, report: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(_jsonable(report), fh, indent=2)
        fh.write("\n")


def _write_trace(out_dir: Path, history):
    with open(out_dir / "trace.csv", "w", encoding="utf-8") as fh:
        fh.write("iter,level,residual,cerami\n")
        for i, rec in enumerate(history, start=1):
            fh.write(f"{i},{float(rec.energy)!r},{float(rec.residual)!r},{float(rec.measure)!r}\n")


def run(subcommand: str, config: RunConfig, out_dir, seed: int | None = None) -> int:
    """Execute one pipeline and write report.json plus CSV artifacts."""
    if subcommand not in _PIPELINES:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    stages_needed = _PIPELINES[subcommand]
    out = Path(out_dir)
    run_seed = config.solver.seed if seed is None else int(seed)
    report = {
        "schema": 1,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "subcommand": subcommand,
        "seed": run_seed,
        "problem": {
            "p": config.problem.p,
            "bc": config.problem.bc.value,
            "dimension": config.domain.dimension,
        },
        "stages": {},
    }
    stages = report["stages"]
    try:
        if "check" in stages_needed and config.hypotheses is None:
            raise ConfigError(f"subcommand '{subcommand}' requires a [hypotheses] section")
        mesh = _build_mesh(config.domain)

        # --- eig
        stages["eig"] = {"status": "running"}
        try:
            eigenpair = compute_first_eigenpair(
                mesh,
                config.problem.p,
                config.problem.bc,
                seed=run_seed,
                tol=config.solver.eig_tol,
                max_iter=config.solver.eig_max_iter,
            )
        except ConvergenceError as err:
            stages["eig"] = {"status": "error", "message": str(err), **err.diagnostics}
            return EXIT_NONCONVERGED
        stages["eig"] = {
            "status": "ok",
            "lambda1": eigenpair.lambda1,
            "residual": eigenpair.residual,
            "iterations": eigenpair.iterations,
            "bc": eigenpair.bc_kind.value,
        }
        out.mkdir(parents=True, exist_ok=True)
        write_field_csv(eigenpair.u1, out / "u1.csv")
        if subcommand == "eig":
            return EXIT_OK

        exprs = config.expressions
        spec = ProblemSpec(
            mesh,
            config.problem.p,
            config.problem.bc,
            f_expr=exprs["f"],
            F_expr=exprs.get("F"),
            g_expr=exprs.get("g"),
            G_expr=exprs.get("G"),
            theta_expr=exprs.get("theta"),
            mu_expr=exprs.get("mu"),
            h_expr=exprs.get("h"),
            h_boundary_expr=exprs.get("h_boundary"),
            lambda1=eigenpair.lambda1,
            consistency_u_range=(config.problem.consistency_u_min, config.problem.consistency_u_max),
        )

        # --- check
        if "check" in stages_needed:
            stages["check"] = {"status": "running"}
            hyp_report = check_all(spec, eigenpair, exprs["a"], config.hypotheses.c1, _sample_plan(config))
            stages["check"] = {
                "status": "ok" if hyp_report.overall == PASS else "failed",
                "overall": hyp_report.overall,
                "clauses": [c.as_dict() for c in hyp_report.clauses],
            }
            if hyp_report.overall != PASS:
                stages["check"]["message"] = f"hypothesis check did not pass (overall: {hyp_report.overall})"
                return EXIT_HYPOTHESES
            if subcommand == "check":
                return EXIT_OK

        # --- geometry
        stages["geometry"] = {"status": "running"}
        try:
            cert = certify_ring(
                spec,
                eigenpair,
                config.solver.rho_grid,
                directions=config.solver.directions,
                seed=run_seed,
                a_max=config.solver.a_max,
                low_steps=config.solver.low_point_steps,
                sphere_steps=config.solver.sphere_steps,
            )
        except GeometryCertificateError as err:
            stages["geometry"] = {
                "status": "failed",
                "message": str(err),
                "ring_trace": [list(t) for t in err.ring_trace],
            }
            return EXIT_GEOMETRY
        except LowPointNotFound as err:
            stages["geometry"] = {
                "status": "failed",
                "message": str(err),
                "ray_scan": [list(t) for t in err.trace],
            }
            return EXIT_GEOMETRY
        stages["geometry"] = {
            "status": "ok",
            "rho": cert.rho,
            "a_estimate": cert.a_estimate,
            "e_energy": energy(spec, cert.e),
            "e_norm": sobolev_norm_1p(cert.e, spec.p),
            "sphere_samples": cert.sphere_samples,
            "ring_trace": [list(t) for t in cert.ring_trace],
            "ray_scan": [list(t) for t in cert.ray_trace],
        }
        if subcommand == "geometry":
            return EXIT_OK

        # --- solve
        stages["solve"] = {"status": "running"}
        try:
            result = mountain_pass(
                spec,
                cert.e,
                path_nodes=config.solver.path_nodes,
                tol=config.solver.tol,
                max_iter=config.solver.max_iter,
            )
        except DegeneratePathError as err:
            stages["solve"] = {"status": "error", "message": str(err)}
            return EXIT_NONCONVERGED
        stages["solve"] = {
            "status": "ok" if result.converged else "failed",
            "level": result.level,
            "residual": result.residual,
            "norm": result.norm,
            "iterations": result.iterations,
            "path_nodes": result.path_node_count,
            "converged": result.converged,
            "max_iterate_norm": result.max_iterate_norm,
            "ps_violation": result.ps_violation,
        }
        write_field_csv(result.u_star, out / "solution.csv")
        _write_trace(out, result.cerami_history)
        report["cerami_history"] = [
            {"energy": r.energy, "residual": r.residual, "measure": r.measure, "norm": r.norm}
            for r in result.cerami_history
        ]
        if not result.converged:
            stages["solve"]["message"] = "mountain pass did not reach the requested residual"
            return EXIT_NONCONVERGED

        # --- verify
        stages["verify"] = {"status": "running"}
        record = verify_solution(spec, result.u_star, tol=config.solver.tol)
        final = cerami_measure(spec, result.u_star)
        stages["verify"] = {
            "status": "ok" if record.passed else "failed",
            "passed": record.passed,
            "residual": record.residual,
            "level": record.level,
            "norm": record.norm,
            "nontrivial": record.nontrivial,
            "cerami_measure": final.measure,
        }
        if not record.passed:
            return EXIT_NONCONVERGED
        return EXIT_OK
    except (ConfigError, SpecError, ex.ExprError) as err:
        report["error"] = str(err)
        raise
    finally:
        _write_report(out, report)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plres",
        description="Variational solvers for p-Laplacian problems at resonance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("eig", "compute the first eigenpair"),
        ("check", "verify the hypothesis clauses"),
        ("geometry", "certify the mountain-pass geometry"),
        ("solve", "run the full pipeline to a critical point"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to the run configuration file")
        sp.add_argument("--out", required=True, help="output directory for report.json and CSV artifacts")
        sp.add_argument("--seed", type=int, default=None, help="override the configured random seed")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG

    try:
        config = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        _write_report(
            Path(args.out),
            {
                "schema": 1,
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "subcommand": args.command,
                "error": str(err),
                "stages": {},
            },
        )
        return EXIT_CONFIG
    try:
        return run(args.command, config, args.out, seed=args.seed)
    except (ConfigError, SpecError, ex.ExprError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
