"""Seeded experiment runner behind the ``monster-lab`` command.

A run takes an :class:`ExperimentConfig`, validates it, dispatches to one
experiment and writes ``report.json`` (plus CSV/SVG where useful) into the
output directory.  Reports are identical across runs except ``timestamp``.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, kernels
from .detour import detour_survey
from .divergence import divergence_profile
from .expanders import ExpanderFamilySpec, sl2_cayley, validate_family
from .freegroup import WalkParams, compute_phi, default_horizon, estimate_spectral_radius, hitting_experiment
from .graph import Graph, cheeger_lower_bound, diameter, girth, load_graph, subdivide, to_json_dict, torus
from .labelling import (coverage_check, longest_simple_path, missing_word_bound,
                        missing_word_frequency, random_labelling)
from .quotient import Presentation, measure_detour_profile, quotient_ball, surface_presentation

SCHEMA = 1
EXIT_OK, EXIT_INVALID, EXIT_INVARIANT = 0, 2, 3


class ConfigError(ValueError):
    """Configuration rejected before any work is done."""


class InvariantError(RuntimeError):
    """An internal consistency check failed during a run."""


DEFAULTS: dict[str, dict[str, Any]] = {
    "expander": {"primes": [3, 5, 7], "p": None, "j": 1, "C": 10.0, "h": 1e-3},
    "label-coverage": {"p": 5, "j": 1, "k": 2, "ell": 2, "budget": 200_000},
    "missing-word-bound": {"n": 1000, "k": 2, "r": 0.5, "trials": 1000},
    "detour": {"graph": None, "p": 11, "j": 3, "lambda1": 0.1, "triples": 100,
               "h": None, "C_h": None},
    "walk": {"k": 2, "r": 1, "nu": 2.0, "kappa": "auto", "trials": 10_000, "n_max": 2000,
             "kappa_margin": 0.005, "horizon": None},
    "divergence": {"graph": None, "torus": 12, "n_max": 6, "policy": "exhaustive",
                   "count": 500, "transitive": False},
    "quotient": {"presentation": "surface", "R": 3, "scales": []},
    "pipeline": {"p": 5, "j": 3, "k": 2, "lambda1": 0.1, "triples": 50,
                 "n_max": 4, "count": 200},
}
STOCHASTIC = {"label-coverage", "missing-word-bound", "detour", "walk", "divergence", "pipeline"}
ALIASES = {"label": "label-coverage", "bound": "missing-word-bound"}


@dataclass
class ExperimentConfig:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = 0
    out: str | None = None
    threads: int = 1

    def resolved(self) -> "ExperimentConfig":
        """Canonical kind, defaults filled in, parameters validated."""
        kind = ALIASES.get(self.kind, self.kind)
        if kind not in DEFAULTS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        unknown = set(self.params) - set(DEFAULTS[kind])
        if unknown:
            raise ConfigError(f"unknown parameters for {kind}: {sorted(unknown)}")
        if kind in STOCHASTIC and self.seed is None:
            raise ConfigError(f"{kind} is stochastic and needs a seed")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        params = {**DEFAULTS[kind], **self.params}
        cfg = ExperimentConfig(kind, params, self.seed, self.out, self.threads)
        _validate(cfg)
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(kind=data["kind"], params=dict(data.get("params", {})),
                   seed=data.get("seed", 0), out=data.get("out"),
                   threads=int(data.get("threads", 1)))


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _validate(cfg: ExperimentConfig):
    p = cfg.params
    if cfg.kind in ("detour", "pipeline"):
        _require(0 < p["lambda1"] <= 0.25, "lambda1 must lie in (0, 1/4]")
    if "j" in p:
        _require(int(p["j"]) >= 1, "j must be >= 1")
    if cfg.kind == "missing-word-bound":
        _require(p["n"] >= 3 and math.floor(p["r"] * math.log(p["n"])) >= 1,
                 "need n >= 3 and floor(r ln n) >= 1")
        _require(p["trials"] >= 1, "trials must be >= 1")
    if cfg.kind == "walk":
        _require(p["k"] >= 2 and p["r"] >= 1 and p["nu"] > 1 and p["trials"] >= 1,
                 "walk needs k >= 2, r >= 1, nu > 1, trials >= 1")
        _require(p["n_max"] >= 2 and p["n_max"] % 2 == 0, "n_max must be a positive even integer")
        if p["kappa"] != "auto":
            _require(isinstance(p["kappa"], (int, float)) and 0 < p["kappa"] < 1,
                     "kappa must be 'auto' or lie in (0, 1)")
    if cfg.kind == "divergence":
        _require(p["policy"] in ("exhaustive", "sample"), "policy is exhaustive or sample")
        _require(p["n_max"] >= 0, "n_max must be >= 0")
    if cfg.kind == "quotient":
        _require(0 <= p["R"] <= 6, "R must lie in 0..6")
    if cfg.kind == "label-coverage":
        _require(p["ell"] >= 1 and p["k"] >= 1, "ell and k must be >= 1")


def _num(x):
    """JSON-safe scalar."""
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return None if not math.isfinite(x) else float(x)
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return _num(obj)


def _sl2_family(p: int, j: int) -> Graph:
    return subdivide(sl2_cayley(p).graph, j)


# -- experiments ----------------------------------------------------------

def run_expander(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    primes = [p["p"]] if p["p"] is not None else p["primes"]
    spec = ExpanderFamilySpec(tuple(primes), C=p["C"], h=p["h"], j=p["j"])
    graphs = [_sl2_family(q, spec.j) for q in spec.primes]
    report = validate_family(spec, graphs)
    rows = []
    for q, check in zip(spec.primes, report.checks):
        rows.append({"p": q, **asdict(check), "passed": check.passed})
    out = {"graphs": rows, "passed": report.passed}
    if p["p"] is not None:
        check = report.checks[0]
        stats = {"girth": check.girth, "diameter": check.diameter,
                 "cheeger_bound": check.cheeger, "vertices": check.vertices}
        out["stats"] = stats
        out["_graph"] = to_json_dict(graphs[0], stats=_clean(stats))
    return out


def run_label(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    g = _sl2_family(p["p"], p["j"])
    lab = random_labelling(g, p["k"], cfg.seed)
    path = longest_simple_path(g, budget=p["budget"], seed=cfg.seed)
    cov = coverage_check(lab, p["ell"], path)
    return {"vertices": g.n, "path_vertices": len(path), "covered": cov.covered,
            "present": cov.present, "total": cov.total,
            "missing": [list(w) for w in cov.missing[:50]]}


def run_bound(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    misses, trials = missing_word_frequency(p["n"], p["k"], p["r"], p["trials"], cfg.seed)
    bound = missing_word_bound(p["n"], p["k"], p["r"])
    freq = misses / trials
    sigma = math.sqrt(bound * (1 - bound) / trials)
    return {"ell": math.floor(p["r"] * math.log(p["n"])), "bound": bound, "misses": misses,
            "trials": trials, "empirical_freq": freq, "sigma": sigma,
            "passed": freq <= bound + 3 * sigma}


def run_detour(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    g = load_graph(p["graph"]) if p["graph"] else _sl2_family(p["p"], p["j"])
    gg = girth(g)
    if gg == math.inf:
        raise ConfigError("detour experiments need a graph with cycles")
    h = p["h"] if p["h"] is not None else cheeger_lower_bound(g)
    c_h = p["C_h"] if p["C_h"] is not None else diameter(g) / math.log(g.n)
    if not h > 0:
        raise ConfigError("measured Cheeger bound is zero; supply h")
    survey = detour_survey(g, p["lambda1"], h, c_h, p["triples"], cfg.seed, int(gg))
    if survey.violations:
        raise InvariantError(f"{survey.violations} detour violations")
    return {"vertices": g.n, "girth": int(gg), "h": h, "C_h": c_h, **survey.to_dict()}


def run_walk(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    if p["kappa"] == "auto":
        kappa = estimate_spectral_radius(p["k"], p["n_max"]) + p["kappa_margin"]
    else:
        kappa = float(p["kappa"])
    if not kappa < 1:
        raise ConfigError("kappa must stay below 1")
    phi = compute_phi(p["k"], kappa, p["nu"])
    horizon = p["horizon"] or default_horizon(p["k"], kappa, phi, p["r"])
    params = WalkParams(p["k"], kappa, p["nu"], phi, p["r"], horizon, p["trials"], cfg.seed)
    rep = hitting_experiment(params, threads=cfg.threads)
    return {"kappa": kappa, "phi": phi, "horizon": horizon, **rep.to_dict()}


def run_divergence(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    if p["graph"]:
        g, transitive = load_graph(p["graph"]), p["transitive"]
        gid = str(p["graph"])
    else:
        g, transitive, gid = torus(p["torus"]), True, f"torus{p['torus']}"
    prof = divergence_profile(g, p["n_max"], policy=p["policy"], count=p["count"],
                              seed=cfg.seed, graph_id=gid,
                              base_points=[0] if transitive and p["policy"] == "exhaustive" else None,
                              transitive=transitive)
    values = [s.value for s in prof.samples if s.exact]
    if any(b < a for a, b in zip(values, values[1:])):
        raise InvariantError("exact divergence values decrease")
    return {"profile": prof.to_dict(), "_csv": prof.to_csv(),
            "_svg": svg_polyline([s.n for s in prof.samples], [s.value for s in prof.samples],
                                 f"Div(n) {gid}")}


def _presentation(spec) -> Presentation:
    if spec == "surface":
        return surface_presentation(2)
    if spec == "free":
        return Presentation(2, ())
    if isinstance(spec, dict):
        return Presentation.from_json_dict(spec)
    return Presentation.load(spec)


def run_quotient(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    pres = _presentation(p["presentation"])
    out = {"k": pres.k, "relators": [list(r) for r in pres.relators], "lambda": pres.lam,
           "c16": pres.is_c16}
    if not pres.is_c16:
        raise ConfigError(f"lambda = {pres.lam:.4f} >= 1/6; quotient balls are refused")
    ball = quotient_ball(pres, p["R"])
    out["sphere_sizes"] = ball.sphere_sizes
    out["trusted_radius"] = ball.trusted_radius
    if p["scales"]:
        out["detour_profile"] = [asdict(s) for s in
                                 measure_detour_profile(ball, p["scales"], seed=cfg.seed or 0)]
    return out


def run_pipeline(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    seed = cfg.seed
    sub = {"seed": seed, "threads": cfg.threads}
    expander = run_expander(ExperimentConfig("expander", {"primes": [p["p"]], "j": p["j"]}, **sub).resolved())
    label = run_label(ExperimentConfig("label-coverage", {"p": p["p"], "j": p["j"], "k": p["k"]}, **sub).resolved())
    detour = run_detour(ExperimentConfig("detour", {"p": p["p"], "j": p["j"], "lambda1": p["lambda1"],
                                                     "triples": p["triples"]}, **sub).resolved())
    g = _sl2_family(p["p"], p["j"])
    prof = divergence_profile(g, p["n_max"], policy="sample", count=p["count"], seed=seed,
                              graph_id=f"sl2_{p['p']}^{p['j']}")
    return {"expander": expander, "label": label, "detour": detour, "divergence": prof.to_dict()}


RUNNERS: dict[str, Callable[[ExperimentConfig], dict]] = {
    "expander": run_expander,
    "label-coverage": run_label,
    "missing-word-bound": run_bound,
    "detour": run_detour,
    "walk": run_walk,
    "divergence": run_divergence,
    "quotient": run_quotient,
    "pipeline": run_pipeline,
}


def svg_polyline(xs, ys, title: str = "", width: int = 480, height: int = 320) -> str:
    """Minimal SVG line plot; infinite values are dropped."""
    pts = [(float(x), float(y)) for x, y in zip(xs, ys) if math.isfinite(y)]
    pad = 40
    if not pts:
        pts = [(0.0, 0.0)]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(0.0, min(p[1] for p in pts)), max(p[1] for p in pts)
    sx = (width - 2 * pad) / ((x1 - x0) or 1)
    sy = (height - 2 * pad) / ((y1 - y0) or 1)
    coords = " ".join(f"{pad + (x - x0) * sx:.1f},{height - pad - (y - y0) * sy:.1f}" for x, y in pts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
            f'<text x="{pad}" y="20" font-size="14">{title}</text>'
            f'<text x="{pad}" y="{height - 10}" font-size="11">x: {x0:g}..{x1:g}  '
            f'y: {y0:g}..{y1:g}</text>'
            f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
            f'fill="none" stroke="#999"/>'
            f'<polyline points="{coords}" fill="none" stroke="#1f5fa8" stroke-width="2"/></svg>\n')


@dataclass
class RunResult:
    exit_code: int
    report: dict | None
    error: str | None = None
    files: list[str] = field(default_factory=list)


def run(config: ExperimentConfig, write: bool = True) -> RunResult:
    """Validate, run, and (if ``config.out`` is set) write report files."""
    try:
        cfg = config.resolved()
        results = RUNNERS[cfg.kind](cfg)
    except InvariantError as exc:
        return RunResult(EXIT_INVARIANT, None, f"invariant violation: {exc}")
    except AssertionError as exc:
        return RunResult(EXIT_INVARIANT, None, f"invariant violation: {exc}")
    except (ConfigError, ValueError, OSError, KeyError) as exc:
        return RunResult(EXIT_INVALID, None, f"invalid configuration: {exc}")
    extras = {k: results.pop(k) for k in list(results) if k.startswith("_")}
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "backend": kernels.BACKEND,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": _clean(cfg.to_dict()),
        "results": _clean(results),
    }
    files = []
    if write and cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        files.append(str(out / "report.json"))
        if "_csv" in extras:
            (out / "profile.csv").write_text(extras["_csv"])
            files.append(str(out / "profile.csv"))
        if "_graph" in extras:
            (out / "graph.json").write_text(json.dumps(extras["_graph"]) + "\n")
            files.append(str(out / "graph.json"))
        if "_svg" in extras:
            (out / "profile.svg").write_text(extras["_svg"])
            files.append(str(out / "profile.svg"))
    return RunResult(EXIT_OK, report, None, files)


def strip_timestamp(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timestamp"}
