"""Batch front-end: stability reports, real-axis scans, winding counts, suites.

Outputs are deterministic: floats print through repr (shortest round-trip
decimal), JSON keys are sorted, nothing carries timestamps.  Exit codes:
0 success, 1 usage or config error, 2 hypothesis or suite failure,
3 numerical failure.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from .asymptotics import spectrum
from .errors import BadParameter, EvanskitError
from .evans import (Numerics, evans_det, evans_wedge, eta_identity_residual,
                    real_axis_scan, winding_count)
from .finite_re import cor23_root, synth_re, theorem22_check
from .invariants import stability_report, structural_checks
from .model import (CANONICAL_K, CANONICAL_M, MultisymplecticModel,
                    WaveFamily, build_coupled_wave, build_dirac, build_mtm,
                    verify_wave)

_MODELS = ("coupled-wave", "mtm", "cme", "dirac-demo")
_SUITES = ("appendix-a", "exact-evans", "theorem22", "structure", "clifford")
_TASKS = ("report", "scan", "contour", "verify")
_PARAM_KEYS = {"p", "nu", "alpha"}
_NUM_KEYS = {"L_override", "tol", "h", "grid_n"}
_TOP_KEYS = {"model", "params", "c", "numerics", "task", "lambda_max",
             "rect", "suite", "seeds", "out", "format"}


def _r(x) -> str:
    return repr(float(x))


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@dataclass
class RunConfig:
    """One validated run: model selection, numerics, task-specific fields."""

    task: str
    model: str = "coupled-wave"
    params: dict = field(default_factory=dict)
    c: float = 0.0
    numerics: dict = field(default_factory=dict)
    lambda_max: float = 3.0
    rect: tuple | None = None
    suite: str | None = None
    seeds: int = 20
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.task not in _TASKS:
            raise BadParameter(f"task: unknown task '{self.task}'")
        if self.model not in _MODELS:
            raise BadParameter(f"model: unknown model '{self.model}'")
        if self.format not in ("csv", "json"):
            raise BadParameter(f"format: must be csv or json, got '{self.format}'")
        for k in self.params:
            if k not in _PARAM_KEYS:
                raise BadParameter(f"params: unknown key '{k}'")
        base = {"L_override": None, "tol": 1e-8 if self.task == "contour" else 1e-10,
                "h": 0.1, "grid_n": 31}
        for k in self.numerics:
            if k not in _NUM_KEYS:
                raise BadParameter(f"numerics: unknown key '{k}'")
        base.update(self.numerics)
        self.numerics = base
        if not self.numerics["tol"] > 0:
            raise BadParameter("numerics.tol: must be positive")
        if not self.numerics["h"] > 0:
            raise BadParameter("numerics.h: must be positive")
        gn = self.numerics["grid_n"]
        if int(gn) != gn or gn < 1:
            raise BadParameter("grid_n: must be a positive integer")
        self.numerics["grid_n"] = int(gn)
        L = self.numerics["L_override"]
        if L is not None and not L > 0:
            raise BadParameter("numerics.L_override: must be positive")
        if not -1.0 < self.c < 1.0:
            raise BadParameter(f"c: speed {self.c} outside the admissible window (-1, 1)")
        if self.lambda_max <= 0:
            raise BadParameter("lambda_max: must be positive")
        if self.rect is not None:
            r = tuple(float(v) for v in self.rect)
            if len(r) != 4:
                raise BadParameter("rect: need re0,re1,im0,im1")
            if not (r[0] < r[1] and r[2] < r[3]):
                raise BadParameter("rect: need re0 < re1 and im0 < im1")
            self.rect = r
        if self.suite is not None and self.suite not in _SUITES:
            raise BadParameter(f"suite: unknown suite '{self.suite}'")
        if self.seeds < 1:
            raise BadParameter("seeds: must be at least 1")

    def numerics_obj(self) -> Numerics:
        n = self.numerics
        return Numerics(tol=n["tol"], L=n["L_override"], h=n["h"],
                        grid_n=n["grid_n"])


def _merge_config(task, config_path, kw) -> RunConfig:
    # file first, explicit flags override, the dataclass validates the union
    data = {}
    if config_path is not None:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise BadParameter(f"config: {e}")
        if not isinstance(data, dict):
            raise BadParameter("config: top level must be a JSON object")
        for k in data:
            if k not in _TOP_KEYS:
                raise BadParameter(f"config: unknown key '{k}'")
    params = dict(data.get("params", {}))
    for name in ("p", "nu"):
        if kw.get(name) is not None:
            params[name] = kw[name]
    numerics = dict(data.get("numerics", {}))
    for flag, key in (("tol", "tol"), ("h", "h"), ("grid_n", "grid_n"),
                      ("big_l", "L_override")):
        if kw.get(flag) is not None:
            numerics[key] = kw[flag]
    rect = data.get("rect")
    if kw.get("rect") is not None:
        parts = kw["rect"].split(",")
        if len(parts) != 4:
            raise BadParameter("rect: need re0,re1,im0,im1")
        try:
            rect = tuple(float(v) for v in parts)
        except ValueError:
            raise BadParameter(f"rect: could not parse '{kw['rect']}'")

    def pick(name, default, file_key=None):
        v = kw.get(name)
        return v if v is not None else data.get(file_key or name, default)

    return RunConfig(
        task=task,
        model=pick("model", "coupled-wave"),
        params=params,
        c=float(pick("c", 0.0)),
        numerics=numerics,
        lambda_max=float(pick("lambda_max", 3.0)),
        rect=rect,
        suite=pick("suite", None),
        seeds=int(pick("seeds", 20)),
        out=pick("out", None),
        format=pick("fmt", "csv" if task == "scan" else "json",
                    file_key="format"),
    )


def _instantiate(cfg: RunConfig):
    p = float(cfg.params.get("p", 1.0))
    nu = float(cfg.params.get("nu", 1.0))
    alpha = float(cfg.params.get("alpha", 1.0))
    if cfg.model == "coupled-wave":
        return build_coupled_wave(p)
    if cfg.model in ("mtm", "cme"):
        return build_mtm(alpha, nu), None
    return build_dirac(), None


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _cmd_report(cfg: RunConfig) -> int:
    if cfg.format != "json":
        raise BadParameter("format: report emits json only")
    model, wave = _instantiate(cfg)
    if wave is None:
        raise BadParameter(f"model: '{cfg.model}' lacks wave family")
    nm = cfg.numerics_obj()
    hc = verify_wave(model, wave, cfg.c, L=nm.L)
    if hc.max_residual() > 1e-6 or hc.tail_norm > 1e-8:
        hrep = {"ode_residual": float(hc.ode_residual),
                "kernel_residual": float(hc.kernel_residual),
                "jordan_residual": float(hc.jordan_residual),
                "tail_norm": float(hc.tail_norm),
                "passed": False}
        _emit(_json({"hypothesis_report": hrep}), cfg.out)
        return 2
    rep = stability_report(model, wave, cfg.c, numerics=nm, params=cfg.params)
    _emit(rep.to_json() + "\n", cfg.out)
    return 0


def _cmd_scan(cfg: RunConfig) -> int:
    model, wave = _instantiate(cfg)
    if wave is None:
        raise BadParameter(f"model: '{cfg.model}' lacks wave family")
    nm = cfg.numerics_obj()
    res = real_axis_scan(model, wave, cfg.c, cfg.lambda_max, n=nm.grid_n,
                         numerics=nm)
    sidecar = {"brackets": [[float(a), float(b)] for a, b in res.brackets],
               "roots": [float(r) for r in res.roots],
               "d_inf": int(res.d_inf)}
    if cfg.format == "json":
        payload = {"lambda": [float(x) for x in res.lams],
                   "D_re": [float(v.real) for v in res.values],
                   "D_im": [float(v.imag) for v in res.values]}
        payload.update(sidecar)
        _emit(_json(payload), cfg.out)
        return 0
    lines = ["lambda_re,lambda_im,D_re,D_im"]
    for lam, val in zip(res.lams, res.values):
        lines.append(",".join((_r(lam), _r(0.0), _r(val.real), _r(val.imag))))
    csv = "\n".join(lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(csv)
        Path(cfg.out + ".brackets.json").write_text(_json(sidecar))
    else:
        click.echo(csv, nl=False)
        click.echo(_json(sidecar), err=True, nl=False)
    return 0


def _cmd_contour(cfg: RunConfig) -> int:
    if cfg.format != "json":
        raise BadParameter("format: contour emits json only")
    model, wave = _instantiate(cfg)
    if wave is None:
        raise BadParameter(f"model: '{cfg.model}' lacks wave family")
    if cfg.rect is None:
        raise BadParameter("rect: required for contour")
    w = winding_count(model, wave, cfg.c, cfg.rect, numerics=cfg.numerics_obj())
    _emit(_json({"model": cfg.model, "c": cfg.c, "rect": list(cfg.rect),
                 "winding": int(w)}), cfg.out)
    return 0


def _check(name, passed, detail):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _suite_clifford(cfg: RunConfig):
    d = build_dirac()
    gens = (d.J1, d.J2)
    ok = True
    for i in range(2):
        for j in range(2):
            anti = gens[i] @ gens[j] + gens[j] @ gens[i]
            ok = ok and np.array_equal(anti, -2 * d.metric[i, j] * np.eye(4, dtype=int))
    out = [_check("clifford-anticommutators", ok, "exact integer identities")]
    out.append(_check(
        "induced-skew-pair",
        np.array_equal(d.M, d.R4 @ d.J1) and np.array_equal(d.K, d.R4 @ d.J2),
        "M = R4 J1 and K = R4 J2"))
    model, wave = build_coupled_wave(float(cfg.params.get("p", 1.0)))
    R = model.R
    ok = (np.array_equal(R @ R, np.eye(4))
          and np.array_equal(R @ model.M, -model.M @ R)
          and np.array_equal(R @ model.K, -model.K @ R))
    out.append(_check("reversor-relations",
                      ok, "R*R = I and R anti-commutes with M, K"))
    worst = max(float(np.max(np.abs(R @ wave.zhat(-xi, cfg.c) - wave.zhat(xi, cfg.c))))
                for xi in (0.3, 1.1, 2.6))
    out.append(_check("profile-reversibility", worst <= 1e-12,
                      f"max residual {_r(worst)}"))
    return out


def _suite_appendix_a(cfg: RunConfig):
    model, wave = build_coupled_wave(float(cfg.params.get("p", 1.0)))
    sp = spectrum(model, cfg.c, 0.0)
    res = eta_identity_residual(model, sp)
    out = [_check("eta-pair-identity", res <= 1e-10, f"residual {_r(res)}")]
    binf = model.binf()
    frozen = MultisymplecticModel("frozen", CANONICAL_M, CANONICAL_K,
                                  lambda z: binf @ z, lambda z: binf)
    fwave = WaveFamily(zhat=lambda xi, c: np.zeros(4),
                       zhat_xi=lambda xi, c: np.zeros(4),
                       c_window=(-0.9, 0.9), decay_rate=lambda c: 2.0)
    spf = spectrum(frozen, cfg.c, 0.8)
    W = evans_wedge(frozen, fwave, cfg.c, 0.8, spec=spf)
    rel = abs(W - spf.Kconst) / abs(spf.Kconst)
    out.append(_check("frozen-wedge-is-orientation-constant", rel <= 1e-8,
                      f"relative error {_r(rel)}"))
    nm = cfg.numerics_obj()
    W = evans_wedge(model, wave, cfg.c, 1.0, numerics=nm)
    D = evans_det(model, wave, cfg.c, 1.0, numerics=nm).D
    sp2 = spectrum(model, cfg.c, 1.0)
    rel = abs(W - D * sp2.Kconst) / abs(W)
    out.append(_check("wedge-det-proportionality", rel <= 1e-6,
                      f"relative error {_r(rel)}"))
    return out


def _suite_exact_evans(cfg: RunConfig):
    p = float(cfg.params.get("p", 1.0))
    model, wave = build_coupled_wave(p)
    nm = cfg.numerics_obj()
    alpha = 1.0 / np.sqrt(1.0 - cfg.c ** 2)
    ratios = []
    for k in range(1, 16):
        lam = 0.2 * k
        y = (alpha * lam) ** 2
        P = ((3 + y) * (5 - y) * (3 + 3 * p + y) * (3 * p + y)
             * (5 - 3 * p - y))
        denom = lam ** 2 * P
        if abs(denom) < 1e-12:
            continue
        D = evans_det(model, wave, cfg.c, lam, numerics=nm).D.real
        ratios.append(D / denom)
    r = np.array(ratios)
    drift = float((r.max() - r.min()) / abs(r.mean()))
    return [_check("shape-ratio-constancy", drift <= 1e-4,
                   f"relative drift {_r(drift)} over {len(r)} samples")]


def _suite_theorem22(cfg: RunConfig):
    out = []
    for seed in range(cfg.seeds):
        for n in (1, 2, 3):
            name = f"pencil-seed{seed}-n{n}"
            prob = synth_re(n, seed)
            try:
                rep = theorem22_check(prob)
            except EvanskitError as e:
                out.append(_check(name, False, f"{type(e).__name__}: {e}"))
                continue
            detail = f"second-derivative rel err {_r(rep.rel_err)}"
            ok = True
            root = cor23_root(prob)
            if root is not None:
                evs = np.linalg.eigvals(np.linalg.solve(prob.M, prob.L))
                ok = bool(np.min(np.abs(evs - root)) <= 1e-8 * max(1.0, root))
                detail += f", real root {_r(root)}"
            out.append(_check(name, ok, detail))
    return out


def _suite_structure(cfg: RunConfig):
    model, wave = build_coupled_wave(float(cfg.params.get("p", 1.0)))
    r = structural_checks(model, wave, cfg.c)
    return [
        _check("tangent-pairing-plus", r.max_tangent_plus <= 1e-7,
               f"max {_r(r.max_tangent_plus)}"),
        _check("tangent-pairing-minus", r.max_tangent_minus <= 1e-7,
               f"max {_r(r.max_tangent_minus)}"),
        _check("tangent-pairing-speed-derivative", r.max_tangent_zc <= 1e-7,
               f"max {_r(r.max_tangent_zc)}"),
        _check("jordan-chain-obstruction", r.chain_residual <= 1e-6,
               f"relative residual {_r(r.chain_residual)}"),
    ]


_SUITE_FNS = {
    "clifford": _suite_clifford,
    "appendix-a": _suite_appendix_a,
    "exact-evans": _suite_exact_evans,
    "theorem22": _suite_theorem22,
    "structure": _suite_structure,
}


def _cmd_verify(cfg: RunConfig) -> int:
    if cfg.format != "json":
        raise BadParameter("format: verify emits json only")
    if cfg.suite is None:
        raise BadParameter("suite: required for verify")
    checks = _SUITE_FNS[cfg.suite](cfg)
    passed = all(c["passed"] for c in checks)
    _emit(_json({"suite": cfg.suite, "passed": passed, "checks": checks}),
          cfg.out)
    return 0 if passed else 2


_DISPATCH = {"report": _cmd_report, "scan": _cmd_scan,
             "contour": _cmd_contour, "verify": _cmd_verify}


def _run(task: str, kw: dict):
    try:
        cfg = _merge_config(task, kw.pop("config"), kw)
        code = _DISPATCH[task](cfg)
    except BadParameter as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(1)
    except EvanskitError as e:
        click.echo(f"numerical failure: {type(e).__name__}: {e}", err=True)
        sys.exit(3)
    sys.exit(code)


def _options(f):
    opts = [
        click.option("--config", type=click.Path(), default=None,
                     help="JSON config file; explicit flags override it."),
        click.option("--model", default=None,
                     help="coupled-wave, mtm, cme, or dirac-demo."),
        click.option("--p", "p", type=float, default=None,
                     help="coupling strength of the coupled wave system."),
        click.option("--nu", type=float, default=None,
                     help="quartic coefficient for mtm/cme."),
        click.option("--c", "c", type=float, default=None, help="wave speed."),
        click.option("--lambda-max", "lambda_max", type=float, default=None,
                     help="right end of the real-axis scan window."),
        click.option("--grid-n", "grid_n", type=int, default=None,
                     help="number of scan samples."),
        click.option("--rect", default=None,
                     help="contour rectangle re0,re1,im0,im1."),
        click.option("--tol", type=float, default=None,
                     help="integrator tolerance (contour default 1e-8, else 1e-10)."),
        click.option("--h", "h", type=float, default=None,
                     help="base step for derivatives at the origin."),
        click.option("--L", "big_l", type=float, default=None,
                     help="override the truncation half-width."),
        click.option("--suite", default=None,
                     help="verification suite name."),
        click.option("--seeds", type=int, default=None,
                     help="number of random pencil seeds for theorem22."),
        click.option("--out", type=click.Path(), default=None,
                     help="output file (stdout when omitted)."),
        click.option("--format", "fmt", default=None,
                     help="csv or json (scan only; other tasks emit json)."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


@click.group()
def main():
    """Evans-function toolkit: reports, scans, winding counts, verification."""


@main.command(help="Full stability report as JSON (coupled-wave only).")
@_options
def report(**kw):
    _run("report", kw)


@main.command(help="Sample D along the real axis; CSV plus bracket sidecar.")
@_options
def scan(**kw):
    _run("scan", kw)


@main.command(help="Winding number of D around a rectangle.")
@_options
def contour(**kw):
    _run("contour", kw)


@main.command(help="Run a named verification suite; nonzero exit on failure.")
@_options
def verify(**kw):
    _run("verify", kw)
