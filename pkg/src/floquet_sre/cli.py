"""Batch runner: JSON config in, deterministic CSV + manifest out.

One subcommand per experiment (sweep, stop-repeat, crossing-scan,
scaling, spectrum, teleport, sre-families); flags override config fields.
Grid experiments fan out across a process pool and merge results in
sorted key order, so output bytes are independent of the worker count.

Exit codes: 0 success, 2 config error, 3 capacity error, 4 numeric
invariant failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis, cohomology, fermion, statevector
from .model import AdiabaticPath, ProductState, params_at

EXPERIMENTS = ("sweep", "stop-repeat", "crossing-scan", "scaling",
               "spectrum", "teleport", "sre-families")
ENGINES = ("fermion", "statevector", "both")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_NUMERIC = 4


class ConfigError(ValueError):
    pass


class CapacityError(ValueError):
    pass


@dataclass
class RunConfig:
    experiment: str
    engine: str = ""
    L: object = 4
    L_A: object = None
    N_steps: object = 10
    r0: float = 1.0
    epsilon: int = 0
    r: int = 50
    theta1: float = 0.0
    n_ramp: int = 0
    psi: list | None = None
    group_n: int = 4
    m: int = 2
    c: list = field(default_factory=lambda: [1, 0])
    seed: int = 0
    jobs: int = 0
    output_dir: str = "runs"

    def single_l(self) -> int:
        if isinstance(self.L, list):
            raise ConfigError(f"experiment {self.experiment!r} needs a single L")
        return int(self.L)

    def l_a_for(self, sites: int) -> int:
        return sites // 2 if self.L_A is None else int(self.L_A)


def _as_int_list(value, name: str) -> list[int]:
    vals = value if isinstance(value, list) else [value]
    try:
        return [int(v) for v in vals]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {name!r} must be an integer or list of integers") from exc


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run config, applying defaults."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    return validate_config(raw)


def validate_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    cfg = RunConfig(**raw)
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {cfg.experiment!r}")

    l_values = _as_int_list(cfg.L, "L")
    if any(l < 2 for l in l_values):
        raise ConfigError("every L must be >= 2")
    if cfg.L_A is not None:
        l_a = int(cfg.L_A)
        if any(not 1 <= l_a < l for l in l_values):
            raise ConfigError(f"L_A = {l_a} violates 1 <= L_A < L")
    for n in _as_int_list(cfg.N_steps, "N_steps"):
        if n < 0:
            raise ConfigError("N_steps must be non-negative")
    if not cfg.engine:
        cfg.engine = "both" if max(l_values) <= 10 else "fermion"
    if cfg.engine not in ENGINES:
        raise ConfigError(f"engine must be one of {ENGINES}, got {cfg.engine!r}")
    if cfg.engine in ("statevector", "both"):
        cap = statevector.DEFAULT_SITE_CAP
        too_big = [l for l in l_values if l > cap]
        if too_big:
            raise CapacityError(
                f"statevector engine rejected for L = {too_big} (cap {cap})")
    if cfg.experiment in ("crossing-scan", "scaling"):
        if cfg.engine != "fermion":
            raise ConfigError(f"{cfg.experiment} runs on the fermion engine only")
    elif isinstance(cfg.L, list) or isinstance(cfg.N_steps, list):
        raise ConfigError(f"experiment {cfg.experiment!r} takes scalar L and N_steps")
    if cfg.experiment in ("teleport", "sre-families") and cfg.engine == "fermion":
        raise ConfigError(f"{cfg.experiment} needs the statevector machinery")
    return cfg


def _engines_for(cfg: RunConfig, sites: int):
    if cfg.engine == "fermion":
        return [fermion.FermionEngine(sites)]
    if cfg.engine == "statevector":
        return [statevector.StatevectorEngine(sites)]
    return [fermion.FermionEngine(sites), statevector.StatevectorEngine(sites)]


def _fmt(x) -> str:
    """Shortest round-trip decimal; keeps CSV bodies byte-stable."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _series_rows(series: analysis.SweepSeries, path: AdiabaticPath):
    rows = []
    for k in range(series.s1_even.size):
        step = min(k, path.n_steps)
        p = params_at(path, step)
        rows.append([k, path.theta(step), p.alpha, p.beta, series.s1_even[k],
                     *series.x_site[k]])
    return rows


def _sweep_outputs(cfg: RunConfig, outdir: Path) -> dict:
    sites = cfg.single_l()
    l_a = cfg.l_a_for(sites)
    n = int(cfg.N_steps)
    path = AdiabaticPath(sites=sites, n_steps=n, r0=cfg.r0)
    init = ProductState.all_plus(sites)
    header = ["step", "theta", "alpha", "beta", "s1_even"] + \
        [f"x_{l + 1}" for l in range(sites)]
    outputs = {}
    results = {}
    for eng in _engines_for(cfg, sites):
        series = analysis.run_adiabatic(eng, path, sites, l_a, init)
        name = "series.csv" if cfg.engine != "both" else f"series_{eng.name}.csv"
        _write_csv(outdir / name, header, _series_rows(series, path))
        outputs[name] = None
        results[eng.name] = series
    summary = {}
    if cfg.engine == "both":
        a, b = results["fermion"], results["statevector"]
        summary["max_engine_discrepancy"] = float(
            max(np.max(np.abs(a.s1_even - b.s1_even)),
                np.max(np.abs(a.x_site - b.x_site))))
    return {"outputs": outputs, "summary": summary}


def _stop_repeat_outputs(cfg: RunConfig, outdir: Path) -> dict:
    sites = cfg.single_l()
    l_a = cfg.l_a_for(sites)
    path = AdiabaticPath(sites=sites, n_steps=int(cfg.N_steps), r0=cfg.r0)
    eng = _engines_for(cfg, sites)[0]
    series = analysis.run_stop_and_repeat(eng, path, sites, l_a, cfg.epsilon, cfg.r)
    rows = [[k, series.s1_even[k]] for k in range(series.s1_even.size)]
    _write_csv(outdir / "series.csv", ["repeat", "s1_even"], rows)
    fit = analysis.cosine_fit(series.s1_even)
    stop = path.n_steps // 2 + cfg.epsilon
    w_pi = fermion.pi_mode_gap(
        fermion.quasienergy_spectrum(fermion.step_map(params_at(path, stop))))
    _write_csv(outdir / "fit.csv",
               ["amplitude", "frequency", "phase", "residual", "omega_pi_mode"],
               [[fit.amplitude, fit.frequency, fit.phase, fit.residual, w_pi]])
    return {"outputs": {"series.csv": None, "fit.csv": None},
            "summary": {"omega_fit": fit.frequency, "omega_pi_mode": w_pi}}


def _crossing_point(args) -> tuple:
    sites, n_steps, l_a, r0 = args
    path = AdiabaticPath(sites=sites, n_steps=n_steps, r0=r0)
    series = analysis.run_adiabatic(fermion.FermionEngine(sites), path, sites, l_a,
                                    ProductState.all_plus(sites))
    rep = analysis.envelope_crossing(series)
    return (sites, n_steps, rep.n_c, rep.ratio)


def _scaling_point(args) -> tuple:
    sites, n_steps, r0 = args
    path = AdiabaticPath(sites=sites, n_steps=n_steps, r0=r0)
    series = analysis.run_adiabatic(fermion.FermionEngine(sites), path, sites,
                                    sites // 2, ProductState.all_plus(sites))
    fit = analysis.fm_tail_fit(series)
    return (sites, fit.amplitude, fit.frequency, fit.residual)


def _grid_map(fn, points, jobs: int):
    points = sorted(points)
    if jobs == 0:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(points) <= 1:
        return [fn(p) for p in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, points))


def _crossing_scan_outputs(cfg: RunConfig, outdir: Path) -> dict:
    l_values = _as_int_list(cfg.L, "L")
    n_values = _as_int_list(cfg.N_steps, "N_steps")
    points = [(l, n, cfg.l_a_for(l), cfg.r0) for l in l_values for n in n_values]
    results = _grid_map(_crossing_point, points, cfg.jobs)
    rows = [[l, n, -1 if nc is None else nc, float("nan") if ratio is None else ratio]
            for (l, n, nc, ratio) in sorted(results)]
    _write_csv(outdir / "crossing.csv", ["L", "N_steps", "N_c", "ratio"], rows)
    return {"outputs": {"crossing.csv": None}, "summary": {"points": len(rows)}}


def _scaling_outputs(cfg: RunConfig, outdir: Path) -> dict:
    l_values = _as_int_list(cfg.L, "L")
    n_steps = int(cfg.N_steps if not isinstance(cfg.N_steps, list) else cfg.N_steps[0])
    points = [(l, n_steps, cfg.r0) for l in l_values]
    results = sorted(_grid_map(_scaling_point, points, cfg.jobs))
    _write_csv(outdir / "scaling.csv", ["L", "amplitude", "frequency", "residual"],
               results)
    summary = {}
    if len(results) >= 4:
        sc = analysis.amplitude_scaling([r[0] for r in results],
                                        [r[1] for r in results])
        summary = {"slope": sc.slope, "stderr": sc.stderr}
    return {"outputs": {"scaling.csv": None}, "summary": summary}


def _spectrum_outputs(cfg: RunConfig, outdir: Path) -> dict:
    sites = cfg.single_l()
    n = int(cfg.N_steps)
    path = AdiabaticPath(sites=sites, n_steps=n, r0=cfg.r0)
    rows = []
    for k in range(n + 1):
        p = params_at(path, k)
        phases = fermion.quasienergy_spectrum(fermion.step_map(p))
        rows.append([k, path.theta(k), p.alpha, p.beta, *phases])
    header = ["step", "theta", "alpha", "beta"] + \
        [f"omega_{i + 1}" for i in range(2 * sites)]
    _write_csv(outdir / "spectrum.csv", header, rows)
    return {"outputs": {"spectrum.csv": None}, "summary": {}}


def _teleport_outputs(cfg: RunConfig, outdir: Path) -> dict:
    sites = cfg.single_l()
    if cfg.psi is not None:
        if len(cfg.psi) != 4:
            raise ConfigError("psi must be [re+, im+, re-, im-]")
        psi = np.array([cfg.psi[0] + 1j * cfg.psi[1], cfg.psi[2] + 1j * cfg.psi[3]])
        psi = psi / np.linalg.norm(psi)
    else:
        rng = np.random.default_rng(cfg.seed)
        psi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        psi /= np.linalg.norm(psi)
    branches = statevector.teleport(psi, sites, theta1=cfg.theta1, n_ramp=cfg.n_ramp)
    rows = [[anc, outcome, b.probability, b.fidelity]
            for (anc, outcome), b in sorted(branches.items())]
    with open(outdir / "teleport.csv", "w", newline="\n") as fh:
        fh.write("ancilla,q1,probability,fidelity\n")
        for anc, outcome, prob, fid in rows:
            fh.write(f"{anc},{outcome},{_fmt(prob)},{_fmt(fid)}\n")
    key = (0, "+")
    return {"outputs": {"teleport.csv": None},
            "summary": {"fidelity_0_plus": branches[key].fidelity,
                        "probability_0_plus": branches[key].probability}}


def _sre_families_outputs(cfg: RunConfig, outdir: Path) -> dict:
    group = cohomology.AbelianGroup((cfg.group_n, cfg.group_n))
    spt = cohomology.SPTClass.from_label(group, cfg.m)
    table = cohomology.defect_table(group, spt)
    part = cohomology.families(group, spt, table)
    perm = cohomology.cycle_families(part, tuple(cfg.c))
    lines = [f"G = Z_{cfg.group_n} x Z_{cfg.group_n}, class m = {cfg.m}, "
             f"d = gcd(N, m) = {part.d}",
             f"|H| = {len(table.h_subgroup)}, "
             f"H = {sorted(table.h_subgroup)}", ""]
    for label in sorted(part.families):
        members = sorted(part.families[label])
        lines.append(f"F{label} = {members}")
    lines.append("")
    lines.append(f"pumped charge c = {tuple(cfg.c)} cycles the families:")
    for label in sorted(perm):
        lines.append(f"  F{label} -> F{perm[label]}")
    (outdir / "families.txt").write_text("\n".join(lines) + "\n")
    return {"outputs": {"families.txt": None},
            "summary": {"n_families": len(part.families), "d": part.d}}


_RUNNERS = {
    "sweep": _sweep_outputs,
    "stop-repeat": _stop_repeat_outputs,
    "crossing-scan": _crossing_scan_outputs,
    "scaling": _scaling_outputs,
    "spectrum": _spectrum_outputs,
    "teleport": _teleport_outputs,
    "sre-families": _sre_families_outputs,
}


def execute(cfg: RunConfig) -> dict:
    """Run one experiment; returns the manifest (also written to disk)."""
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    result = _RUNNERS[cfg.experiment](cfg, outdir)
    manifest = {
        "config": asdict(cfg),
        "version": __version__,
        "wall_clock_s": time.time() - t0,
        "summary": result["summary"],
        "outputs": {},
    }
    for name in result["outputs"]:
        digest = hashlib.sha256((outdir / name).read_bytes()).hexdigest()
        manifest["outputs"][name] = digest
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


@dataclass
class CompareReport:
    max_discrepancy: float
    passed: bool
    threshold: float = 1e-9


def compare_engines(cfg: RunConfig) -> CompareReport:
    """Run the same sweep on both engines and report the worst deviation."""
    sites = cfg.single_l()
    if sites > statevector.DEFAULT_SITE_CAP:
        raise CapacityError(f"L = {sites} exceeds the statevector cap")
    l_a = cfg.l_a_for(sites)
    path = AdiabaticPath(sites=sites, n_steps=int(cfg.N_steps), r0=cfg.r0)
    init = ProductState.all_plus(sites)
    a = analysis.run_adiabatic(fermion.FermionEngine(sites), path, sites, l_a, init)
    b = analysis.run_adiabatic(statevector.StatevectorEngine(sites), path, sites, l_a, init)
    diff = float(max(np.max(np.abs(a.s1_even - b.s1_even)),
                     np.max(np.abs(a.x_site - b.x_site))))
    return CompareReport(diff, diff < 1e-9)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floquet-sre",
        description="Kicked-Ising Floquet sweeps, fits and symmetry resolution")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--engine", choices=ENGINES)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int)
        p.add_argument("-L", "--sites", type=int, nargs="+")
        p.add_argument("--l-a", type=int, dest="l_a")
        p.add_argument("--n-steps", type=int, nargs="+")
        p.add_argument("--r0", type=float)
        p.add_argument("--epsilon", type=int)
        p.add_argument("-r", "--repeats", type=int)
        p.add_argument("--theta1", type=float)
        p.add_argument("--n-ramp", type=int)
        p.add_argument("--group-n", type=int)
        p.add_argument("-m", "--spt-label", type=int, dest="m")
        p.add_argument("-c", "--pumped-charge", type=int, nargs=2, dest="c")
    return parser


def _scalarize(values):
    return values[0] if isinstance(values, list) and len(values) == 1 else values


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    raw = {}
    try:
        if args.config:
            cfg0 = load_config(args.config)
            raw = asdict(cfg0)
        raw["experiment"] = args.experiment
        overrides = {
            "engine": args.engine, "seed": args.seed, "output_dir": args.out,
            "jobs": args.jobs, "L": _scalarize(args.sites), "L_A": args.l_a,
            "N_steps": _scalarize(args.n_steps), "r0": args.r0,
            "epsilon": args.epsilon, "r": args.repeats, "theta1": args.theta1,
            "n_ramp": args.n_ramp, "group_n": args.group_n, "m": args.m,
            "c": args.c,
        }
        for key, val in overrides.items():
            if val is not None:
                raw[key] = val
        cfg = validate_config(raw)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        manifest = execute(cfg)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (FloatingPointError, cohomology.ConsistencyError) as exc:
        record = {"error": "numeric-invariant", "detail": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_NUMERIC
    for name, digest in manifest["outputs"].items():
        print(f"{name}  sha256:{digest[:16]}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
