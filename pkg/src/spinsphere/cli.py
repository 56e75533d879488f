"""Command-line front end: named experiments with seeded, reproducible output.

Usage:
    spinsphere EXPERIMENT [--config FILE] [--seed N] [--trials N]
               [--out DIR] [per-experiment flags]

Each run writes <experiment>_report.json (metrics, thresholds, pass flags,
and the fully resolved configuration, so any result can be re-run from its
own report) plus CSV data files <experiment>_<index>.csv into the output
directory, and prints a one-line pass/fail summary.  Exit status: 0 pass,
1 threshold failure, 2 usage or configuration error.

Configuration files are flat KEY=VALUE text ('#' comments allowed);
command-line flags override file values.  All quantities are in Planck
units; mu, B, and hbar are individually settable for dimension-tracking
runs.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .bloch import energy_uncertainty, hopf_project, uncertainty_margin
from .collapse import (
    CaptureRegion,
    absorption_probabilities,
    born_statistics,
    build_markov_chain,
    run_collapse_batch,
    run_ruin_walks,
)
from .curvature import commutator_curvature_identity, sectional_curvature
from .evolution import (
    FieldParams,
    evolution_speed,
    evolve_exact,
    geodesic_planarity,
    integrate_numeric,
    speed_along,
)
from .lens import RayState, design_lens, integrate_ray, ray_energy
from .pairs import SingletSectorState, epr_statistics, run_epr_batch
from .reports import write_csv, write_json_report
from .su2 import AlgebraElement, Spinor, killing_inner

EXPERIMENTS = (
    "evolve",
    "bloch",
    "curvature",
    "uncertainty",
    "born",
    "markov",
    "lens",
    "epr",
    "e2-split",
)

DEFAULTS = {
    "seed": 42,
    "trials": 20_000,
    "c1sq": 0.5,
    "a_sq": 0.5,
    # t_final resolves per experiment: 1.0 for evolve/bloch, a quarter
    # turn (pi/4)(hbar/(mu B)) for e2-split.
    "t_final": None,
    "dt": 1e-3,
    "bx": 0.0,
    "by": 0.0,
    "bz": 1.0,
    "b0": 1.0,
    "mu": 1.0,
    "hbar": 1.0,
    "planes": 100,
    "states": 10_000,
    "delta_grid": 60,
    "region_width": math.pi / 48.0,
    "region_alpha": math.pi / 8.0,
    "region_beta": math.pi / 8.0,
    "displacement": 0.1,
    "span": 1.0,
    "outcomes_csv": 0,
}


class ConfigError(Exception):
    pass


def parse_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected KEY=VALUE, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        values[key] = _parse_value(value)
    return values


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(parse_config_file(args.config))
    for key in DEFAULTS:
        override = getattr(args, key, None)
        if override is not None:
            cfg[key] = override
    return cfg


def _region(cfg) -> CaptureRegion:
    return CaptureRegion(cfg["region_width"], cfg["region_alpha"], cfg["region_beta"])


def _weighted_state(c1_sq: float) -> Spinor:
    if not 0.0 <= c1_sq <= 1.0:
        raise ConfigError("c1sq must lie in [0, 1]")
    return Spinor(math.sqrt(c1_sq), math.sqrt(1.0 - c1_sq))


def _finish(report: dict, out_dir: Path, experiment: str) -> int:
    passed = all(report["checks"].values())
    report["pass"] = passed
    write_json_report(out_dir / f"{experiment.replace('-', '_')}_report.json", report)
    status = "PASS" if passed else "FAIL"
    failed = [name for name, ok in report["checks"].items() if not ok]
    detail = "" if passed else f" failed={','.join(failed)}"
    print(f"{experiment}: {status}{detail}")
    return 0 if passed else 1


def _trajectory_rows(traj):
    for t, state in zip(traj.times, traj.states):
        yield (
            float(t),
            float(state[0].real),
            float(state[0].imag),
            float(state[1].real),
            float(state[1].imag),
        )


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def run_evolve(cfg, out_dir: Path) -> dict:
    params = FieldParams((cfg["bx"], cfg["by"], cfg["bz"]), cfg["mu"], cfg["hbar"])
    phi0 = _weighted_state(cfg["c1sq"])
    if cfg["t_final"] is None:
        cfg["t_final"] = 1.0
    n_steps = max(int(round(cfg["t_final"] / cfg["dt"])), 4)
    traj = integrate_numeric(phi0, params, cfg["dt"], n_steps)
    exact = evolve_exact(phi0, params, float(traj.times[-1]))
    terminal_error = float(np.abs(traj.states[-1] - exact.vector).max())
    speed_dev = float(np.abs(speed_along(traj) - evolution_speed(params)).max())
    planarity = geodesic_planarity(traj)
    write_csv(
        out_dir / "evolve_0.csv",
        ["t", "re_c1", "im_c1", "re_c2", "im_c2"],
        _trajectory_rows(traj),
    )
    return {
        "metrics": {
            "terminal_error": terminal_error,
            "speed_deviation": speed_dev,
            "planarity_residual": planarity,
            "max_norm_drift": traj.max_drift,
        },
        "thresholds": {
            "terminal_error": 1e-8,
            "speed_deviation": 1e-8,
            "planarity_residual": 1e-9,
        },
        "checks": {
            "terminal_error": terminal_error < 1e-8,
            "speed_deviation": speed_dev < 1e-8,
            "planarity_residual": planarity < 1e-9,
        },
    }


def run_bloch(cfg, out_dir: Path) -> dict:
    params = FieldParams((cfg["bx"], cfg["by"], cfg["bz"]), cfg["mu"], cfg["hbar"])
    phi0 = _weighted_state(cfg["c1sq"])
    if cfg["t_final"] is None:
        cfg["t_final"] = 1.0
    n_steps = max(int(round(cfg["t_final"] / cfg["dt"])), 4)
    traj = integrate_numeric(phi0, params, cfg["dt"], n_steps)
    points = [hopf_project(traj.spinor(i)).vector for i in range(len(traj))]
    norm_dev = float(max(abs(np.linalg.norm(p) - 1.0) for p in points))
    shifted = Spinor(phi0.c1 * np.exp(0.7j), phi0.c2 * np.exp(0.7j))
    phase_dev = float(
        np.abs(hopf_project(shifted).vector - hopf_project(phi0).vector).max()
    )
    write_csv(
        out_dir / "bloch_0.csv",
        ["t", "x", "y", "z"],
        (
            (float(t), float(p[0]), float(p[1]), float(p[2]))
            for t, p in zip(traj.times, points)
        ),
    )
    return {
        "metrics": {"norm_deviation": norm_dev, "phase_invariance": phase_dev},
        "thresholds": {"norm_deviation": 1e-12, "phase_invariance": 1e-12},
        "checks": {
            "norm_deviation": norm_dev < 1e-12,
            "phase_invariance": phase_dev < 1e-12,
        },
    }


def run_curvature(cfg, out_dir: Path) -> dict:
    rng = np.random.default_rng(cfg["seed"])
    worst_sectional = 0.0
    basis = [AlgebraElement.basis(k) for k in range(3)]
    pairs = [(basis[0], basis[1]), (basis[1], basis[2]), (basis[2], basis[0])]
    for _ in range(int(cfg["planes"])):
        x = AlgebraElement.from_coords(rng.normal(size=3, scale=2.0))
        y = AlgebraElement.from_coords(rng.normal(size=3, scale=2.0))
        pairs.append((x, y))
    rows = []
    worst_identity = 0.0
    for i, (x, y) in enumerate(pairs):
        k = sectional_curvature(x, y)
        worst_sectional = max(worst_sectional, abs(k - 1.0))
        rows.append((i, k))
        y_perp = y - (killing_inner(x, y) / killing_inner(x, x)) * x
        lhs, rhs = commutator_curvature_identity(x, y_perp)
        worst_identity = max(worst_identity, abs(lhs - rhs))
    write_csv(out_dir / "curvature_0.csv", ["plane", "sectional_curvature"], rows)
    return {
        "metrics": {
            "max_sectional_deviation": worst_sectional,
            "max_commutator_identity_error": worst_identity,
        },
        "thresholds": {
            "max_sectional_deviation": 1e-10,
            "max_commutator_identity_error": 1e-10,
        },
        "checks": {
            "sectional_curvature": worst_sectional < 1e-10,
            "commutator_identity": worst_identity < 1e-10,
        },
    }


def run_uncertainty(cfg, out_dir: Path) -> dict:
    rng = np.random.default_rng(cfg["seed"])
    n_states = int(cfg["states"])
    worst_margin = math.inf
    for _ in range(n_states):
        r = rng.normal(size=4)
        phi = Spinor(complex(r[0], r[1]), complex(r[2], r[3]))
        worst_margin = min(worst_margin, uncertainty_margin(phi))
    worst_energy = 0.0
    for _ in range(1000):
        r = rng.normal(size=4)
        phi = Spinor(complex(r[0], r[1]), complex(r[2], r[3]))
        b = rng.normal(size=3)
        params = FieldParams(b / np.linalg.norm(b) * rng.uniform(0.5, 2.0), cfg["mu"])
        h = -params.mu * params.sigma_dot_b
        v = phi.vector
        variance = float((v.conj() @ h @ h @ v).real - (v.conj() @ h @ v).real ** 2)
        direct = math.sqrt(max(variance, 0.0))
        worst_energy = max(
            worst_energy, abs(energy_uncertainty(phi, params) - direct)
        )
    eigen_margin = uncertainty_margin(Spinor(1.0, 0.0))
    return {
        "metrics": {
            "min_margin": worst_margin,
            "margin_at_eigenstate": eigen_margin,
            "max_energy_uncertainty_error": worst_energy,
        },
        "thresholds": {
            "min_margin": -1e-12,
            "max_energy_uncertainty_error": 1e-10,
        },
        "checks": {
            "margin_nonnegative": worst_margin >= -1e-12,
            "eigenstate_margin_zero": abs(eigen_margin) < 1e-12,
            "energy_uncertainty": worst_energy < 1e-10,
        },
    }


def run_born(cfg, out_dir: Path) -> dict:
    phi = _weighted_state(cfg["c1sq"])
    outcomes, steps = run_collapse_batch(
        phi, _region(cfg), int(cfg["seed"]), int(cfg["trials"])
    )
    stats = born_statistics(outcomes, cfg["c1sq"])
    if cfg["outcomes_csv"]:
        write_csv(
            out_dir / "born_0.csv",
            ["trial", "eigenstate", "steps"],
            (
                (i, int(outcomes[i]), int(steps[i]))
                for i in range(len(outcomes))
            ),
        )
    z_ok = all(abs(z) <= 3.0 for z in stats["z_scores"])
    return {
        "metrics": {**stats, "mean_steps": float(steps.mean())},
        "thresholds": {"abs_z_max": 3.0},
        "checks": {"born_frequencies": z_ok},
    }


def run_markov(cfg, out_dir: Path) -> dict:
    m = int(cfg["delta_grid"])
    chain = build_markov_chain(m)
    exact = absorption_probabilities(chain)
    closed = np.cos(chain.thetas / 2.0) ** 2
    oracle_error = float(np.abs(exact - closed).max())
    starts = sorted({max(1, (m * k) // 6) for k in range(1, 6)} | ({m // 3} if m % 3 == 0 else set()))
    starts = [s for s in starts if 0 < s < m]
    n_walks = int(cfg["trials"])
    mc_freq = {}
    z_worst = 0.0
    for start in starts:
        absorbed, _ = run_ruin_walks(chain, start, int(cfg["seed"]) + start, n_walks)
        freq = float(absorbed.mean())
        mc_freq[start] = freq
        sigma = math.sqrt(max(exact[start] * (1 - exact[start]), 1e-12) / n_walks)
        z_worst = max(z_worst, abs(freq - exact[start]) / sigma)
    rows = []
    for i in range(m + 1):
        rows.append((float(chain.thetas[i]), float(exact[i]), mc_freq.get(i, "")))
    write_csv(out_dir / "markov_0.csv", ["theta", "exact_u", "mc_frequency"], rows)
    return {
        "metrics": {
            "oracle_max_error": oracle_error,
            "walk_starts": starts,
            "mc_frequencies": [mc_freq[s] for s in starts],
            "worst_walk_z": z_worst,
        },
        "thresholds": {"oracle_max_error": 1e-10, "abs_z_max": 3.0},
        "checks": {
            "absorption_oracle": oracle_error < 1e-10,
            "walk_frequencies": z_worst <= 3.0,
        },
    }


def run_lens(cfg, out_dir: Path) -> dict:
    start = np.zeros(2)
    v0 = np.array([1.0, 0.0])
    target = np.array([cfg["span"], cfg["displacement"]])
    design = design_lens(start, v0, target)
    dtau = 2e-3
    n_steps = int(2.5 * cfg["span"] / dtau)
    states = integrate_ray(RayState(start, v0, 0.0), design.field, dtau, n_steps)
    write_csv(
        out_dir / "lens_0.csv",
        ["tau", "q0", "q1", "energy"],
        (
            (s.tau, float(s.q[0]), float(s.q[1]), ray_energy(s, design.field))
            for s in states
        ),
    )
    return {
        "metrics": {
            "miss_distance": design.miss,
            "amplitude": design.amplitude,
            "width": design.width,
            "center": [float(c) for c in design.center],
        },
        "thresholds": {"miss_distance": 1e-3},
        "checks": {"lens_miss": design.miss < 1e-3},
    }


def run_epr(cfg, out_dir: Path) -> dict:
    a_sq = cfg["a_sq"]
    if not 0.0 <= a_sq <= 1.0:
        raise ConfigError("a_sq must lie in [0, 1]")
    state = SingletSectorState(math.sqrt(a_sq), math.sqrt(1.0 - a_sq))
    records = run_epr_batch(state, int(cfg["seed"]), int(cfg["trials"]), _region(cfg))
    stats = epr_statistics(records, int(cfg["seed"]))
    freq = stats["counts_plus_minus"] / stats["n_trials"]
    sigma = math.sqrt(max(a_sq * (1 - a_sq), 1e-12) / stats["n_trials"])
    z = (freq - a_sq) / sigma if sigma > 0 else 0.0
    return {
        "metrics": {**stats, "frequency_plus_minus": freq, "z_score": z},
        "thresholds": {"anti_correlation_violations": 0, "abs_z_max": 3.0},
        "checks": {
            "anti_correlation": stats["anti_correlation_violations"] == 0,
            "sector_frequency": abs(z) <= 3.0,
        },
    }


def run_e2_split(cfg, out_dir: Path) -> dict:
    # Field along the negative Y axis takes the spin-up state through
    # (cos wt, sin wt); a quarter period of pi/(4 w) lands on the equal
    # superposition, which the measurement then splits 50/50.
    b0 = cfg["b0"]
    params = FieldParams((0.0, -b0, 0.0), cfg["mu"], cfg["hbar"])
    if cfg["t_final"] is None:
        cfg["t_final"] = (math.pi / 4.0) * cfg["hbar"] / (cfg["mu"] * b0)
    t_final = cfg["t_final"]
    n_steps = max(int(round(t_final / cfg["dt"])), 4)
    dt = t_final / n_steps
    traj = integrate_numeric(Spinor(1.0, 0.0), params, dt, n_steps)
    terminal = evolve_exact(Spinor(1.0, 0.0), params, t_final)
    target = np.array([1.0, 1.0]) / math.sqrt(2.0)
    split_error = float(np.abs(terminal.vector - target).max())
    outcomes, steps = run_collapse_batch(
        terminal, _region(cfg), int(cfg["seed"]), int(cfg["trials"])
    )
    stats = born_statistics(outcomes, 0.5)
    z_ok = all(abs(z) <= 3.0 for z in stats["z_scores"])
    write_csv(
        out_dir / "e2_split_0.csv",
        ["t", "re_c1", "im_c1", "re_c2", "im_c2"],
        _trajectory_rows(traj),
    )
    return {
        "metrics": {
            "terminal_state_error": split_error,
            "numeric_vs_exact": float(np.abs(traj.states[-1] - terminal.vector).max()),
            **stats,
            "mean_steps": float(steps.mean()),
        },
        "thresholds": {"terminal_state_error": 1e-10, "abs_z_max": 3.0},
        "checks": {
            "terminal_state": split_error < 1e-10,
            "collapse_frequencies": z_ok,
        },
    }


RUNNERS = {
    "evolve": run_evolve,
    "bloch": run_bloch,
    "curvature": run_curvature,
    "uncertainty": run_uncertainty,
    "born": run_born,
    "markov": run_markov,
    "lens": run_lens,
    "epr": run_epr,
    "e2-split": run_e2_split,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsphere",
        description="Seeded experiments on the geometry of two-level quantum states.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", default=None, help="flat KEY=VALUE file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--c1sq", type=float, default=None)
    parser.add_argument("--a-sq", dest="a_sq", type=float, default=None)
    parser.add_argument("--t-final", dest="t_final", type=float, default=None)
    parser.add_argument("--dt", type=float, default=None)
    parser.add_argument("--bx", type=float, default=None)
    parser.add_argument("--by", type=float, default=None)
    parser.add_argument("--bz", type=float, default=None)
    parser.add_argument("--b0", type=float, default=None)
    parser.add_argument("--mu", type=float, default=None)
    parser.add_argument("--hbar", type=float, default=None)
    parser.add_argument("--planes", type=int, default=None)
    parser.add_argument("--states", type=int, default=None)
    parser.add_argument("--delta-grid", dest="delta_grid", type=int, default=None)
    parser.add_argument(
        "--region-width", dest="region_width", type=float, default=None
    )
    parser.add_argument(
        "--region-alpha", dest="region_alpha", type=float, default=None
    )
    parser.add_argument(
        "--region-beta", dest="region_beta", type=float, default=None
    )
    parser.add_argument(
        "--outcomes-csv",
        dest="outcomes_csv",
        action="store_const",
        const=1,
        default=None,
        help="also write per-trial outcome rows",
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        body = RUNNERS[args.experiment](cfg, out_dir)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {
        "experiment": args.experiment,
        "seed": int(cfg["seed"]),
        "config": cfg,
        **body,
    }
    return _finish(report, out_dir, args.experiment)


if __name__ == "__main__":
    sys.exit(main())
