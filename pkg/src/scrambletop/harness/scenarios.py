"""Scenario implementations: each regenerates one figure-style data set.

Every scenario writes CSV (and PGM for maps) plus a PNG rendering, then a
manifest listing `path sha256 bytes` for each emitted file.  Identical
configuration and seed give byte-identical CSV/PGM output.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__, classical_top as ct, floquet as fl, otoc
from .. import tolerances as tol
from ..spin import make_spin, probe_eigenvalues, rotation
from . import figures, outputs, validate as validate_mod
from .config import ScenarioConfig, config_echo

DEFAULT_TRAJECTORY_SEEDS = [
    (0.4 * np.pi, 0.0),
    (np.pi, 0.0),
    (np.pi / 2, np.pi / 2),
    (0.0, 0.0),
    (0.6 * np.pi, 0.0),
]
DEFAULT_DIVERGENCE_SEEDS = [(0.4 * np.pi, 0.0), (0.6 * np.pi, 0.0)]


@dataclass(frozen=True)
class RunManifest:
    scenario: str
    version: str
    wall_clock: float
    manifest_path: Path
    entries: list[tuple[str, str, int]]


def resolve_threads(cfg: ScenarioConfig) -> int:
    if cfg.threads > 0:
        return cfg.threads
    env = os.environ.get("SCRAMBLETOP_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"SCRAMBLETOP_THREADS must be an integer, got {env!r}")
    return 1


def _chunks(n: int, pieces: int) -> list[range]:
    pieces = max(1, min(pieces, n))
    bounds = np.linspace(0, n, pieces + 1).astype(int)
    return [range(bounds[i], bounds[i + 1]) for i in range(pieces) if bounds[i] < bounds[i + 1]]


def _parallel_rows(fn, n_rows: int, threads: int) -> None:
    """Run fn(row_range) over bounded row blocks; assembly is by index, so
    the result does not depend on scheduling order.  Blocks are capped at
    eight rows to bound the per-worker rotation-stack memory."""
    blocks = _chunks(n_rows, max(threads, (n_rows + 7) // 8))
    if threads <= 1:
        for rows in blocks:
            fn(rows)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, rows) for rows in blocks]
        for fut in futures:
            fut.result()


def _grid(cfg: ScenarioConfig) -> tuple[np.ndarray, np.ndarray]:
    thetas = np.linspace(0.0, np.pi, cfg.n_theta)
    phis = 2.0 * np.pi * np.arange(cfg.n_phi) / cfg.n_phi
    return thetas, phis


def _quantum_params(cfg: ScenarioConfig, spin: float | None = None) -> fl.QuantumParams:
    return fl.QuantumParams(
        alpha=cfg.alpha,
        beta=cfg.beta,
        gamma=cfg.gamma,
        omega=cfg.omega,
        j=cfg.spin if spin is None else spin,
    )


def _emit_map(
    out_dir: Path,
    stem: str,
    thetas: np.ndarray,
    phis: np.ndarray,
    matrix: np.ndarray,
    label: str,
    log_png: bool = False,
) -> list[Path]:
    files = [outputs.write_matrix_csv(out_dir / f"{stem}.csv", thetas, phis, matrix)]
    pgm, sidecar = outputs.write_pgm(out_dir / f"{stem}.pgm", matrix)
    files += [pgm, sidecar]
    files.append(
        figures.save_heatmap(
            out_dir / f"{stem}.png", thetas, phis, matrix, label, title=stem, log_scale=log_png
        )
    )
    return files


# --------------------------------------------------------------------------
# classical scenarios
# --------------------------------------------------------------------------

def run_divergence(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """Stroboscopic trajectories plus pair and tangent-space separations."""
    p = ct.ClassicalParams(alpha=cfg.alpha, beta=cfg.beta, gamma=cfg.gamma, omega=cfg.omega)
    seeds = cfg.seeds or DEFAULT_DIVERGENCE_SEEDS
    files: list[Path] = []
    n = cfg.divergence_periods
    times = np.arange(n + 1, dtype=float)
    pair_cols, var_cols, labels = [], [], []
    for k, (th, ph) in enumerate(seeds):
        l0 = ct.direction(th, ph)
        traj = ct.trajectory(l0, p, n, cfg.steps_per_period)
        files.append(
            outputs.write_series_csv(
                out_dir / f"trajectory_{k}.csv",
                ["t_over_tau", "Lx", "Ly", "Lz"],
                [times, traj[:, 0], traj[:, 1], traj[:, 2]],
            )
        )
        e1, _ = ct.orthogonal_plane(l0)
        delta = cfg.delta0 * e1
        _, pair = ct.integrate_pair(l0, delta, n * p.tau, p.tau / cfg.steps_per_period, p)
        _, grown = ct.variational_divergence(l0, delta, n * p.tau, p, cfg.steps_per_period)
        pair_cols.append(pair)
        var_cols.append(grown)
        labels.append(f"seed{k}")
    files.append(
        outputs.write_series_csv(
            out_dir / "divergence.csv",
            ["t_over_tau"]
            + [f"pair_{lab}" for lab in labels]
            + [f"variational_{lab}" for lab in labels],
            [times] + pair_cols + var_cols,
        )
    )
    series = {f"pair {lab}": col for lab, col in zip(labels, pair_cols)}
    series |= {f"tangent {lab}": col for lab, col in zip(labels, var_cols)}
    files.append(
        figures.save_series(
            out_dir / "divergence.png",
            times,
            series,
            xlabel=r"$t/\tau$",
            ylabel=r"$|\delta x(t)|$",
            title="trajectory separation",
            log_y=True,
        )
    )
    return files


def run_lyapunov_map(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """Average Lyapunov exponent per initial direction, display floor applied."""
    p = ct.ClassicalParams(alpha=cfg.alpha, beta=cfg.beta, gamma=cfg.gamma, omega=cfg.omega)
    thetas, phis = _grid(cfg)
    matrix = np.empty((cfg.n_theta, cfg.n_phi))
    threads = resolve_threads(cfg)

    def fill(rows: range) -> None:
        for i in rows:
            for jj, ph in enumerate(phis):
                matrix[i, jj] = ct.lyapunov(
                    thetas[i], ph, p, cfg.lyapunov_periods * p.tau, cfg.n_dirs, cfg.steps_per_period
                )

    _parallel_rows(fill, cfg.n_theta, threads)
    floored = np.maximum(matrix, tol.LYAPUNOV_MAP_FLOOR)
    files = _emit_map(out_dir, "lyapunov_map", thetas, phis, floored, r"$\lambda$ (1/$\tau$)", log_png=True)
    return files


# --------------------------------------------------------------------------
# quantum map scenarios
# --------------------------------------------------------------------------

def _cell_rotations(sys, thetas: np.ndarray, phis: np.ndarray, rows: range) -> np.ndarray:
    """Stack of rotation matrices for every (theta, phi) cell in the rows."""
    stack = np.empty((len(rows) * len(phis), sys.dim, sys.dim), dtype=np.complex128)
    idx = 0
    for i in rows:
        for ph in phis:
            stack[idx] = rotation(sys, thetas[i], ph)
            idx += 1
    return stack


def _otoc_maps(
    cfg: ScenarioConfig, spin: float, threads: int
) -> tuple[np.ndarray, np.ndarray, dict[float, np.ndarray], np.ndarray]:
    """Per-cell OTOC snapshots and the running average over t < t_max.

    Each grid cell carries its own coherent state and probe axis; states for
    a row block are evolved period by period with one matrix product, and
    the probe-basis populations are read out after every period.
    """
    p = _quantum_params(cfg, spin)
    sys = make_spin(spin)
    f = fl.floquet_operator(p, sys, cfg.segments)
    thetas, phis = _grid(cfg)
    horizon = int(round(cfg.t_max))
    if horizon < 2:
        raise ValueError("t_max must span at least two periods for the averaged map")
    snap_ks = sorted({int(round(t)) for t in cfg.snapshot_times})
    if any(k < 1 for k in snap_ks):
        raise ValueError("snapshot times must be at least one period")
    snapshots = {k: np.empty((cfg.n_theta, cfg.n_phi)) for k in snap_ks}
    average = np.empty((cfg.n_theta, cfg.n_phi))
    mu = probe_eigenvalues(sys, cfg.epsilon)
    u_transpose = f.u.T.copy()

    def fill(rows: range) -> None:
        r_stack = _cell_rotations(sys, thetas, phis, rows)
        states = r_stack[:, :, 0].copy()
        r_conj = r_stack.conj()
        acc = np.zeros(states.shape[0])
        count = 0
        for k in range(1, max(horizon, max(snap_ks) + 1)):
            states = states @ u_transpose
            amps = np.einsum("cjm,cj->cm", r_conj, states)
            f_vals = np.abs((np.abs(amps) ** 2) @ mu) ** 2
            if k < horizon:
                acc += f_vals
                count += 1
            if k in snapshots:
                snapshots[k][rows] = f_vals.reshape(len(rows), len(phis))
        average[rows] = (acc / count).reshape(len(rows), len(phis))

    _parallel_rows(fill, cfg.n_theta, threads)
    return thetas, phis, {float(k): m for k, m in snapshots.items()}, average


def run_otoc_map(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """Snapshot maps F(t) at the configured times plus the time average."""
    threads = resolve_threads(cfg)
    thetas, phis, snapshots, average = _otoc_maps(cfg, cfg.spin, threads)
    files: list[Path] = []
    for k, matrix in snapshots.items():
        files += _emit_map(out_dir, f"otoc_map_t{int(k)}", thetas, phis, matrix, "F(t)")
    files += _emit_map(out_dir, "otoc_map_average", thetas, phis, average, "mean F")
    return files


def run_spin_compare(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """Snapshot and averaged OTOC maps for each configured spin size."""
    threads = resolve_threads(cfg)
    files: list[Path] = []
    for spin in cfg.spins:
        snap_cfg = ScenarioConfig(**{**cfg.__dict__, "snapshot_times": [10.0]})
        thetas, phis, snapshots, average = _otoc_maps(snap_cfg, spin, threads)
        tag = f"j{int(round(2 * spin))}half"
        files += _emit_map(out_dir, f"otoc_snapshot_t10_{tag}", thetas, phis, snapshots[10.0], "F(10 tau)")
        files += _emit_map(out_dir, f"otoc_average_{tag}", thetas, phis, average, "mean F")
    return files


def run_pr_map(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """Participation-ratio map of the coherent states in the Floquet basis."""
    p = _quantum_params(cfg)
    sys = make_spin(cfg.spin)
    f = fl.floquet_operator(p, sys, cfg.segments)
    thetas, phis = _grid(cfg)
    matrix = np.empty((cfg.n_theta, cfg.n_phi))
    threads = resolve_threads(cfg)
    modes_conj = f.modes.conj()

    def fill(rows: range) -> None:
        r_stack = _cell_rotations(sys, thetas, phis, rows)
        amps = np.einsum("ji,cj->ci", modes_conj, r_stack[:, :, 0])
        matrix[rows] = (1.0 / np.sum(np.abs(amps) ** 4, axis=1)).reshape(len(rows), len(phis))

    _parallel_rows(fill, cfg.n_theta, threads)
    return _emit_map(out_dir, "pr_map", thetas, phis, matrix, "participation ratio")


# --------------------------------------------------------------------------
# trajectory scenarios
# --------------------------------------------------------------------------

def run_trajectories(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """F(t) time series for a list of coherent-state seeds."""
    p = _quantum_params(cfg)
    sys = make_spin(cfg.spin)
    f = fl.floquet_operator(p, sys, cfg.segments)
    seeds = cfg.seeds or DEFAULT_TRAJECTORY_SEEDS
    times = np.asarray(cfg.times, dtype=float) if cfg.times else np.arange(1.0, cfg.t_max + 1.0)
    files: list[Path] = []
    f_cols, labels = [], []
    for k, (th, ph) in enumerate(seeds):
        run_cfg = otoc.OtocConfig(
            theta=th,
            phi=ph,
            epsilon=cfg.epsilon,
            times=times,
            shots=cfg.shots,
            rng_seed=cfg.rng_seed + k,
        )
        res = otoc.otoc_pure(run_cfg, p, sys, f)
        label = f"seed{k}"
        files.append(
            outputs.write_series_csv(
                out_dir / f"otoc_seed{k}.csv",
                ["t_over_tau", "F", "C", "ReW", "ImW"],
                [times, res.f, res.c, res.expectation_w.real, res.expectation_w.imag],
            )
        )
        files.append(
            outputs.write_series_csv(
                out_dir / f"populations_seed{k}.csv",
                ["t_over_tau"] + [f"m_{i}" for i in range(sys.dim)],
                [times] + [res.populations[:, i] for i in range(sys.dim)],
            )
        )
        f_cols.append(res.f)
        labels.append(label)
    files.append(
        outputs.write_series_csv(
            out_dir / "otoc_trajectories.csv",
            ["t_over_tau"] + labels,
            [times] + f_cols,
        )
    )
    files.append(
        figures.save_series(
            out_dir / "otoc_trajectories.png",
            times,
            dict(zip(labels, f_cols)),
            xlabel=r"$t/\tau$",
            ylabel="F(t)",
            title="OTOC trajectories",
        )
    )
    return files


def run_epsilon_sweep(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    """One measured population set re-weighted for every probe angle.

    Demonstrates the protocol's angle tunability: populations are produced
    once (chaotic seed by default), then F and C/epsilon^2 follow for each
    epsilon without re-running the evolution.
    """
    p = _quantum_params(cfg)
    sys = make_spin(cfg.spin)
    f = fl.floquet_operator(p, sys, cfg.segments)
    seed = cfg.seeds[0] if cfg.seeds else (0.6 * np.pi, 0.0)
    times = np.asarray(cfg.times, dtype=float) if cfg.times else np.arange(1.0, cfg.t_max + 1.0)
    base_cfg = otoc.OtocConfig(
        theta=seed[0],
        phi=seed[1],
        epsilon=cfg.epsilons[0],
        times=times,
        shots=cfg.shots,
        rng_seed=cfg.rng_seed,
    )
    base = otoc.otoc_pure(base_cfg, p, sys, f)
    sigma_sq, _ = otoc.variance_check(
        otoc.OtocConfig(theta=seed[0], phi=seed[1], epsilon=cfg.epsilons[0], times=times),
        p,
        sys,
        f,
    )
    f_cols, ratio_cols, labels = [], [], []
    for eps in cfg.epsilons:
        res = otoc.reweight_epsilon(base, eps, sys)
        f_cols.append(res.f)
        ratio_cols.append(res.c / eps**2)
        labels.append(f"eps={eps:.6g}")
    files = [
        outputs.write_series_csv(
            out_dir / "epsilon_sweep_f.csv",
            ["t_over_tau"] + labels,
            [times] + f_cols,
        ),
        outputs.write_series_csv(
            out_dir / "epsilon_sweep_ratio.csv",
            ["t_over_tau", "sigma_sq"] + labels,
            [times, sigma_sq] + ratio_cols,
        ),
        outputs.write_series_csv(
            out_dir / "populations.csv",
            ["t_over_tau"] + [f"m_{i}" for i in range(sys.dim)],
            [times] + [base.populations[:, i] for i in range(sys.dim)],
        ),
        figures.save_series(
            out_dir / "epsilon_sweep_f.png",
            times,
            dict(zip(labels, f_cols)),
            xlabel=r"$t/\tau$",
            ylabel="F(t)",
            title="probe-angle sweep",
        ),
        figures.save_series(
            out_dir / "epsilon_sweep_ratio.png",
            times,
            {"sigma_sq": sigma_sq} | dict(zip(labels, ratio_cols)),
            xlabel=r"$t/\tau$",
            ylabel=r"$C(t)/\epsilon^2$",
            title="perturbative consistency",
        ),
    ]
    return files


def run_validate(cfg: ScenarioConfig, out_dir: Path) -> list[Path]:
    report = validate_mod.run_suite()
    path = out_dir / "validation_report.txt"
    path.write_text(report.text())
    if not report.ok:
        raise RuntimeError(f"validation failed:\n{report.text()}")
    return [path]


SCENARIOS = {
    "fig2-divergence": run_divergence,
    "fig3a-lyapunov-map": run_lyapunov_map,
    "fig3b-pr-map": run_pr_map,
    "fig4-otoc-map": run_otoc_map,
    "fig5-spin-compare": run_spin_compare,
    "fig5b-trajectories": run_trajectories,
    "fig6-epsilon-sweep": run_epsilon_sweep,
    "validate": run_validate,
}


def run(cfg: ScenarioConfig) -> RunManifest:
    """Execute a scenario and write its manifest; returns the run record."""
    cfg.validate()
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    try:
        files = SCENARIOS[cfg.scenario](cfg, out_dir)
    except OSError as exc:
        raise OSError(f"scenario {cfg.scenario!r} failed writing into {out_dir}: {exc}") from exc
    wall = time.time() - started
    manifest_path = outputs.write_manifest(
        out_dir / "manifest.txt", files, out_dir, config_echo(cfg), __version__, wall
    )
    entries = []
    for raw in manifest_path.read_text().splitlines():
        if raw and not raw.startswith("#"):
            name, digest, size = raw.rsplit(" ", 2)
            entries.append((name, digest, int(size)))
    return RunManifest(
        scenario=cfg.scenario,
        version=__version__,
        wall_clock=wall,
        manifest_path=manifest_path,
        entries=entries,
    )
