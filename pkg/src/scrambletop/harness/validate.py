"""Oracle-equivalence suite behind ``scrambletop validate``.

Each check compares the measurement-protocol path against an independent
evaluation route (explicit Heisenberg operators, echo fidelity, direct
matrix elements, finite differences).  Any failure makes the CLI exit
nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import classical_top as ct, floquet as fl, open_system as osys, otoc
from ..numerics import adjoint
from ..spin import make_spin, scs, w_rotation


@dataclass
class ValidationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append((name, passed, detail))

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def text(self) -> str:
        lines = [
            f"{'PASS' if passed else 'FAIL'}  {name}  ({detail})"
            for name, passed, detail in self.checks
        ]
        lines.append(f"{sum(p for _, p, _ in self.checks)}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _random_state(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def _random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def run_suite(quick: bool = False) -> ValidationReport:
    """Run every oracle-equivalence check; ``quick`` trims durations only."""
    report = ValidationReport()
    rng = np.random.default_rng(20260808)

    # protocol vs explicit-trace correlator
    worst = 0.0
    spins = (1.5, 3.5) if quick else (1.5, 3.5, 20.5)
    n_seeds = 3 if quick else 5
    for j in spins:
        p = fl.QuantumParams(j=j)
        sys = make_spin(j)
        f_op = fl.floquet_operator(p, sys)
        prop = fl.propagator(f_op, p, sys)
        for _ in range(n_seeds):
            th = float(np.arccos(rng.uniform(-1, 1)))
            ph = float(rng.uniform(0, 2 * np.pi))
            cfg = otoc.OtocConfig(theta=th, phi=ph, epsilon=np.pi / 40, times=[1.0, 5.0, 17.0])
            res = otoc.otoc_pure(cfg, p, sys, f_op)
            w, _ = w_rotation(sys, th, ph, np.pi / 40)
            psi0 = scs(sys, th, ph).amplitudes
            rho0 = np.outer(psi0, psi0.conj())
            for k, t in enumerate(cfg.times):
                oracle = otoc.otoc_trace_oracle(rho0, rho0, w, t * p.tau, prop)
                worst = max(worst, abs(res.f[k] - oracle))
    report.add("protocol equals trace correlator", worst < 1e-10, f"max gap {worst:.2e}")

    # echo fidelity equals the trace correlator
    worst = 0.0
    for _ in range(10 if quick else 50):
        d = int(rng.integers(2, 9))
        h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = (h + adjoint(h)) / 2
        prop = fl.static_propagator(h)
        psi = _random_state(rng, d)
        rho0 = np.outer(psi, psi.conj())
        w = _random_unitary(rng, d)
        t = float(rng.uniform(0, 10))
        echo = otoc.loschmidt_fidelity(rho0, w, t, prop)
        oracle = otoc.otoc_trace_oracle(rho0, rho0, w, t, prop).real
        worst = max(worst, abs(echo - oracle))
    report.add("echo fidelity equals trace correlator", worst < 1e-12, f"max gap {worst:.2e}")

    # polarization reconstruction of matrix elements
    worst = 0.0
    for _ in range(10 if quick else 30):
        d = int(rng.integers(2, 9))
        basis = _random_unitary(rng, d)
        w = _random_unitary(rng, d)
        i, k = rng.choice(d, size=2, replace=False)
        rebuilt = otoc.polarization_element(basis[:, i], basis[:, k], w)
        direct = basis[:, k].conj() @ (w @ basis[:, i])
        worst = max(worst, abs(rebuilt - direct))
    report.add("polarization identity", worst < 1e-10, f"max gap {worst:.2e}")

    # mixed-state protocol vs brute force
    worst = 0.0
    for _ in range(5 if quick else 15):
        d = int(rng.integers(2, 5))
        basis = _random_unitary(rng, d)
        weights = rng.uniform(0.05, 1.0, size=d)
        weights /= weights.sum()
        ms = otoc.MixedState(weights=weights, basis=basis)
        h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = (h + adjoint(h)) / 2
        prop = fl.static_propagator(h)
        sys = make_spin((d - 1) / 2)
        cfg = otoc.OtocConfig(theta=0.3, phi=0.7, epsilon=0.2, times=[2.5])
        protocol = otoc.otoc_mixed(ms, cfg, prop, sys)[0]
        w, _ = w_rotation(sys, 0.3, 0.7, 0.2)
        rho0 = ms.density_matrix
        brute = otoc.otoc_trace_oracle(rho0, rho0, w, 2.5, prop).real
        worst = max(worst, abs(protocol - brute))
    report.add("mixed-state protocol vs brute force", worst < 1e-9, f"max gap {worst:.2e}")

    # arbitrary early-time operator vs trace correlator
    worst = 0.0
    budget_ok = True
    for _ in range(5 if quick else 15):
        d = int(rng.integers(2, 5))
        basis = _random_unitary(rng, d)
        weights = rng.uniform(0.05, 1.0, size=d)
        weights /= weights.sum()
        ms = otoc.MixedState(weights=weights, basis=basis)
        v_coeff = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = (h + adjoint(h)) / 2
        prop = fl.static_propagator(h)
        sys = make_spin((d - 1) / 2)
        cfg = otoc.OtocConfig(theta=1.1, phi=0.2, epsilon=0.15, times=[3.0])
        result = otoc.otoc_general_v(ms, v_coeff, cfg, prop, sys)
        budget_ok &= result.expectation_count <= 2 * d * d
        w, _ = w_rotation(sys, 1.1, 0.2, 0.15)
        v_op = basis @ v_coeff @ adjoint(basis)
        rho0 = ms.density_matrix
        oracle = otoc.otoc_trace_oracle(rho0, v_op, w, 3.0, prop)
        worst = max(worst, abs(result.values[0] - oracle))
    report.add(
        "arbitrary-V protocol vs trace correlator",
        worst < 1e-9 and budget_ok,
        f"max gap {worst:.2e}, budget ok {budget_ok}",
    )

    # probe-angle reuse is exact
    p = fl.QuantumParams(j=3.5)
    sys = make_spin(3.5)
    f_op = fl.floquet_operator(p, sys)
    times = np.arange(1.0, 11.0)
    cfg_a = otoc.OtocConfig(theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 40, times=times)
    cfg_b = otoc.OtocConfig(theta=0.6 * np.pi, phi=0.0, epsilon=np.pi / 10, times=times)
    res_a = otoc.otoc_pure(cfg_a, p, sys, f_op)
    res_b = otoc.otoc_pure(cfg_b, p, sys, f_op)
    reused = otoc.reweight_epsilon(res_a, np.pi / 10, sys)
    bitwise = np.array_equal(reused.f, res_b.f)
    report.add("population reuse across probe angles", bitwise, "bitwise equal" if bitwise else "differs")

    # Floquet segmentation self-convergence
    u_a = fl._segment_product(p, sys, 2000, 0, 2000)
    u_b = fl._segment_product(p, sys, 4000, 0, 4000)
    gap = float(np.abs(u_a - u_b).max())
    report.add("Floquet segmentation converged", gap < 1e-6, f"gap {gap:.2e}")

    # classical conservation and tangent-map consistency
    cp = ct.ClassicalParams()
    periods = 100 if quick else 1000
    traj = ct.trajectory(ct.direction(0.6 * np.pi, 0.0), cp, periods)
    drift = float(np.abs(np.linalg.norm(traj, axis=1) - 1.0).max())
    report.add(
        f"|L| conserved over {periods} periods", drift < 1e-9, f"relative drift {drift:.2e}"
    )
    worst = 0.0
    for _ in range(20):
        l = rng.normal(size=3)
        l /= np.linalg.norm(l)
        t = float(rng.uniform(0, 10))
        jac = ct.jacobian(l, t, cp)
        fd = np.empty((3, 3))
        step = 1e-6
        for c in range(3):
            dv = np.zeros(3)
            dv[c] = step
            fd[:, c] = (ct.eom(l + dv, t, cp) - ct.eom(l - dv, t, cp)) / (2 * step)
        worst = max(worst, float(np.abs(jac - fd).max() / np.abs(jac).max()))
    report.add("Jacobian matches finite differences", worst < 1e-5, f"max rel gap {worst:.2e}")

    lam_reg = ct.lyapunov(0.4 * np.pi, 0.0, cp, 200 * cp.tau, n_dirs=90)
    lam_cha = ct.lyapunov(0.6 * np.pi, 0.0, cp, 200 * cp.tau, n_dirs=90)
    ratio = lam_cha / max(lam_reg, 1e-12)
    report.add("chaotic/regular exponent ordering", ratio >= 10, f"ratio {ratio:.1f}")

    # open-system product structure and closed limit
    p2 = fl.QuantumParams(j=0.5)
    sys2 = make_spin(0.5)
    model = osys.dephasing_model(p2, sys2, 0.1)
    psi = scs(sys2, 0.6 * np.pi, 0.0).amplitudes
    rho0 = np.outer(psi, psi.conj())
    dev = osys.doubled_evolution_check(rho0, model, 10 * p2.tau, dt=p2.tau / 2000)
    report.add("doubled evolution stays a product", dev < 1e-8, f"deviation {dev:.2e}")

    return report
