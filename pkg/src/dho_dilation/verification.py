"""Invariant suite run by ``dho verify``.

Each check measures one residual and compares it with a fixed threshold.
Randomized inputs come from a generator seeded by the scenario, so the report
is reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import ortho_group

from . import car_fock, finite_dilation as fd, quasifree as qf, semigroup_dilation as sd
from .config import ScenarioConfig
from .errors import InvalidArgument
from .phase_space import (evolve_closed_form, evolve_oracle, lyapunov_residual, make_generator,
                          make_phase_space, quadratic_residual)


@dataclass(frozen=True)
class CheckResult:
    name: str
    threshold: float
    measured: float
    below: bool = True  # pass when measured < threshold; otherwise measured > threshold

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        return self.measured < self.threshold if self.below else self.measured > self.threshold


def format_report(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'invariant':<{width}}  {'threshold':>12}  {'measured':>12}  result"]
    for r in results:
        bound = ("< " if r.below else "> ") + f"{r.threshold:.1e}"
        lines.append(f"{r.name:<{width}}  {bound:>12}  {r.measured:>12.3e}  {'PASS' if r.passed else 'FAIL'}")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} passed")
    return "\n".join(lines) + "\n"


def _phase_space_checks(cfg, g):
    ps = g.space
    yield CheckResult("J J + 1", 1e-15, float(np.linalg.norm(ps.J @ ps.J + np.eye(ps.dim))))
    eye = np.eye(ps.dim)
    yield CheckResult("J P - (1 - P) J", 1e-15, float(np.linalg.norm(ps.J @ ps.P - (eye - ps.P) @ ps.J)))
    yield CheckResult("(Z + gamma)^2 - alpha^2", 1e-12, quadratic_residual(g))
    yield CheckResult("Z^T + Z + 4 gamma P", 1e-13, lyapunov_residual(g))
    dev = max(np.linalg.norm(evolve_closed_form(g, t).T - evolve_oracle(g, t).T) for t in cfg.t_samples)
    yield CheckResult("closed form vs expm", 1e-9, float(dev))
    T1, T2, T3 = (evolve_closed_form(g, t).T for t in (1.0, 2.0, 3.0))
    yield CheckResult("semigroup T_1 T_2 - T_3", 1e-10, float(np.linalg.norm(T1 @ T2 - T3)))
    smax = max(evolve_closed_form(g, t).sigma_max for t in cfg.t_samples)
    yield CheckResult("sigma_max(T_t) - 1", 1e-12, smax - 1.0)


def _dilation_checks(cfg, g):
    ds = fd.make_doubled_space(g.space)
    worst_orth = worst_comp = worst_split = 0.0
    for t in cfg.t_samples:
        dil = fd.dilate_contraction(evolve_closed_form(g, t).T)
        m = dil.size
        worst_orth = max(worst_orth, np.linalg.norm(dil.U.T @ dil.U - np.eye(2 * m)))
        worst_comp = max(worst_comp, np.linalg.norm(fd.compression(dil.U) - dil.T))
        pair = fd.bogoliubov_split(dil, ds)
        worst_split = max(worst_split, np.linalg.norm(pair.a @ ds.Jt - ds.Jt @ pair.a),
                          np.linalg.norm(pair.b @ ds.Jt + ds.Jt @ pair.b))
    yield CheckResult("U^T U - 1", 1e-10, float(worst_orth))
    yield CheckResult("j^* U j - T", 1e-10, float(worst_comp))
    yield CheckResult("Bogoliubov split commutation", 1e-12, float(worst_split))
    t_ref = max(cfg.t_samples) or 1.0
    scaling = fd.hs_scaling(cfg.omega, cfg.gamma, t_ref)
    base = scaling[0][1]
    for n, value in scaling:
        if base > 0:
            measured = abs(value / base - n) / n
        else:
            measured = abs(value)
        yield CheckResult(f"HS norm^2 ratio n={n} (value {value:.6g})", 1e-10, float(measured))


def _fock_checks(cfg, g, rng):
    rep = car_fock.build_fock(4)
    yield CheckResult("CAR residual d=4", 1e-12, car_fock.car_residual(rep.c))
    rep2 = car_fock.build_fock(2)
    sp2 = car_fock.standard_space(2)
    worst = 0.0
    for k in range(20):
        U = ortho_group.rvs(4, random_state=rng.integers(2**31))
        pair = fd.bogoliubov_split(U, sp2.J)
        ops = [car_fock.transformed_creation(rep2, sp2, pair, sp2.basis[:, i]) for i in range(2)]
        worst = max(worst, car_fock.car_residual(ops))
    yield CheckResult("Bogoliubov CAR residual (20 random U)", 1e-10, worst)

    ds = fd.make_doubled_space(make_phase_space(1))
    g1 = make_generator(ds.base, cfg.omega, cfg.gamma)
    sp = car_fock.make_one_particle_space(ds.Jt)
    t_ref = max(cfg.t_samples) or 1.0
    pair = fd.bogoliubov_split(fd.dilate_contraction(evolve_closed_form(g1, t_ref).T), ds)
    vac = car_fock.transformed_vacuum(rep2, sp, pair)
    res = max(np.linalg.norm(car_fock.transformed_creation(rep2, sp, pair, sp.basis[:, k]).H @ vac)
              for k in range(2))
    yield CheckResult("transformed vacuum annihilation", 1e-9, float(res))

    rep3 = car_fock.build_fock(3)
    sp3 = car_fock.standard_space(3)
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    z /= np.linalg.norm(z)
    Q = qf.realify(np.outer(z, z.conj()))
    Qt = car_fock.second_quantize_projection(rep3, sp3, Q)
    worst = 0.0
    for k in range(6):
        e = np.zeros(6)
        e[k] = 1.0
        c = car_fock.creation(rep3, sp3, e)
        comm = Qt.matrix @ c.matrix - c.matrix @ Qt.matrix
        worst = max(worst, np.abs(comm - car_fock.creation(rep3, sp3, Q @ e).matrix).max())
    yield CheckResult("[Q~, c(m)] - c(Q m)", 1e-11, float(worst))


def _quasifree_checks(cfg, rng):
    worst = 0.0
    for _ in range(20):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        _, W = np.linalg.eigh(A + A.conj().T)
        R = (W * rng.uniform(0, 1, 2)) @ W.conj().T
        st = qf.quasifree_state(0.5 * (R + R.conj().T))
        m = rng.normal(size=2) + 1j * rng.normal(size=2)
        n = rng.normal(size=2) + 1j * rng.normal(size=2)
        worst = max(worst, abs(qf.two_point_via_fock(st, m, n) - qf.two_point_direct(st, m, n)))
    yield CheckResult("two-point Fock vs <m, R n>", 1e-10, float(worst))
    H = np.diag([1.0, -1.0])
    e1 = np.array([1.0, 0.0])
    yield CheckResult("KMS residual (beta=1)", 1e-10, qf.kms_two_point_check(H, 1.0, e1, e1))
    yield CheckResult("KMS control, R = 1/2", 1e-3,
                      qf.kms_two_point_check(H, 1.0, e1, e1, R=0.5 * np.eye(2)), below=False)


def _halfline_checks(cfg, g, rng):
    if not g.gamma > 0:
        raise InvalidArgument("half-line checks need gamma > 0 (set halfline_checks = false to skip)")
    t_shift = max(cfg.t_samples)
    grid = sd.make_grid(g, cfg.dt, cfg.t_max, max_shift=t_shift)
    m = _unit_vector(cfg, g, rng)
    f = sd.inject_halfline(g, m, grid)
    yield CheckResult("isometry | ||jm||^2 - 1 |", 1e-6, abs(f.norm_sq() - 1.0))
    dev = max(np.linalg.norm(sd.compress(sd.shift(f, t), g) - evolve_closed_form(g, t).T @ m)
              for t in cfg.t_samples)
    yield CheckResult("j^* U_t j m - T_t m", 1e-6, float(dev))
    yield CheckResult("Lyapunov Gram - 1", 1e-10, float(np.linalg.norm(sd.lyapunov_gram(g) - np.eye(g.space.dim))))

    wide = sd.make_grid(g, cfg.dt, max(cfg.t_max or 0.0, 60.0, sd.auto_t_max(g)))
    lo, hi, count = cfg.energy_band
    E = np.linspace(lo, hi, count)
    band = E[np.abs(E) <= math.pi / (4 * cfg.dt)]
    closed = sd.spectral_amplitude_closed(g, m, band)
    dft = sd.spectral_amplitude_dft(g, m, wide, band)
    yield CheckResult("Breit-Wigner closed vs Fourier", 1e-4, float(np.abs(closed.amplitude - dft.amplitude).max()))
    yield CheckResult("spectral mass - ||m||^2", 1e-4, abs(sd.spectral_mass_closed(g, m) - 1.0))

    worst = 0.0
    for t in cfg.t_samples:
        worst = max(worst, sd.decay_expectation(g, m, m, t, grid).deviation)
    yield CheckResult("decay: closed form vs grid", 1e-6, float(worst))
    if cfg.fock:
        fock_grid = sd.make_grid(g, cfg.dt, cfg.t_max, max_shift=2 * t_shift)
        worst = 0.0
        for t in cfg.t_samples:
            exact = sd.decay_expectation(g, m, m, t, fock_grid).analytic
            worst = max(worst, abs(sd.fock_decay_expectation(g, m, m, t, grid=fock_grid) - exact))
        yield CheckResult("decay: closed form vs Fock", 1e-6, float(worst))

    gc = make_generator(g.space, cfg.omega, cfg.omega)
    N = sd.critical_kernel(gc)
    yield CheckResult("critical kernel dimension - n_modes", 0.5, abs(N.shape[1] - g.space.n_modes))
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        value = sd.decay_expectation(gc, N[:, 0], N[:, 0], t, sd.make_grid(gc, cfg.dt, max_shift=t))
        worst = max(worst, abs(value.analytic - math.exp(-2 * cfg.omega * t)))
    yield CheckResult("critical decay - exp(-2 gamma t)", 1e-10, worst)


def _unit_vector(cfg, g, rng):
    if cfg.vector is not None:
        m = np.asarray(cfg.vector, dtype=float)
    else:
        m = rng.normal(size=g.space.dim)
    return m / np.linalg.norm(m)


def run_checks(cfg: ScenarioConfig) -> list[CheckResult]:
    cfg.validate()
    if cfg.halfline_checks and not cfg.gamma > 0:
        raise InvalidArgument("half-line checks need gamma > 0 (set halfline_checks = false to skip)")
    rng = np.random.default_rng(cfg.seed)
    g = make_generator(make_phase_space(cfg.n_modes), cfg.omega, cfg.gamma)
    results = []
    results += _phase_space_checks(cfg, g)
    results += _dilation_checks(cfg, g)
    results += _fock_checks(cfg, g, rng)
    results += _quasifree_checks(cfg, rng)
    if cfg.halfline_checks:
        results += _halfline_checks(cfg, g, rng)
    return results
