"""Command line entry point: ``dho evolve|decay|spectrum|verify``.

CSV output has a one-line header and 17 significant digits.  When ``--out``
names a file, a PNG figure with the same stem is written beside it unless
``--no-figure`` is given.  Exit codes: 0 success, 1 verification failure,
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import plotting, semigroup_dilation as sd
from .config import ScenarioConfig, load_config
from .errors import DhoError
from .finite_dilation import hs_scaling
from .phase_space import Regime, evolve_closed_form, evolve_oracle, make_generator, make_phase_space
from .verification import format_report, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.17g}"


def _csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(x) for x in row) + "\n")
    return out.getvalue()


def _generator(cfg):
    return make_generator(make_phase_space(cfg.n_modes), cfg.omega, cfg.gamma)


def _decay_vector(cfg, g):
    if cfg.vector is not None:
        m = np.asarray(cfg.vector, dtype=float)
        return m / np.linalg.norm(m)
    if g.regime is Regime.CRITICAL:
        return sd.critical_kernel(g)[:, 0]
    m = np.zeros(g.space.dim)
    m[0] = 1.0
    return m


def cmd_evolve(cfg: ScenarioConfig):
    g = _generator(cfg)
    dim = g.space.dim
    labels = [f"T_{i}_{j}" for i in range(dim) for j in range(dim)]
    rows, entries, sigmas = [], [], []
    for t in cfg.t_samples:
        prop = evolve_closed_form(g, t)
        residual = np.linalg.norm(prop.T - evolve_oracle(g, t).T)
        rows.append([t, *prop.T.ravel(), prop.sigma_max, residual])
        entries.append(prop.T.ravel())
        sigmas.append(prop.sigma_max)

    def figure(path):
        plotting.plot_evolve(path, cfg.t_samples, sigmas, entries, labels)

    return _csv(["t", *labels, "sigma_max", "residual"], rows), figure


def cmd_decay(cfg: ScenarioConfig):
    g = _generator(cfg)
    m = _decay_vector(cfg, g)
    t_top = max(cfg.t_samples)
    grid = sd.make_grid(g, cfg.dt, cfg.t_max, max_shift=2 * t_top if cfg.fock else t_top)
    for t in cfg.t_samples:
        grid.cells(t)
    critical = g.regime is Regime.CRITICAL
    rows, one, on_grid, fock = [], [], [], []
    for t in cfg.t_samples:
        value = sd.decay_expectation(g, m, m, t, grid)
        fv = sd.fock_decay_expectation(g, m, m, t, grid=grid).real if cfg.fock else None
        ref = math.exp(-2 * g.gamma * t) if critical else None
        rows.append([t, value.analytic.real, value.grid.real, fv, ref])
        one.append(value.analytic.real)
        on_grid.append(value.grid.real)
        fock.append(fv)

    def figure(path):
        reference = (lambda tt: np.exp(-2 * g.gamma * tt)) if critical else None
        plotting.plot_decay(path, cfg.t_samples, one, on_grid, fock if cfg.fock else None, reference)

    return _csv(["t", "one_particle", "grid", "fock", "reference"], rows), figure


def cmd_spectrum(cfg: ScenarioConfig):
    g = _generator(cfg)
    m = _decay_vector(cfg, g)
    lo, hi, count = cfg.energy_band
    E = np.linspace(lo, hi, count)
    grid = sd.make_grid(g, cfg.dt, cfg.t_max)
    closed = sd.spectral_amplitude_closed(g, m, E)
    dft = sd.spectral_amplitude_dft(g, m, grid, E)
    closed_sq, dft_sq = closed.intensity(), dft.intensity()
    deviation = np.linalg.norm(closed.amplitude - dft.amplitude, axis=1)
    rows = list(zip(E, closed_sq, dft_sq, deviation))
    peak = E[np.argmax(closed_sq)]
    print(f"# band mass {closed.mass():.10f}, full-line mass {sd.spectral_mass_closed(g, m):.10f}, "
          f"|m|^2 {float(m @ m):.10f}, peak E {peak:.6g}, omega_d {g.damped_frequency:.6g}", file=sys.stderr)

    def figure(path):
        plotting.plot_spectrum(path, E, closed_sq, dft_sq, g.damped_frequency or None)

    return _csv(["E", "closed_sq", "fft_sq", "deviation"], rows), figure


def cmd_verify(cfg: ScenarioConfig):
    results = run_checks(cfg)

    def figure(path):
        data = hs_scaling(cfg.omega, cfg.gamma, max(cfg.t_samples) or 1.0)
        plotting.plot_hs_scaling(path, [n for n, _ in data], [v for _, v in data])

    return format_report(results), figure, all(r.passed for r in results)


COMMANDS = {"evolve": cmd_evolve, "decay": cmd_decay, "spectrum": cmd_spectrum, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dho", description="Damped oscillator dilation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI file with a [scenario] section")
        p.add_argument("--omega", type=float)
        p.add_argument("--gamma", type=float)
        p.add_argument("--n-modes", type=int, dest="n_modes")
        p.add_argument("--dt", type=float)
        p.add_argument("--t-max", type=float, dest="t_max")
        p.add_argument("--out", dest="output_path", help="write output here instead of stdout")
        p.add_argument("--figure", help="figure path (default: next to --out with a .png suffix)")
        p.add_argument("--no-figure", action="store_true")
    return parser


def _resolve(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    overrides = {k: getattr(args, k) for k in ("omega", "gamma", "n_modes", "dt", "t_max", "output_path")
                 if getattr(args, k) is not None}
    return replace(cfg, **overrides).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        result = COMMANDS[args.command](cfg)
    except DhoError as exc:
        print(f"dho {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text, figure = result[0], result[1]
    passed = result[2] if len(result) > 2 else True

    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    fig_path = args.figure
    if fig_path is None and cfg.output_path and not args.no_figure:
        fig_path = str(Path(cfg.output_path).with_suffix(".png"))
    if fig_path and not args.no_figure:
        figure(fig_path)
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
