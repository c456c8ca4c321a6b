"""Static figures written next to the CSV output of the command line tools."""
from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

FIGSIZE = (6.4, 4.0)


def _figure(xlabel, ylabel, title):
    fig = Figure(figsize=FIGSIZE, dpi=120)
    ax = fig.add_subplot(111)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, metadata={"Software": None})


def plot_evolve(path, times, sigma_max, entries, labels):
    fig, ax = _figure("t", "value", "propagator entries and largest singular value")
    for col, label in zip(np.asarray(entries).T, labels):
        ax.plot(times, col, lw=1, marker=".", label=label)
    ax.plot(times, sigma_max, "k--", lw=1.5, marker="o", label="sigma_max")
    ax.legend(fontsize=7, ncol=2)
    _save(fig, path)


def plot_decay(path, times, one_particle, grid, fock=None, reference=None):
    fig, ax = _figure("t", "<m, T_t^T T_t m>", "decay of the oscillator occupation")
    ax.plot(times, one_particle, "o-", lw=1, label="closed form")
    ax.plot(times, grid, "x", ms=8, label="half-line grid")
    if fock is not None:
        ax.plot(times, fock, "+", ms=10, label="truncated Fock")
    if reference is not None:
        tt = np.linspace(0, max(times), 200)
        ax.plot(tt, reference(tt), "k:", lw=1, label="exp(-2 gamma t)")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_spectrum(path, energies, closed_sq, fft_sq, omega_d=None):
    fig, ax = _figure("E", "|F jm|^2", "energy spread of the injected trajectory")
    ax.plot(energies, closed_sq, lw=1.5, label="Breit-Wigner closed form")
    ax.plot(energies, fft_sq, "--", lw=1, label="discrete Fourier transform")
    if omega_d:
        for x in (-omega_d, omega_d):
            ax.axvline(x, color="grey", lw=0.8, ls=":")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_hs_scaling(path, modes, norms):
    fig, ax = _figure("number of modes", "||b||_HS^2", "conjugate-linear part of the fixed-time dilation")
    ax.plot(modes, norms, "o-")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    _save(fig, path)
