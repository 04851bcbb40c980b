"""Static SVG plots of simulation artifacts.

Everything here renders through the Agg backend and writes SVG files, so
plots work headless.  A fixed hash salt and stripped creation date keep
repeated renders of the same data byte-identical.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .integrate import Trajectory
from .orbits import FloquetSpectrum
from .sweep import ExtremumKind, SweepResult

__all__ = ["plot_forces", "plot_sweep", "plot_spectrum", "plot_sync_error"]

matplotlib.rcParams["svg.hashsalt"] = "sonicvacuum"

_SAVE = {"format": "svg", "metadata": {"Date": None}}


def plot_forces(path: str, traj: Trajectory, title: str = "") -> None:
    """Plot input and transmitted force channels of a trajectory."""
    fig, (ax_in, ax_out) = plt.subplots(2, 1, sharex=True, figsize=(8, 5))
    ax_in.plot(traj.times, traj.input_force(), lw=0.8, color="tab:blue")
    ax_in.set_ylabel("input force")
    ax_out.plot(traj.times, traj.transmitted_force(), lw=0.8, color="tab:red")
    ax_out.set_ylabel("transmitted force")
    ax_out.set_xlabel("time")
    if title:
        ax_in.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def plot_sweep(path: str, sweep: SweepResult, title: str = "") -> None:
    """Plot a transmission sweep with detected extrema marked."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(sweep.frequencies, sweep.forces, lw=1.0, color="tab:blue")
    for ext in sweep.extrema:
        if ext.kind is ExtremumKind.RESONANCE:
            marker, color = "^", "tab:red"
            label = f"1:{ext.order}" if ext.order else ""
        else:
            marker, color, label = "v", "tab:green", ""
        force = sweep.force_at(ext.frequency)
        ax.plot([ext.frequency], [force], marker, color=color, ms=7)
        if label:
            ax.annotate(
                label,
                (ext.frequency, force),
                textcoords="offset points",
                xytext=(0, 8),
                ha="center",
                fontsize=8,
            )
    ax.set_xlabel("drive frequency (Hz)")
    ax.set_ylabel("max transmitted force (N)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def plot_spectrum(path: str, spectrum: FloquetSpectrum, title: str = "") -> None:
    """Plot Floquet multipliers against the unit circle."""
    fig, ax = plt.subplots(figsize=(5, 5))
    angle = np.linspace(0.0, 2.0 * np.pi, 256)
    ax.plot(np.cos(angle), np.sin(angle), "--", lw=0.8, color="0.6")
    mults = spectrum.multipliers
    ax.plot(mults.real, mults.imag, "o", ms=5, color="tab:blue", mfc="none")
    worst = mults[np.argmax(np.abs(mults))]
    ax.plot([worst.real], [worst.imag], "o", ms=5, color="tab:red")
    ax.axhline(0.0, lw=0.5, color="0.8")
    ax.axvline(0.0, lw=0.5, color="0.8")
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    verdict = spectrum.verdict.name.lower()
    ax.set_title(title or f"{verdict}, max |mu| = {spectrum.max_modulus:.6g}")
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)


def plot_sync_error(path: str, times, errors, title: str = "") -> None:
    """Plot observer synchronization error on a log scale."""
    fig, ax = plt.subplots(figsize=(8, 4))
    floor = 1e-18
    ax.semilogy(times, np.maximum(np.asarray(errors), floor), lw=0.8, color="tab:blue")
    ax.set_xlabel("time")
    ax.set_ylabel("max |driver - observer|")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
