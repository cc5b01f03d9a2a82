"""Figure rendering for CLI artifacts.

Matplotlib is imported lazily and forced onto the Agg backend, so the
package imports cleanly on headless machines and nothing here opens a
window. Every function writes one PNG next to the delimited output it
illustrates and returns the written path. Figures carry no timestamps.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _finish(fig, path):
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    _pyplot().close(fig)
    return path


def save_dispersion_figure(ks, cs, path, *, label=None):
    """Wave speed against wavenumber."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(ks, cs, "o-", ms=3, lw=1.2, label=label)
    ax.set_xlabel("k (1/m)")
    ax.set_ylabel("c (m/s)")
    ax.grid(alpha=0.3)
    if label:
        ax.legend()
    return _finish(fig, path)


def save_transfer_figure(curves, path):
    """Vertical transfer profiles, T horizontal so depth reads naturally.

    ``curves`` is a list of (label, TransferFunction).
    """
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    for label, tf in curves:
        ax.plot(tf.T, tf.y, lw=1.4, label=label)
    ax.set_xlabel("T(y) (m/s^2 per unit density)")
    ax.set_ylabel("y (m)")
    ax.grid(alpha=0.3)
    if len(curves) > 1 or curves[0][0]:
        ax.legend()
    return _finish(fig, path)


def save_field_figure(field, path):
    """Pressure map of one wavelength with a sparse velocity quiver."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    pc = ax.pcolormesh(field.x, field.y, field.p, shading="auto",
                       cmap="RdBu_r")
    fig.colorbar(pc, ax=ax, label="p (m^2/s^2 per unit density)")
    sy = max(len(field.y) // 12, 1)
    sx = max(len(field.x) // 16, 1)
    ax.quiver(field.x[::sx], field.y[::sy],
              field.u[::sy, ::sx], field.v[::sy, ::sx],
              scale_units="xy", angles="xy")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    return _finish(fig, path)


def save_gauge_figure(record, path):
    """Raw pressure trace of a gauge record."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 3.0))
    ax.plot(record.t, record.p, lw=0.9)
    ax.set_xlabel("t (s)")
    unit = "Pa" if record.meta.get("rho_ref", 1.0) != 1.0 else "m^2/s^2"
    ax.set_ylabel(f"p ({unit})")
    ax.grid(alpha=0.3)
    return _finish(fig, path)


def save_reconstruction_figure(record, results, path):
    """Stacked pressure trace and reconstructed elevation(s)."""
    plt = _pyplot()
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.4, 4.6), sharex=True)
    ax0.plot(record.t, record.p, lw=0.9, color="0.3")
    ax0.set_ylabel("p (gauge)")
    ax0.grid(alpha=0.3)
    for res in results:
        ax1.plot(np.asarray(res.t), np.asarray(res.eta), lw=1.1,
                 label=res.method)
    ax1.set_xlabel("t (s)")
    ax1.set_ylabel("eta (m)")
    ax1.grid(alpha=0.3)
    ax1.legend()
    return _finish(fig, path)
