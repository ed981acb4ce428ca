"""Figure rendering for the report path.

Each function writes one PNG next to the delimited output and returns the
path.  matplotlib is imported lazily with the Agg backend so the CLI does
not pay the import cost unless a figure was requested.
"""

from __future__ import annotations

import math

__all__ = ["plot_comparison", "plot_phase_scan", "plot_wavefunction"]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_comparison(rows, path: str) -> str:
    """Spectra and relative offsets per system, one panel pair."""
    plt = _pyplot()
    fig, (ax_e, ax_d) = plt.subplots(1, 2, figsize=(10, 4.2))
    systems = sorted({(r.mu, r.m1) for r in rows})
    for mu, m1 in systems:
        group = [r for r in rows if (r.mu, r.m1) == (mu, m1)]
        group.sort(key=lambda r: r.n)
        ns = [r.n for r in group]
        label = f"$\\mu$={mu:g}, $m_1$={m1:g}"
        if any(r.eps_exact is not None for r in group):
            ax_e.plot(ns, [r.eps_exact for r in group], "o-", label=f"{label} exact")
        if any(r.eps_wp is not None for r in group):
            ax_e.plot(ns, [r.eps_wp for r in group], "s--", label=f"{label} wp")
        deltas = [(r.n, r.wp_rel_delta) for r in group if r.wp_rel_delta is not None]
        if deltas:
            ax_d.plot([d[0] for d in deltas], [100 * d[1] for d in deltas], "s-", label=label)
    ax_e.set_xlabel("n")
    ax_e.set_ylabel("energy above rest mass")
    if ax_e.get_legend_handles_labels()[0]:
        ax_e.legend(fontsize=7)
    ax_d.set_xlabel("n")
    ax_d.set_ylabel("wave-phase offset from exact [%]")
    ax_d.axhline(0.0, color="k", lw=0.6)
    if ax_d.get_legend_handles_labels()[0]:
        ax_d.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_phase_scan(eps, phi, path: str, n_max: int | None = None) -> str:
    """Total phase versus energy with the quantization targets overlaid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(eps, phi, lw=1.2)
    top = max(phi)
    n = 0
    while (n + 1) * math.pi <= top and (n_max is None or n <= n_max):
        ax.axhline((n + 1) * math.pi, color="gray", lw=0.5, ls="--")
        n += 1
    ax.set_xlabel("energy above rest mass")
    ax.set_ylabel("total phase integral")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_wavefunction(x, psi, path: str, eps: float | None = None, n: int | None = None) -> str:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(x, psi, lw=1.0)
    ax.axhline(0.0, color="k", lw=0.5)
    title = []
    if n is not None:
        title.append(f"n = {n}")
    if eps is not None:
        title.append(f"eps = {eps:.6g}")
    if title:
        ax.set_title(", ".join(title))
    ax.set_xlabel("x")
    ax.set_ylabel("wave amplitude")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
