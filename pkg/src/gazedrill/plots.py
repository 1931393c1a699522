"""Report figures: session overview and the three-mode metric comparison.

Rendered headless to PNG next to the trace/metrics files.  The overview
mirrors the usual experiment plot layout: allocation weight and attention on
top, then drill depth, drill velocity and forces, with the distraction phase
shaded.  Velocity and force traces are smoothed with the same 1 s filter used
for reported results.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .smoothing import smooth_trace

DISTRACTION_COLOR = (1.0, 0.85, 0.85)


def overview_figure(records, meta, smooth_window: float = 1.0):
    t = np.array([r.t for r in records])
    if len(t) < 2:
        raise ValueError("trace too short to plot")
    rate = 1.0 / (t[1] - t[0])
    w = np.array([r.w for r in records])
    abar = np.array([r.abar for r in records])
    depth = np.array([r.depth for r in records])
    vz = np.gradient(depth, t)
    f_bone = np.array([r.f_sensor[2] for r in records])
    f_op = np.array([np.linalg.norm(r.f_operator) for r in records])

    vz_s = smooth_trace(vz, smooth_window, rate)
    f_bone_s = smooth_trace(f_bone, smooth_window, rate)
    f_op_s = smooth_trace(f_op, smooth_window, rate)

    fig, axes = plt.subplots(4, 1, sharex=True, figsize=(9, 9))
    interval = meta.get("distraction_interval")

    axes[0].plot(t, w, label="allocation weight w", color="tab:blue")
    axes[0].plot(t, abar, label="filtered attention", color="tab:orange", alpha=0.8)
    axes[0].set_ylabel("level [0..1]")
    axes[0].set_ylim(-0.05, 1.05)
    axes[0].legend(loc="center right", fontsize=8)

    axes[1].plot(t, depth * 1e3, color="tab:green")
    target = meta.get("config", {}).get("bone", {}).get("target_depth")
    if target:
        axes[1].axhline(target * 1e3, color="gray", linestyle="--", linewidth=0.8)
    axes[1].set_ylabel("depth [mm]")

    axes[2].plot(t, vz_s * 1e3, color="tab:purple")
    axes[2].set_ylabel("drill velocity [mm/s]")

    axes[3].plot(t, f_bone_s, label="drilling force (z)", color="tab:red")
    axes[3].plot(t, f_op_s, label="|operator force|", color="tab:gray")
    axes[3].set_ylabel("force [N]")
    axes[3].set_xlabel("time [s]")
    axes[3].legend(loc="upper right", fontsize=8)

    for ax in axes:
        if interval:
            ax.axvspan(interval[0], interval[1], color=DISTRACTION_COLOR, zorder=0)
        ax.grid(alpha=0.3)
    fig.suptitle("session overview")
    fig.tight_layout()
    return fig


def metrics_figure(per_mode: dict):
    """Bar chart triple: distraction movement, position std, operator impulse."""
    modes = list(per_mode)
    movement = [per_mode[m].distraction_movement * 1e3 for m in modes]
    std = [per_mode[m].distraction_position_std * 1e3 for m in modes]
    impulse = [per_mode[m].operator_impulse for m in modes]

    fig, axes = plt.subplots(1, 3, figsize=(10, 3.2))
    panels = [
        ("distraction movement [mm]", movement),
        ("position std during distraction [mm]", std),
        ("operator impulse [N s]", impulse),
    ]
    colors = ["tab:red", "tab:blue", "tab:green"]
    for ax, (title, values) in zip(axes, panels):
        ax.bar(range(len(modes)), values, color=colors[: len(modes)])
        ax.set_xticks(range(len(modes)))
        ax.set_xticklabels([m.replace("_", "\n") for m in modes], fontsize=8)
        ax.set_title(title, fontsize=9)
        ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    return fig


def save_overview(records, meta, path: str) -> None:
    fig = overview_figure(records, meta)
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_metrics_comparison(per_mode: dict, path: str) -> None:
    fig = metrics_figure(per_mode)
    fig.savefig(path, dpi=130)
    plt.close(fig)
