"""Matplotlib figures for the batch reports: the E-A ratio sweep curve
and single-skeleton renderings."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .model import Origin, PoseFrame, SKELETON_EDGES


def sweep_figure(ratios: Sequence[float], rates: Sequence[float],
                 path: str) -> None:
    """Error rate versus E-A ratio, one point per sweep row."""
    if len(ratios) != len(rates):
        raise ValueError("ratios and rates must have equal length")
    order = sorted(range(len(ratios)), key=lambda i: ratios[i])
    xs = [ratios[i] for i in order]
    ys = [100.0 * rates[i] for i in order]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, marker="o", color="tab:blue")
    for x, y in zip(xs, ys):
        ax.annotate(f"{y:.1f}%", (x, y), textcoords="offset points",
                    xytext=(0, 8), ha="center", fontsize=9)
    ax.set_xlabel("E-A ratio")
    ax.set_ylabel("misclassification rate (%)")
    ax.set_title("Classification error vs. Euclidean/angle mixing ratio")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def skeleton_figure(frame: PoseFrame, path: str, title: str = "") -> None:
    """Keypoints and limb connections on the image plane (y down).
    Filled keypoints are drawn in a different color than detected ones."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for a, b in SKELETON_EDGES:
        ka, kb = frame.kp(a), frame.kp(b)
        if ka.missing or kb.missing:
            continue
        ax.plot([ka.x, kb.x], [ka.y, kb.y], color="tab:gray", lw=1.5, zorder=1)
    for origin, color in ((Origin.DETECTED, "tab:blue"),
                          (Origin.FILLED, "tab:orange")):
        pts = [(kp.x, kp.y) for kp in frame.keypoints
               if not kp.missing and kp.origin is origin]
        if pts:
            xs, ys = zip(*pts)
            ax.scatter(xs, ys, s=30, color=color, zorder=2,
                       label=origin.value)
    ax.set_xlim(0, frame.width)
    ax.set_ylim(frame.height, 0)  # image convention: y grows downward
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
