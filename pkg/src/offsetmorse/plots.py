"""Matplotlib renderings written next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .arrangement import BoundaryStratum, CriticalPointRecord, arcs_of, creases_of
from .clarke import RegularValueCertificate
from .flow import Trajectory
from .geometry import OffsetSet
from .homology import BettiProfile

CELL_COLORS = {0: "tab:blue", 1: "tab:red", 2: "tab:purple"}


def _draw_boundary(ax, offset: OffsetSet, strata: list[BoundaryStratum]) -> None:
    for y in offset.cloud.points:
        ax.add_patch(
            plt.Circle(y, offset.epsilon, fill=False, color="0.85", linewidth=0.6)
        )
    ax.plot(*offset.cloud.points.T, "k.", markersize=3)
    for arc in arcs_of(strata):
        for s, e in arc.intervals:
            theta = np.linspace(s, e, max(int((e - s) / 0.01), 8))
            pts = arc.center[None, :] + arc.radius * np.stack(
                [np.cos(theta), np.sin(theta)], axis=1
            )
            ax.plot(pts[:, 0], pts[:, 1], color="tab:green", linewidth=1.2)
    for crease in creases_of(strata):
        ax.plot(*crease.location, marker="o", color="tab:orange", markersize=4)
    ax.set_aspect("equal")


def arrangement_figure(
    offset: OffsetSet,
    strata: list[BoundaryStratum],
    records: list[CriticalPointRecord],
    path: Path,
) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    _draw_boundary(ax, offset, strata)
    for rec in records:
        color = CELL_COLORS.get(rec.cell_dimension, "tab:gray")
        ax.plot(*rec.location, marker="*", color=color, markersize=12)
        ax.annotate(
            f"$\\lambda$={rec.cell_dimension}",
            rec.location,
            textcoords="offset points",
            xytext=(6, 6),
            fontsize=8,
        )
    ax.set_title("boundary arrangement and critical points")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def sweep_figure(profile: BettiProfile, critical_values: list[float], path: Path) -> None:
    cs = [r.c for r in profile.rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.step(cs, [r.b0 for r in profile.rows], where="post", label="$b_0$", marker="o")
    ax.step(cs, [r.b1 for r in profile.rows], where="post", label="$b_1$", marker="s")
    ax.step(
        cs, [r.chi for r in profile.rows], where="post",
        label="$\\chi$", marker="^", linestyle="--", alpha=0.7,
    )
    for v in critical_values:
        ax.axvline(v, color="0.8", linewidth=0.8, zorder=0)
    ax.set_xlabel("filtration value c")
    ax.legend()
    ax.set_title("Betti sweep")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def flow_figure(
    offset: OffsetSet,
    strata: list[BoundaryStratum],
    trajectories: list[Trajectory],
    path: Path,
) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    _draw_boundary(ax, offset, strata)
    for traj in trajectories:
        ax.plot(traj.vertices[:, 0], traj.vertices[:, 1], color="tab:blue", linewidth=1.0)
        ax.plot(*traj.vertices[0], marker="o", color="tab:blue", markersize=3)
        ax.plot(*traj.vertices[-1], marker="x", color="tab:red", markersize=5)
    ax.set_title("descent trajectories")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def certificate_figure(certificate: RegularValueCertificate, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    pts, deltas = certificate.shell_points, certificate.shell_deltas
    if pts is not None and len(pts):
        sc = ax.scatter(pts[:, 0], pts[:, 1], c=deltas, s=3, cmap="viridis", vmin=0, vmax=1)
        fig.colorbar(sc, ax=ax, label="$\\Delta$")
    if certificate.witness is not None:
        ax.plot(*certificate.witness, marker="x", color="red", markersize=10)
    ax.set_aspect("equal")
    ax.set_title(
        f"shell samples ({certificate.verdict.value}, "
        f"$\\mu_{{obs}}$ = {certificate.mu_observed:.4f})"
    )
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
