"""Delimited output and figure rendering for the command-line layer.

Files are written atomically (temp file in the target directory, then rename)
and deterministically: UTF-8, LF line endings, floats at 17 significant
digits, no timestamps.  Two runs with the same flags must produce
byte-identical files.  Figures are rendered with the Agg backend next to the
delimited file, sharing its base name.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

from .wigner import WignerGrid  # noqa: E402

_FIG_DPI = 150


def format_value(value) -> str:
    """Deterministic cell text: 17 significant digits, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def format_complex(value: complex) -> str:
    return "%.17g%+.17gj" % (value.real, value.imag)


def _atomic_write_text(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def refuse_overwrite(paths: Iterable[Path], force: bool) -> None:
    if force:
        return
    for p in paths:
        if p.exists():
            raise FileExistsError(f"{p} exists; pass --force to overwrite")


def write_csv(
    path: Path,
    comments: Sequence[str],
    header: Sequence[str],
    rows: Iterable[Sequence],
    footer_comments: Sequence[str] = (),
) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_value(cell) for cell in row))
    lines.extend(f"# {c}" for c in footer_comments)
    _atomic_write_text(path, "\n".join(lines) + "\n")


def figure_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".png")


def _save(fig, path: Path) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        fig.savefig(tmp, format="png", dpi=_FIG_DPI)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def render_distribution(path: Path, ns: Sequence[int], series: dict[str, Sequence]) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    width = 0.8 / max(1, len(series))
    for i, (label, values) in enumerate(series.items()):
        offset = (i - (len(series) - 1) / 2.0) * width
        ax.bar(np.asarray(ns, dtype=float) + offset, values, width=width, label=label)
    ax.set_xlabel("photon number n")
    ax.set_ylabel("p(n)")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def render_maps(path: Path, grids: dict[str, WignerGrid]) -> None:
    n = len(grids)
    fig, axes = plt.subplots(1, n, figsize=(5.0 * n, 4.2), squeeze=False)
    bound = max(float(np.max(np.abs(g.values))) for g in grids.values())
    for ax, (label, grid) in zip(axes[0], grids.items()):
        mesh = ax.pcolormesh(
            grid.re_axis(),
            grid.im_axis(),
            grid.values.T,
            cmap="RdBu_r",
            vmin=-bound,
            vmax=bound,
            shading="nearest",
        )
        ax.set_title(label)
        ax.set_xlabel("Re beta")
        ax.set_ylabel("Im beta")
        ax.set_aspect("equal")
        fig.colorbar(mesh, ax=ax)
    fig.tight_layout()
    _save(fig, path)


def render_curves(
    path: Path,
    x: Sequence[float],
    panels: Sequence[tuple[str, dict[str, Sequence]]],
    xlabel: str,
) -> None:
    fig, axes = plt.subplots(1, len(panels), figsize=(5.5 * len(panels), 4.0), squeeze=False)
    xs = np.asarray(x, dtype=float)
    for ax, (ylabel, curves) in zip(axes[0], panels):
        for label, values in curves.items():
            ys = np.array([np.nan if v is None else float(v) for v in values])
            ax.plot(xs, ys, label=label)
        ax.axhline(0.0, color="0.6", lw=0.8)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend()
    fig.tight_layout()
    _save(fig, path)


def render_difference(path: Path, matrix: np.ndarray, title: str) -> None:
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    mesh = ax.imshow(matrix, origin="lower", cmap="viridis")
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    ax.set_title(title)
    fig.colorbar(mesh, ax=ax)
    fig.tight_layout()
    _save(fig, path)
