"""Render the three figure kinds from kerrfocus CSV files.

Artists that tests and downstream tooling may want to count carry gids:
``ring-selected`` / ``ring-grid`` on constellation circles and
``filter-curve`` on frequency-response lines.
"""

from __future__ import annotations

import csv
import math
from importlib import resources

import matplotlib
import matplotlib.pyplot as plt
import numpy as np

LOG2_PER_DB = math.log2(10.0) / 10.0

_STYLE = resources.files("kerrfocus_plots") / "kerrfocus.mplstyle"


class SchemaError(ValueError):
    """A CSV input does not match the documented header or content."""


def _read_csv(path: str, columns: list[str]) -> list[dict]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file") from None
            if header != columns:
                raise SchemaError(
                    f"{path}: expected columns {columns}, found {header}"
                )
            return [dict(zip(columns, row)) for row in reader]
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def _style():
    return plt.style.context(str(_STYLE))


def save_figure(fig, out_path: str) -> None:
    """Write a figure without volatile metadata, so reruns are identical."""
    metadata = {"Date": None} if out_path.endswith(".svg") else None
    fig.savefig(out_path, metadata=metadata)
    plt.close(fig)


def plot_rings(csv_path: str):
    """Per-user polar plot: thin allowed-grid rings, thick selected rings."""
    rows = _read_csv(csv_path, ["user", "ring_index", "power", "amplitude"])
    by_user: dict[int, list[tuple[int, float]]] = {}
    for row in rows:
        try:
            by_user.setdefault(int(row["user"]), []).append(
                (int(row["ring_index"]), float(row["amplitude"]))
            )
        except ValueError as exc:
            raise SchemaError(f"{csv_path}: bad row {row}: {exc}") from None
    users = sorted(by_user) or [1]
    theta = np.linspace(0.0, 2.0 * np.pi, 361)
    with _style():
        fig, axes = plt.subplots(
            1, len(users), subplot_kw={"projection": "polar"},
            figsize=(4.0 * len(users), 4.0),
        )
        axes = np.atleast_1d(axes)
        for ax, user in zip(axes, users):
            selected = sorted(by_user.get(user, []))
            if selected:
                # the allowed grid has radius sqrt(unit * n); infer the unit
                # from amplitude^2 / ring_index, constant across rows
                units = [a * a / n for n, a in selected]
                unit = units[0]
                if any(abs(u - unit) > 1e-6 * unit for u in units):
                    raise SchemaError(f"{csv_path}: inconsistent power grid for user {user}")
                n_max = max(n for n, _ in selected)
                for n in range(1, n_max + 2):
                    ax.plot(theta, np.full_like(theta, math.sqrt(unit * n)),
                            color="0.75", linewidth=0.6, gid="ring-grid")
                for _, amp in selected:
                    ax.plot(theta, np.full_like(theta, amp),
                            color="tab:blue", linewidth=2.4, gid="ring-selected")
            ax.set_yticklabels([])
            ax.set_xticks([])
            ax.set_title(f"transmitter {user}")
        fig.tight_layout()
    return fig


def plot_filters(csv_path: str):
    """Overlaid |sinc| magnitude responses, one curve per filter offset."""
    rows = _read_csv(csv_path, ["receiver", "f"])
    if not rows:
        raise SchemaError(f"{csv_path}: no filter rows")
    by_receiver: dict[int, list[int]] = {}
    for row in rows:
        try:
            by_receiver.setdefault(int(row["receiver"]), []).append(int(row["f"]))
        except ValueError as exc:
            raise SchemaError(f"{csv_path}: bad row {row}: {exc}") from None
    receivers = sorted(by_receiver)
    with _style():
        fig, axes = plt.subplots(len(receivers), 1, figsize=(6.4, 2.6 * len(receivers)),
                                 squeeze=False)
        for ax, receiver in zip(axes[:, 0], receivers):
            offsets = sorted(by_receiver[receiver])
            lo, hi = min(offsets) - 2.5, max(offsets) + 2.5
            grid = np.linspace(lo, hi, 2000)
            for f in offsets:
                ax.plot(grid, np.abs(np.sinc(grid - f)), linewidth=1.1,
                        gid="filter-curve", label=f"f = {f:+d}")
            ax.set_ylabel(f"receiver {receiver}")
            ax.set_ylim(0, 1.05)
        axes[-1, 0].set_xlabel("frequency offset (multiples of 1/Ts)")
        fig.tight_layout()
    return fig


def _read_sweep(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
    rows = _read_csv(path, ["snr_db", "P", "N", "K", "Q", "bits", "std_err"])
    if not rows or rows[-1]["snr_db"] != "slope":
        raise SchemaError(f"{path}: missing slope footer row")
    footer = rows[-1]
    try:
        slope = float(footer["bits"])
        ci_half = float(footer["std_err"])
        body = rows[:-1]
        snr = np.array([float(r["snr_db"]) for r in body])
        bits = np.array([float(r["bits"]) for r in body])
        err = np.array([float(r["std_err"]) for r in body])
    except ValueError as exc:
        raise SchemaError(f"{path}: malformed numeric cell: {exc}") from None
    if snr.size == 0:
        raise SchemaError(f"{path}: no sweep rows before the footer")
    return snr, bits, err, slope, ci_half


def plot_rates(csv_path: str, second_csv: str | None = None):
    """Bits per symbol against SNR with error bars and the fitted slope line."""
    series = [("series 1", *_read_sweep(csv_path))]
    if second_csv is not None:
        series.append(("series 2", *_read_sweep(second_csv)))
    with _style():
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for label, snr, bits, err, slope, ci_half in series:
            line = ax.errorbar(snr, bits, yerr=3 * err, marker="o", capsize=2.5,
                               linestyle="none",
                               label=f"{label}: slope {slope:.3f} $\\pm$ {ci_half:.3f}")
            # anchor the fitted line on the upper half of the grid, where the
            # slope was fitted; slope is per log2(P/N), the axis is in dB
            k = max(1, len(snr) // 2)
            x0, y0 = float(np.mean(snr[-k:])), float(np.mean(bits[-k:]))
            xs = np.linspace(snr.min(), snr.max(), 50)
            ax.plot(xs, y0 + slope * LOG2_PER_DB * (xs - x0),
                    linewidth=0.9, alpha=0.7, color=line.lines[0].get_color(),
                    gid="fit-line")
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("bits per symbol")
        ax.legend()
        fig.tight_layout()
    return fig
