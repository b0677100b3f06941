"""Aggregation and rendering of the experiment CSVs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "plotkit"

from .frames import ResultFrame  # noqa: E402

GAP_BOUND = 1 - np.sqrt(17 / 32)

DIAG_KINDS = ("junta", "separation", "variance")


def aggregate_figure1(frame: ResultFrame, per_unitary: bool = False) -> list:
    """Per-gamma (gamma, inv_gamma, mean_abs_error, standard_error) tuples,
    sorted by inv_gamma.

    Default is the flat mean over all (trial, observable) rows; with
    ``per_unitary`` the rows are first averaged within each trial and the
    spread is taken across trial means.
    """
    gammas = frame.floats("gamma")
    inv = frame.floats("inv_gamma")
    errs = frame.floats("abs_error")
    trials = frame.strings("trial")
    out = []
    for g in sorted(set(gammas)):
        idx = [i for i, v in enumerate(gammas) if v == g]
        if per_unitary:
            by_trial = {}
            for i in idx:
                by_trial.setdefault(trials[i], []).append(errs[i])
            vals = np.array([np.mean(v) for v in by_trial.values()])
        else:
            vals = np.array([errs[i] for i in idx])
        se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        out.append((g, inv[idx[0]], float(vals.mean()), se))
    out.sort(key=lambda t: t[1])
    return out


def _save(fig, out) -> list:
    base = Path(out)
    if base.suffix in (".svg", ".png"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    paths = []
    for ext in ("svg", "png"):
        path = base.with_suffix("." + ext)
        kwargs = {"metadata": {"Date": None}} if ext == "svg" else {}
        fig.savefig(path, **kwargs)
        paths.append(path)
    plt.close(fig)
    return paths


def plot_figure1(csv_path, out, per_unitary: bool = False) -> list:
    """Mean absolute prediction error vs 1/gamma with standard-error bars."""
    frame = ResultFrame.load(
        csv_path, required=("gamma", "inv_gamma", "observable", "trial", "abs_error")
    )
    agg = aggregate_figure1(frame, per_unitary)
    inv = [a[1] for a in agg]
    mean = [a[2] for a in agg]
    se = [a[3] for a in agg]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.errorbar(inv, mean, yerr=se, fmt="o-", capsize=3)
    ax.set_xlabel(r"$1/\gamma$")
    ax.set_ylabel("mean absolute error")
    ax.set_title("prediction error vs threshold")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, out)


def plot_diagnostics(csv_path, kind: str, out) -> list:
    if kind == "junta":
        frame = ResultFrame.load(csv_path, required=("trial", "success", "distance"))
        successes = frame.floats("success")
        rate = float(np.mean(successes))
        fig, ax = plt.subplots(figsize=(4, 3.5))
        ax.bar(["success rate"], [rate])
        ax.axhline(0.95, color="gray", linestyle="--", label="0.95 target")
        ax.set_ylim(0, 1.05)
        ax.set_ylabel(f"fraction of {len(frame)} trials")
        ax.legend()
    elif kind == "separation":
        frame = ResultFrame.load(csv_path, required=("n", "gap"))
        ns = [int(v) for v in frame.floats("n")]
        gaps = frame.floats("gap")
        fig, ax = plt.subplots(figsize=(4, 3.5))
        ax.bar([str(n) for n in ns], gaps)
        ax.axhline(GAP_BOUND, color="red", linestyle="--",
                   label=f"bound {GAP_BOUND:.4f}")
        ax.set_xlabel("n")
        ax.set_ylabel("minimum trace-distance gap")
        ax.legend()
    elif kind == "variance":
        frame = ResultFrame.load(csv_path, required=("n", "variance"))
        ns = [int(v) for v in frame.floats("n")]
        var = frame.floats("variance")
        fig, ax = plt.subplots(figsize=(4, 3.5))
        ax.semilogy(ns, var, "o-")
        ax.set_xlabel("n")
        ax.set_ylabel("variance of probe expectation")
        ax.set_xticks(ns)
        ax.grid(True, which="both", alpha=0.3)
    else:
        raise ValueError(f"unknown diagnostic kind {kind!r}; choose from {DIAG_KINDS}")
    fig.tight_layout()
    return _save(fig, out)
