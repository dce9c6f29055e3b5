"""The three figure types.

Every function writes a vector-graphics file plus a small JSON sidecar
with the numbers shown (slopes, drifts, atoms), which is what the tests
assert against.  All inputs come from the artifact files; nothing is
recomputed from field data.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from plotkit.io import (ArtifactError, read_diagnostics, read_fields,
                        read_summary)

DECAY_LABELS = {
    "grad_sqrt_rho_l2": r"$\|\partial_x\sqrt{\rho}\|_{L^2}$",
    "rarefaction_l2": r"$\int(\Lambda - \frac{x}{t}\sqrt{\rho})^2\,dx$",
    "pressure_integral": r"$\int\rho^\gamma\,dx$",
    "sup_sqrt_rho": r"$\|\sqrt{\rho}\|_\infty$",
}


def _resolve_out(run_dir, out_dir) -> Path:
    out = Path(out_dir) if out_dir else Path(run_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_sidecar(path: Path, payload: dict):
    path.with_suffix(".json").write_text(json.dumps(payload, indent=2))


def plot_decay(run_dir, quantity: str, out_dir=None) -> Path:
    """Log-log decay of one diagnostic with fitted and target slopes."""
    summary = read_summary(run_dir)
    decay = summary.get("decay")
    if not decay:
        raise ArtifactError(f"summary.json in {run_dir} has no decay section")
    if quantity not in decay["quantities"]:
        raise ArtifactError(f"unknown decay quantity {quantity!r}; have "
                            f"{sorted(decay['quantities'])}")
    entry = decay["quantities"][quantity]
    series = decay["series"]
    times = np.asarray(series["times"], dtype=float)
    values = np.asarray(series[quantity], dtype=float)
    sel = (times > 0) & np.isfinite(values) & (values > 0)
    t_lo, t_hi = decay["window"]

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.loglog(times[sel], values[sel], "o", ms=3, color="C0",
              label=DECAY_LABELS.get(quantity, quantity))
    target = entry["target"]
    fitted = entry.get("fitted")
    if fitted is not None:
        tw = np.geomspace(max(t_lo, times[sel].min()), t_hi, 50)
        ax.loglog(tw, np.exp(entry["intercept"]) * tw**fitted, "-",
                  color="C1", label=f"fit: $t^{{{fitted:.2f}}}$")
        anchor = np.exp(entry["intercept"]) * tw[0] ** fitted
        ax.loglog(tw, anchor * (tw / tw[0]) ** target, "--", color="k",
                  label=f"target: $t^{{{target:g}}}$")
        ax.axvspan(t_lo, t_hi, color="0.92", zorder=0)
    if decay.get("inconclusive"):
        ax.annotate("window collapsed", xy=(0.05, 0.08),
                    xycoords="axes fraction", color="crimson")
    ax.set_xlabel("t")
    ax.set_ylabel(DECAY_LABELS.get(quantity, quantity))
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    out = _resolve_out(run_dir, out_dir) / f"decay_{quantity}.svg"
    fig.savefig(out)
    plt.close(fig)
    _write_sidecar(out, {
        "quantity": quantity,
        "fitted_slope": fitted,
        "target_slope": target,
        "verdict": entry["verdict"],
        "window": [t_lo, t_hi],
        "inconclusive": bool(decay.get("inconclusive")),
    })
    return out


def plot_conservation(run_dir, out_dir=None, compare=None) -> Path:
    """Relative drifts of M, E, P on a log scale; a second run directory
    can be overlaid to show the O(dt^2) energy-drift reduction."""
    cols = read_diagnostics(run_dir)
    t = cols["t"]
    if len(t) < 2:
        raise ArtifactError(f"{run_dir}: need at least 2 snapshots to plot drifts")

    def drifts(c):
        floor = 1e-18
        out = {}
        for name in ("M", "E", "P"):
            scale = max(abs(c[name][0]), abs(c["M"][0]), 1e-300)
            out[name] = np.maximum(np.abs(c[name] - c[name][0]) / scale, floor)
        return out

    dr = drifts(cols)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for name, style in (("M", "-o"), ("E", "-s"), ("P", "-^")):
        ax.semilogy(t[1:], dr[name][1:], style, ms=3, label=f"{name} drift")
    if compare:
        c2 = read_diagnostics(compare)
        d2 = drifts(c2)
        ax.semilogy(c2["t"][1:], d2["E"][1:], "--", color="0.4",
                    label="E drift (comparison run)")
    ax.set_xlabel("t")
    ax.set_ylabel("relative drift")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    out = _resolve_out(run_dir, out_dir) / "conservation.svg"
    fig.savefig(out)
    plt.close(fig)
    _write_sidecar(out, {
        "max_drifts": {k: float(np.max(v)) for k, v in dr.items()},
        "compared_to": str(compare) if compare else None,
    })
    return out


def _atoms_for_snapshot(summary: dict, snapshot: int):
    section = summary.get("lambda_measure") or {}
    refs = summary.get("field_snapshots") or {}
    indices = sorted(int(k) for k in refs)
    if indices and snapshot == indices[0] == 0:
        return section.get("t0", {}).get("atoms", [])
    if indices and snapshot == indices[-1]:
        return section.get("final", {}).get("atoms", [])
    if snapshot == 0:
        return section.get("t0", {}).get("atoms", [])
    return []


def plot_lambda_measure(run_dir, snapshot: int, out_dir=None) -> Path:
    """Chemical-potential density with vacuum-boundary atoms as impulses;
    flagged (unreliable) atoms are drawn hollow."""
    summary = read_summary(run_dir)
    cols = read_fields(run_dir, snapshot)
    atoms = _atoms_for_snapshot(summary, snapshot)

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(cols["x"], cols["lambda"], "-", color="C0", lw=1.0,
            label=r"density $\lambda(x)$")
    for atom in atoms:
        solid = atom.get("flag") is None
        ax.annotate("", xy=(atom["x"], atom["w"]), xytext=(atom["x"], 0.0),
                    arrowprops=dict(arrowstyle="-|>", color="C3", lw=1.5))
        ax.plot([atom["x"]], [atom["w"]], "o", color="C3",
                markerfacecolor="C3" if solid else "none", ms=7)
    if atoms:
        ax.plot([], [], "o", color="C3", label="atoms (hollow = flagged)")
    ax.axhline(0.0, color="0.6", lw=0.5)
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\tilde\lambda$")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = _resolve_out(run_dir, out_dir) / f"lambda_measure_{snapshot:04d}.svg"
    fig.savefig(out)
    plt.close(fig)
    _write_sidecar(out, {
        "snapshot": snapshot,
        "atoms": atoms,
    })
    return out
