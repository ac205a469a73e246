"""Benchmark runner for the k-copy family and its CSV/JSON/PNG report."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .baselines import CapExceeded, dp_resolution_qe, enum_sa_qe, qe_gbl
from .benchgen import BASE_BLOCK, component_map, copy_components, gen_copies
from .engine import EngineConfig, node_bound, run_qe
from .oracle import OracleCapExceeded

SCHEMA = 1
COLUMNS = ["algo", "k", "vars", "clauses", "nodes", "models", "wallMs", "status", "bound"]
ALGOS = ("dds", "dp", "enumsa", "qegbl")


def run_one(algo, phi, timeout=None, reuse_dseqs=True, components=None, max_models=20_000):
    """Solve ``phi`` with ``algo``; return (result-or-None, row fields)."""
    row = {"nodes": "", "models": ""}
    try:
        if algo == "dds":
            cfg = EngineConfig(time_cap=timeout, reuse_dseqs=reuse_dseqs, components=components)
            r = run_qe(phi, cfg)
            row.update(nodes=r.stats.nodes, wallMs=round(r.wall_ms, 3),
                       status="ok" if r.complete else "timeout")
            if components is not None and r.stats.locality_violations:
                row["status"] = "nonlocal"
            return r, row
        if algo == "dp":
            r = dp_resolution_qe(phi)
        elif algo == "enumsa":
            r = enum_sa_qe(phi, max_models=max_models, time_cap=timeout)
            row["models"] = r.stats["models"]
        elif algo == "qegbl":
            r = qe_gbl(phi)
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
        row.update(wallMs=round(r.wall_ms, 3), status="ok")
        return r, row
    except CapExceeded as e:
        row.update(wallMs="", status="timeout" if "time" in str(e) else "cap")
    except OracleCapExceeded:
        row.update(wallMs="", status="cap")
    return None, row


def run_bench(ks, algos=("dds", "enumsa"), timeout=10.0, reuse_dseqs=True, base=BASE_BLOCK):
    rows = []
    for algo in algos:
        for k in ks:
            phi = gen_copies(base, k)
            comps = copy_components(base, k)
            _, row = run_one(algo, phi, timeout, reuse_dseqs, component_map(base, k))
            row.update(algo=algo, k=k, vars=phi.num_vars, clauses=len(phi.clauses),
                       bound=node_bound(phi, comps) if algo == "dds" else "")
            rows.append({c: row[c] for c in COLUMNS})
    return rows


def write_report(rows, prefix, meta=None):
    """Write ``prefix``.csv, .json and .png; return the paths."""
    prefix = Path(prefix)
    if prefix.suffix in (".csv", ".json", ".png"):
        prefix = prefix.with_suffix("")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {ext: prefix.with_suffix("." + ext) for ext in ("csv", "json", "png")}
    with open(paths["csv"], "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    doc = {"schema": SCHEMA, "columns": COLUMNS, "rows": rows, **(meta or {})}
    paths["json"].write_text(json.dumps(doc, indent=1) + "\n")
    plot_rows(rows, paths["png"])
    return paths


def plot_rows(rows, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_t, ax_n) = plt.subplots(1, 2, figsize=(9, 3.6))
    for algo in dict.fromkeys(r["algo"] for r in rows):
        mine = [r for r in rows if r["algo"] == algo]
        done = [r for r in mine if r["status"] == "ok"]
        ax_t.plot([r["k"] for r in done], [r["wallMs"] for r in done], "o-", label=algo)
        failed = [r["k"] for r in mine if r["status"] != "ok"]
        if failed:
            top = max([r["wallMs"] for r in done] or [1.0])
            ax_t.plot(failed, [top] * len(failed), "x", color="red")
        nodes = [r for r in done if r["nodes"] != ""]
        if nodes:
            ax_n.plot([r["k"] for r in nodes], [r["nodes"] for r in nodes], "o-", label=f"{algo} nodes")
            ax_n.plot([r["k"] for r in nodes], [r["bound"] for r in nodes], "--", label=f"{algo} bound")
    ax_t.set(xlabel="copies k", ylabel="wall ms", xscale="log", yscale="log", title="time (x = cap or timeout)")
    ax_n.set(xlabel="copies k", ylabel="count", xscale="log", yscale="log", title="search nodes")
    for ax in (ax_t, ax_n):
        ax.grid(alpha=0.3)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
