"""Plot the CSVs written by ``mmhetnet figure fig2|fig8``. Needs matplotlib.

    python3 scripts/plot_figures.py fig2.csv fig8.csv --out-dir plots
"""

import argparse
import csv
import os
from collections import defaultdict


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _num(s):
    return float(s) if s not in ("", None) else float("nan")


def plot_fig2(rows, out, plt):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    curves = defaultdict(list)
    for r in rows:
        if r["state"] == "all":
            curves[r["tier"]].append(r)
    for tier, rs in sorted(curves.items()):
        x = [_num(r["theta_db"]) for r in rs]
        label = "overall" if tier == "all" else f"tier {tier}"
        line, = ax1.plot(x, [_num(r["analytic_sp"]) for r in rs], label=label)
        ax1.plot(x, [_num(r["mc_sp"]) for r in rs], "o", color=line.get_color())
        ax2.plot(x, [_num(r["analytic_var"]) for r in rs], color=line.get_color(), label=label)
        ax2.plot(x, [_num(r["mc_var"]) for r in rs], "o", color=line.get_color())
    ax1.set(xlabel="threshold (dB)", ylabel="success probability")
    ax2.set(xlabel="threshold (dB)", ylabel="variance")
    ax1.legend()
    fig.tight_layout()
    fig.savefig(out)


def plot_fig8(rows, out, plt):
    fig, ax = plt.subplots(figsize=(5, 4))
    curves = defaultdict(list)
    for r in rows:
        curves[r["beta2"]].append(r)
    for b2, rs in sorted(curves.items()):
        y = [_num(r["y"]) for r in rs]
        line, = ax.plot(y, [_num(r["meta_beta"]) for r in rs], label=f"beta2 = {b2}")
        ax.plot(y, [_num(r["meta_mc"]) for r in rs], "o", color=line.get_color())
    ax.set(xlabel="y", ylabel="fraction of users above y")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("csv", nargs="+")
    p.add_argument("--out-dir", default=".")
    args = p.parse_args()
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(args.out_dir, exist_ok=True)
    for path in args.csv:
        rows = _rows(path)
        name = os.path.splitext(os.path.basename(path))[0]
        out = os.path.join(args.out_dir, f"{name}.png")
        if "beta2" in rows[0]:
            plot_fig8(rows, out, plt)
        else:
            plot_fig2(rows, out, plt)
        print(out)


if __name__ == "__main__":
    main()
