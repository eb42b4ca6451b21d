#!/usr/bin/env python3
"""Plot rejection-rate curves from `panelspec simulate --format csv` output.

Studies over several N (presets 1 and 2) are drawn as rate against N, one
panel per gamma. Studies at a single N (presets 4 and 5) are drawn as rate
against gamma, one panel per contamination setting.

    panelspec simulate --paper-figure 1 --format csv > size.csv
    python3 tools/plot_rejections.py size.csv size.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("csv")
    parser.add_argument("output")
    args = parser.parse_args()

    df = pd.read_csv(args.csv)
    by_n = df["n"].nunique() > 1
    panel_key = "gamma" if by_n else ["contamination", "m"]
    x_key = "n" if by_n else "gamma"
    groups = list(df.groupby(panel_key))

    fig, axes = plt.subplots(1, len(groups), figsize=(4 * len(groups), 3.5), squeeze=False, sharey=True)
    for ax, (key, part) in zip(axes[0], groups):
        for test, series in part.groupby("test"):
            series = series.sort_values(x_key)
            ax.plot(series[x_key], series["rejection_rate"], marker="o", label=test)
        if by_n:
            ax.axhline(key, color="grey", linestyle=":", linewidth=1)
            ax.set_title(f"gamma = {key:g}")
        else:
            ax.plot(part[x_key], part[x_key], color="grey", linestyle=":", linewidth=1)
            scheme, m = key
            ax.set_title(f"{scheme}, m = {m}")
        ax.set_xlabel(x_key)
    axes[0][0].set_ylabel("rejection rate")
    axes[0][0].legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
