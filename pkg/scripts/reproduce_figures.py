"""Regenerate the data behind Figures 1-5 and, if matplotlib is present, plot it.

Usage: python scripts/reproduce_figures.py [--out out/figures] [--no-plot]
"""
import argparse
import sys
from pathlib import Path

from bdriccati.cli import PRESETS, main as cli_main, read_distribution_csv


def plot(out: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for name in sorted(PRESETS):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for f in sorted((out / name).glob("P_D*.csv")):
            p, meta = read_distribution_csv(f)
            label = "D = -inf" if meta["D"] == "inf" else f"D = {float(meta['D']):g}"
            ax.plot(range(len(p)), p, marker=".", ms=3, lw=1, label=label)
        ax.set_xlabel("n")
        ax.set_ylabel("P_n")
        ax.set_title(name)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(out / f"{name}.png", dpi=120)
        plt.close(fig)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("out/figures"))
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args(argv)
    for name in sorted(PRESETS):
        rc = cli_main([name, "--out", str(args.out / name)])
        if rc:
            return rc
    if not args.no_plot:
        try:
            plot(args.out)
        except ImportError:
            print("matplotlib not installed; CSVs only", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
