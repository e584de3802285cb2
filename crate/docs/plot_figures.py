"""Plot CSV output of `linopt figure fig2` and `linopt figure fig4`.

    linopt figure fig2 > fig2.csv
    linopt figure fig4 > fig4.csv
    python docs/plot_figures.py fig2.csv fig4.csv
"""

import sys

import matplotlib.pyplot as plt
import pandas as pd


def fig2(path):
    df = pd.read_csv(path)
    fig, ax = plt.subplots()
    for n, rows in df.groupby("n"):
        ax.plot(rows["eta"], rows["fidelity"], label=f"N = {n}")
    ax.set_xlabel("detector efficiency")
    ax.set_ylabel("fidelity to NOON$_{N-1}$")
    ax.legend()
    fig.savefig("fig2.png", dpi=150)


def fig4(path):
    df = pd.read_csv(path)
    fig, ax = plt.subplots()
    ax.plot(df["eta"], df["delta_phi"], label="phase sensitivity")
    ax.plot(df["eta"], df["fidelity"], label="fidelity")
    ax.plot(df["eta"], df["shot_noise"], "k:", label="shot-noise limit")
    ax.set_xlabel("detector efficiency")
    ax.set_ylim(0, 1.5)
    ax.legend()
    fig.savefig("fig4.png", dpi=150)


if __name__ == "__main__":
    fig2(sys.argv[1])
    fig4(sys.argv[2])
