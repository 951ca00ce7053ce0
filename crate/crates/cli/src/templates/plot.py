"""Plots every data file of a qshhg run directory. Needs matplotlib."""

import csv
import json
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))


def rows(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def col(rs, key):
    return [float(r[key]) if r[key] != "" else float("nan") for r in rs]


def save(fig, name):
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, name), dpi=150)
    plt.close(fig)


def spectra():
    h, q = rows("hhg_bands.csv"), rows("qshhg_bands.csv")
    if h and q:
        fig, ax = plt.subplots()
        ax.semilogy(col(h, "order"), col(h, "n_photons"), "o", label="HHG")
        ax.semilogy(col(q, "order"), col(q, "n_photons_theta_avg"), "o", color="red", label="QSHHG (theta avg)")
        ax.set_xlabel("harmonic order N")
        ax.set_ylabel("photons per band")
        ax.legend()
        save(fig, "bands.png")
    s = rows("spectrum.csv")
    if s:
        fig, ax = plt.subplots()
        ax.semilogy(col(s, "harmonic_order"), col(s, "hhg_dn_domega_s"), label="HHG")
        ax.semilogy(col(s, "harmonic_order"), col(s, "qshhg_dn_domega_theta_avg_s"), color="red", label="QSHHG")
        ax.set_xlabel("harmonic order")
        ax.set_ylabel("dn/domega (s)")
        ax.legend()
        save(fig, "spectrum.png")
    t = rows("qshhg_theta.csv")
    if t:
        fig, ax = plt.subplots()
        by = defaultdict(list)
        for r in t:
            by[r["theta_rad"]].append(r)
        for theta, rs in by.items():
            ax.semilogy(col(rs, "order"), col(rs, "n_photons"), "o", label=f"theta = {float(theta):.3f}")
        ax.set_xlabel("harmonic order N")
        ax.set_ylabel("<n>_N(theta)")
        ax.legend()
        save(fig, "qshhg_theta.png")


def joint():
    j = rows("joint.csv")
    if not j:
        return
    order = j[0]["order"]
    j = [r for r in j if r["order"] == order]
    m_max = max(int(r["m"]) for r in j)
    n_max = max(int(r["n"]) for r in j)
    grid = [[0.0] * (n_max + 1) for _ in range(m_max + 1)]
    for r in j:
        grid[int(r["m"])][int(r["n"])] = float(r["probability"])
    fig, ax = plt.subplots()
    im = ax.imshow(grid, origin="lower", aspect="auto")
    ax.set_xlabel("n (BSV mode)")
    ax.set_ylabel("m (sideband mode)")
    fig.colorbar(im, label="P(m, n)")
    save(fig, "joint.png")


def marginal():
    m = rows("marginal.csv")
    if not m:
        return
    fig, ax = plt.subplots()
    by = defaultdict(list)
    for r in m:
        by[r["order"]].append(r)
    for order, rs in by.items():
        ax.semilogy(col(rs, "m"), col(rs, "p_analytic"), label=f"N = {order} analytic")
        if any(r["p_exact"] for r in rs):
            ax.semilogy(col(rs, "m")[::2], col(rs, "p_exact")[::2], ".", label=f"N = {order} exact")
    ax.set_xlabel("m")
    ax.set_ylabel("P(m)")
    ax.legend()
    save(fig, "marginal.png")


def stats(name, xkey, out):
    s = rows(name)
    if not s:
        return
    fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
    groups = defaultdict(list)
    for r in s:
        groups[(r.get("theta_rad", ""), r["method"], r.get("parity", ""))].append(r)
    for (theta, method, parity), rs in groups.items():
        tag = f"{method} theta={float(theta):.3f}" + (f" eta={parity}" if parity else "")
        style = "-" if method == "numeric" else "."
        a.plot(col(rs, xkey), col(rs, "var_x1"), style, label=f"dX1^2 {tag}")
        a.plot(col(rs, xkey), col(rs, "var_x2"), style, label=f"dX2^2 {tag}")
        b.plot(col(rs, xkey), col(rs, "g2"), style, label=tag)
    for ax in (a, b):
        ax.set_xlabel(xkey)
        if xkey == "l":
            ax.set_xscale("log")
        ax.set_yscale("log")
    a.axhline(0.25, color="k", ls="--")
    b.set_ylabel("g2(0)")
    a.legend(fontsize=6)
    save(fig, out)


def projn_extra():
    t = rows("projn_theta_avg.csv")
    if t:
        fig, ax = plt.subplots()
        ax.semilogy(col(t, "m"), col(t, "var_x1_theta_avg"), label="dX1^2 (theta avg)")
        ax.semilogy(col(t, "m"), col(t, "var_x2_theta_avg"), label="dX2^2 (theta avg)")
        ax.set_xlabel("m")
        ax.legend()
        save(fig, "projn_theta_avg.png")
    s = rows("projn_sweep.csv")
    if s:
        fig, ax = plt.subplots()
        by = defaultdict(list)
        for r in s:
            by[r["r"]].append(r)
        for r, rs in by.items():
            ax.loglog(col(rs, "zeta_abs2"), col(rs, "var_x1"), label=f"r = {float(r):g}")
        ax.set_xlabel("|zeta_N|^2")
        ax.set_ylabel("dX1^2")
        ax.legend()
        save(fig, "projn_sweep.png")


def wigner():
    path = os.path.join(HERE, "wigner_panels.json")
    if not os.path.exists(path):
        return
    with open(path) as fh:
        panels = json.load(fh)
    for p in panels:
        w = rows(p["file"])
        xs = sorted(set(col(w, "x")))
        ps = sorted(set(col(w, "p")))
        vals = col(w, "w")
        grid = [vals[j * len(xs):(j + 1) * len(xs)] for j in range(len(ps))]
        fig, ax = plt.subplots()
        im = ax.pcolormesh(xs, ps, grid, shading="auto", cmap="RdBu_r")
        ax.set_xlabel("X")
        ax.set_ylabel("P")
        ax.set_title(f"{p['state']} index={p['index']} delta_l={p['delta_l']}")
        fig.colorbar(im, label="W")
        save(fig, p["file"].replace(".csv", ".png"))
    m = rows("modulation.csv")
    if m:
        fig, ax = plt.subplots()
        by = defaultdict(list)
        for r in m:
            by[r["parity"]].append(r)
        for parity, rs in by.items():
            ax.plot([float(r["l"]) + float(r["delta_l"]) for r in rs], col(rs, "ratio"), label=parity)
        ax.set_xlabel("l + delta_l")
        ax.set_ylabel("modulation / modulation(delta_l = 0)")
        ax.legend()
        save(fig, "modulation.png")


def main():
    spectra()
    joint()
    marginal()
    stats("projq.csv", "l", "projq.png")
    stats("projn.csv", "m", "projn.png")
    projn_extra()
    wigner()
    return 0


if __name__ == "__main__":
    sys.exit(main())
