"""Rendering of the figure tables to PNG files.

Each renderer consumes the long-format rows produced by the CLI figure
command, so a saved CSV and its PNG always show the same numbers.  Lines
carry the closed-form values, circular markers the Monte Carlo estimates.
"""

from __future__ import annotations



def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _series(rows, key_fields):
    groups = {}
    for row in rows:
        key = tuple(row[f] for f in key_fields)
        groups.setdefault(key, []).append(row)
    return groups


def _config_label(row) -> str:
    if row["mode"] == "direct-only":
        return "direct only"
    return f"L={row['elements']}"


def render_figure(figure_id: str, rows, path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    if figure_id == "fig2":
        for key, grp in _series(rows, ("mode", "elements")).items():
            x = [r["bin_center"] for r in grp]
            ax.plot(x, [r["density_mc"] for r in grp], "o", ms=3, label=f"{_config_label(grp[0])} (MC)")
            ax.plot(x, [r["pdf_gamma"] for r in grp], "-", label=f"{_config_label(grp[0])} (fit)")
        ax.set_xlabel("combined channel response |A|")
        ax.set_ylabel("density")
        ax.set_title(f"channel response histogram vs Gamma fit ({rows[0]['preset']})")
    elif figure_id == "fig3":
        for key, grp in _series(rows, ("preset", "mode", "elements")).items():
            grp.sort(key=lambda r: r["rho_th_db"])
            x = [r["rho_th_db"] for r in grp]
            label = f"{grp[0]['preset']} {_config_label(grp[0])}"
            line, = ax.plot(x, [r["pc_analytic"] for r in grp], "-", label=label)
            ax.plot(x, [r["pc_mc"] for r in grp], "o", ms=3, color=line.get_color())
        ax.set_xlabel("SNR threshold (dB)")
        ax.set_ylabel("coverage probability")
        ax.set_ylim(0, 1.02)
        ax.set_title("coverage: closed form (lines) vs simulation (markers)")
    elif figure_id in ("fig4a", "fig4b"):
        for key, grp in _series(rows, ("elements",)).items():
            grp.sort(key=lambda r: r["sweep_value"])
            x = [r["sweep_value"] for r in grp]
            if figure_id == "fig4b":
                x = [v / 1000.0 for v in x]
            label = f"L={grp[0]['elements']}"
            line, = ax.plot(x, [r["capacity_analytic"] for r in grp], "-", label=label)
            ax.plot(x, [r["capacity_mc"] for r in grp], "o", ms=4, color=line.get_color())
        if figure_id == "fig4a":
            ax.set_xscale("log")
            ax.set_xlabel("surface density (1/m$^2$)")
        else:
            ax.set_xlabel("platform altitude (km)")
        ax.set_ylabel("ergodic capacity (bits/s/Hz)")
        ax.set_title(f"capacity ({rows[0]['preset']}): closed form (lines) vs simulation (markers)")
    else:
        raise ValueError(f"unknown figure id {figure_id!r}")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
