"""Optional figure rendering for the CLI's --plot flag.

Imported lazily so the data path never depends on matplotlib.  Each
renderer writes a single PNG next to the tabular output file (same
name, .png suffix); the delimited file remains the artifact of record.
"""

from __future__ import annotations

import os


def _axes():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _figure_path(data_path):
    root, _ = os.path.splitext(data_path)
    return root + ".png"


def render(kind, data_path, **data):
    """Render one figure of the given kind; returns the PNG path."""
    plt = _axes()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    if kind == "trajectory":
        traj = data["trajectory"]
        xs, ys = traj.states[:, 0], traj.states[:, 1]
        ax.plot(xs, ys, lw=0.7)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title("configuration-plane projection")
        ax.set_aspect("equal", adjustable="datalim")
    elif kind == "section":
        per_seed = data["points"]
        for k, pts in enumerate(per_seed):
            if not pts:
                continue
            ax.plot([p.x for p in pts], [p.p_x for p in pts], ".", ms=2.0,
                    label=f"seed {k}")
        ax.set_xlabel("x")
        ax.set_ylabel("p_x")
        ax.set_title("section y = 0, p_y > 0")
        if len(per_seed) > 1:
            ax.legend(fontsize="x-small", markerscale=3)
    elif kind == "lyapunov":
        est = data["estimate"]
        ax.plot(est.history[:, 0], est.history[:, 1], lw=0.9)
        ax.axhline(est.mle, color="k", lw=0.6, ls="--")
        ax.set_xlabel("t")
        ax.set_ylabel("running estimate")
        ax.set_title(f"largest Lyapunov exponent: {est.mle:.6g}")
    elif kind == "shoot":
        from .integrators import integrate_reduced
        problem, result = data["problem"], data["result"]
        cfg = data["integrator"]
        s0 = [problem.start[0], problem.start[1],
              result.momenta[0], result.momenta[1]]
        traj = integrate_reduced(problem.mu, s0, cfg)
        ax.plot(traj.states[:, 0], traj.states[:, 1], lw=0.9)
        ax.plot(*problem.start, "o", ms=5, label="start")
        ax.plot(*problem.target, "s", ms=5, label="target")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title("shooting solution path")
        ax.legend(fontsize="x-small")
    else:
        plt.close(fig)
        raise ValueError(f"unknown figure kind: {kind}")
    out = _figure_path(data_path)
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out
