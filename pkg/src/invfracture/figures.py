"""Data files (and a plotting script) for the standard stress-stretch figures.

Each figure writes CSVs into the output directory plus ``plot_<id>.py``,
a matplotlib script that reads only those CSVs.

``fig4``  rational model, first branch for eps = 2/49, 2/25, 2.
``fig7``  quadratic model, eps = 16/pi^2 (vertical branch).
``fig8a`` rational model, eps = 0.01, with marked points A, B, C.
``fig8b`` the same for eps = 2.
``fig9``  profiles at A, B, C for eps = 0.01 and 2.

Points A, B, C sit on the branch at ``H1 = 0.9/lambda_1``,
``H1 = 0.5/lambda_1`` and ``H1 = 0`` (the fracture point).
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import branch as br
from .constitutive import build_model
from .io import write_csv, write_text
from .linearization import bifurcation_points

FIGURES = ("fig4", "fig7", "fig8a", "fig8b", "fig9")
DEFAULT_EPS = {
    "fig4": (2.0 / 49.0, 2.0 / 25.0, 2.0),
    "fig7": (16.0 / np.pi**2,),
    "fig8a": (0.01,),
    "fig8b": (2.0,),
    "fig9": (0.01, 2.0),
}
DEFAULT_MODEL = {"fig7": "quadratic"}
MARKED = {"A": 0.9, "B": 0.5, "C": 0.0}


@dataclass
class FigureOutput:
    figure: str
    files: list
    summary: dict


def eps_tag(eps):
    return format(eps, ".6g").replace(".", "p").replace("-", "m")


def branch_columns(sweep):
    pts = sweep.points
    return {
        "H1": [p.H1 for p in pts],
        "H2": [p.H2 for p in pts],
        "varpi": [p.chord.varpi for p in pts],
        "Gamma": [p.chord.Gamma for p in pts],
        "lambda": [p.lam for p in pts],
        "sigma": [p.sigma for p in pts],
    }


def _trivial_columns(model, lam_max, n=400):
    lam = np.linspace(1.0, lam_max, n)
    return {"lambda": lam, "sigma": br.trivial_branch(model, lam)}


def _ray_columns(lam_star, lam_max, n=50):
    lam = np.linspace(lam_star, max(lam_max, lam_star), n)
    return {"lambda": lam, "sigma": np.zeros_like(lam)}


def marked_points(model, eps, lam1, quad_tol=br.QUAD_TOL):
    out = {}
    for label, frac in MARKED.items():
        if frac == 0.0:
            out[label] = br.fracture_point(model, eps, tol=quad_tol)
        else:
            out[label] = br.branch_point(model, eps, frac / lam1, tol=quad_tol)
    return out


def _plot_script(figure, groups):
    lines = [
        '"""Plot the CSV files written next to this script."""',
        "import csv",
        "from pathlib import Path",
        "",
        "import matplotlib",
        "",
        'matplotlib.use("Agg")',
        "import matplotlib.pyplot as plt",
        "",
        "HERE = Path(__file__).resolve().parent",
        f"GROUPS = {groups!r}",
        "",
        "",
        "def load(name):",
        "    with open(HERE / name, newline='') as fh:",
        "        rows = list(csv.reader(fh))",
        "    header, body = rows[0], rows[1:]",
        "    return {h: [float(r[i]) for r in body] for i, h in enumerate(header)}",
        "",
        "",
        "def main():",
        "    fig, axes = plt.subplots(1, len(GROUPS), figsize=(5 * len(GROUPS), 4), squeeze=False)",
        "    for ax, (title, (xcol, ycol), files) in zip(axes[0], GROUPS):",
        "        for name in files:",
        "            data = load(name)",
        "            style = 'o' if len(data[xcol]) <= 3 else '-'",
        "            ax.plot(data[xcol], data[ycol], style, label=Path(name).stem)",
        "        ax.set_xlabel(xcol)",
        "        ax.set_ylabel(ycol)",
        "        ax.set_title(title)",
        "        ax.legend(fontsize='small')",
        "    fig.tight_layout()",
        f"    fig.savefig(HERE / '{figure}.png', dpi=150)",
        "",
        "",
        'if __name__ == "__main__":',
        "    main()",
        "",
    ]
    return "\n".join(lines)


def _write_script(out, figure, groups):
    return write_text(Path(out) / f"plot_{figure}.py", _plot_script(figure, groups))


def reproduce_figure(figure, out, model=None, eps=None, points=41, samples=2001,
                     quad_tol=br.QUAD_TOL):
    """Write the data for ``figure`` into ``out``; return a :class:`FigureOutput`."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(model or DEFAULT_MODEL.get(figure, "rational"))
    eps_values = tuple(eps) if eps else DEFAULT_EPS[figure]
    files, summary = [], {"figure": figure, "model": model.name, "curves": []}
    stress_files, profile_files = [], []

    lam_max = 0.0
    sweeps = []
    for e in eps_values:
        bif = bifurcation_points(model, e, 1)[0]
        sweep = br.sweep_branch(model, e, 1, points, quad_tol) if figure != "fig9" else None
        sweeps.append((e, bif, sweep))
        lam_max = max(lam_max, 1.25 * bif.lambda_n)

    for e, bif, sweep in sweeps:
        tag = eps_tag(e)
        entry = {"eps": e, "lambda_1": bif.lambda_n, "sigma_1": bif.sigma_n}
        if sweep is not None:
            path = write_csv(out / f"{figure}_branch_eps{tag}.csv", branch_columns(sweep))
            files.append(path)
            stress_files.append(path.name)
            fr = sweep.fracture
            entry.update(lambda_star=fr.lam if fr else None, points=len(sweep),
                         failures=[msg for _, msg in sweep.failures])
            if fr is not None:
                path = write_csv(out / f"{figure}_fracture_ray_eps{tag}.csv",
                                 _ray_columns(fr.lam, lam_max))
                files.append(path)
                stress_files.append(path.name)
            path = write_csv(out / f"{figure}_bifurcation_eps{tag}.csv",
                             {"lambda": [bif.lambda_n], "sigma": [bif.sigma_n]})
            files.append(path)
            stress_files.append(path.name)
        if figure in ("fig8a", "fig8b", "fig9"):
            marks = marked_points(model, e, bif.lambda_n, quad_tol)
            if figure != "fig9":
                path = write_csv(out / f"{figure}_points_eps{tag}.csv", {
                    "label": list(marks),
                    "lambda": [p.lam for p in marks.values()],
                    "sigma": [p.sigma for p in marks.values()],
                    "H1": [p.H1 for p in marks.values()],
                    "H2": [p.H2 for p in marks.values()],
                })
                files.append(path)
            else:
                for label, bp in marks.items():
                    prof = br.profile_from_quadrature(model, e, bp, samples)
                    path = write_csv(out / f"{figure}_profile_{label}_eps{tag}.csv", prof.columns())
                    files.append(path)
                    profile_files.append(path.name)
            entry["marked"] = {k: {"lambda": p.lam, "sigma": p.sigma, "H1": p.H1}
                               for k, p in marks.items()}
        summary["curves"].append(entry)

    if figure != "fig9":
        path = write_csv(out / f"{figure}_trivial.csv", _trivial_columns(model, lam_max))
        files.append(path)
        stress_files.append(path.name)
        groups = [("stress-stretch", ("lambda", "sigma"), stress_files)]
    else:
        groups = [("profiles", ("y", "H"), profile_files)]
    files.append(_write_script(out, figure, groups))
    return FigureOutput(figure, files, summary)
