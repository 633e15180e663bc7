"""CSV data behind the six diagnostic figures.

Each figure is one CSV (column 1 the abscissa, one column per curve,
header row naming the curves) plus a marker sidecar CSV listing the
analytically distinguished points of each curve (roots, maximisers,
lower bounds).  Cells where a curve is not defined stay empty.

  figure 1  root functions of the B*(n) condition, n = 0..3
  figure 2  root functions of the D*(q) condition, q = 1..4
  figure 3  the Problem-1 scalar v on [-5, B*]
  figure 4  the Problem-2 scalar j for n = 0..3
  figure 5  the Problem-3 scalar w on [0, D*(q)] for q = 1..4
  figure 6  candidate values against payoffs at t = 0
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .problems import ProblemSpec, SpacePoint
from .records import fmt17
from .thresholds import (
    b_star_equation,
    d_star_equation,
    solve_a_star,
    solve_b_star,
    solve_c_star,
    solve_d_star,
)
from .value_functions import (
    j_scalar,
    j_star,
    payoff_f,
    payoff_g,
    payoff_h,
    v_scalar,
    v_star,
    w_scalar,
    w_star,
)
from .thresholds import solve_thresholds

__all__ = ["write_figures", "FIGURE_NAMES"]

FIGURE_NAMES = tuple(f"figure-{k}" for k in range(1, 7))

_N_LIST = (0, 1, 2, 3)
_Q_LIST = (1.0, 2.0, 3.0, 4.0)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else fmt17(v) if isinstance(v, float) else v
                             for v in row])


def _figure_1(out_dir: Path) -> list[Path]:
    bs = np.arange(0.0, 4.0 + 0.005, 0.01)
    header = ["B"] + [f"n={n}" for n in _N_LIST]
    rows = [[float(b)] + [b_star_equation(n, float(b)) for n in _N_LIST] for b in bs]
    markers = []
    for n in _N_LIST:
        root = solve_b_star(n)
        markers.append([f"n={n}", "b_star", root, b_star_equation(n, root)])
        sq = math.sqrt(n)
        markers.append([f"n={n}", "sqrt_n", sq, b_star_equation(n, sq)])
    return _emit(out_dir, "figure-1", header, rows, markers)


def _figure_2(out_dir: Path) -> list[Path]:
    ds = np.arange(0.0, 4.0 + 0.005, 0.01)
    header = ["D"] + [f"q={q:g}" for q in _Q_LIST]
    rows = [[float(d)] + [d_star_equation(q, float(d)) for q in _Q_LIST] for d in ds]
    markers = []
    for q in _Q_LIST:
        root = solve_d_star(q)
        markers.append([f"q={q:g}", "d_star", root, d_star_equation(q, root)])
        sq = math.sqrt(max((q - 1.0) / 2.0, 0.0))
        markers.append([f"q={q:g}", "sqrt_half_qm1", sq, d_star_equation(q, sq)])
    return _emit(out_dir, "figure-2", header, rows, markers)


def _figure_3(out_dir: Path) -> list[Path]:
    b = solve_b_star(0)
    c = solve_c_star(b)
    cs = np.append(np.arange(-5.0, b, 0.01), b)
    header = ["C", "v"]
    rows = [[float(x), v_scalar(float(x), b)] for x in cs]
    markers = [
        ["v", "c_star", c, v_scalar(c, b)],
        ["v", "b_star", b, v_scalar(b, b)],
    ]
    return _emit(out_dir, "figure-3", header, rows, markers)


def _figure_4(out_dir: Path) -> list[Path]:
    ds = np.arange(0.0, 4.0 + 0.005, 0.01)
    b_stars = {n: solve_b_star(n) for n in _N_LIST}
    header = ["D"] + [f"n={n}" for n in _N_LIST]
    rows = [[float(d)] + [j_scalar(n, float(d), b_stars[n]) for n in _N_LIST] for d in ds]
    markers = []
    for n in _N_LIST:
        b = b_stars[n]
        markers.append([f"n={n}", "b_star", b, j_scalar(n, b, b)])
        sq = math.sqrt(n)
        markers.append([f"n={n}", "sqrt_n", sq, j_scalar(n, sq, b)])
    return _emit(out_dir, "figure-4", header, rows, markers)


def _figure_5(out_dir: Path) -> list[Path]:
    d_stars = {q: solve_d_star(q) for q in _Q_LIST}
    a_stars = {q: solve_a_star(q, d_stars[q]) for q in _Q_LIST}
    grids = {q: np.linspace(0.0, d_stars[q], 301) for q in _Q_LIST}
    abscissa = np.unique(np.concatenate(list(grids.values())))
    defined = {q: set(grids[q].tolist()) for q in _Q_LIST}
    header = ["A"] + [f"q={q:g}" for q in _Q_LIST]
    rows = []
    for a in abscissa:
        row: list = [float(a)]
        for q in _Q_LIST:
            row.append(w_scalar(q, float(a), d_stars[q]) if float(a) in defined[q] else None)
        rows.append(row)
    markers = []
    for q in _Q_LIST:
        d, a = d_stars[q], a_stars[q]
        markers.append([f"q={q:g}", "a_star", a, w_scalar(q, a, d)])
        sq = math.sqrt(max((q - 1.0) / 2.0, 0.0))
        markers.append([f"q={q:g}", "sqrt_half_qm1", sq, w_scalar(q, min(sq, d), d)])
        markers.append([f"q={q:g}", "d_star", d, w_scalar(q, d, d)])
    return _emit(out_dir, "figure-5", header, rows, markers)


def _figure_6(out_dir: Path) -> list[Path]:
    xs = np.arange(-3.0, 3.0 + 0.005, 0.01)
    ts1 = solve_thresholds(ProblemSpec.problem1())
    ts2 = {n: solve_thresholds(ProblemSpec.problem2(n)) for n in (0, 1)}
    ts3 = {q: solve_thresholds(ProblemSpec.problem3(q)) for q in _Q_LIST}
    header = ["x", "V*", "f"]
    for n in (0, 1):
        header += [f"J*(n={n})", f"g(n={n})"]
    for q in _Q_LIST:
        header += [f"W*(q={q:g})", f"h(q={q:g})"]
    rows = []
    for x in xs:
        pt = SpacePoint(0.0, float(x))
        row: list = [float(x), v_star(pt, ts1).value, payoff_f(pt, ts1.b_star)]
        for n in (0, 1):
            row += [j_star(n, pt, ts2[n]).value, payoff_g(n, pt, ts2[n].b_star)]
        for q in _Q_LIST:
            row += [w_star(q, pt, ts3[q]).value, payoff_h(q, pt, ts3[q].d_star)]
        rows.append(row)
    markers = []
    c = ts1.c_star
    markers.append(["V*", "c_star", c, v_star(SpacePoint(0.0, c), ts1).value])
    for n in (0, 1):
        b = ts2[n].b_star
        for xb in (b, -b):
            markers.append([f"J*(n={n})", "b_star", xb, j_star(n, SpacePoint(0.0, xb), ts2[n]).value])
    for q in _Q_LIST:
        a = ts3[q].a_star
        pts = (a, -a) if a > 0.0 else (0.0,)
        for xb in pts:
            markers.append([f"W*(q={q:g})", "a_star", xb, w_star(q, SpacePoint(0.0, xb), ts3[q]).value])
    return _emit(out_dir, "figure-6", header, rows, markers)


def _emit(out_dir: Path, name: str, header: list[str], rows: list[list], markers: list[list]) -> list[Path]:
    curve_path = out_dir / f"{name}.csv"
    marker_path = out_dir / f"{name}-markers.csv"
    _write_csv(curve_path, header, rows)
    _write_csv(marker_path, ["curve", "marker", "x", "y"], markers)
    return [curve_path, marker_path]


def write_figures(out_dir: str | Path) -> list[Path]:
    """Write the six figure CSVs plus marker sidecars; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    for builder in (_figure_1, _figure_2, _figure_3, _figure_4, _figure_5, _figure_6):
        paths.extend(builder(out))
    return paths
