"""Convergence-order studies on manufactured solutions, and the efficiency
ratios derived from the same runs."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..schemes import EXPECTED_COUNTS, NormChecker, SchemeKind, Stepper, run, steps_for
from .manufactured import CASES, ManufacturedCase

SCHEMES = (SchemeKind.GSPM, SchemeKind.A, SchemeKind.B)


def fit_slope(stepsizes, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(stepsize)``."""
    h = np.log(np.asarray(stepsizes, dtype=float))
    e = np.log(np.asarray(errors, dtype=float))
    if h.size < 2:
        raise ValueError("need at least two points to fit a slope")
    return float(np.polyfit(h, e, 1)[0])


def counts_for(case: ManufacturedCase, h: float) -> tuple:
    """Cell counts for a uniform nominal cell size ``h`` (rounded, at least 1)."""
    if case.dimension == 1:
        return (max(1, round(case.lengths[0] / h)), 1, 1)
    return tuple(max(1, round(length / h)) for length in case.lengths)


@dataclass
class ConvergenceRow:
    stepsize: float
    error: float
    seconds: float
    scheme: str
    steps: int
    counts: tuple
    dt: float
    max_norm_deviation: float
    per_step_counts: list


@dataclass
class ConvergenceTable:
    case: str
    scheme: str
    vary: str
    rows: list = field(default_factory=list)

    @property
    def stepsizes(self) -> list:
        return [r.stepsize for r in self.rows]

    @property
    def errors(self) -> list:
        return [r.error for r in self.rows]

    @property
    def slope(self) -> float:
        return fit_slope(self.stepsizes, self.errors)

    @property
    def max_norm_deviation(self) -> float:
        return max(r.max_norm_deviation for r in self.rows)

    @property
    def counts_ok(self) -> bool:
        want = [list(EXPECTED_COUNTS[SchemeKind.parse(self.scheme)])]
        return all(r.per_step_counts == want for r in self.rows)

    def to_csv(self, path):
        write_convergence_csv(path, [self])


def write_convergence_csv(path, tables: Sequence[ConvergenceTable]):
    """One row per run; the fitted slope is repeated on every row of its table.

    ``seconds`` is the only wall-clock column.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["case", "scheme", "vary", "stepsize", "error", "dt", "nx", "ny", "nz",
                    "steps", "max_norm_deviation", "slope", "seconds"])
        for t in tables:
            slope = t.slope if len(t.rows) > 1 else float("nan")
            for r in t.rows:
                w.writerow([t.case, t.scheme, t.vary, f"{r.stepsize:.17g}", f"{r.error:.17g}",
                            f"{r.dt:.17g}", *r.counts, r.steps, f"{r.max_norm_deviation:.17g}",
                            f"{slope:.17g}", f"{r.seconds:.6f}"])


def run_manufactured(case: ManufacturedCase, scheme, counts, dt: float, T: Optional[float] = None,
                     label: Optional[str] = None, mode: str = "source"):
    """Run one case from ``m_e(., 0)`` to ``T``; returns ``(error, stepper, norm checker)``."""
    T = case.T if T is None else T
    mesh = case.mesh(counts)
    st = Stepper(scheme, case.context(mesh, mode), case.exact_field(mesh, 0.0), dt)
    norms = NormChecker()
    run(st, steps_for(T, dt), observers=[norms], label=label)
    err = float(np.max(np.abs(st.m - case.exact_field(mesh, T).data)))
    return err, st, norms


def convergence_study(case, scheme, vary: str, grid: Sequence[float], *, counts=None,
                      dt: Optional[float] = None, T: Optional[float] = None,
                      mode: str = "source") -> ConvergenceTable:
    """Errors ``max |m_e(T) - m_h|`` over a refining list of step sizes.

    ``vary="time"``: ``grid`` lists ``dt`` values on the fixed mesh ``counts``.
    ``vary="space"``: ``grid`` lists nominal cell sizes, ``dt`` is fixed.
    """
    if isinstance(case, str):
        case = CASES[case]
    kind = SchemeKind.parse(scheme)
    if vary not in ("time", "space"):
        raise ValueError("vary must be 'time' or 'space'")
    grid = [float(g) for g in grid]
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly refining (decreasing step sizes)")
    if vary == "time" and counts is None:
        raise ValueError("a time study needs fixed cell counts")
    if vary == "space" and dt is None:
        raise ValueError("a space study needs a fixed dt")
    T = case.T if T is None else T
    table = ConvergenceTable(case.name, kind.value, vary)
    for h in grid:
        if vary == "time":
            c, step = tuple(counts) + (1,) * (3 - len(tuple(counts))), h
        else:
            c, step = counts_for(case, h), dt
        label = f"{case.name} {kind.label} {vary} stepsize={h:g}"
        err, st, norms = run_manufactured(case, kind, c, step, T, label=label, mode=mode)
        table.rows.append(ConvergenceRow(
            stepsize=h, error=err, seconds=st.stats.wall_seconds, scheme=kind.value,
            steps=st.stats.steps, counts=tuple(st.mesh.counts), dt=step,
            max_norm_deviation=norms.worst,
            per_step_counts=sorted(map(list, st.stats.per_step_seen))))
    return table


# ---------------------------------------------------------------------------
# efficiency

def ideal_ratio(kind) -> float:
    """Saving over GSPM predicted by the heat-solve counts alone."""
    base = EXPECTED_COUNTS[SchemeKind.GSPM][0]
    return (base - EXPECTED_COUNTS[SchemeKind.parse(kind)][0]) / base


@dataclass
class RatioRow:
    stepsize: float
    seconds: dict
    ratio_a: float
    ratio_b: float


@dataclass
class RatioTable:
    case: str
    vary: str
    rows: list = field(default_factory=list)
    ideal_a: float = ideal_ratio(SchemeKind.A)
    ideal_b: float = ideal_ratio(SchemeKind.B)

    def mean_ratio(self, which: str) -> float:
        vals = [getattr(r, f"ratio_{which}") for r in self.rows]
        return float(np.mean(vals))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["case", "vary", "stepsize", "ratio_a", "ratio_b", "ideal_a", "ideal_b",
                        "seconds_gspm", "seconds_a", "seconds_b"])
            for r in self.rows:
                w.writerow([self.case, self.vary, f"{r.stepsize:.17g}", f"{r.ratio_a:.6f}",
                            f"{r.ratio_b:.6f}", f"{self.ideal_a:.17g}", f"{self.ideal_b:.17g}",
                            *(f"{r.seconds[k.value]:.6f}" for k in SCHEMES)])


def efficiency_ratios(case, vary: str, grid: Sequence[float], *, repeats: int = 1,
                      **study) -> RatioTable:
    """``ratio_i = (Time(GSPM) - Time(i)) / Time(GSPM)`` on identical grids.

    Each scheme's time is the stepping wall clock (setup excluded); with
    ``repeats > 1`` the fastest repetition is kept to damp timer noise.
    """
    if isinstance(case, str):
        case = CASES[case]
    best = {}
    for _ in range(max(1, repeats)):
        for kind in SCHEMES:
            t = convergence_study(case, kind, vary, grid, **study)
            secs = [r.seconds for r in t.rows]
            prev = best.get(kind.value)
            best[kind.value] = secs if prev is None else [min(a, b) for a, b in zip(prev, secs)]
    table = RatioTable(case.name, vary)
    for i, h in enumerate(grid):
        secs = {k: v[i] for k, v in best.items()}
        g = secs["gspm"]
        table.rows.append(RatioRow(h, secs, (g - secs["a"]) / g, (g - secs["b"]) / g))
    return table


def temporal_grid(case: ManufacturedCase, divisors=(1250, 2500, 5000, 10000)) -> list:
    return [case.T / d for d in divisors]


def two_point_order(e_coarse: float, e_fine: float, factor: float = 2.0) -> float:
    return math.log(e_coarse / e_fine) / math.log(factor)



def standard_study(case: str, vary: str) -> dict:
    """Keyword arguments of ``convergence_study`` for the desk-scale workloads.

    1D time: ``nx = 100``, ``dt = T/1250 ... T/10000``. 1D space: ``T = 1e-3``,
    ``dt = 1e-7``, ``dx = 1/10, 1/20, 1/40``. 3D time: 32 x 16 x 4 cells,
    ``dt = T/10 ... T/80``. 3D space: uniform cell sizes ``1/6 ... 1/12``
    with ``dt = T/100``.
    """
    c = CASES[case]
    if (case, vary) == ("1d", "time"):
        return {"counts": (100, 1, 1), "grid": temporal_grid(c)}
    if (case, vary) == ("1d", "space"):
        return {"grid": [1 / 10, 1 / 20, 1 / 40], "dt": 1e-7, "T": 1e-3}
    if (case, vary) == ("3d", "time"):
        return {"counts": (32, 16, 4), "grid": [c.T / k for k in (10, 20, 40, 80)]}
    if (case, vary) == ("3d", "space"):
        return {"grid": [1 / 6, 1 / 8, 1 / 10, 1 / 12], "dt": c.T / 100}
    raise ValueError(f"no standard study for case={case!r}, vary={vary!r}")
