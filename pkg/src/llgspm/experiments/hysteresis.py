"""Quasi-static hysteresis loops of a thin film under a uniform applied field."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..field import FieldContext, total_energy
from ..mesh import MaterialParams, Mesh, VectorField, average_magnetization
from ..schemes import SchemeKind, Stepper

FILM_SIZE = (1e-6, 1e-6, 0.02e-6)  # metres


def film_setup(counts=(64, 64, 1), size=FILM_SIZE, material: Optional[MaterialParams] = None,
               alpha: float = 0.1) -> tuple[Mesh, MaterialParams]:
    """Mesh and material for a rectangular film, with ``L`` its diameter."""
    diameter = math.sqrt(sum(s * s for s in size))
    base = material or MaterialParams()
    mat = MaterialParams(Ms=base.Ms, A_ex=base.A_ex, Ku=base.Ku, gamma=base.gamma,
                         mu0=base.mu0, L=diameter, alpha=alpha)
    mesh = Mesh.from_box([s / diameter for s in size], counts)
    return mesh, mat


@dataclass(frozen=True)
class HysteresisProtocol:
    """Field sweep ``+H0 -> -H0 -> +H0`` along one axis.

    ``H0_mT`` and ``dH_mT`` are ``mu0 H`` in millitesla; ``dH_mT`` defaults
    to ``H0_mT / 25``. A field value counts as relaxed once the relative
    energy change of one step drops below ``threshold``.
    """

    H0_mT: float = 50.0
    dH_mT: Optional[float] = None
    threshold: float = 1e-7
    max_steps: int = 20_000
    scheme: str = "b"
    alpha: float = 0.1
    axis: int = 0
    dt_seconds: float = 1e-12

    @property
    def step_mT(self) -> float:
        return self.H0_mT / 25.0 if self.dH_mT is None else self.dH_mT

    def fields_mT(self) -> list[tuple[str, float]]:
        n = int(round(2 * self.H0_mT / self.step_mT))
        if not math.isclose(n * self.step_mT, 2 * self.H0_mT, rel_tol=1e-9):
            raise ValueError("2 H0 must be an integer multiple of the field step")
        down = [("down", self.H0_mT - k * self.step_mT) for k in range(n + 1)]
        up = [("up", -self.H0_mT + k * self.step_mT) for k in range(1, n + 1)]
        return down + up


@dataclass
class LoopPoint:
    branch: str
    H_mT: float
    H: float
    m_avg: tuple
    steps: int
    energy: float
    converged: bool


@dataclass
class LoopTable:
    protocol: HysteresisProtocol
    points: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    max_energy_rise: float = -math.inf

    def branch(self, name: str) -> list:
        return [p for p in self.points if p.branch == name]

    def switch_field(self, branch: str) -> float:
        """First field (mT) on a branch where the axis magnetization changed sign.

        The descending branch is preceded by the ``+H0`` start, the ascending
        one by the last descending point.
        """
        ax = self.protocol.axis
        pts = self.branch(branch)
        if branch == "up":
            pts = self.branch("down")[-1:] + pts
        start = np.sign(pts[0].m_avg[ax])
        for p in pts[1:]:
            if np.sign(p.m_avg[ax]) != start and p.m_avg[ax] != 0.0:
                return p.H_mT
        return float("nan")

    @property
    def area(self) -> float:
        """``|closed integral of <m_axis> dH|`` in mT over the full loop."""
        ax = self.protocol.axis
        h = np.array([p.H_mT for p in self.points])
        m = np.array([p.m_avg[ax] for p in self.points])
        return abs(float(np.sum(0.5 * (m[1:] + m[:-1]) * np.diff(h))))

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.points)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["branch", "H_mT", "H", "m1", "m2", "m3", "steps", "energy", "converged"])
            for p in self.points:
                w.writerow([p.branch, f"{p.H_mT:.17g}", f"{p.H:.17g}",
                            *(f"{v:.17g}" for v in p.m_avg), p.steps, f"{p.energy:.17g}",
                            int(p.converged)])


def relax(st: Stepper, threshold: float, max_steps: int) -> tuple[int, float, bool, float]:
    """Step until the relative energy change of a step is below ``threshold``.

    Returns ``(steps, energy, converged, largest energy rise)``.
    """
    e = total_energy(st.ctx, st.field)
    rise = -math.inf
    for k in range(1, max_steps + 1):
        st.step()
        e_new = total_energy(st.ctx, st.field)
        rise = max(rise, e_new - e)
        change = abs(e_new - e) / max(abs(e_new), 1e-300)
        e = e_new
        if change < threshold:
            return k, e, True, rise
    return max_steps, e, False, rise


def hysteresis_loop(protocol: HysteresisProtocol, ctx: FieldContext,
                    m0: Optional[VectorField] = None, progress=None) -> LoopTable:
    """Relax at every field value of the sweep; each state seeds the next.

    ``ctx`` must carry its ``material`` (for the mT conversion). Field values
    that hit ``max_steps`` are flagged not converged and the sweep continues.
    """
    if ctx.material is None:
        raise ValueError("hysteresis_loop needs a context built from MaterialParams")
    mat = ctx.material
    if m0 is None:
        direction = np.zeros(3)
        direction[protocol.axis] = 1.0
        m0 = VectorField.uniform(ctx.mesh, direction)
    dt = mat.to_dimensionless_time(protocol.dt_seconds)
    kind = SchemeKind.parse(protocol.scheme)
    table = LoopTable(protocol)
    st = None
    for branch, h_mT in protocol.fields_mT():
        h = mat.field_from_tesla(h_mT * 1e-3)
        vec = [0.0, 0.0, 0.0]
        vec[protocol.axis] = h
        fctx = ctx.with_field(vec)
        if st is None:
            st = Stepper(kind, fctx, m0, dt)
        else:
            st.set_context(fctx)
        steps, energy, ok, rise = relax(st, protocol.threshold, protocol.max_steps)
        table.max_energy_rise = max(table.max_energy_rise, rise)
        point = LoopPoint(branch, h_mT, h, tuple(float(v) for v in average_magnetization(st.field)),
                          steps, energy, ok)
        table.points.append(point)
        if progress is not None:
            progress(point)
    table.stats = st.stats.to_dict()
    table.stats["per_step_counts"] = sorted(map(list, st.stats.per_step_seen))
    return table
