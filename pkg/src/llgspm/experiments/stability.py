"""Long unforced runs over a grid of damping and step-size values."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ZeroVector
from ..field import FieldContext, total_energy
from ..mesh import Mesh, VectorField, normalize_array
from ..schemes import SchemeKind, Stepper


def random_smooth_unit(mesh: Mesh, seed: int = 0, modes: int = 4) -> VectorField:
    """Unit field built from a few random low cosine modes per component."""
    rng = np.random.default_rng(seed)
    coords = mesh.cell_centers()
    lengths = mesh.lengths
    data = np.zeros((3,) + mesh.shape)
    for c in range(3):
        data[c] += rng.normal()
        for _ in range(modes):
            term = rng.normal()
            for axis in range(3):
                if mesh.counts[axis] > 1:
                    k = rng.integers(0, 4)
                    term = term * np.cos(k * np.pi * (coords[axis] - mesh.origin[axis]) / lengths[axis])
            data[c] += term
    # make sure no cell is degenerate before projecting
    norms = np.sqrt(np.sum(data * data, axis=0))
    data[2] += np.where(norms < 1e-3, 1.0, 0.0)
    return VectorField(mesh, normalize_array(data), unit=True)


@dataclass
class StabilityEntry:
    scheme: str
    alpha: float
    dt: float
    steps: int
    finite: bool
    energy_initial: float
    energy_max: float
    energy_final: float
    max_step_increase: float
    tolerance: float
    per_step_counts: list = field(default_factory=list)

    @property
    def bounded(self) -> bool:
        return self.finite and self.energy_max <= self.energy_initial + self.tolerance

    @property
    def stable(self) -> bool:
        return self.finite and self.bounded


@dataclass
class StabilityMatrix:
    entries: list = field(default_factory=list)

    @property
    def all_stable(self) -> bool:
        return all(e.stable for e in self.entries)

    def matrix(self, scheme) -> dict:
        kind = SchemeKind.parse(scheme).value
        return {(e.alpha, e.dt): e.stable for e in self.entries if e.scheme == kind}

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scheme", "alpha", "dt", "steps", "finite", "bounded", "energy_initial",
                        "energy_max", "energy_final", "max_step_increase"])
            for e in self.entries:
                w.writerow([e.scheme, f"{e.alpha:.17g}", f"{e.dt:.17g}", e.steps, int(e.finite),
                            int(e.bounded), f"{e.energy_initial:.17g}", f"{e.energy_max:.17g}",
                            f"{e.energy_final:.17g}", f"{e.max_step_increase:.17g}"])


def stability_run(scheme, mesh: Mesh, alpha: float, dt: float, n_steps: int, *, eps: float = 1.0,
                  seed: int = 0, tolerance: float = 1e-8) -> StabilityEntry:
    """One unforced, field-free run; failures are returned as data."""
    kind = SchemeKind.parse(scheme)
    ctx = FieldContext(mesh, Q=0.0, eps=eps, alpha=alpha)
    m0 = random_smooth_unit(mesh, seed)
    st = Stepper(kind, ctx, m0, dt)
    e0 = total_energy(ctx, m0)
    emax, prev, worst_rise, finite = e0, e0, -np.inf, True
    for _ in range(n_steps):
        try:
            st.step()
        except ZeroVector:
            finite = False
            break
        if not np.isfinite(st.m).all():
            finite = False
            break
        e = total_energy(ctx, st.field)
        emax = max(emax, e)
        worst_rise = max(worst_rise, e - prev)
        prev = e
    return StabilityEntry(kind.value, alpha, dt, st.n, finite, e0, emax,
                          prev if finite else float("nan"), worst_rise, tolerance,
                          sorted(map(list, st.stats.per_step_seen)))


def stability_sweep(schemes, alphas: Sequence[float], dts: Sequence[float], mesh: Mesh,
                    n_steps: int = 10_000, **kw) -> StabilityMatrix:
    """Every (scheme, alpha, dt) combination on the same initial data."""
    if isinstance(schemes, (str, SchemeKind)):
        schemes = [schemes]
    out = StabilityMatrix()
    for s in schemes:
        for a in alphas:
            for dt in dts:
                out.entries.append(stability_run(s, mesh, a, dt, n_steps, **kw))
    return out


def default_sweep_grid(nx: int = 100) -> tuple[Mesh, list, list]:
    """1D unit-interval mesh with ``dt in {dx, 10 dx^2}`` and three damping values."""
    mesh = Mesh(nx, dx=1.0 / nx)
    return mesh, [0.01, 0.1, 1.0], [mesh.dx, 10.0 * mesh.dx**2]


