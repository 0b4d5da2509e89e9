"""Gauss-Seidel projection time steppers for the dimensionless LLG equation.

Three schemes advance a unit field ``m`` by ``dt``:

* ``GSPM``: implicit Gauss-Seidel gyromagnetic update, an implicit heat flow
  for the damping, then projection (stray field and ``fhat`` refreshed from
  the partially updated magnetization). 7 heat solves, 4 stray updates.
* ``A``: gyromagnetic and damping terms in one Gauss-Seidel sweep, then
  projection. 5 heat solves, 3 stray updates.
* ``B``: as ``A`` but the heat-solve outputs ``g`` are carried over from the
  previous step, so only 3 heat solves per step remain. 3 stray updates.

Every heat solve inverts ``I - dt eps Lap_h`` (``I - alpha dt eps Lap_h`` for
the GSPM heat flow). All ``fhat`` evaluations inside a step use ``t^n``.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import kernels
from .errors import Diverged
from .field import FieldContext, local_field_array, total_energy
from .heat import heat_operator
from .mesh import VectorField, check_same_mesh


class SchemeKind(enum.Enum):
    GSPM = "gspm"
    A = "a"
    B = "b"

    @classmethod
    def parse(cls, value) -> "SchemeKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"gspm": cls.GSPM, "original": cls.GSPM, "gspm_original": cls.GSPM,
                   "a": cls.A, "scheme_a": cls.A, "schemea": cls.A,
                   "b": cls.B, "scheme_b": cls.B, "schemeb": cls.B}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown scheme {value!r}") from None

    @property
    def label(self) -> str:
        return {"gspm": "GSPM", "a": "Scheme A", "b": "Scheme B"}[self.value]


# (heat solves, stray-field updates) per step
EXPECTED_COUNTS = {SchemeKind.GSPM: (7, 4), SchemeKind.A: (5, 3), SchemeKind.B: (3, 3)}


@dataclass
class SolveStats:
    """Instrumented per-step and cumulative work counters.

    A "linear solve" is one scalar inversion of a constant-coefficient heat
    operator; an "FFT execution" is one stray-field refresh point of the
    scheme, counted whether or not the stray term is switched on.
    """

    linear_solves_per_step: int = 0
    fft_executions_per_step: int = 0
    total_solves: int = 0
    total_ffts: int = 0
    steps: int = 0
    wall_seconds: float = 0.0
    per_step_seen: set = field(default_factory=set)
    _solves: int = 0
    _ffts: int = 0

    def add_solves(self, n: int):
        self._solves += n

    def add_fft(self, n: int):
        self._ffts += n

    def begin_step(self):
        self._solves = 0
        self._ffts = 0

    def end_step(self, seconds: float):
        self.linear_solves_per_step = self._solves
        self.fft_executions_per_step = self._ffts
        self.per_step_seen.add((self._solves, self._ffts))
        self.total_solves += self._solves
        self.total_ffts += self._ffts
        self.steps += 1
        self.wall_seconds += seconds

    @property
    def constant_per_step(self) -> bool:
        return len(self.per_step_seen) <= 1

    def to_dict(self) -> dict:
        return {"steps": self.steps,
                "linear_solves_per_step": self.linear_solves_per_step,
                "fft_executions_per_step": self.fft_executions_per_step,
                "distinct_per_step_counts": sorted(list(map(list, self.per_step_seen))),
                "total_linear_solves": self.total_solves,
                "total_fft_executions": self.total_ffts,
                "wall_seconds": self.wall_seconds,
                "seconds_per_step": self.wall_seconds / self.steps if self.steps else 0.0}


def _as_unit_array(m, mesh) -> np.ndarray:
    arr = np.array(m.data if isinstance(m, VectorField) else m, dtype=float)
    if arr.shape != (3,) + mesh.shape:
        raise ValueError(f"initial field shape {arr.shape} does not match mesh")
    dev = np.max(np.abs(np.sqrt(np.sum(arr * arr, axis=0)) - 1.0))
    if not dev <= 1e-10:
        raise ValueError(f"initial magnetization is not unit length (max deviation {dev:.3e})")
    return arr


class Stepper:
    """State of one simulation: scheme, step size, context, ``m^n`` and counters.

    ``m`` is a raw ``(3, nz, ny, nx)`` array owned by the stepper. Scheme B
    additionally carries ``g`` (heat-solve outputs of the latest sweep) and
    ``mstar`` (the unprojected field of the latest sweep).
    """

    def __init__(self, kind, ctx: FieldContext, m0, dt: float, t0: float = 0.0):
        self.kind = SchemeKind.parse(kind)
        if not dt > 0:
            raise ValueError("dt must be positive")
        if isinstance(m0, VectorField):
            check_same_mesh(ctx.mesh, m0)
        self.ctx = ctx
        self.mesh = ctx.mesh
        self.dt = float(dt)
        self.t = float(t0)
        self.n = 0
        self.m = _as_unit_array(m0, self.mesh)
        self.stats = SolveStats()
        self.heat = heat_operator(self.mesh, self.dt * ctx.eps)
        self.heat_damping = None
        if self.kind is SchemeKind.GSPM:
            self.heat_damping = heat_operator(self.mesh, ctx.alpha * self.dt * ctx.eps)
        self.g = None
        self.mstar = None
        if self.kind is SchemeKind.B:
            self.reset_g()

    @property
    def field(self) -> VectorField:
        return VectorField(self.mesh, self.m, unit=True)

    def reset_g(self):
        """(Re)build ``g^0`` from the current ``m``; a one-time cost, not counted."""
        f = local_field_array(self.ctx, self.m, self.t)
        self.g = self.heat.solve(self.m + self.dt * f)

    def set_context(self, ctx: FieldContext):
        """Swap the field context (e.g. a new applied field); keeps ``dt``."""
        check_same_mesh(ctx.mesh, self.mesh)
        rebuild = ctx.eps != self.ctx.eps or ctx.alpha != self.ctx.alpha
        self.ctx = ctx
        if rebuild:
            self.heat = heat_operator(self.mesh, self.dt * ctx.eps)
            if self.kind is SchemeKind.GSPM:
                self.heat_damping = heat_operator(self.mesh, ctx.alpha * self.dt * ctx.eps)
        if self.kind is SchemeKind.B:
            self.reset_g()

    def _fhat(self, m1, m2, m3):
        return local_field_array(self.ctx, np.stack((m1, m2, m3)), self.t, self.stats)

    def _row(self, i, a1, a2, a3, b1, b2, b3, alpha, norm_weight):
        # an additive source enters each starred component before any later
        # row or heat solve reads it (keeps Scheme B's carried g consistent)
        out = kernels.gs_row(i, a1, a2, a3, b1, b2, b3, alpha, norm_weight)
        if self.ctx.sourced:
            out = out + self.dt * self.ctx.source_at(self.t)[i]
        return out

    def _solve(self, rhs):
        self.stats.add_solves(1)
        return self.heat.solve(rhs)

    def step(self) -> "Stepper":
        t0 = time.perf_counter()
        self.stats.begin_step()
        if self.kind is SchemeKind.GSPM:
            new = self._step_gspm()
        elif self.kind is SchemeKind.A:
            new = self._step_a()
        else:
            new = self._step_b()
        self.m = new
        self.t += self.dt
        self.n += 1
        self.stats.end_step(time.perf_counter() - t0)
        return self

    def _step_gspm(self):
        dt, alpha = self.dt, self.ctx.alpha
        gs = self._row
        m1, m2, m3 = self.m
        f = self._fhat(m1, m2, m3)
        g2 = self._solve(m2 + dt * f[1])
        g3 = self._solve(m3 + dt * f[2])
        m1s = gs(0, m1, m2, m3, g2, g2, g3, 0.0, False)
        f = self._fhat(m1s, m2, m3)
        g1s = self._solve(m1s + dt * f[0])
        m2s = gs(1, m1s, m2, m3, g1s, g2, g3, 0.0, False)
        f = self._fhat(m1s, m2s, m3)
        g2s = self._solve(m2s + dt * f[1])
        m3s = gs(2, m1s, m2s, m3, g1s, g2s, g3, 0.0, False)
        mstar = np.stack((m1s, m2s, m3s))
        # heat flow for the damping term, fhat refreshed from m*
        f = local_field_array(self.ctx, mstar, self.t, self.stats)
        self.stats.add_solves(3)
        mss = self.heat_damping.solve_components(mstar + alpha * dt * f)
        return kernels.normalize(mss)

    def _step_a(self):
        dt, alpha = self.dt, self.ctx.alpha
        gs = self._row
        m1, m2, m3 = self.m
        f = local_field_array(self.ctx, self.m, self.t, self.stats)
        self.stats.add_solves(3)
        g1, g2, g3 = self.heat.solve_components(self.m + dt * f)
        m1s = gs(0, m1, m2, m3, g1, g2, g3, alpha, False)
        f = self._fhat(m1s, m2, m3)
        g1s = self._solve(m1s + dt * f[0])
        m2s = gs(1, m1s, m2, m3, g1s, g2, g3, alpha, False)
        f = self._fhat(m1s, m2s, m3)
        g2s = self._solve(m2s + dt * f[1])
        m3s = gs(2, m1s, m2s, m3, g1s, g2s, g3, alpha, False)
        return kernels.normalize(np.stack((m1s, m2s, m3s)))

    def _step_b(self):
        dt, alpha = self.dt, self.ctx.alpha
        gs = self._row
        m1, m2, m3 = self.m
        g1, g2, g3 = self.g
        m1s = gs(0, m1, m2, m3, g1, g2, g3, alpha, True)
        f = self._fhat(m1s, m2, m3)
        g1n = self._solve(m1s + dt * f[0])
        m2s = gs(1, m1s, m2, m3, g1n, g2, g3, alpha, True)
        f = self._fhat(m1s, m2s, m3)
        g2n = self._solve(m2s + dt * f[1])
        m3s = gs(2, m1s, m2s, m3, g1n, g2n, g3, alpha, True)
        mstar = np.stack((m1s, m2s, m3s))
        f = local_field_array(self.ctx, mstar, self.t, self.stats)
        g3n = self._solve(m3s + dt * f[2])
        self.g = np.stack((g1n, g2n, g3n))
        self.mstar = mstar
        return kernels.normalize(mstar)


def step_gspm(state: Stepper) -> Stepper:
    assert state.kind is SchemeKind.GSPM
    return state.step()


def step_scheme_a(state: Stepper) -> Stepper:
    assert state.kind is SchemeKind.A
    return state.step()


def step_scheme_b(state: Stepper) -> Stepper:
    assert state.kind is SchemeKind.B
    return state.step()


# ---------------------------------------------------------------------------
# driving loop and observers

@dataclass
class RunReport:
    scheme: str
    steps: int
    dt: float
    t_final: float
    stats: dict
    records: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "steps": self.steps, "dt": self.dt,
                "t_final": self.t_final, "stats": self.stats, "records": self.records}


class EnergyRecorder:
    """Records ``(step, t, energy)`` using the stepper's current context."""

    name = "energy"

    def __init__(self):
        self.steps: list[int] = []
        self.times: list[float] = []
        self.values: list[float] = []

    def __call__(self, st: Stepper):
        self.steps.append(st.n)
        self.times.append(st.t)
        self.values.append(total_energy(st.ctx, st.field))

    def max_increase(self) -> float:
        if len(self.values) < 2:
            return 0.0
        return float(np.max(np.diff(self.values)))

    def result(self):
        return {"step": self.steps, "t": self.times, "energy": self.values}


class NormChecker:
    """Tracks ``max | |m| - 1 |`` over all observed states."""

    name = "norm"

    def __init__(self):
        self.worst = 0.0

    def __call__(self, st: Stepper):
        dev = float(np.max(np.abs(np.sqrt(np.sum(st.m * st.m, axis=0)) - 1.0)))
        self.worst = max(self.worst, dev)

    def result(self):
        return {"max_norm_deviation": self.worst}


class CountChecker:
    """Collects every per-step (solves, ffts) pair seen."""

    name = "counts"

    def __init__(self):
        self.seen = set()

    def __call__(self, st: Stepper):
        self.seen |= st.stats.per_step_seen

    def result(self):
        return {"per_step_counts": sorted(map(list, self.seen))}


class SnapshotWriter:
    """Calls ``write(path, field)`` with ``pattern.format(step=n)``."""

    name = "snapshots"

    def __init__(self, pattern: str, write: Callable):
        self.pattern = pattern
        self.write = write
        self.paths: list[str] = []

    def __call__(self, st: Stepper):
        path = self.pattern.format(step=st.n)
        self.write(path, st.field)
        self.paths.append(path)

    def result(self):
        return {"paths": self.paths}


def run(state: Stepper, n_steps: int, observers: Iterable = (), stride: int = 1,
        label: Optional[str] = None) -> tuple[Stepper, RunReport]:
    """Advance ``n_steps`` steps, calling observers every ``stride`` steps.

    Observers are also called on the initial and final states. Raises
    :class:`Diverged` as soon as a non-finite value appears.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    observers = list(observers)
    stride = max(1, int(stride))
    for obs in observers:
        obs(state)
    for k in range(1, n_steps + 1):
        state.step()
        if not np.isfinite(state.m).all():
            raise Diverged(state.n, label)
        if observers and (k % stride == 0 or k == n_steps):
            for obs in observers:
                obs(state)
    report = RunReport(state.kind.value, n_steps, state.dt, state.t, state.stats.to_dict())
    for obs in observers:
        report.records[getattr(obs, "name", type(obs).__name__)] = obs.result()
    return state, report


def steps_for(T: float, dt: float) -> int:
    """Number of steps of size ``dt`` that reach ``T`` (must divide evenly)."""
    n = T / dt
    k = int(round(n))
    if not math.isclose(n, k, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError(f"T={T} is not an integer multiple of dt={dt}")
    return k
