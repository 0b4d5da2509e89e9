"""Zero-field relaxation of a film from a three-domain initial state."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import Diverged
from ..field import FieldContext, total_energy
from ..io import write_angle_map_csv, write_snapshot_csv, write_vector_slice_csv
from ..mesh import MaterialParams, Mesh, VectorField, in_plane_angle_map
from ..schemes import SchemeKind, Stepper
from .hysteresis import film_setup


def three_domain_state(mesh: Mesh) -> VectorField:
    """``(0, 1, 0)`` where ``x`` is in the outer fifths of the film, ``(1, 0, 0)`` between."""
    x, _, _ = mesh.cell_centers()
    lx = mesh.lengths[0]
    rel = x - mesh.origin[0]
    outer = (rel <= lx / 5) | (rel >= 4 * lx / 5)
    data = np.zeros((3,) + mesh.shape)
    data[1] = np.where(outer, 1.0, 0.0)
    data[0] = np.where(outer, 0.0, 1.0)
    return VectorField(mesh, data, unit=True)


@dataclass
class ProfileResult:
    scheme: str
    alpha: float
    steps: int
    t_seconds: float
    initial: VectorField
    final: VectorField
    angle: np.ndarray
    degenerate: np.ndarray
    max_norm_deviation: float
    energy_initial: float
    energy_max: float
    energy_final: float
    max_energy_rise: float
    rate_reference: float
    rate_final: float
    reference_seconds: float
    stats: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)

    @property
    def energy_bounded(self) -> bool:
        return self.energy_max <= self.energy_initial + 1e-8

    def summary(self) -> dict:
        keys = ("scheme", "alpha", "steps", "t_seconds", "max_norm_deviation", "energy_initial",
                "energy_max", "energy_final", "max_energy_rise", "rate_reference", "rate_final",
                "reference_seconds")
        out = {k: getattr(self, k) for k in keys}
        out["stats"] = self.stats
        out["files"] = self.files
        return out


def profile_relaxation(scheme, alpha: float, *, counts=(64, 64, 1), final_seconds: float = 1e-9,
                       dt_seconds: float = 1e-12, material: Optional[MaterialParams] = None,
                       reference_seconds: float = 1e-9, outdir=None,
                       ctx: Optional[FieldContext] = None) -> ProfileResult:
    """Relax without applied field to ``final_seconds`` and emit slice snapshots.

    The per-cell rate ``max |m^{n+1} - m^n| / dt`` is recorded at
    ``reference_seconds`` (or the last step, if earlier) and at the end.
    """
    kind = SchemeKind.parse(scheme)
    if ctx is None:
        mesh, mat = film_setup(counts, material=material, alpha=alpha)
        ctx = FieldContext.from_material(mesh, mat, stray=True)
    mat = ctx.material
    dt = mat.to_dimensionless_time(dt_seconds)
    n_steps = int(round(final_seconds / dt_seconds))
    ref_step = min(n_steps, max(1, int(round(reference_seconds / dt_seconds))))
    m0 = three_domain_state(ctx.mesh)
    st = Stepper(kind, ctx, m0, dt)
    e0 = total_energy(ctx, m0)
    emax, prev, rise, worst_norm = e0, e0, -np.inf, 0.0
    rate_ref = rate = float("nan")
    label = f"profile {kind.label} alpha={alpha:g}"
    for _ in range(n_steps):
        before = st.m
        st.step()
        if not np.isfinite(st.m).all():
            raise Diverged(st.n, label)
        rate = float(np.max(np.sqrt(np.sum((st.m - before) ** 2, axis=0)))) / dt
        if st.n == ref_step:
            rate_ref = rate
        worst_norm = max(worst_norm, float(np.max(np.abs(np.sqrt(np.sum(st.m * st.m, axis=0)) - 1.0))))
        e = total_energy(ctx, st.field)
        emax = max(emax, e)
        rise = max(rise, e - prev)
        prev = e
    final = st.field
    ang, deg = in_plane_angle_map(final)
    res = ProfileResult(kind.value, alpha, st.n, st.n * dt_seconds, m0, final, ang, deg,
                        worst_norm, e0, emax, prev, rise, rate_ref, rate,
                        ref_step * dt_seconds, stats=st.stats.to_dict())
    res.stats["per_step_counts"] = sorted(map(list, st.stats.per_step_seen))
    if outdir is not None:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        tag = f"{kind.value}_alpha{alpha:g}"
        files = {"initial": out / f"profile_{tag}_initial.csv",
                 "final": out / f"profile_{tag}_final.csv",
                 "angle": out / f"profile_{tag}_angle.csv",
                 "arrows": out / f"profile_{tag}_arrows.csv"}
        write_snapshot_csv(files["initial"], m0)
        write_snapshot_csv(files["final"], final)
        write_angle_map_csv(files["angle"], final)
        write_vector_slice_csv(files["arrows"], final)
        res.files = {k: str(v) for k, v in files.items()}
    return res
