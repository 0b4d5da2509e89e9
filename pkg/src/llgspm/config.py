"""Line-oriented run configuration.

One ``section.key = value`` assignment per line; ``#`` starts a comment and
blank lines are ignored. Unknown sections or keys are errors. Example::

    # 1 ps steps on a 64 x 64 x 1 permalloy film
    run.scheme = b
    run.dt_physical = 1e-12
    run.n_steps = 1000
    mesh.counts = 64, 64, 1
    mesh.size = 1e-6, 1e-6, 2e-8
    material.alpha = 0.1
    field.stray = true
    field.h_ext_mT = 10, 0, 0

Physical inputs are SI (metres, seconds, A/m, J/m, J/m^3); ``h_ext_mT`` is
``mu0 H`` in millitesla. ``dimensionless.*`` entries override the groups
derived from the material.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, ValidationError
from .field import FieldContext
from .mesh import MaterialParams, Mesh
from .schemes import SchemeKind


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise ValueError(f"expected a positive integer, got {v}")
    return v


def _triple(cast):
    def parse(text: str):
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated values, got {text!r}")
        return tuple(cast(p) for p in parts)
    return parse


def _finite(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {text!r}")
    return v


def _scheme(text: str) -> str:
    return SchemeKind.parse(text).value


SCHEMA = {
    "run": {"scheme": _scheme, "T": _finite, "T_physical": _finite, "n_steps": _positive_int,
            "dt_physical": _finite, "dt_dimensionless": _finite, "output_dir": str,
            "snapshot_stride": _positive_int, "seed": int},
    "mesh": {"counts": _triple(_positive_int), "size": _triple(_finite),
             "spacing": _triple(_finite)},
    "material": {"Ms": _finite, "A_ex": _finite, "Ku": _finite, "gamma": _finite, "mu0": _finite,
                 "L": _finite, "alpha": _finite},
    "dimensionless": {"Q": _finite, "eps": _finite, "alpha": _finite},
    "field": {"anisotropy": _bool, "external": _bool, "stray": _bool,
              "h_ext_mT": _triple(_finite), "h_ext": _triple(_finite)},
    "hysteresis": {"H0_mT": _finite, "dH_mT": _finite, "threshold": _finite,
                   "max_steps": _positive_int},
}


@dataclass
class RunConfig:
    """Validated configuration; all stored quantities are dimensionless
    except the material, which keeps SI values."""

    values: dict = field(default_factory=dict)
    material: MaterialParams = field(default_factory=MaterialParams)
    scheme: Optional[str] = None
    counts: Optional[tuple] = None
    spacing: Optional[tuple] = None
    Q: float = 0.0
    eps: float = 1.0
    alpha: float = 0.1
    dt: Optional[float] = None
    T: Optional[float] = None
    n_steps: Optional[int] = None
    output_dir: Optional[str] = None
    snapshot_stride: int = 1
    seed: int = 0
    anisotropy: bool = False
    external: bool = False
    stray: bool = False
    h_ext: tuple = (0.0, 0.0, 0.0)

    def get(self, section: str, key: str, default=None):
        return self.values.get(f"{section}.{key}", default)

    def has(self, section: str, key: str) -> bool:
        return f"{section}.{key}" in self.values

    def mesh(self) -> Mesh:
        if self.counts is None:
            raise ValidationError("mesh.counts is required")
        return Mesh(*self.counts, *self.spacing)

    def context(self, mesh: Optional[Mesh] = None, **kw) -> FieldContext:
        mesh = mesh or self.mesh()
        return FieldContext(mesh, Q=self.Q, eps=self.eps, alpha=self.alpha, h_ext=self.h_ext,
                            anisotropy=self.anisotropy, external=self.external,
                            stray=self.stray, material=self.material, **kw)

    def steps(self) -> int:
        """Number of steps implied by ``T``/``n_steps`` and ``dt``."""
        self.require_timing()
        if self.n_steps is not None:
            return self.n_steps
        k = self.T / self.dt
        if not math.isclose(k, round(k), rel_tol=1e-9):
            raise ValidationError(f"T = {self.T:g} is not a multiple of dt = {self.dt:g}")
        return int(round(k))

    def require_timing(self):
        if self.dt is None:
            raise ValidationError("exactly one of run.dt_physical, run.dt_dimensionless is required")
        if self.T is None and self.n_steps is None:
            raise ValidationError("exactly one of run.T (or run.T_physical), run.n_steps is required")


def _exclusive(values: dict, keys: tuple, what: str):
    given = [k for k in keys if k in values]
    if len(given) > 1:
        raise ValidationError(f"{what}: at most one of {', '.join(keys)} may be given "
                              f"(got {', '.join(given)})")


def parse_config(text: str) -> RunConfig:
    """Parse and validate; syntax problems raise ``ParseError`` with the line number."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'section.key = value', got {line!r}", lineno)
        name, _, value = (part.strip() for part in line.partition("="))
        section, dot, key = name.partition(".")
        if not dot or not key:
            raise ParseError(f"key {name!r} is not of the form section.key", lineno)
        if section not in SCHEMA:
            raise ParseError(f"unknown section {section!r} in {name!r}", lineno)
        if key not in SCHEMA[section]:
            raise ParseError(f"unknown key {key!r} in section {section!r}", lineno)
        if name in values:
            raise ParseError(f"duplicate key {name!r}", lineno)
        if value == "":
            raise ParseError(f"missing value for {name!r}", lineno)
        try:
            values[name] = SCHEMA[section][key](value)
        except ValueError as exc:
            raise ParseError(f"bad value for {name!r}: {exc}", lineno) from None
    return build_config(values)


def build_config(values: dict) -> RunConfig:
    _exclusive(values, ("run.T", "run.T_physical", "run.n_steps"), "run length")
    _exclusive(values, ("run.dt_physical", "run.dt_dimensionless"), "time step")
    _exclusive(values, ("mesh.size", "mesh.spacing"), "mesh extent")
    _exclusive(values, ("field.h_ext_mT", "field.h_ext"), "applied field")

    counts = values.get("mesh.counts")
    length = values.get("material.L")
    if "mesh.size" in values and counts is None:
        raise ValidationError("mesh.size needs mesh.counts")
    if length is None and "mesh.size" in values:
        length = math.sqrt(sum(s * s for s in values["mesh.size"]))  # domain diameter
    mat_kw = {k: values[f"material.{k}"] for k in ("Ms", "A_ex", "Ku", "gamma", "mu0", "alpha")
              if f"material.{k}" in values}
    if length is not None:
        mat_kw["L"] = length
    try:
        material = MaterialParams(**mat_kw)
    except ValueError as exc:
        raise ValidationError(f"material: {exc}") from None

    cfg = RunConfig(values=dict(values), material=material)
    cfg.scheme = values.get("run.scheme")
    cfg.counts = counts
    if counts is not None:
        if "mesh.size" in values:
            cfg.spacing = tuple(material.to_dimensionless_length(s) / n
                                for s, n in zip(values["mesh.size"], counts))
        elif "mesh.spacing" in values:
            cfg.spacing = tuple(values["mesh.spacing"])
        else:
            cfg.spacing = tuple(1.0 / n for n in counts)
        if any(d <= 0 for d in cfg.spacing):
            raise ValidationError("mesh spacing must be positive")

    cfg.Q = values.get("dimensionless.Q", material.Q)
    cfg.eps = values.get("dimensionless.eps", material.eps)
    cfg.alpha = values.get("dimensionless.alpha", material.alpha)
    if cfg.Q < 0 or cfg.eps <= 0 or cfg.alpha < 0:
        raise ValidationError("need Q >= 0, eps > 0 and alpha >= 0")

    if "run.dt_physical" in values:
        cfg.dt = material.to_dimensionless_time(values["run.dt_physical"])
    elif "run.dt_dimensionless" in values:
        cfg.dt = values["run.dt_dimensionless"]
    if cfg.dt is not None and not cfg.dt > 0:
        raise ValidationError("the time step must be positive")
    if "run.T_physical" in values:
        cfg.T = material.to_dimensionless_time(values["run.T_physical"])
    else:
        cfg.T = values.get("run.T")
    if cfg.T is not None and not cfg.T > 0:
        raise ValidationError("the final time must be positive")
    cfg.n_steps = values.get("run.n_steps")

    cfg.output_dir = values.get("run.output_dir")
    cfg.snapshot_stride = values.get("run.snapshot_stride", 1)
    cfg.seed = values.get("run.seed", 0)
    cfg.anisotropy = values.get("field.anisotropy", cfg.Q > 0)
    cfg.stray = values.get("field.stray", False)
    if "field.h_ext_mT" in values:
        cfg.h_ext = tuple(material.field_from_tesla(v * 1e-3) for v in values["field.h_ext_mT"])
    elif "field.h_ext" in values:
        cfg.h_ext = tuple(values["field.h_ext"])
    cfg.external = values.get("field.external", any(v != 0.0 for v in cfg.h_ext))
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
