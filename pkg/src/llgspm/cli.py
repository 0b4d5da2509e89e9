"""Command-line front end: ``llgspm <subcommand> [options]``.

Exit status is 0 on success, 1 when a run diverges (or, with ``--strict``,
when a relaxation fails to converge) and 2 for usage or configuration
errors. Every error message starts with ``error:``.

Outputs go to ``--out`` if given, else ``$LLGSPM_OUTPUT_DIR``, else the
config's ``run.output_dir``, else ``./llgspm-out``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, build_config, load_config
from .errors import Diverged, NotConverged, ParseError, ValidationError, ZeroVector
from .field import FieldContext
from .io import dump_snapshot_csv, read_snapshot, write_report, write_snapshot
from .schemes import SchemeKind, Stepper

DEFAULT_OUT = "llgspm-out"
SCHEME_CHOICES = ("gspm", "a", "b")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _schemes(value: str) -> list:
    if value == "all":
        return [SchemeKind.parse(s) for s in SCHEME_CHOICES]
    return [SchemeKind.parse(value)]


def _outdir(args, cfg: RunConfig | None = None) -> Path:
    if args.out:
        p = Path(args.out)
    elif os.environ.get("LLGSPM_OUTPUT_DIR"):
        p = Path(os.environ["LLGSPM_OUTPUT_DIR"])
    elif cfg is not None and cfg.output_dir:
        p = Path(cfg.output_dir)
    else:
        p = Path(DEFAULT_OUT)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _config(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return build_config({})


def _echo(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


# ---------------------------------------------------------------------------
# subcommands

def cmd_converge(args) -> int:
    from .experiments.convergence import convergence_study, standard_study, write_convergence_csv

    out = _outdir(args)
    varies = ["time", "space"] if args.vary == "both" else [args.vary]
    tables = []
    for vary in varies:
        study = standard_study(args.case, vary)
        grid = study.pop("grid")
        for kind in _schemes(args.scheme):
            t = convergence_study(args.case, kind, vary, grid, mode=args.forcing, **study)
            tables.append(t)
            print(f"{t.case} {t.scheme} {vary}: slope {t.slope:.4f} "
                  f"max norm deviation {t.max_norm_deviation:.3e}")
    write_convergence_csv(out / "convergence.csv", tables)
    write_report(out / "report.json", {
        "command": "converge", "config": _echo(args),
        "tables": [{"case": t.case, "scheme": t.scheme, "vary": t.vary, "slope": t.slope,
                    "max_norm_deviation": t.max_norm_deviation, "counts_ok": t.counts_ok,
                    "stepsizes": t.stepsizes, "errors": t.errors} for t in tables]})
    return 0


def cmd_ratios(args) -> int:
    from .experiments.convergence import efficiency_ratios, standard_study

    out = _outdir(args)
    study = standard_study(args.case, args.vary)
    grid = study.pop("grid")
    table = efficiency_ratios(args.case, args.vary, grid, repeats=args.repeats, **study)
    table.to_csv(out / "ratios.csv")
    means = {"a": table.mean_ratio("a"), "b": table.mean_ratio("b")}
    ideal = {"a": table.ideal_a, "b": table.ideal_b}
    for k in ("a", "b"):
        print(f"ratio {k}: mean {means[k]:.3f} (solve-count estimate {ideal[k]:.3f})")
        if abs(means[k] - ideal[k]) > 0.15:
            print(f"warning: ratio {k} is more than 0.15 from the solve-count estimate",
                  file=sys.stderr)
    write_report(out / "report.json", {"command": "ratios", "config": _echo(args),
                                       "mean_ratio": means, "solve_count_estimate": ideal})
    return 0


def cmd_stability(args) -> int:
    from .experiments.stability import default_sweep_grid, stability_sweep

    out = _outdir(args)
    mesh, alphas, dts = default_sweep_grid(args.nx)
    if args.alphas:
        alphas = args.alphas
    sweep = stability_sweep(_schemes(args.scheme), alphas, dts, mesh, n_steps=args.steps,
                            seed=args.seed)
    sweep.to_csv(out / "stability.csv")
    for e in sweep.entries:
        print(f"{e.scheme} alpha={e.alpha:g} dt={e.dt:g}: "
              f"{'stable' if e.stable else 'NOT stable'} (max energy {e.energy_max:.6g}, "
              f"initial {e.energy_initial:.6g})")
    write_report(out / "report.json",
                 {"command": "stability", "config": _echo(args), "all_stable": sweep.all_stable,
                  "entries": [dict(vars(e), bounded=e.bounded) for e in sweep.entries]})
    return 0


def _film(args, cfg: RunConfig):
    from .experiments.hysteresis import FILM_SIZE, film_setup

    if cfg.has("material", "L"):
        raise ValidationError("the film scale L is its diameter; material.L is not accepted here")
    size = cfg.get("mesh", "size", FILM_SIZE)
    counts = tuple(args.counts) if args.counts else cfg.get("mesh", "counts", (64, 64, 1))
    alpha = args.alpha if args.alpha is not None else cfg.alpha
    mesh, mat = film_setup(counts, size, material=cfg.material, alpha=alpha)
    ctx = FieldContext.from_material(mesh, mat, stray=cfg.get("field", "stray", True),
                                     anisotropy=cfg.get("field", "anisotropy", mat.Ku > 0))
    return ctx


def cmd_hysteresis(args) -> int:
    from .experiments.hysteresis import HysteresisProtocol, hysteresis_loop

    cfg = _config(args)
    out = _outdir(args, cfg)
    ctx = _film(args, cfg)
    scheme = args.scheme or cfg.scheme or "b"
    protocol = HysteresisProtocol(
        H0_mT=args.H0 if args.H0 is not None else cfg.get("hysteresis", "H0_mT", 50.0),
        dH_mT=args.dH if args.dH is not None else cfg.get("hysteresis", "dH_mT"),
        threshold=args.threshold if args.threshold is not None
        else cfg.get("hysteresis", "threshold", 1e-7),
        max_steps=args.max_steps if args.max_steps is not None
        else cfg.get("hysteresis", "max_steps", 20_000),
        scheme=scheme, alpha=ctx.alpha)

    def progress(p):
        if args.verbose:
            print(f"{p.branch} H={p.H_mT:+.3f} mT  <m>={p.m_avg[0]:+.5f}  steps={p.steps}"
                  f"{'' if p.converged else '  (step cap)'}", flush=True)

    table = hysteresis_loop(protocol, ctx, progress=progress)
    table.to_csv(out / "loop.csv")
    down, up = table.switch_field("down"), table.switch_field("up")
    print(f"switch fields: descending {down:g} mT, ascending {up:g} mT; area {table.area:.4g} mT")
    write_report(out / "report.json", {
        "command": "hysteresis", "config": _echo(args), "protocol": vars(protocol),
        "switch_field_down_mT": down, "switch_field_up_mT": up, "area_mT": table.area,
        "all_converged": table.all_converged, "max_energy_rise": table.max_energy_rise,
        "stats": table.stats})
    if args.strict and not table.all_converged:
        bad = [p.H_mT for p in table.points if not p.converged]
        raise NotConverged(f"{len(bad)} field values hit the step cap (first at {bad[0]:g} mT)")
    return 0


def cmd_profile(args) -> int:
    from .experiments.profile import profile_relaxation

    cfg = _config(args)
    out = _outdir(args, cfg)
    ctx = _film(args, cfg)
    scheme = args.scheme or cfg.scheme or "b"
    res = profile_relaxation(scheme, ctx.alpha, final_seconds=args.final_ns * 1e-9,
                             dt_seconds=args.dt_ps * 1e-12, reference_seconds=1e-9,
                             outdir=out, ctx=ctx)
    print(f"{res.scheme} alpha={res.alpha:g}: {res.steps} steps, max norm deviation "
          f"{res.max_norm_deviation:.3e}, energy {res.energy_initial:.6g} -> {res.energy_final:.6g}")
    write_report(out / "report.json", {"command": "profile", "config": _echo(args),
                                       "result": res.summary()})
    return 0


def cmd_step_debug(args) -> int:
    cfg = _config(args)
    m0 = read_snapshot(args.input)
    if args.dt is not None:
        dt = args.dt
    elif cfg.dt is not None:
        dt = cfg.dt
    else:
        raise ValidationError("a time step is required (--dt or run.dt_* in --config)")
    if args.config:
        base = dict(Q=cfg.Q, eps=cfg.eps, alpha=cfg.alpha, h_ext=cfg.h_ext,
                    anisotropy=cfg.anisotropy, external=cfg.external, stray=cfg.stray,
                    material=cfg.material)
    else:
        # bare exchange-only equation
        base = dict(Q=0.0, eps=1.0, alpha=0.1)
    for key in ("Q", "eps", "alpha"):
        if getattr(args, key) is not None:
            base[key] = getattr(args, key)
    base["anisotropy"] = base.get("anisotropy", False) or base["Q"] > 0
    ctx = FieldContext(m0.mesh, **base)
    scheme = args.scheme or cfg.scheme
    if scheme is None:
        raise ValidationError("a scheme is required (--scheme or run.scheme)")
    st = Stepper(scheme, ctx, m0, dt)
    st.step()
    stats = st.stats.to_dict()
    print(json.dumps({"scheme": st.kind.value, "dt": dt, "stats": stats}, sort_keys=True,
                     default=lambda o: sorted(map(list, o)) if isinstance(o, set) else str(o)))
    if args.output:
        write_snapshot(args.output, st.field)
    else:
        dump_snapshot_csv(sys.stdout, st.field)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="llgspm", description="Projection-method LLG solvers and experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--out", help="output directory")
        sp.set_defaults(func=func)
        return sp

    c = add("converge", cmd_converge, "convergence study on a manufactured solution")
    c.add_argument("--case", choices=("1d", "3d"), default="1d")
    c.add_argument("--scheme", choices=SCHEME_CHOICES + ("all",), default="all")
    c.add_argument("--vary", choices=("time", "space", "both"), default="time")
    c.add_argument("--forcing", choices=("source", "field"), default="source",
                   help="how the manufactured forcing enters each step")

    r = add("ratios", cmd_ratios, "efficiency ratios of A and B against GSPM")
    r.add_argument("--case", choices=("1d", "3d"), default="1d")
    r.add_argument("--vary", choices=("time", "space"), default="time")
    r.add_argument("--repeats", type=int, default=1)

    s = add("stability", cmd_stability, "long unforced runs over damping and step size")
    s.add_argument("--scheme", choices=SCHEME_CHOICES + ("all",), default="all")
    s.add_argument("--nx", type=int, default=100)
    s.add_argument("--steps", type=int, default=10_000)
    s.add_argument("--alphas", type=float, nargs="+")
    s.add_argument("--seed", type=int, default=0)

    for name, func, help_ in (("hysteresis", cmd_hysteresis, "hysteresis loop of a thin film"),
                              ("profile", cmd_profile, "zero-field relaxation of a film")):
        h = add(name, func, help_)
        h.add_argument("--config", help="configuration file (section.key = value)")
        h.add_argument("--scheme", choices=SCHEME_CHOICES)
        h.add_argument("--counts", type=int, nargs=3, metavar=("NX", "NY", "NZ"))
        h.add_argument("--alpha", type=float)
    hyst = sub.choices["hysteresis"]
    hyst.add_argument("--H0", type=float, help="peak field mu0 H in mT")
    hyst.add_argument("--dH", type=float, help="field step in mT")
    hyst.add_argument("--threshold", type=float)
    hyst.add_argument("--max-steps", type=int)
    hyst.add_argument("--strict", action="store_true", help="exit 1 if a field value does not relax")
    hyst.add_argument("-v", "--verbose", action="store_true")
    prof = sub.choices["profile"]
    prof.add_argument("--final-ns", type=float, default=1.0)
    prof.add_argument("--dt-ps", type=float, default=1.0)

    d = sub.add_parser("step-debug", help="one step of a scheme on a snapshot; without --config "
                       "the equation is exchange-only with eps = 1, alpha = 0.1")
    d.set_defaults(func=cmd_step_debug)
    d.add_argument("--scheme", choices=SCHEME_CHOICES)
    d.add_argument("--input", required=True, help="snapshot (.csv or .bin)")
    d.add_argument("--config")
    d.add_argument("--dt", type=float, help="dimensionless time step")
    d.add_argument("--alpha", type=float)
    d.add_argument("--eps", type=float)
    d.add_argument("--Q", type=float)
    d.add_argument("--output", help="write the new snapshot here instead of stdout")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, ValidationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (Diverged, NotConverged, ZeroVector) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
