import math

import pytest

from llgspm.config import load_config, parse_config
from llgspm.errors import ParseError, ValidationError
from llgspm.mesh import MaterialParams

EXAMPLE = """\
# film run
run.scheme = Scheme-B
run.dt_physical = 1e-12
run.n_steps = 1000        # trailing comment
mesh.counts = 64, 64, 1
mesh.size = 1e-6, 1e-6, 2e-8
material.alpha = 0.02
field.stray = true
field.h_ext_mT = 10, 0, 0
"""


def test_example_parses_and_nondimensionalizes():
    cfg = parse_config(EXAMPLE)
    d = math.sqrt(2e-12 + 4e-16)
    assert cfg.material.L == pytest.approx(d)
    assert cfg.scheme == "b"
    assert cfg.dt == pytest.approx(1e-12 / cfg.material.time_unit)
    assert cfg.steps() == 1000
    assert cfg.spacing[0] == pytest.approx(1e-6 / d / 64)
    assert cfg.alpha == 0.02
    assert cfg.eps == pytest.approx(cfg.material.eps)
    assert cfg.stray and cfg.external and cfg.anisotropy
    assert cfg.h_ext[0] == pytest.approx(0.01 / (cfg.material.mu0 * cfg.material.Ms))
    ctx = cfg.context()
    assert ctx.mesh.counts == (64, 64, 1) and ctx.demag is not None


def test_dt_physical_with_defaults():
    cfg = parse_config("run.dt_physical = 1e-12\nrun.T = 1\n")
    assert cfg.dt == pytest.approx(1e-12 / MaterialParams().time_unit)


def test_dimensionless_overrides():
    cfg = parse_config("dimensionless.Q = 0\ndimensionless.eps = 1\nrun.dt_dimensionless = 0.5\n"
                       "run.T = 2\nmesh.counts = 4, 1, 1\n")
    assert (cfg.Q, cfg.eps, cfg.dt, cfg.steps()) == (0.0, 1.0, 0.5, 4)
    assert not cfg.anisotropy
    assert cfg.spacing == (0.25, 1.0, 1.0)


@pytest.mark.parametrize("text", ["run.T = 1\nrun.n_steps = 3\n",
                                  "run.dt_physical = 1e-12\nrun.dt_dimensionless = 0.1\n",
                                  "run.T_physical = 1e-9\nrun.T = 1\n"])
def test_exclusive_keys(text):
    with pytest.raises(ValidationError):
        parse_config(text)


def test_timing_required_when_asked():
    cfg = parse_config("run.dt_dimensionless = 0.1\n")
    with pytest.raises(ValidationError):
        cfg.steps()
    with pytest.raises(ValidationError):
        parse_config("run.T = 1\n").require_timing()
    with pytest.raises(ValidationError):
        parse_config("run.T = 1\nrun.dt_dimensionless = 0.3\n").steps()


@pytest.mark.parametrize("text,line,word", [
    ("foo = 1\n", 1, "foo"),
    ("run.scheme = a\nrun.foo = 1\n", 2, "foo"),
    ("\n# c\nbogus.key = 1\n", 3, "bogus"),
    ("run.n_steps = many\n", 1, "n_steps"),
    ("run.n_steps = 0\n", 1, "n_steps"),
    ("mesh.counts = 1, 2\n", 1, "mesh.counts"),
    ("run.scheme = c\n", 1, "run.scheme"),
    ("field.stray = maybe\n", 1, "field.stray"),
    ("run.T = nan\n", 1, "run.T"),
    ("run.T = 1\nrun.T = 2\n", 2, "run.T"),
    ("run.T\n", 1, "section.key"),
    ("run.T =\n", 1, "run.T"),
])
def test_parse_errors(text, line, word):
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    assert exc.value.line == line
    assert word in str(exc.value)


@pytest.mark.parametrize("text", ["run.dt_dimensionless = -1\n", "material.Ms = -5\n",
                                  "dimensionless.eps = 0\n", "mesh.size = 1, 1, 1\n"])
def test_validation_errors(text):
    with pytest.raises(ValidationError):
        parse_config(text)


def test_load_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text(EXAMPLE, encoding="utf-8")
    assert load_config(p).steps() == 1000
