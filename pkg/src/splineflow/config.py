"""Flat key=value configuration files with dotted section names.

Lines are ``key = value``; blank lines and ``#`` comments are ignored.
Unknown keys, bad values, and inconsistent combinations raise
ConfigError carrying the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigurationError
from .evolve import EvolutionConfig, VelocityField
from .reaction_diffusion import RDParams
from .shapes import asterisk_points, circle_points, load_points


class ConfigError(ConfigurationError):
    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _to_bool(text, line):
    try:
        return _BOOL[text.strip().lower()]
    except KeyError:
        raise ConfigError(f"expected a boolean, got {text!r}", line) from None


def _to_int(text, line):
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", line) from None


def _to_float(text, line):
    try:
        return float(text.strip())
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", line) from None


def _to_int_list(text, line):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}", line) from None


def parse_config(path):
    """Raw mapping key -> (value text, line number)."""
    entries = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ConfigError("empty key", lineno)
            if key in entries:
                raise ConfigError(f"duplicate key {key!r}", lineno)
            entries[key] = (value, lineno)
    return entries


@dataclass
class Scenario:
    """Fully validated run description."""

    shape: str = "circle"
    radius: float = 1.0
    shape_path: str | None = None
    base: float = 1.0
    amplitude: float = 0.3
    lobes: int = 4
    n: int = 200
    seed: int = 0
    evolve: EvolutionConfig = field(default_factory=EvolutionConfig)
    pde_enabled: bool = False
    pde: RDParams | None = None
    export_every: int = 10
    figures: bool = True
    converge_n_list: list = field(default_factory=lambda: [30, 60, 120, 240])
    converge_dt: float = 1e-3
    converge_t_end: float = 0.18
    converge_degree: int | None = None
    study_sizes: list = field(default_factory=lambda: [5, 9, 20])
    study_degrees: list = field(default_factory=lambda: [2, 3, 4, 5, 6, 7, 8])

    def initial_cloud(self):
        if self.shape == "circle":
            return circle_points(self.radius, self.n)
        if self.shape == "asterisk":
            return asterisk_points(self.n, self.base, self.amplitude, self.lobes)
        return load_points(self.shape_path)


_HANDLED = object()


def load_scenario(path):
    """Parse and validate a scenario file."""
    entries = parse_config(path)
    sc = Scenario()
    velocity_kw = {}
    evolve_kw = {}
    pde_kw = {}

    def pop(key):
        return entries.pop(key, None)

    item = pop("shape")
    if item:
        value, line = item
        if value not in ("circle", "asterisk", "file"):
            raise ConfigError(f"unknown shape {value!r}", line)
        sc.shape = value
    for key, attr, conv in (
        ("shape.radius", "radius", _to_float),
        ("shape.base", "base", _to_float),
        ("shape.amplitude", "amplitude", _to_float),
        ("shape.lobes", "lobes", _to_int),
        ("n", "n", _to_int),
        ("seed", "seed", _to_int),
        ("output.export_every", "export_every", _to_int),
        ("output.figures", "figures", _to_bool),
        ("converge.dt", "converge_dt", _to_float),
        ("converge.t_end", "converge_t_end", _to_float),
        ("converge.degree", "converge_degree", _to_int),
        ("converge.n_list", "converge_n_list", _to_int_list),
        ("study.stencil_sizes", "study_sizes", _to_int_list),
        ("study.degrees", "study_degrees", _to_int_list),
    ):
        item = pop(key)
        if item:
            setattr(sc, attr, conv(item[0], item[1]))
    item = pop("shape.path")
    if item:
        sc.shape_path = item[0]
    if sc.shape == "file" and not sc.shape_path:
        raise ConfigError("shape = file requires shape.path")
    if sc.shape != "file" and sc.n < 8:
        raise ConfigError("n must be at least 8")

    for key, kwname, conv in (
        ("evolve.dt", "dt", _to_float),
        ("evolve.t_end", "t_end", _to_float),
        ("evolve.core_size", "core_size", _to_int),
        ("evolve.boundary_size", "boundary_size", _to_int),
        ("evolve.degree", "degree", _to_int),
        ("evolve.tau", "tau", _to_float),
        ("evolve.eps_tol", "eps_tol", _to_float),
        ("evolve.alpha", "alpha", _to_float),
        ("evolve.max_opt_iters", "max_opt_iters", _to_int),
        ("evolve.max_refinement", "max_refinement", _to_int),
        ("resample.d_tol_min", "d_tol_min", _to_float),
        ("resample.d_tol_max", "d_tol_max", _to_float),
        ("resample.eps_d", "eps_d", _to_float),
        ("resample.enabled", "resample", _to_bool),
    ):
        item = pop(key)
        if item:
            evolve_kw[kwname] = conv(item[0], item[1])

    for key, kwname, conv in (
        ("velocity.kind", "kind", str),
        ("velocity.c1", "c1", _to_float),
        ("velocity.c2", "c2", _to_float),
        ("velocity.sign", "sign", _to_float),
        ("velocity.vx", "vx", _to_float),
        ("velocity.vy", "vy", _to_float),
    ):
        item = pop(key)
        if item:
            if conv is str:
                velocity_kw[kwname] = item[0]
            else:
                velocity_kw[kwname] = conv(item[0], item[1])

    for key, kwname, conv in (
        ("pde.enabled", "enabled", _to_bool),
        ("pde.D_u", "diff_u", _to_float),
        ("pde.D_v", "diff_v", _to_float),
        ("pde.gamma", "gamma", _to_float),
        ("pde.c", "rate_c", _to_float),
        ("pde.d", "rate_d", _to_float),
        ("pde.sigma", "sigma", _to_float),
        ("pde.theta0", "theta0", _to_float),
        ("pde.c1", "coupling_c1", _to_float),
        ("pde.c2", "coupling_c2", _to_float),
    ):
        item = pop(key)
        if item:
            pde_kw[kwname] = conv(item[0], item[1])

    if entries:
        key, (_, line) = next(iter(entries.items()))
        raise ConfigError(f"unknown key {key!r}", line)

    vx = velocity_kw.pop("vx", 0.0)
    vy = velocity_kw.pop("vy", 0.0)
    if vx or vy:
        velocity_kw["vector"] = (vx, vy)
    sc.pde_enabled = bool(pde_kw.pop("enabled", False))
    try:
        if pde_kw or sc.pde_enabled:
            sc.pde = RDParams(**pde_kw)
            sc.pde_enabled = True
        if velocity_kw:
            kind = velocity_kw.pop("kind", "curvature_flow")
            if kind == "coupled_rd" and sc.pde is not None:
                velocity_kw.setdefault("c1", sc.pde.coupling_c1)
                velocity_kw.setdefault("c2", sc.pde.coupling_c2)
            evolve_kw["velocity"] = VelocityField(kind=kind, **velocity_kw)
        sc.evolve = EvolutionConfig(**evolve_kw)
    except (ConfigurationError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    if sc.evolve.velocity.kind == "coupled_rd" and not sc.pde_enabled:
        raise ConfigError("velocity.kind = coupled_rd requires pde.enabled = true")
    if sc.pde is not None:
        sc.evolve.pde = sc.pde
    return sc
