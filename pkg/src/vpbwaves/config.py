"""Run configuration: a sectioned ``key = value`` text format.

Grammar (also in the README):

* ``[section]`` headers; ``key = value`` lines; ``#`` or ``;`` start a
  full-line comment; blank lines are ignored; keys are case-insensitive.
* Numbers use Python float syntax; lists are comma separated; booleans are
  ``true``/``false``.
* Unknown sections or keys, duplicates and malformed lines are errors.

Sections and keys (defaults in brackets):

``[run]``          seed [0]
``[left]``         v, u, theta (required for riemann/ansatz/simulate)
``[right]``        v, u, theta; or instead
``[construct]``    v_minus_star, delta_contact, v_plus: build the right state
                   from ``left`` along the wave curves
``[transport]``    mu0 [1], kappa0 [1], kappa1_0 [1], exponent [0.5]
``[perturbation]`` epsilon [0.01], shape [bump], width [10], center [0],
                   components [phi, psi, zeta, n2]
``[solver]``       h [0.05], X [100], T [200], cfl [0.9], dt [auto],
                   output_every [1], boundary_check_nodes [10],
                   boundary_tol [1e-3], sponge_width [0], sponge_strength [2],
                   snapshot_times []
``[ansatz]``       times [0, 10, 100], half_width [50], points [2001],
                   fit_t_min [10], fit_t_max [1000], fit_points [25],
                   contact_half_width [12], contact_points [4001]
``[kinetic]``      hermite_order [24], conservation_grid [24],
                   conservation_pairs [5], refinement [16, 24, 32],
                   linear_grid [20], samples [100], inverse_samples [20],
                   rho [1], u [0], theta [1]
``[fit]``          input [diagnostics.csv], columns [linf_pert, linf_charge],
                   t_min [10], t_max [inf]
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .eos_riemann import EndStates, ThermoState, forward_end_state, theta_from_vs, entropy
from .errors import DomainError, ParseError, ValidationError
from .fluid_solver import PerturbationSpec, SolverConfig
from .transport import TransportModel

SCENARIOS = ("riemann", "ansatz", "simulate", "kinetic-check", "fit")


@dataclass(frozen=True)
class Construction:
    """Right state implied by walking the wave curves from the left state."""

    v_minus_star: float
    delta_contact: float
    v_plus: float


@dataclass(frozen=True)
class AnsatzOptions:
    times: tuple[float, ...] = (0.0, 10.0, 100.0)
    half_width: float = 50.0
    points: int = 2001
    fit_t_min: float = 10.0
    fit_t_max: float = 1000.0
    fit_points: int = 25
    contact_half_width: float = 12.0
    contact_points: int = 4001


@dataclass(frozen=True)
class KineticOptions:
    hermite_order: int = 24
    conservation_grid: int = 24
    conservation_pairs: int = 5
    refinement: tuple[int, ...] = (16, 24, 32)
    linear_grid: int = 20
    samples: int = 100
    inverse_samples: int = 20
    rho: float = 1.0
    u: float = 0.0
    theta: float = 1.0


@dataclass(frozen=True)
class FitOptions:
    input: str = "diagnostics.csv"
    columns: tuple[str, ...] = ("linf_pert", "linf_charge")
    t_min: float = 10.0
    t_max: float = math.inf


@dataclass(frozen=True)
class RunConfig:
    scenario: str | None = None
    seed: int = 0
    left: ThermoState | None = None
    right: ThermoState | None = None
    construction: Construction | None = None
    transport: TransportModel = TransportModel()
    perturbation: PerturbationSpec = PerturbationSpec()
    solver: SolverConfig = SolverConfig()
    ansatz: AnsatzOptions = AnsatzOptions()
    kinetic: KineticOptions = KineticOptions()
    fit: FitOptions = FitOptions()

    @property
    def ends(self) -> EndStates:
        if self.left is None or self.right is None:
            raise ValidationError("end states required: give [left] and [right] (or [construct])")
        return EndStates(self.left, self.right)

    def with_seed(self, seed: int) -> RunConfig:
        if seed < 0:
            raise ValidationError("seed must be nonnegative")
        return replace(self, seed=seed, perturbation=replace(self.perturbation, seed=seed))

    def with_scenario(self, scenario: str) -> RunConfig:
        if scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {scenario!r}")
        return replace(self, scenario=scenario)

    def to_dict(self) -> dict:
        """Effective configuration as plain JSON-ready data, by section."""
        return _sections(self)

    def to_text(self) -> str:
        return emit_config(self)


# --------------------------------------------------------------------------- schema

_FLOAT, _INT, _STR, _FLOATS, _INTS, _STRS, _OPT_FLOAT = range(7)

_SCHEMA: dict[str, dict[str, int]] = {
    "run": {"seed": _INT},
    "left": {"v": _FLOAT, "u": _FLOAT, "theta": _FLOAT},
    "right": {"v": _FLOAT, "u": _FLOAT, "theta": _FLOAT},
    "construct": {"v_minus_star": _FLOAT, "delta_contact": _FLOAT, "v_plus": _FLOAT},
    "transport": {"mu0": _FLOAT, "kappa0": _FLOAT, "kappa1_0": _FLOAT, "exponent": _FLOAT},
    "perturbation": {"epsilon": _FLOAT, "shape": _STR, "width": _FLOAT, "center": _FLOAT,
                     "components": _STRS},
    "solver": {"h": _FLOAT, "x": _FLOAT, "t": _FLOAT, "cfl": _FLOAT, "dt": _OPT_FLOAT,
               "output_every": _FLOAT, "boundary_check_nodes": _INT, "boundary_tol": _FLOAT,
               "sponge_width": _FLOAT, "sponge_strength": _FLOAT, "snapshot_times": _FLOATS},
    "ansatz": {f.name: (_FLOATS if f.name == "times" else _INT if f.type == "int" else _FLOAT)
               for f in fields(AnsatzOptions)},
    "kinetic": {f.name: (_INTS if f.name == "refinement" else _INT if f.type == "int" else _FLOAT)
                for f in fields(KineticOptions)},
    "fit": {"input": _STR, "columns": _STRS, "t_min": _FLOAT, "t_max": _FLOAT},
}
# solver keys whose dataclass field names are upper case
_SOLVER_NAMES = {"x": "X", "t": "T"}


def _convert(kind: int, raw: str, where: tuple[int, int], key: str):
    line, col = where
    try:
        if kind == _FLOAT:
            return float(raw)
        if kind == _OPT_FLOAT:
            return None if raw.lower() in ("", "auto", "none") else float(raw)
        if kind == _INT:
            if not re.fullmatch(r"[+-]?\d+", raw):
                raise ValueError
            return int(raw)
        if kind == _STR:
            return raw
        items = [s.strip() for s in raw.split(",")] if raw.strip() else []
        if kind == _FLOATS:
            return tuple(float(s) for s in items)
        if kind == _INTS:
            return tuple(int(s) for s in items)
        return tuple(items)
    except ValueError:
        raise ParseError(f"bad value {raw!r} for {key!r}", line, col) from None


def _locate(text: str) -> dict[tuple[str, str], tuple[int, int]]:
    """Line and value column of every ``key = value`` line, by section."""
    where, section = {}, None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip().lower()
            continue
        m = re.match(r"\s*([^=:#;\s][^=:]*?)\s*[=:]\s*", line)
        if m and section is not None:
            where[(section, m.group(1).lower())] = (n, m.end() + 1)
    return where


def parse_config_text(text: str, source: str = "<string>") -> RunConfig:
    """Parse and validate configuration text; see the module docstring."""
    cp = configparser.ConfigParser(interpolation=None, strict=True, empty_lines_in_values=False,
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=None,
                                   default_section="\x00unused")
    try:
        cp.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside any [section]", exc.lineno, 1) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ParseError(exc.message.split(": ", 1)[-1], exc.lineno or 0, 1) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else 0
        raise ParseError("expected 'key = value' or '[section]'", lineno, 1) from None
    where = _locate(text)
    values: dict[str, dict] = {}
    for section in cp.sections():
        name = section.strip().lower()
        if name not in _SCHEMA:
            line = next((n for n, ln in enumerate(text.splitlines(), 1)
                         if ln.strip().lower() == f"[{section.lower()}]"), 0)
            raise ParseError(f"unknown section [{section}]", line, 2)
        if name in values:
            raise ParseError(f"section [{name}] given twice", 0, 1)
        values[name] = {}
        for key, raw in cp.items(section):
            pos = where.get((name, key), (0, 1))
            if key not in _SCHEMA[name]:
                raise ParseError(f"unknown key {key!r} in [{name}]", pos[0], 1)
            values[name][key] = _convert(_SCHEMA[name][key], raw.strip(), pos, key)
    return build_config(values)


def parse_config(path) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"config file {str(p)!r} does not exist")
    return parse_config_text(p.read_text(), str(p))


def _state(sec: dict, name: str) -> ThermoState:
    missing = {"v", "theta"} - set(sec)
    if missing:
        raise ValidationError(f"[{name}] needs {', '.join(sorted(missing))}")
    if not sec["theta"] > 0:
        raise ValidationError(f"[{name}] theta must be positive")
    if not sec["v"] > 0:
        raise ValidationError(f"[{name}] v must be positive")
    return ThermoState(sec["v"], sec.get("u", 0.0), sec["theta"])


def construct_right(left: ThermoState, c: Construction) -> ThermoState:
    """Right state with ``theta_+* - theta_-* = delta_contact`` behind the contact."""
    th_m = float(theta_from_vs(c.v_minus_star, entropy(left.v, left.theta)))
    ratio = 1.0 + c.delta_contact / th_m
    try:
        right, _ = forward_end_state(left, c.v_minus_star, ratio, c.v_plus)
    except DomainError as exc:
        raise ValidationError(f"[construct] {exc}") from None
    return right


def build_config(values: dict[str, dict]) -> RunConfig:
    """Validated :class:`RunConfig` from already-typed section dictionaries."""
    def sec(name):
        return values.get(name, {})

    try:
        left = _state(sec("left"), "left") if "left" in values else None
        right = _state(sec("right"), "right") if "right" in values else None
        construction = None
        if "construct" in values:
            if right is not None:
                raise ValidationError("give either [right] or [construct], not both")
            if left is None:
                raise ValidationError("[construct] needs [left]")
            missing = {"v_minus_star", "delta_contact", "v_plus"} - set(sec("construct"))
            if missing:
                raise ValidationError(f"[construct] needs {', '.join(sorted(missing))}")
            construction = Construction(**sec("construct"))
            right = construct_right(left, construction)
        if (left is None) != (right is None):
            raise ValidationError("give both end states or neither")
        transport = TransportModel(**sec("transport"))
        seed = sec("run").get("seed", 0)
        if seed < 0:
            raise ValidationError("seed must be nonnegative")
        pert = PerturbationSpec(**sec("perturbation"), seed=seed)
        solver_kw = {_SOLVER_NAMES.get(k, k): v for k, v in sec("solver").items()}
        solver = SolverConfig(**solver_kw, transport=transport)
        ansatz = AnsatzOptions(**sec("ansatz"))
        kinetic = KineticOptions(**sec("kinetic"))
        fit = FitOptions(**sec("fit"))
    except TypeError as exc:  # pragma: no cover - schema and dataclasses agree
        raise ValidationError(str(exc)) from None
    _check_options(ansatz, kinetic, fit)
    return RunConfig(None, seed, left, right, construction, transport, pert, solver, ansatz,
                     kinetic, fit)


def _check_options(a: AnsatzOptions, k: KineticOptions, f: FitOptions) -> None:
    if any(t < 0 for t in a.times):
        raise ValidationError("ansatz times must be nonnegative")
    if not (a.half_width > 0 and a.points >= 5 and a.contact_points >= 101
            and a.contact_half_width > 0):
        raise ValidationError("ansatz grid settings must be positive (points >= 5)")
    if not (0 <= a.fit_t_min < a.fit_t_max and a.fit_points >= 10):
        raise ValidationError("ansatz fit window needs 0 <= fit_t_min < fit_t_max, fit_points >= 10")
    if k.hermite_order < 2 or k.conservation_grid < 4 or k.linear_grid < 4:
        raise ValidationError("kinetic grid sizes too small")
    if k.conservation_pairs < 1 or k.samples < 1 or k.inverse_samples < 1:
        raise ValidationError("kinetic sample counts must be positive")
    if not k.rho > 0:
        raise ValidationError("kinetic rho must be positive")
    if not k.theta > 0:
        raise ValidationError("kinetic theta must be positive")
    if not f.t_min < f.t_max:
        raise ValidationError("fit window needs t_min < t_max")
    if not f.columns:
        raise ValidationError("fit needs at least one column")


# --------------------------------------------------------------------------- emission

def _fmt(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def _sections(cfg: RunConfig) -> dict:
    out: dict[str, dict] = {"run": {"seed": cfg.seed}}
    if cfg.scenario is not None:
        out["run"]["scenario"] = cfg.scenario
    if cfg.left is not None:
        out["left"] = {"v": cfg.left.v, "u": cfg.left.u1, "theta": cfg.left.theta}
    if cfg.construction is not None:
        out["construct"] = asdict(cfg.construction)
    elif cfg.right is not None:
        out["right"] = {"v": cfg.right.v, "u": cfg.right.u1, "theta": cfg.right.theta}
    out["transport"] = asdict(cfg.transport)
    p = cfg.perturbation
    out["perturbation"] = {"epsilon": p.epsilon, "shape": p.shape, "width": p.width,
                           "center": p.center, "components": list(p.components)}
    s = cfg.solver
    out["solver"] = {"h": s.h, "X": s.X, "T": s.T, "cfl": s.cfl, "dt": s.dt,
                     "output_every": s.output_every, "boundary_check_nodes": s.boundary_check_nodes,
                     "boundary_tol": s.boundary_tol, "sponge_width": s.sponge_width,
                     "sponge_strength": s.sponge_strength, "snapshot_times": list(s.snapshot_times)}
    for name in ("ansatz", "kinetic", "fit"):
        d = asdict(getattr(cfg, name))
        out[name] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}
    return out


def emit_config(cfg: RunConfig) -> str:
    """Configuration text that :func:`parse_config_text` maps back to ``cfg``
    (the scenario is chosen on the command line and is not emitted)."""
    lines = []
    for name, sec in _sections(cfg).items():
        lines.append(f"[{name}]")
        for k, v in sec.items():
            if name == "run" and k == "scenario":
                continue
            lines.append(f"{k} = {_fmt(tuple(v) if isinstance(v, list) else v)}")
        lines.append("")
    return "\n".join(lines)
