"""Sectioned key-value run configuration.

    [system]
    topology = supercube        # or: edge_list = cube.edges
    n = 8

    [model]
    kind = xxz
    Delta = 2
    D = 1.7
    lambda = 0

    [time]
    t_max = 9.42477796076938
    samples = 1200

    [output]
    directory = out
    emit_svg = true

Keys are case-sensitive (`delta` and `Delta` differ). Every diagnostic
carries the line of the offending key.
"""

import configparser
import dataclasses
import io
import re
from dataclasses import dataclass, field
from pathlib import Path

from spinbattery.config import presets as tables
from spinbattery.config.config import (
    ISING_SAMPLES,
    ISING_T_MAX,
    XXZ_SAMPLES,
    XXZ_T_MAX,
)
from spinbattery.errors import ConfigError, DomainError
from spinbattery.evolution import Backend, KrylovConfig
from spinbattery.experiments import PARAM_ALIASES, SimulationPlan, display_param
from spinbattery.hamiltonian import ChargingMode, ModelKind, ModelParams
from spinbattery.logger import get_logger
from spinbattery.topology import SpinTopology, closed_chain, open_chain, topology_by_name

logger = get_logger("run_config")

SECTIONS = {
    "system": ("topology", "edge_list", "n"),
    "model": ("kind", "mode", "J", "delta", "Delta", "D", "Omega", "omega0", "lambda", "hbar"),
    "time": (
        "t_max",
        "samples",
        "backend",
        "krylov_subspace",
        "krylov_step",
        "krylov_tolerance",
    ),
    "output": ("directory", "emit_svg", "label"),
}

_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_LINE = re.compile(r"^\s*([^\s=:#;\[][^=:]*?)\s*[=:]")

type LineMap = dict[tuple[str, str | None], int]


def _line_map(text: str) -> LineMap:
    """(section, key) -> 1-based line; (section, None) is the header line."""
    lines: LineMap = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        if match := _SECTION_LINE.match(raw):
            section = match.group(1).strip()
            lines.setdefault((section, None), number)
        elif section is not None and (match := _KEY_LINE.match(raw)):
            lines.setdefault((section, match.group(1)), number)
    return lines


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    parser.optionxform = str
    return parser


@dataclass(frozen=True)
class RunConfig:
    """A parsed run configuration; `to_plan()` turns it into a SimulationPlan."""

    topology: str | None = None
    edge_list: Path | None = None
    n: int | None = None
    kind: ModelKind = ModelKind.CUSTOM
    mode: ChargingMode = ChargingMode.COLLECTIVE
    params: ModelParams = field(default_factory=ModelParams)
    t_max: float | None = None
    samples: int | None = None
    backend: Backend = Backend.AUTO
    krylov: KrylovConfig = field(default_factory=KrylovConfig)
    label: str = "run"
    output_dir: Path = Path("out")
    emit_svg: bool = False
    lines: LineMap = field(default_factory=dict, compare=False, repr=False)

    # =========================================================================
    # PARSING
    # =========================================================================

    @classmethod
    def loads(cls, text: str, base_dir: Path | None = None) -> "RunConfig":
        """Parse and fully validate a configuration document.

        Relative edge-list and output paths resolve against `base_dir`.
        """
        parser = _parser()
        try:
            parser.read_string(text)
        except configparser.MissingSectionHeaderError as e:
            raise ConfigError("expected a [section] header", e.lineno) from e
        except configparser.ParsingError as e:
            line = e.errors[0][0] if e.errors else None
            raise ConfigError("malformed line", line) from e
        except configparser.Error as e:
            raise ConfigError(e.message, getattr(e, "lineno", None)) from e

        lines = _line_map(text)
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(
                    f"unknown section [{section}]; expected one of "
                    + ", ".join(f"[{s}]" for s in SECTIONS),
                    lines.get((section, None)),
                )
            for key in parser[section]:
                if key not in SECTIONS[section]:
                    raise ConfigError(
                        f"unknown key '{key}' in [{section}]", lines.get((section, key))
                    )

        reader = _Reader(parser, lines)
        base_dir = base_dir or Path(".")

        topology = reader.get("system", "topology")
        edge_list = reader.get("system", "edge_list")
        if (topology is None) == (edge_list is None):
            raise ConfigError(
                "[system] needs exactly one of 'topology' or 'edge_list'",
                lines.get(("system", None)),
            )
        kind = reader.choice("model", "kind", ModelKind, ModelKind.CUSTOM)

        config = cls(
            topology=topology,
            edge_list=base_dir / edge_list if edge_list is not None else None,
            n=reader.integer("system", "n"),
            kind=kind,
            mode=reader.choice("model", "mode", ChargingMode, ChargingMode.COLLECTIVE),
            params=reader.params(kind),
            t_max=reader.real("time", "t_max"),
            samples=reader.integer("time", "samples"),
            backend=reader.choice("time", "backend", Backend, Backend.AUTO),
            krylov=reader.krylov(),
            label=reader.get("output", "label") or "run",
            output_dir=base_dir / (reader.get("output", "directory") or "out"),
            emit_svg=reader.boolean("output", "emit_svg"),
            lines=lines,
        )
        config.to_plan()
        return config

    @classmethod
    def read(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read {path}: {e.strerror or e}") from e
        logger.debug(f"Parsing run configuration {path}")
        return cls.loads(text, base_dir=path.parent)

    # =========================================================================
    # PLAN CONVERSION
    # =========================================================================

    def _topology(self) -> SpinTopology:
        if self.edge_list is not None:
            try:
                topology = SpinTopology.read(self.edge_list)
            except DomainError as e:
                raise ConfigError(str(e), self.lines.get(("system", "edge_list"))) from e
        else:
            try:
                if self.topology in ("open", "closed") and self.n is not None:
                    chain = open_chain if self.topology == "open" else closed_chain
                    topology = chain(self.n)
                else:
                    topology = topology_by_name(self.topology)
            except DomainError as e:
                raise ConfigError(str(e), self.lines.get(("system", "topology"))) from e
        if self.n is not None and self.n != topology.n:
            raise ConfigError(
                f"n = {self.n} but topology {topology.name} has {topology.n} qubits",
                self.lines.get(("system", "n")),
            )
        return topology

    def to_plan(self) -> SimulationPlan:
        """Build the plan; grid defaults follow the model kind."""
        topology = self._topology()
        xxz = self.kind is ModelKind.XXZ
        t_max = self.t_max if self.t_max is not None else (XXZ_T_MAX if xxz else ISING_T_MAX)
        samples = (
            self.samples if self.samples is not None else (XXZ_SAMPLES if xxz else ISING_SAMPLES)
        )
        try:
            self.params.check_kind(self.kind)
        except DomainError as e:
            raise ConfigError(str(e), self.lines.get(("model", "kind"))) from e
        try:
            return SimulationPlan(
                topology,
                self.params,
                self.kind,
                t_max,
                samples,
                self.backend,
                self.mode,
                self.label,
                self.krylov,
            )
        except DomainError as e:
            key = "samples" if "samples" in str(e) else "t_max"
            raise ConfigError(str(e), self.lines.get(("time", key))) from e

    @classmethod
    def from_plan(
        cls,
        plan: SimulationPlan,
        *,
        output_dir: Path = Path("out"),
        emit_svg: bool = False,
        edge_list: Path | None = None,
    ) -> "RunConfig":
        """Describe `plan` as a configuration.

        Catalog topologies are referenced by name; any other topology needs
        the edge-list file it was read from.
        """
        topology = None
        if edge_list is None:
            try:
                resolved = topology_by_name(plan.topology.name)
            except DomainError:
                resolved = None
            if resolved != plan.topology:
                raise ConfigError(
                    f"topology {plan.topology.name} is not in the catalog; "
                    "pass the edge-list file it was read from"
                )
            topology = plan.topology.name
        return cls(
            topology=topology,
            edge_list=edge_list,
            n=plan.topology.n,
            kind=plan.model_kind,
            mode=plan.mode,
            params=plan.params,
            t_max=plan.t_max,
            samples=plan.samples,
            backend=plan.backend,
            krylov=plan.krylov,
            label=plan.label,
            output_dir=output_dir,
            emit_svg=emit_svg,
        )

    def dumps(self) -> str:
        """Serialize back to the configuration format; floats keep full precision."""
        system = {"topology": self.topology} if self.edge_list is None else {
            "edge_list": self.edge_list.as_posix()
        }
        if self.n is not None:
            system["n"] = str(self.n)
        model = {"kind": str(self.kind), "mode": str(self.mode)}
        for f in dataclasses.fields(self.params):
            model[display_param(f.name)] = repr(getattr(self.params, f.name))
        time = {"backend": str(self.backend)}
        if self.t_max is not None:
            time["t_max"] = repr(self.t_max)
        if self.samples is not None:
            time["samples"] = str(self.samples)
        time |= {
            "krylov_subspace": str(self.krylov.subspace_dim),
            "krylov_step": repr(self.krylov.step_size),
            "krylov_tolerance": repr(self.krylov.tolerance),
        }
        output = {
            "directory": self.output_dir.as_posix(),
            "emit_svg": "true" if self.emit_svg else "false",
            "label": self.label,
        }

        parser = _parser()
        parser.read_dict({"system": system, "model": model, "time": time, "output": output})
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()


class _Reader:
    """Typed access to parsed values, raising ConfigError at the key's line."""

    def __init__(self, parser: configparser.ConfigParser, lines: LineMap):
        self.parser = parser
        self.lines = lines

    def _fail(self, section: str, key: str, message: str) -> ConfigError:
        return ConfigError(f"[{section}] {key}: {message}", self.lines.get((section, key)))

    def get(self, section: str, key: str) -> str | None:
        if not self.parser.has_section(section):
            return None
        value = self.parser[section].get(key)
        if value is not None and not value.strip():
            raise self._fail(section, key, "empty value")
        return value.strip() if value is not None else None

    def real(self, section: str, key: str) -> float | None:
        value = self.get(section, key)
        if value is None:
            return None
        try:
            return float(value)
        except ValueError:
            raise self._fail(section, key, f"'{value}' is not a number") from None

    def integer(self, section: str, key: str) -> int | None:
        value = self.get(section, key)
        if value is None:
            return None
        try:
            return int(value)
        except ValueError:
            raise self._fail(section, key, f"'{value}' is not an integer") from None

    def boolean(self, section: str, key: str) -> bool:
        if self.get(section, key) is None:
            return False
        try:
            return self.parser.getboolean(section, key)
        except ValueError as e:
            raise self._fail(section, key, str(e)) from e

    def choice[T](self, section: str, key: str, enum: type[T], default: T) -> T:
        value = self.get(section, key)
        if value is None:
            return default
        try:
            return enum(value.lower())
        except ValueError:
            allowed = ", ".join(str(member) for member in enum)
            raise self._fail(section, key, f"'{value}' is not one of {allowed}") from None

    def params(self, kind: ModelKind) -> ModelParams:
        """Apply [model] keys one at a time so a bad value blames its own line."""
        params = ModelParams()
        if kind is ModelKind.XXZ:
            params = params.replace(delta=0.0, Delta=tables.XXZ_DELTA)
        if not self.parser.has_section("model"):
            return params
        for key in self.parser["model"]:
            if key in ("kind", "mode"):
                continue
            value = self.real("model", key)
            try:
                params = params.replace(**{PARAM_ALIASES.get(key, key): value})
            except DomainError as e:
                raise self._fail("model", key, str(e)) from e
        return params

    def krylov(self) -> KrylovConfig:
        changes = {}
        for key, name, convert in (
            ("krylov_subspace", "subspace_dim", self.integer),
            ("krylov_step", "step_size", self.real),
            ("krylov_tolerance", "tolerance", self.real),
        ):
            value = convert("time", key)
            if value is not None:
                changes[name] = value
        try:
            return KrylovConfig(**changes)
        except DomainError as e:
            raise ConfigError(str(e), self.lines.get(("time", None))) from e
