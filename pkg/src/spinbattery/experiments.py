"""Simulation plans, parameter sweeps and the preset catalog."""

import asyncio
import dataclasses
import functools
import itertools
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from spinbattery.config import presets as tables
from spinbattery.config.config import (
    ISING_SAMPLES,
    ISING_T_MAX,
    SWEEP_WORKERS,
    XXZ_SAMPLES,
    XXZ_T_MAX,
)
from spinbattery.errors import DomainError, PlanError, UnknownPresetError
from spinbattery.evolution import Backend, KrylovConfig, sample_trajectory, uncharged_state
from spinbattery.hamiltonian import (
    ChargingMode,
    ModelKind,
    ModelParams,
    battery_diagonal,
    driver_hamiltonian,
)
from spinbattery.logger import get_logger
from spinbattery.metrics import ChargeTimeSeries, battery_energy, charging_power
from spinbattery.topology import SpinTopology, topology_by_name

logger = get_logger("experiments")

PARAM_ALIASES = {"lambda": "lam", "λ": "lam"}
PARAM_NAMES = tuple(f.name for f in dataclasses.fields(ModelParams))

type SweepPoint = tuple[tuple[str, float], ...]


def canonical_param(name: str) -> str:
    """Map `lambda`/`λ` to the `lam` field and reject unknown names."""
    canonical = PARAM_ALIASES.get(name, name)
    if canonical not in PARAM_NAMES:
        allowed = ", ".join(n if n != "lam" else "lambda" for n in PARAM_NAMES)
        raise DomainError(f"Unknown parameter '{name}'; expected one of {allowed}")
    return canonical


def display_param(name: str) -> str:
    return "lambda" if name == "lam" else name


@dataclass(frozen=True)
class SimulationPlan:
    """Everything needed to reproduce one charging trajectory."""

    topology: SpinTopology
    params: ModelParams
    model_kind: ModelKind = ModelKind.CUSTOM
    t_max: float = ISING_T_MAX
    samples: int = ISING_SAMPLES
    backend: Backend = Backend.AUTO
    mode: ChargingMode = ChargingMode.COLLECTIVE
    label: str = "plan"
    krylov: KrylovConfig = field(default_factory=KrylovConfig)

    def __post_init__(self):
        object.__setattr__(self, "model_kind", ModelKind(self.model_kind))
        object.__setattr__(self, "backend", Backend(self.backend))
        object.__setattr__(self, "mode", ChargingMode(self.mode))
        self.params.check_kind(self.model_kind)
        if self.samples < 2:
            raise DomainError(f"Time grid needs at least 2 samples, got {self.samples}")
        if not self.t_max > 0:
            raise DomainError(f"t_max must be positive, got {self.t_max}")

    def time_grid(self) -> npt.NDArray[np.float64]:
        return np.linspace(0.0, self.t_max, self.samples)

    def with_params(self, label: str | None = None, **changes: float) -> "SimulationPlan":
        params = self.params.replace(**{canonical_param(k): v for k, v in changes.items()})
        return dataclasses.replace(self, params=params, label=label or self.label)

    def describe(self) -> dict[str, str]:
        """Human-readable plan settings, in a fixed order."""
        p = self.params
        return {
            "topology": self.topology.name,
            "n": str(self.topology.n),
            "kind": str(self.model_kind),
            "mode": str(self.mode),
            "J": f"{p.J:g}",
            "delta": f"{p.delta:g}",
            "Delta": f"{p.Delta:g}",
            "D": f"{p.D:g}",
            "Omega": f"{p.Omega:g}",
            "omega0": f"{p.omega0:g}",
            "lambda": f"{p.lam:g}",
        }


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian product of parameter axes applied to a base plan."""

    base: SimulationPlan
    axes: tuple[tuple[str, tuple[float, ...]], ...]

    def __post_init__(self):
        if not self.axes:
            raise DomainError("Sweep needs at least one axis")
        axes = []
        for name, values in self.axes:
            if len(values) == 0:
                raise DomainError(f"Sweep axis '{name}' has no values")
            axes.append((canonical_param(name), tuple(float(v) for v in values)))
        names = [name for name, _ in axes]
        if len(set(names)) != len(names):
            raise DomainError(f"Sweep axes repeat a parameter: {names}")
        object.__setattr__(self, "axes", tuple(axes))

    def points(self) -> Iterator[SweepPoint]:
        names = [name for name, _ in self.axes]
        for values in itertools.product(*(values for _, values in self.axes)):
            yield tuple(zip(names, values, strict=True))

    def plan_for(self, point: SweepPoint) -> SimulationPlan:
        return self.base.with_params(
            label=f"{self.base.label}[{point_label(point)}]", **dict(point)
        )


def point_label(point: SweepPoint) -> str:
    return ",".join(f"{display_param(name)}={value:g}" for name, value in point)


# =============================================================================
# EXECUTION
# =============================================================================


def run_plan(plan: SimulationPlan) -> ChargeTimeSeries:
    """Evolve the uncharged battery under the plan's driver and measure it."""
    logger.info(f"Running plan {plan.label} on {plan.topology.name}")
    try:
        n = plan.topology.n
        hamiltonian = driver_hamiltonian(
            plan.topology, plan.params, mode=plan.mode, sparse=True
        )
        grid = plan.time_grid()
        states = sample_trajectory(
            hamiltonian, uncharged_state(n), grid, plan.backend, plan.krylov
        )
        diagonal = battery_diagonal(n, plan.params)
        ground = float(diagonal.min())
        energy = np.array([battery_energy(psi, diagonal) for psi in states])
        ergotropy = np.maximum(energy - ground, 0.0)
    except Exception as e:
        logger.error(f"Plan {plan.label} failed: {e}")
        raise PlanError(plan.label, e) from e

    series = ChargeTimeSeries(
        grid, energy, ergotropy, label=plan.label, details=plan.describe()
    )
    return charging_power(series)


async def _run_plans(
    plans: list[SimulationPlan], workers: int
) -> list[ChargeTimeSeries | BaseException]:
    semaphore = asyncio.Semaphore(workers)

    async def run_one(plan: SimulationPlan) -> ChargeTimeSeries:
        async with semaphore:
            return await asyncio.to_thread(run_plan, plan)

    return await asyncio.gather(*(run_one(p) for p in plans), return_exceptions=True)


def run_sweep(
    spec: SweepSpec, workers: int = SWEEP_WORKERS
) -> dict[SweepPoint, ChargeTimeSeries | PlanError]:
    """Run every axis point; a failing point maps to its PlanError."""
    results: dict[SweepPoint, ChargeTimeSeries | PlanError] = {}
    runnable: dict[SweepPoint, SimulationPlan] = {}
    for point in spec.points():
        try:
            runnable[point] = spec.plan_for(point)
        except DomainError as e:
            label = f"{spec.base.label}[{point_label(point)}]"
            results[point] = PlanError(label, e)

    logger.info(
        f"Sweep {spec.base.label}: {len(runnable)} points on {workers} workers"
    )
    outcomes = asyncio.run(_run_plans(list(runnable.values()), max(1, workers)))
    for (point, plan), outcome in zip(runnable.items(), outcomes, strict=True):
        if isinstance(outcome, PlanError):
            results[point] = outcome
        elif isinstance(outcome, BaseException):
            results[point] = PlanError(plan.label, outcome)
        else:
            results[point] = outcome

    for point, outcome in results.items():
        if isinstance(outcome, PlanError):
            logger.warning(f"Sweep point {point_label(point)} failed: {outcome}")
    return {point: results[point] for point in spec.points()}


# =============================================================================
# PRESETS
# =============================================================================

# Numbered plots of the charging study and the preset group each one is drawn from.
PLOT_GROUPS: dict[int, str] = {
    1: "topologies",
    2: "ising-baseline-ergotropy",
    3: "ising-baseline-power",
    4: "ising-dmi-ergotropy",
    5: "ising-dmi-power",
    6: "xxz-dmi-ergotropy",
    7: "xxz-dmi-power",
    8: "supercube-scan",
    9: "supercube-diagonals",
    10: "twelve-qubit",
}

REQUIRED_GROUPS = tuple(PLOT_GROUPS.values())


@dataclass(frozen=True)
class Preset:
    """A named plan or sweep, tagged with the study groups it reproduces."""

    name: str
    groups: frozenset[str]
    plan: SimulationPlan | None = None
    sweep: SweepSpec | None = None

    def __post_init__(self):
        if (self.plan is None) == (self.sweep is None):
            raise DomainError(f"Preset {self.name} needs exactly one of plan or sweep")

    @property
    def base_plan(self) -> SimulationPlan:
        return self.plan if self.plan is not None else self.sweep.base

    @property
    def kind(self) -> str:
        return "plan" if self.plan is not None else "sweep"


def normalize_preset_name(name: str) -> str:
    """Accept the ASCII alias `lambda` for `λ`."""
    return name.replace("lambda", "λ")


def _ising_plan(topology: str, label: str, **params: float) -> SimulationPlan:
    model = ModelParams(**(tables.BASE_PARAMS | params)).with_kind(ModelKind.ISING)
    return SimulationPlan(
        topology_by_name(topology),
        model,
        ModelKind.ISING,
        ISING_T_MAX,
        ISING_SAMPLES,
        label=label,
    )


def _xxz_plan(topology: str, label: str, **params: float) -> SimulationPlan:
    model = ModelParams(
        **(tables.BASE_PARAMS | {"Delta": tables.XXZ_DELTA} | params)
    ).with_kind(ModelKind.XXZ)
    return SimulationPlan(
        topology_by_name(topology),
        model,
        ModelKind.XXZ,
        XXZ_T_MAX,
        XXZ_SAMPLES,
        label=label,
    )


def _build_catalog() -> Iterator[Preset]:
    for topo in tables.CHAIN_TOPOLOGIES:
        for d, lam in itertools.product(tables.ISING_D_VALUES, tables.LAMBDA_VALUES):
            name = f"ising-{topo}-D{d:g}-λ{lam:g}"
            if d == 0:
                groups = {"ising-baseline-ergotropy", "ising-baseline-power"}
                groups |= {"ising-dmi-ergotropy", "ising-dmi-power"}
                if lam == 0:
                    groups.add("topologies")
            else:
                groups = {"ising-dmi-ergotropy", "ising-dmi-power"}
            yield Preset(name, frozenset(groups), _ising_plan(topo, name, D=d, lam=lam))

        for d, lam in itertools.product(tables.XXZ_D_VALUES, tables.LAMBDA_VALUES):
            name = f"xxz-{topo}-D{d:g}-λ{lam:g}"
            groups = frozenset({"xxz-dmi-ergotropy", "xxz-dmi-power"})
            yield Preset(name, groups, _xxz_plan(topo, name, D=d, lam=lam))

        name = f"ising-{topo}-λ-sweep"
        yield Preset(
            name,
            frozenset({"ising-baseline-ergotropy", "ising-baseline-power"}),
            sweep=SweepSpec(
                _ising_plan(topo, name), (("lam", tuple(tables.LAMBDA_VALUES)),)
            ),
        )
        name = f"ising-{topo}-D-sweep"
        yield Preset(
            name,
            frozenset({"ising-dmi-ergotropy", "ising-dmi-power"}),
            sweep=SweepSpec(_ising_plan(topo, name), (("D", tuple(tables.ISING_D_VALUES)),)),
        )
        name = f"xxz-{topo}-sweep"
        yield Preset(
            name,
            frozenset({"xxz-dmi-ergotropy", "xxz-dmi-power"}),
            sweep=SweepSpec(
                _xxz_plan(topo, name),
                (
                    ("D", tuple(tables.XXZ_D_VALUES)),
                    ("lam", tuple(tables.LAMBDA_VALUES)),
                ),
            ),
        )

    name = "xxz-supercube-D-scan"
    yield Preset(
        name,
        frozenset({"supercube-scan"}),
        sweep=SweepSpec(
            _xxz_plan("supercube", name), (("D", tuple(tables.SUPERCUBE_D_SCAN)),)
        ),
    )
    name = "xxz-supercube-J-scan"
    yield Preset(
        name,
        frozenset({"supercube-scan"}),
        sweep=SweepSpec(
            _xxz_plan("supercube", name, D=tables.SUPERCUBE_OPTIMAL_D),
            (("J", tuple(tables.SUPERCUBE_J_SCAN)),),
        ),
    )

    for entry in tables.DIAGONAL_PRESETS:
        name = f"xxz-{entry['topology']}-D{entry['D']:g}"
        yield Preset(
            name,
            frozenset({"supercube-diagonals"}),
            _xxz_plan(entry["topology"], name, D=entry["D"]),
        )

    for entry in tables.TWELVE_QUBIT_PRESETS:
        name = f"{entry['name']}-D{entry['D']:g}"
        yield Preset(
            name,
            frozenset({"twelve-qubit"}),
            _xxz_plan(entry["topology"], name, D=entry["D"]),
        )

    name = "parallel-D0-λ0"
    plan = dataclasses.replace(
        _ising_plan("supercube", name), mode=ChargingMode.PARALLEL
    )
    yield Preset(name, frozenset({"ising-baseline-power"}), plan)


@functools.cache
def preset_catalog() -> dict[str, Preset]:
    """Name -> preset registry, built once."""
    catalog = {preset.name: preset for preset in _build_catalog()}
    logger.debug(f"Preset catalog holds {len(catalog)} presets")
    return catalog


def lookup_preset(name: str) -> Preset:
    catalog = preset_catalog()
    key = normalize_preset_name(name)
    if key not in catalog:
        raise UnknownPresetError(name, sorted(catalog))
    return catalog[key]
