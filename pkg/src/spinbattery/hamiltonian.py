"""Battery, charging and driver Hamiltonians for a topology and parameter set.

Every assembler builds a sparse CSR operator and returns its dense form
unless called with `sparse=True`; the two forms hold identical entries.
"""

import dataclasses
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from spinbattery.errors import DomainError
from spinbattery.logger import get_logger
from spinbattery.operators import (
    Operator,
    PauliAxis,
    SparseOperator,
    embed_sparse,
    two_site_term_sparse,
)
from spinbattery.topology import SpinTopology

logger = get_logger("hamiltonian")

X, Y, Z = PauliAxis.X, PauliAxis.Y, PauliAxis.Z


class ModelKind(StrEnum):
    """Anisotropy family of the exchange term."""

    ISING = "ising"  # delta = 1, Delta = 0
    XXZ = "xxz"  # delta = 0, Delta != 0
    CUSTOM = "custom"


class ChargingMode(StrEnum):
    """Collective charging uses the full driver; parallel keeps only local fields."""

    COLLECTIVE = "collective"
    PARALLEL = "parallel"


@dataclass(frozen=True)
class ModelParams:
    """Scalar couplings of the battery and driver Hamiltonians.

    Attributes:
        J: Heisenberg coupling.
        delta: xy-anisotropy.
        Delta: z-anisotropy.
        D: z-component of the Dzyaloshinskii-Moriya interaction.
        Omega: transverse field strength.
        omega0: Larmor frequency of each battery qubit.
        lam: weight of the battery Hamiltonian in the driver, in [0, 1].
        hbar: reduced Planck constant.

    """

    J: float = 1.0
    delta: float = 1.0
    Delta: float = 0.0
    D: float = 0.0
    Omega: float = 1.0
    omega0: float = 1.0
    lam: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise DomainError(f"Parameter {f.name} must be finite, got {value}")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.omega0 <= 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if self.Omega < 0:
            raise DomainError(f"Omega must be non-negative, got {self.Omega}")
        if self.hbar <= 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")

    def replace(self, **changes: Any) -> "ModelParams":
        """Return a copy with `changes` applied and validated."""
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise DomainError(f"Unknown model parameter(s): {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **{k: float(v) for k, v in changes.items()})

    def with_kind(self, kind: ModelKind) -> "ModelParams":
        """Force the anisotropies a model kind prescribes."""
        match ModelKind(kind):
            case ModelKind.ISING:
                return self.replace(delta=1.0, Delta=0.0)
            case ModelKind.XXZ:
                return self.replace(delta=0.0)
            case _:
                return self

    def check_kind(self, kind: ModelKind) -> None:
        """Raise DomainError unless the anisotropies match `kind`."""
        match ModelKind(kind):
            case ModelKind.ISING if (self.delta, self.Delta) != (1.0, 0.0):
                raise DomainError(
                    f"Ising model requires delta=1, Delta=0; got delta={self.delta}, "
                    f"Delta={self.Delta}"
                )
            case ModelKind.XXZ if self.delta != 0.0 or self.Delta == 0.0:
                raise DomainError(
                    f"XXZ model requires delta=0 and Delta!=0; got delta={self.delta}, "
                    f"Delta={self.Delta}"
                )


def _zero(n: int) -> SparseOperator:
    dim = 2**n
    return sp.csr_array((dim, dim), dtype=np.complex128)


def _finish(matrix: SparseOperator, sparse: bool) -> Operator:
    matrix = sp.csr_array(matrix)
    matrix.eliminate_zeros()
    return matrix if sparse else matrix.toarray()


def battery_diagonal(n: int, params: ModelParams) -> npt.NDArray[np.float64]:
    """Diagonal of the battery Hamiltonian: hbar*omega0*(2*popcount(b) - n)."""
    if n < 1:
        raise DomainError(f"Qubit count must be at least 1, got {n}")
    charged = np.bitwise_count(np.arange(2**n, dtype=np.uint64)).astype(np.float64)
    return params.hbar * params.omega0 * (2.0 * charged - n)


def battery_hamiltonian(n: int, params: ModelParams, *, sparse: bool = False) -> Operator:
    """H_B = hbar*omega0 * sum_i Z_i."""
    diagonal = battery_diagonal(n, params).astype(np.complex128)
    return _finish(sp.diags_array(diagonal, format="csr"), sparse)


def transverse_field(n: int, params: ModelParams, *, sparse: bool = False) -> Operator:
    """H_x = hbar*Omega * sum_i X_i."""
    total = _zero(n)
    if params.Omega != 0:
        for site in range(1, n + 1):
            total = total + embed_sparse(X, site, n)
        total = params.hbar * params.Omega * total
    return _finish(total, sparse)


def heisenberg_term(
    topology: SpinTopology, params: ModelParams, *, sparse: bool = False
) -> Operator:
    """Anisotropic exchange J*hbar*[(1+delta)XX + (1-delta)YY + Delta*ZZ] on every edge."""
    n = topology.n
    total = _zero(n)
    coefficients = [
        (X, 1.0 + params.delta),
        (Y, 1.0 - params.delta),
        (Z, params.Delta),
    ]
    if params.J != 0:
        for edge in topology.edges:
            for axis, coefficient in coefficients:
                if coefficient != 0:
                    term = two_site_term_sparse(axis, axis, edge.i, edge.j, n)
                    total = total + coefficient * term
        total = params.J * params.hbar * total
    return _finish(total, sparse)


def dmi_pair(i: int, j: int, n: int) -> SparseOperator:
    """X_i Y_j - Y_i X_j, oriented from i to j."""
    return two_site_term_sparse(X, Y, i, j, n) - two_site_term_sparse(Y, X, i, j, n)


def dmi_term(
    topology: SpinTopology, params: ModelParams, *, sparse: bool = False
) -> Operator:
    """D * sum over edges (i < j) of (X_i Y_j - Y_i X_j)."""
    total = _zero(topology.n)
    if params.D != 0:
        for edge in topology.edges:
            total = total + dmi_pair(edge.i, edge.j, topology.n)
        total = params.D * total
    return _finish(total, sparse)


def driver_hamiltonian(
    topology: SpinTopology,
    params: ModelParams,
    *,
    mode: ChargingMode = ChargingMode.COLLECTIVE,
    sparse: bool = False,
) -> Operator:
    """H = H_x + H_HS + H_DMz + lambda*H_B; parallel mode drops the interactions."""
    n = topology.n
    total = transverse_field(n, params, sparse=True)
    if ChargingMode(mode) is ChargingMode.COLLECTIVE:
        total = total + heisenberg_term(topology, params, sparse=True)
        total = total + dmi_term(topology, params, sparse=True)
    if params.lam != 0:
        total = total + params.lam * battery_hamiltonian(n, params, sparse=True)
    logger.debug(
        f"Assembled {mode} driver on {topology.name}: dim={2**n}, nnz={total.nnz}"
    )
    return _finish(total, sparse)
