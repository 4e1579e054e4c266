"""Unitary evolution |psi(t)> = exp(-iHt)|psi(0)> with hbar = 1.

Two backends: a dense spectral decomposition reused across the whole time
grid, and fixed-step Lanczos propagation on a sparse operator for the
larger systems.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import numpy.typing as npt
import scipy.linalg
import scipy.sparse as sp

from spinbattery.config.config import (
    KRYLOV_STEP_SIZE,
    KRYLOV_SUBSPACE_DIM,
    KRYLOV_TOLERANCE,
    NORM_TOL,
    SPECTRAL_MAX_DIM,
)
from spinbattery.errors import ConvergenceError, DomainError
from spinbattery.logger import get_logger
from spinbattery.operators import Operator, is_hermitian, qubit_count

logger = get_logger("evolution")

type ComplexVector = npt.NDArray[np.complex128]


class Backend(StrEnum):
    SPECTRAL = "spectral"
    KRYLOV = "krylov"
    AUTO = "auto"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector of an n-qubit pure state."""

    n: int
    amplitudes: ComplexVector

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (2**self.n,):
            raise DomainError(
                f"State of {self.n} qubits needs {2**self.n} amplitudes, "
                f"got shape {amplitudes.shape}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"State is not normalized: norm = {norm!r}")
        amplitudes.flags.writeable = False
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes: npt.ArrayLike) -> "StateVector":
        vector = np.asarray(amplitudes, dtype=np.complex128)
        return cls(qubit_count(vector.shape[0]), vector)

    @property
    def dim(self) -> int:
        return 2**self.n

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, operator: Operator) -> float:
        """Real part of <psi|O|psi>."""
        return float(np.vdot(self.amplitudes, operator @ self.amplitudes).real)


def uncharged_state(n: int) -> StateVector:
    """All qubits in the uncharged local state: basis vector e_0."""
    if n < 1:
        raise DomainError(f"Qubit count must be at least 1, got {n}")
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    amplitudes[0] = 1.0
    return StateVector(n, amplitudes)


def charged_state(n: int) -> StateVector:
    """All qubits in the charged local state: basis vector e_{2**n - 1}."""
    if n < 1:
        raise DomainError(f"Qubit count must be at least 1, got {n}")
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    amplitudes[-1] = 1.0
    return StateVector(n, amplitudes)


# =============================================================================
# SPECTRAL BACKEND
# =============================================================================


@dataclass(frozen=True, eq=False)
class SpectralPropagator:
    """Eigen-decomposition H = V diag(eps) V^dagger of a Hermitian driver."""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: npt.NDArray[np.complex128]

    @classmethod
    def from_hamiltonian(cls, hamiltonian: Operator) -> "SpectralPropagator":
        dense = hamiltonian.toarray() if sp.issparse(hamiltonian) else hamiltonian
        dense = np.asarray(dense, dtype=np.complex128)
        if not is_hermitian(dense):
            raise DomainError("Spectral propagation needs a Hermitian Hamiltonian")
        logger.debug(f"Diagonalizing dense driver of dimension {dense.shape[0]}")
        eigenvalues, eigenvectors = scipy.linalg.eigh(dense)
        eigenvalues.flags.writeable = False
        eigenvectors.flags.writeable = False
        return cls(eigenvalues, eigenvectors)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> npt.NDArray[np.complex128]:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def _check(self, psi0: StateVector) -> None:
        if psi0.dim != self.dim:
            raise DomainError(
                f"State dimension {psi0.dim} does not match propagator dimension {self.dim}"
            )

    def evolve_many(
        self, psi0: StateVector, times: npt.ArrayLike
    ) -> list[StateVector]:
        """States at every time in `times`, sharing one basis change."""
        self._check(psi0)
        times = np.atleast_1d(np.asarray(times, dtype=np.float64))
        coefficients = self.eigenvectors.conj().T @ psi0.amplitudes
        phases = np.exp(-1j * np.outer(times, self.eigenvalues))
        rows = (phases * coefficients) @ self.eigenvectors.T
        return [StateVector(psi0.n, row) for row in rows]


def spectral_evolve(prop: SpectralPropagator, psi0: StateVector, t: float) -> StateVector:
    """V diag(exp(-i eps t)) V^dagger psi0."""
    return prop.evolve_many(psi0, [t])[0]


# =============================================================================
# KRYLOV BACKEND
# =============================================================================


@dataclass(frozen=True)
class KrylovConfig:
    """Fixed-step Lanczos settings.

    Attributes:
        subspace_dim: largest Krylov basis built per step.
        step_size: longest time increment per step.
        tolerance: bound on the per-step residual estimate.

    """

    subspace_dim: int = KRYLOV_SUBSPACE_DIM
    step_size: float = KRYLOV_STEP_SIZE
    tolerance: float = KRYLOV_TOLERANCE

    def __post_init__(self):
        if self.subspace_dim < 2:
            raise DomainError(f"subspace_dim must be >= 2, got {self.subspace_dim}")
        if not self.step_size > 0:
            raise DomainError(f"step_size must be positive, got {self.step_size}")
        if not self.tolerance > 0:
            raise DomainError(f"tolerance must be positive, got {self.tolerance}")


def _lanczos_step(
    hamiltonian: Operator, vector: ComplexVector, tau: float, cfg: KrylovConfig
) -> ComplexVector:
    """exp(-i H tau) @ vector from a Lanczos basis with full reorthogonalization.

    The basis grows until beta_{j+1} * |e_j^T exp(-i T_j tau) e_1| falls below
    the tolerance or an invariant subspace is found.
    """
    scale = float(np.linalg.norm(vector))
    dim = vector.shape[0]
    m = min(cfg.subspace_dim, dim)
    basis = np.zeros((m, dim), dtype=np.complex128)
    tridiagonal = np.zeros((m, m), dtype=np.float64)
    basis[0] = vector / scale

    for j in range(m):
        w = hamiltonian @ basis[j]
        alpha = float(np.vdot(basis[j], w).real)
        tridiagonal[j, j] = alpha
        # Full Gram-Schmidt, applied twice.
        for _ in range(2):
            w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        beta = float(np.linalg.norm(w))

        evals, evecs = scipy.linalg.eigh(tridiagonal[: j + 1, : j + 1])
        coefficients = evecs @ (np.exp(-1j * evals * tau) * evecs[0])
        estimate = beta * abs(coefficients[-1])
        breakdown = beta <= 1e-14 * max(1.0, abs(alpha))
        if breakdown or estimate <= cfg.tolerance:
            return scale * (basis[: j + 1].T @ coefficients)
        if j + 1 < m:
            basis[j + 1] = w / beta
            tridiagonal[j, j + 1] = tridiagonal[j + 1, j] = beta

    raise ConvergenceError(
        f"Lanczos step of length {tau:.6g} did not reach tolerance {cfg.tolerance:g} "
        f"within {m} Krylov vectors (estimate {estimate:.3e})"
    )


def _krylov_operator(hamiltonian: Operator) -> Operator:
    if sp.issparse(hamiltonian):
        return sp.csr_array(hamiltonian)
    return sp.csr_array(np.asarray(hamiltonian, dtype=np.complex128))


def _propagate(
    operator: Operator, amplitudes: ComplexVector, t: float, cfg: KrylovConfig
) -> ComplexVector:
    steps = math.ceil(abs(t) / cfg.step_size)
    tau = t / steps if steps else 0.0
    for _ in range(steps):
        amplitudes = _lanczos_step(operator, amplitudes, tau, cfg)
    return amplitudes


def krylov_evolve(
    H: Operator, psi0: StateVector, t: float, cfg: KrylovConfig | None = None
) -> StateVector:
    """Short-step Lanczos propagation of psi0 to time t (t may be negative)."""
    cfg = cfg or KrylovConfig()
    if H.shape != (psi0.dim, psi0.dim):
        raise DomainError(f"Operator shape {H.shape} does not match state dim {psi0.dim}")
    amplitudes = _propagate(_krylov_operator(H), np.array(psi0.amplitudes), t, cfg)
    return StateVector(psi0.n, amplitudes)


# =============================================================================
# TRAJECTORIES
# =============================================================================


def check_time_grid(times: Sequence[float] | npt.NDArray[np.float64]) -> None:
    """Require a strictly increasing grid that starts at 0."""
    grid = np.asarray(times, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("Time grid must be a non-empty 1-D sequence")
    if grid[0] != 0.0:
        raise DomainError(f"Time grid must start at 0, starts at {grid[0]}")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("Time grid must be strictly increasing")


def resolve_backend(backend: Backend | str, dim: int) -> Backend:
    backend = Backend(backend)
    if backend is Backend.AUTO:
        return Backend.SPECTRAL if dim <= SPECTRAL_MAX_DIM else Backend.KRYLOV
    return backend


def sample_trajectory(
    H: Operator,
    psi0: StateVector,
    times: Sequence[float] | npt.NDArray[np.float64],
    backend: Backend | str = Backend.AUTO,
    cfg: KrylovConfig | None = None,
) -> list[StateVector]:
    """One state per time sample; Krylov propagates sample to sample."""
    check_time_grid(times)
    grid = np.asarray(times, dtype=np.float64)
    chosen = resolve_backend(backend, psi0.dim)
    logger.debug(f"Sampling {grid.size} states with the {chosen} backend")

    if chosen is Backend.SPECTRAL:
        return SpectralPropagator.from_hamiltonian(H).evolve_many(psi0, grid)

    cfg = cfg or KrylovConfig()
    if H.shape != (psi0.dim, psi0.dim):
        raise DomainError(f"Operator shape {H.shape} does not match state dim {psi0.dim}")
    operator = _krylov_operator(H)
    states = [psi0]
    amplitudes = np.array(psi0.amplitudes)
    for interval in np.diff(grid):
        amplitudes = _propagate(operator, amplitudes, float(interval), cfg)
        states.append(StateVector(psi0.n, amplitudes))
    return states
