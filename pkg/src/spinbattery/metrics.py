"""Ergotropy, charging power and charge/discharge cycle statistics."""

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp
from scipy.signal import find_peaks

from spinbattery.config.config import DENSITY_TOL, PEAK_PROMINENCE_FRACTION
from spinbattery.errors import DomainError
from spinbattery.evolution import StateVector
from spinbattery.operators import Operator

type FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class ChargeTimeSeries:
    """Sampled trajectory of battery energy, ergotropy and charging power."""

    times: FloatArray
    energy: FloatArray
    ergotropy: FloatArray
    power: FloatArray = field(default_factory=lambda: np.zeros(0))
    label: str = ""
    details: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        columns = {}
        for name in ("times", "energy", "ergotropy", "power"):
            column = np.array(getattr(self, name), dtype=np.float64)
            column.flags.writeable = False
            columns[name] = column
        if columns["power"].size == 0:
            columns["power"] = np.zeros_like(columns["times"])
        lengths = {name: column.shape for name, column in columns.items()}
        if len(set(lengths.values())) != 1:
            raise DomainError(f"Series columns differ in length: {lengths}")
        for name, column in columns.items():
            object.__setattr__(self, name, column)

    def __len__(self) -> int:
        return self.times.shape[0]


@dataclass(frozen=True)
class CycleReport:
    """Peak, residual and periodicity statistics of an ergotropy curve.

    Fields that cannot be determined from the series are None.
    """

    peak_value: float
    peak_time: float
    residual: float | None = None
    period_estimate: float | None = None
    drift: float | None = None
    peak_power: float = 0.0
    peak_power_time: float = 0.0
    first_peak: float | None = None
    second_peak: float | None = None
    efficiency: float | None = None


# =============================================================================
# ERGOTROPY
# =============================================================================


def battery_energy(psi: StateVector, H_B: Operator) -> float:
    """<psi|H_B|psi>; a 1-D H_B is read as the diagonal of a diagonal operator."""
    amplitudes = psi.amplitudes
    if H_B.ndim == 1:
        return float(np.dot(np.abs(amplitudes) ** 2, H_B.real))
    return float(np.vdot(amplitudes, H_B @ amplitudes).real)


def ground_energy(h_b: Operator) -> float:
    """Lowest eigenvalue of the battery Hamiltonian.

    A 1-D argument is read as the diagonal of a diagonal Hamiltonian.
    """
    if h_b.ndim == 1:
        return float(np.min(h_b.real))
    if sp.issparse(h_b):
        off_diagonal = sp.csr_array(h_b - sp.diags_array(h_b.diagonal()))
        off_diagonal.eliminate_zeros()
        if off_diagonal.nnz == 0:
            return float(np.min(h_b.diagonal().real))
        h_b = h_b.toarray()
    diagonal = np.diagonal(h_b)
    if not np.any(h_b - np.diag(diagonal)):
        return float(np.min(diagonal.real))
    return float(np.linalg.eigvalsh(h_b)[0])


def _check_dim(dim: int, h_b: Operator) -> None:
    if h_b.shape[0] != dim:
        raise DomainError(
            f"Battery Hamiltonian dimension {h_b.shape[0]} does not match state {dim}"
        )


def ergotropy_pure(
    psi: StateVector, H_B: Operator, ground: float | None = None
) -> float:
    """<psi|H_B|psi> minus the ground energy of H_B, clipped at zero.

    Pass `ground` to skip recomputing the ground energy along a trajectory.
    """
    _check_dim(psi.dim, H_B)
    if ground is None:
        ground = ground_energy(H_B)
    return max(battery_energy(psi, H_B) - ground, 0.0)


def validate_density_matrix(rho: npt.NDArray[np.complex128], tol: float = DENSITY_TOL):
    """Raise DomainError unless rho is Hermitian, PSD and of unit trace."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"Density matrix must be square, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max(initial=0.0) > tol:
        raise DomainError("Density matrix is not Hermitian")
    trace = np.trace(rho)
    if abs(trace - 1.0) > tol:
        raise DomainError(f"Density matrix trace is {trace.real:.3g}, not 1")
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < -tol:
        raise DomainError(f"Density matrix has negative eigenvalue {lowest:.3g}")


def ergotropy_general(rho: npt.NDArray[np.complex128], H_B: Operator) -> float:
    """Tr(rho H_B) minus the passive-state energy sum_k r_k eps_k.

    r_k are the populations of rho sorted descending, eps_k the energies of
    H_B sorted ascending.
    """
    validate_density_matrix(rho)
    _check_dim(rho.shape[0], H_B)
    h_b = H_B.toarray() if sp.issparse(H_B) else np.asarray(H_B)
    if h_b.ndim == 1:
        h_b = np.diag(h_b)
    populations = np.sort(np.linalg.eigvalsh(rho))[::-1]
    energies = np.sort(np.linalg.eigvalsh(h_b))
    passive = float(np.dot(populations, energies))
    energy = float(np.trace(rho @ h_b).real)
    return max(energy - passive, 0.0)


# =============================================================================
# POWER AND CYCLES
# =============================================================================


def charging_power(series: ChargeTimeSeries) -> ChargeTimeSeries:
    """Fill the power column with P(t) = ergotropy(t) / t, and P(0) = 0."""
    times, ergotropy = series.times, series.ergotropy
    if len(times) and times[0] != 0.0:
        raise DomainError(f"Power needs a grid starting at t=0, got {times[0]}")
    power = np.zeros_like(ergotropy)
    power[1:] = ergotropy[1:] / times[1:]
    return ChargeTimeSeries(
        times, series.energy, ergotropy, power, series.label, dict(series.details)
    )


def find_cycle_peaks(values: FloatArray, prominence: float) -> npt.NDArray[np.intp]:
    """Indices of strict local maxima, the last sample included.

    The final sample counts when it rises above its neighbour by more than
    the prominence floor measured from the preceding minimum.
    """
    padded = np.append(values, values.min())
    peaks, _ = find_peaks(padded, prominence=prominence)
    return peaks[peaks < len(values)]


def cycle_report(series: ChargeTimeSeries) -> CycleReport:
    """Peak, first post-peak residual, period and drift of the ergotropy curve."""
    if len(series) < 3:
        raise DomainError(f"Cycle report needs at least 3 samples, got {len(series)}")
    times, values = series.times, series.ergotropy
    prominence = PEAK_PROMINENCE_FRACTION * float(np.ptp(values))

    power_index = int(np.argmax(series.power))
    power_stats = {
        "peak_power": float(series.power[power_index]),
        "peak_power_time": float(times[power_index]),
    }

    peaks = find_cycle_peaks(values, prominence)
    if peaks.size == 0:
        index = int(np.argmax(values))
        return CycleReport(float(values[index]), float(times[index]), **power_stats)

    first = int(peaks[0])
    minima, _ = find_peaks(-values, prominence=prominence)
    minima = minima[minima > first]

    residual = float(values[minima[0]]) if minima.size else None
    drift = float(values[minima[1]] - values[minima[0]]) if minima.size > 1 else None
    period = float(times[peaks[1]] - times[first]) if peaks.size > 1 else None
    second_peak = float(values[peaks[1]]) if peaks.size > 1 else None
    first_peak = float(values[first])
    efficiency = (
        (first_peak - residual) / first_peak
        if residual is not None and first_peak > 0
        else None
    )
    index = int(np.argmax(values))
    return CycleReport(
        peak_value=float(values[index]),
        peak_time=float(times[index]),
        residual=residual,
        period_estimate=period,
        drift=drift,
        first_peak=first_peak,
        second_peak=second_peak,
        efficiency=efficiency,
        **power_stats,
    )
