"""Single-site Pauli operators and their embedding into the n-qubit space.

Basis convention: index b in [0, 2**n) encodes qubit k (1-based, qubit 1 is
the most significant bit) in bit n - k of b, with bit value 0 the uncharged
local state. In the (uncharged, charged) ordering the local Z matrix is
diag(-1, +1), so the all-uncharged state |0...0> has the lowest battery
energy.
"""

from enum import StrEnum

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from spinbattery.config.config import HERMITIAN_TOL
from spinbattery.errors import DomainError

type OperatorMatrix = npt.NDArray[np.complex128]
type SparseOperator = sp.csr_array
type Operator = OperatorMatrix | SparseOperator


class PauliAxis(StrEnum):
    """Axis of a Pauli operator."""

    X = "X"
    Y = "Y"
    Z = "Z"


_PAULI = {
    PauliAxis.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    PauliAxis.Y: np.array([[0, 1j], [-1j, 0]], dtype=np.complex128),
    PauliAxis.Z: np.array([[-1, 0], [0, 1]], dtype=np.complex128),
}
for _matrix in _PAULI.values():
    _matrix.flags.writeable = False


def local_pauli(axis: PauliAxis) -> OperatorMatrix:
    """Return the 2x2 Pauli matrix for `axis` in the (uncharged, charged) basis."""
    return _PAULI[PauliAxis(axis)].copy()


def _check_site(site: int, n: int) -> None:
    if n < 1:
        raise DomainError(f"Qubit count must be at least 1, got {n}")
    if not 1 <= site <= n:
        raise DomainError(f"Site {site} outside [1, {n}]")


def _kron_chain(factors: dict[int, OperatorMatrix], n: int) -> SparseOperator:
    """Kronecker product with `factors[site]` at each listed site, identity elsewhere.

    Runs of identity factors collapse into a single sparse identity block.
    """
    result = sp.eye_array(1, dtype=np.complex128, format="csr")
    previous = 0
    for site in sorted(factors):
        gap = site - previous - 1
        if gap:
            result = sp.kron(result, sp.eye_array(2**gap, dtype=np.complex128))
        result = sp.kron(result, sp.csr_array(factors[site]))
        previous = site
    if n > previous:
        result = sp.kron(result, sp.eye_array(2 ** (n - previous), dtype=np.complex128))
    return sp.csr_array(result)


def embed_sparse(axis: PauliAxis, site: int, n: int) -> SparseOperator:
    """Sparse form of `embed`."""
    _check_site(site, n)
    return _kron_chain({site: _PAULI[PauliAxis(axis)]}, n)


def embed(axis: PauliAxis, site: int, n: int) -> OperatorMatrix:
    """Embed the Pauli operator `axis` at `site` (1-based) into an n-qubit space."""
    return embed_sparse(axis, site, n).toarray()


def two_site_term_sparse(
    axis_a: PauliAxis, axis_b: PauliAxis, i: int, j: int, n: int
) -> SparseOperator:
    """Sparse form of `two_site_term`."""
    _check_site(i, n)
    _check_site(j, n)
    if i == j:
        raise DomainError(f"Two-site term needs distinct sites, got i = j = {i}")
    return _kron_chain({i: _PAULI[PauliAxis(axis_a)], j: _PAULI[PauliAxis(axis_b)]}, n)


def two_site_term(
    axis_a: PauliAxis, axis_b: PauliAxis, i: int, j: int, n: int
) -> OperatorMatrix:
    """Product embed(axis_a, i, n) @ embed(axis_b, j, n) for distinct sites."""
    return two_site_term_sparse(axis_a, axis_b, i, j, n).toarray()


def qubit_count(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension; rejects non-powers of two."""
    if dim < 2 or dim & (dim - 1):
        raise DomainError(f"Dimension {dim} is not a power of two >= 2")
    return dim.bit_length() - 1


def is_hermitian(matrix: Operator, tol: float = HERMITIAN_TOL) -> bool:
    """Check max|H - H^dagger| <= tol."""
    if sp.issparse(matrix):
        diff = matrix - matrix.conj().T
        return diff.nnz == 0 or float(np.abs(diff.data).max()) <= tol
    return float(np.abs(matrix - matrix.conj().T).max(initial=0.0)) <= tol
