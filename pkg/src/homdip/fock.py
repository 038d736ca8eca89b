"""Truncated two-mode Fock space: basis bookkeeping, ladder operators, validity checks.

The two modes are the spatially separated ports A and B. Basis states are
occupation pairs |n_A, n_B> with 0 <= n <= n_max per port, indexed row-major
in (n_A, n_B); that ordering is the serialization contract for every matrix
in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantError
from .settings import ToleranceSettings, tolerances

PORT_A = "A"
PORT_B = "B"
PORTS = (PORT_A, PORT_B)


def _check_port(port: str) -> str:
    if port not in PORTS:
        raise ValueError(f"port must be 'A' or 'B', got {port!r}")
    return port


@dataclass(frozen=True)
class TwoModeBasis:
    """Occupation-number basis for two ports, truncated at n_max photons per port."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 2:
            raise ValueError(f"n_max must be >= 2, got {self.n_max}")

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** 2

    def index(self, n_a: int, n_b: int) -> int:
        """Linear index of |n_a, n_b>, row-major in (n_a, n_b)."""
        if not (0 <= n_a <= self.n_max and 0 <= n_b <= self.n_max):
            raise IndexError(
                f"occupation ({n_a}, {n_b}) out of range for n_max={self.n_max}"
            )
        return n_a * (self.n_max + 1) + n_b

    def occupations(self, index: int) -> tuple[int, int]:
        """Inverse of `index`."""
        if not 0 <= index < self.dim:
            raise IndexError(f"index {index} out of range for dim={self.dim}")
        return divmod(index, self.n_max + 1)

    def labels(self) -> list[tuple[int, int]]:
        return [self.occupations(i) for i in range(self.dim)]

    def total_photons(self) -> np.ndarray:
        """Vector of n_a + n_b per basis index."""
        n = np.arange(self.n_max + 1)
        return (n[:, None] + n[None, :]).reshape(self.dim)


def basis_index(basis: TwoModeBasis, n_a: int, n_b: int) -> int:
    return basis.index(n_a, n_b)


@dataclass(frozen=True)
class PureState:
    """State vector over a TwoModeBasis."""

    basis: TwoModeBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitudes must have shape ({self.basis.dim},), got {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "PureState":
        n = self.norm()
        if n == 0.0:
            raise InvariantError("cannot normalize the zero vector")
        return PureState(self.basis, self.amplitudes / n)

    def to_density(self) -> "DensityOperator":
        return pure_to_density(self)


@dataclass(frozen=True)
class DensityOperator:
    """Density matrix over a TwoModeBasis.

    Construction is permissive; use `validate` / `ensure_valid` to check the
    Hermiticity, unit-trace and positivity invariants.
    """

    basis: TwoModeBasis
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"matrix must be {self.basis.dim}x{self.basis.dim}, got {mat.shape}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def fock_ket(basis: TwoModeBasis, n_a: int, n_b: int) -> PureState:
    """The basis state |n_a, n_b>."""
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index(n_a, n_b)] = 1.0
    return PureState(basis, amps)


def creation_matrix(basis: TwoModeBasis, port: str) -> np.ndarray:
    """Matrix of the creation operator on one port, truncated at n_max.

    Maps |n> -> sqrt(n+1)|n+1> on the chosen port and annihilates the
    component at n = n_max (occupations never leave the basis).
    """
    _check_port(port)
    dim = basis.dim
    op = np.zeros((dim, dim), dtype=complex)
    for n_a in range(basis.n_max + 1):
        for n_b in range(basis.n_max + 1):
            if port == PORT_A and n_a < basis.n_max:
                op[basis.index(n_a + 1, n_b), basis.index(n_a, n_b)] = np.sqrt(n_a + 1)
            elif port == PORT_B and n_b < basis.n_max:
                op[basis.index(n_a, n_b + 1), basis.index(n_a, n_b)] = np.sqrt(n_b + 1)
    return op


def annihilation_matrix(basis: TwoModeBasis, port: str) -> np.ndarray:
    """Adjoint of `creation_matrix`."""
    return creation_matrix(basis, port).conj().T


def pure_to_density(psi: PureState, settings: ToleranceSettings | None = None) -> DensityOperator:
    """Rank-one projector |psi><psi| for a normalized input."""
    tol = (settings or tolerances()).normalization
    if abs(psi.norm() - 1.0) > tol:
        raise InvariantError(
            f"pure state norm {psi.norm()!r} deviates from 1 beyond {tol}; "
            "call normalize() first"
        )
    return DensityOperator(psi.basis, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def pair_coherence(rho: DensityOperator) -> complex:
    """The coherence <0,2|rho|2,0> that drives all entanglement criteria."""
    b = rho.basis
    return complex(rho.matrix[b.index(0, 2), b.index(2, 0)])


@dataclass(frozen=True)
class ValidationReport:
    """Deviations of a density matrix from Hermitian / trace-one / PSD form."""

    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    hermitian: bool
    unit_trace: bool
    positive: bool

    @property
    def ok(self) -> bool:
        return self.hermitian and self.unit_trace and self.positive


def validate_matrix(matrix: np.ndarray, settings: ToleranceSettings | None = None) -> ValidationReport:
    """Diagnostic checks on a raw square matrix; never raises."""
    tol = (settings or tolerances()).validity
    herm_dev = float(np.abs(matrix - matrix.conj().T).max())
    trace_dev = float(abs(np.trace(matrix) - 1.0))
    eigs = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2.0)
    min_eig = float(eigs.min())
    return ValidationReport(
        hermiticity_deviation=herm_dev,
        trace_deviation=trace_dev,
        min_eigenvalue=min_eig,
        hermitian=herm_dev <= tol,
        unit_trace=trace_dev <= tol,
        positive=min_eig >= -tol,
    )


def validate(rho: DensityOperator, settings: ToleranceSettings | None = None) -> ValidationReport:
    return validate_matrix(rho.matrix, settings)


def ensure_valid(rho: DensityOperator, settings: ToleranceSettings | None = None) -> None:
    """Raise InvariantError when `rho` fails any validity check."""
    report = validate(rho, settings)
    if not report.ok:
        raise InvariantError(
            "density operator fails validity checks: "
            f"hermiticity dev {report.hermiticity_deviation:.3e}, "
            f"trace dev {report.trace_deviation:.3e}, "
            f"min eigenvalue {report.min_eigenvalue:.3e}"
        )


def embedded(rho: DensityOperator, basis: TwoModeBasis) -> DensityOperator:
    """The same state on a larger basis (occupations preserved)."""
    if basis.n_max < rho.basis.n_max:
        raise ValueError(
            f"target n_max={basis.n_max} smaller than source n_max={rho.basis.n_max}"
        )
    src = rho.basis
    idx = np.array([basis.index(*src.occupations(i)) for i in range(src.dim)])
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    out[np.ix_(idx, idx)] = rho.matrix
    return DensityOperator(basis, out)
