"""Linear-optical elements as exact unitaries, and photon-counting statistics.

The beamsplitter convention is the real reflection/transmission pair (r, t):

    a_dag -> r c_dag + t d_dag        b_dag -> t c_dag - r d_dag

with the pi/2 reflection phase absorbed into the output mode, so all matrix
elements are real. The map is an involution (applying it twice restores the
input), which is used freely below.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb, factorial, sqrt

import numpy as np

from .exceptions import InvariantError, TruncationError
from .fock import PORT_A, DensityOperator, TwoModeBasis, _check_port
from .settings import tolerances


@dataclass(frozen=True)
class BeamSplitterParams:
    """Real reflection/transmission pair with r^2 + t^2 = 1 and r in (0, 1)."""

    r: float
    t: float

    def __post_init__(self) -> None:
        if not (0.0 < self.r < 1.0):
            raise ValueError(
                f"degenerate beamsplitter: r must lie strictly in (0, 1), got {self.r}"
            )
        if abs(self.r**2 + self.t**2 - 1.0) > tolerances().normalization:
            raise ValueError(
                f"r^2 + t^2 = {self.r ** 2 + self.t ** 2!r} deviates from 1"
            )

    @staticmethod
    def balanced() -> "BeamSplitterParams":
        s = 1.0 / sqrt(2.0)
        return BeamSplitterParams(s, s)

    @classmethod
    def from_reflectivity(cls, r: float) -> "BeamSplitterParams":
        return cls(r, sqrt(1.0 - r * r))


class PhaseConvention(Enum):
    """How a phase-shifter angle phi acts on one port.

    PER_PHOTON: each photon picks up exp(i*phi), so |n> gets exp(i*n*phi).
    PER_FOCK_COMPONENT: the |2> component gets exp(i*phi) and |1> gets
        exp(i*phi/2), i.e. PER_PHOTON at phi/2. This is the convention under
        which the phase-scan detection windows match the reference curves.
    """

    PER_PHOTON = "per-photon"
    PER_FOCK_COMPONENT = "per-component"


@dataclass(frozen=True)
class CountDistribution:
    """Joint photon-count table P[i][j] for the two ports.

    Tiny negative entries from floating-point noise are clipped to zero and
    the table renormalized; anything worse raises InvariantError.
    """

    table: np.ndarray

    def __post_init__(self) -> None:
        tol = tolerances()
        table = np.array(self.table, dtype=float)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError(f"count table must be square, got shape {table.shape}")
        if table.min() < -tol.normalization:
            raise InvariantError(
                f"count table has negative entry {table.min():.3e}"
            )
        table = table.clip(min=0.0)
        total = table.sum()
        if abs(total - 1.0) > tol.validity:
            raise InvariantError(
                f"count table sums to {total!r}, expected 1 within {tol.validity}"
            )
        table /= total
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def n_max(self) -> int:
        return self.table.shape[0] - 1

    def p(self, i: int, j: int) -> float:
        if not (0 <= i <= self.n_max and 0 <= j <= self.n_max):
            raise IndexError(f"counts ({i}, {j}) out of range for n_max={self.n_max}")
        return float(self.table[i, j])

    def total_photon_probability(self, n: int) -> float:
        """Probability of n photons in total across both ports."""
        i, j = np.indices(self.table.shape)
        return float(self.table[i + j == n].sum())

    def to_csv(self) -> str:
        """Sparse CSV with header i,j,p; one row per nonzero entry."""
        lines = ["i,j,p"]
        for i in range(self.table.shape[0]):
            for j in range(self.table.shape[1]):
                if self.table[i, j] != 0.0:
                    lines.append(f"{i},{j},{self.table[i, j]:.17g}")
        return "\n".join(lines) + "\n"


def beamsplitter_unitary(basis: TwoModeBasis, params: BeamSplitterParams) -> np.ndarray:
    """Exact beamsplitter unitary on the truncated basis.

    Built block-by-block in total photon number by transforming creation
    operator monomials (binomial expansion, integer-exact coefficients under
    square roots); no matrix exponential is involved. Sectors with total
    photon number above n_max cannot be represented completely in the
    truncated basis, so the unitary acts as the identity there; workflows
    must keep total photons <= n_max for physically meaningful output (see
    `q_distribution`, which enforces this).
    """
    r, t = params.r, params.t
    dim = basis.dim
    out = np.zeros((dim, dim), dtype=complex)
    for m in range(basis.n_max + 1):
        for n in range(basis.n_max + 1):
            col = basis.index(m, n)
            if m + n > basis.n_max:
                out[col, col] = 1.0
                continue
            norm = sqrt(factorial(m) * factorial(n))
            for k in range(m + 1):
                for l in range(n + 1):
                    p, q = k + l, m + n - k - l
                    amp = (
                        comb(m, k)
                        * comb(n, l)
                        * r**k
                        * t ** (m - k)
                        * t**l
                        * (-r) ** (n - l)
                        * sqrt(factorial(p) * factorial(q))
                        / norm
                    )
                    out[basis.index(p, q), col] += amp
    return out


def apply_unitary(rho: DensityOperator, unitary: np.ndarray) -> DensityOperator:
    """U rho U_dag."""
    if unitary.shape != (rho.basis.dim, rho.basis.dim):
        raise ValueError(
            f"unitary shape {unitary.shape} does not match basis dim {rho.basis.dim}"
        )
    return DensityOperator(rho.basis, unitary @ rho.matrix @ unitary.conj().T)


def phase_shift(
    rho: DensityOperator,
    port: str,
    phi: float,
    convention: PhaseConvention = PhaseConvention.PER_FOCK_COMPONENT,
) -> DensityOperator:
    """Apply a phase shifter of angle phi to one port.

    Under PER_PHOTON the pair coherence <02|rho|20> rotates by exp(-2i*phi)
    (port A) and under PER_FOCK_COMPONENT by exp(-i*phi).
    """
    _check_port(port)
    basis = rho.basis
    per_photon = phi if convention is PhaseConvention.PER_PHOTON else phi / 2.0
    occ = np.array(basis.labels())
    n_port = occ[:, 0] if port == PORT_A else occ[:, 1]
    phases = np.exp(1j * per_photon * n_port)
    return DensityOperator(basis, phases[:, None] * rho.matrix * phases.conj()[None, :])


def count_distribution(rho: DensityOperator) -> CountDistribution:
    """P[i][j] = <i,j|rho|i,j>: joint counts at the input ports."""
    diag = np.real(np.diag(rho.matrix))
    side = rho.basis.n_max + 1
    return CountDistribution(diag.reshape(side, side))


def unsafe_sector_mass(rho: DensityOperator) -> float:
    """Probability mass on total photon numbers above n_max.

    Beamsplitter output is exact only on sectors the basis represents
    completely (total <= n_max), so this mass measures truncation risk.
    """
    totals = rho.basis.total_photons()
    diag = np.real(np.diag(rho.matrix))
    return float(diag[totals > rho.basis.n_max].sum())


def q_distribution(
    rho: DensityOperator,
    params: BeamSplitterParams | None = None,
) -> CountDistribution:
    """Joint counts after sending the state through a beamsplitter.

    Raises TruncationError when the state has support on total photon
    numbers above n_max, where the truncated transformation is not exact;
    enlarge the basis (n_max >= maximum total photons) first.
    """
    params = params or BeamSplitterParams.balanced()
    risk = unsafe_sector_mass(rho)
    if risk > tolerances().validity:
        raise TruncationError(
            f"state has probability {risk:.3e} on more than n_max={rho.basis.n_max} "
            "total photons; beamsplitter output would be truncated "
            "(re-embed the state with n_max >= its maximum total photon number)"
        )
    unitary = beamsplitter_unitary(rho.basis, params)
    return count_distribution(apply_unitary(rho, unitary))
