"""Internal-mode (color / polarization) extension of the two-port simulator.

Photons keep a spatial port label (A or B) plus an internal mode index k.
The basis is truncated by *total* photon number across everything, which
makes the beamsplitter exactly unitary on the whole space: it conserves the
photon number of every internal mode separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import comb, factorial, sqrt

import numpy as np

from .fock import PORT_A, DensityOperator, ValidationReport, _check_port, validate_matrix
from .optics import BeamSplitterParams, CountDistribution
from .settings import ToleranceSettings, tolerances
from .verify import CriterionKind, CriterionReport, _report

Occupation = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class MultiModeBasis:
    """Occupation basis over ports {A, B} and `modes` internal modes.

    Elements are pairs (n_A, n_B) of per-mode occupation tuples with the
    total photon number bounded by n_max_total; ordering is lexicographic in
    the concatenated occupations, which is the serialization contract.
    """

    modes: int
    n_max_total: int

    def __post_init__(self) -> None:
        if self.modes < 1:
            raise ValueError(f"modes must be >= 1, got {self.modes}")
        if self.n_max_total < 2:
            raise ValueError(f"n_max_total must be >= 2, got {self.n_max_total}")

    @cached_property
    def elements(self) -> tuple[Occupation, ...]:
        cap = self.n_max_total
        out = []
        for occ in product(range(cap + 1), repeat=2 * self.modes):
            if sum(occ) <= cap:
                out.append((occ[: self.modes], occ[self.modes :]))
        return tuple(out)

    @cached_property
    def _index_of(self) -> dict[Occupation, int]:
        return {occ: i for i, occ in enumerate(self.elements)}

    @property
    def dim(self) -> int:
        return len(self.elements)

    def index(self, n_a: tuple[int, ...], n_b: tuple[int, ...]) -> int:
        key = (tuple(n_a), tuple(n_b))
        try:
            return self._index_of[key]
        except KeyError:
            raise IndexError(
                f"occupation {key} not in basis (modes={self.modes}, "
                f"n_max_total={self.n_max_total})"
            ) from None

    def occupations(self, index: int) -> Occupation:
        return self.elements[index]

    def port_totals(self) -> np.ndarray:
        """(dim, 2) array of photon totals in ports A and B per element."""
        return np.array([[sum(a), sum(b)] for a, b in self.elements])

    def combined_mode_occupations(self) -> np.ndarray:
        """(dim, modes) array of n_A[k] + n_B[k] per element."""
        return np.array([[a[k] + b[k] for k in range(self.modes)] for a, b in self.elements])

    def single_mode_flags(self) -> np.ndarray:
        """True where all photons of the element sit in one internal mode.

        The vacuum counts as single-mode. These are exactly the components
        that show inverse Hong-Ou-Mandel interference on the beamsplitter.
        """
        combined = self.combined_mode_occupations()
        return (combined > 0).sum(axis=1) <= 1


@dataclass(frozen=True)
class MultiModeDensity:
    """Density matrix over a MultiModeBasis."""

    basis: MultiModeBasis
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(
                f"matrix must be {self.basis.dim}x{self.basis.dim}, got {mat.shape}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def mm_validate(rho: MultiModeDensity, settings: ToleranceSettings | None = None) -> ValidationReport:
    return validate_matrix(rho.matrix, settings)


def mm_vacuum_vector(basis: MultiModeBasis) -> np.ndarray:
    vec = np.zeros(basis.dim, dtype=complex)
    vec[basis.index((0,) * basis.modes, (0,) * basis.modes)] = 1.0
    return vec


def mm_creation_matrix(basis: MultiModeBasis, port: str, mode: int) -> np.ndarray:
    """Creation operator for one (port, internal mode) slot.

    Components that would exceed n_max_total in total are annihilated.
    """
    _check_port(port)
    if not 0 <= mode < basis.modes:
        raise ValueError(f"mode {mode} out of range for modes={basis.modes}")
    op = np.zeros((basis.dim, basis.dim), dtype=complex)
    for i, (n_a, n_b) in enumerate(basis.elements):
        if sum(n_a) + sum(n_b) >= basis.n_max_total:
            continue
        if port == PORT_A:
            target = (n_a[:mode] + (n_a[mode] + 1,) + n_a[mode + 1 :], n_b)
            amp = sqrt(n_a[mode] + 1)
        else:
            target = (n_a, n_b[:mode] + (n_b[mode] + 1,) + n_b[mode + 1 :])
            amp = sqrt(n_b[mode] + 1)
        op[basis.index(*target), i] = amp
    return op


def mm_beamsplitter_unitary(basis: MultiModeBasis, params: BeamSplitterParams) -> np.ndarray:
    """Beamsplitter acting identically and independently on every internal mode.

    Same monomial construction as the single-mode splitter, applied per
    internal mode; total photons per mode are conserved, so the map is
    exactly unitary on the total-truncated basis with no leakage.
    """
    r, t = params.r, params.t
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for col, (n_a, n_b) in enumerate(basis.elements):
        norm = 1.0
        for k in range(basis.modes):
            norm *= factorial(n_a[k]) * factorial(n_b[k])
        # Per mode k, choose how many photons of each input factor go to the
        # new A port; the rest go to the new B port.
        choices_per_mode = [
            [(j, l) for j in range(n_a[k] + 1) for l in range(n_b[k] + 1)]
            for k in range(basis.modes)
        ]
        for combo in product(*choices_per_mode):
            amp = 1.0
            out_a, out_b = [], []
            for k, (j, l) in enumerate(combo):
                amp *= (
                    comb(n_a[k], j)
                    * comb(n_b[k], l)
                    * r**j
                    * t ** (n_a[k] - j)
                    * t**l
                    * (-r) ** (n_b[k] - l)
                )
                a_k = j + l
                b_k = n_a[k] + n_b[k] - j - l
                out_a.append(a_k)
                out_b.append(b_k)
                amp *= sqrt(factorial(a_k) * factorial(b_k))
            out[basis.index(tuple(out_a), tuple(out_b)), col] += amp / sqrt(norm)
    return out


def mm_beamsplitter(rho: MultiModeDensity, params: BeamSplitterParams | None = None) -> MultiModeDensity:
    params = params or BeamSplitterParams.balanced()
    unitary = mm_beamsplitter_unitary(rho.basis, params)
    return MultiModeDensity(rho.basis, unitary @ rho.matrix @ unitary.conj().T)


def mm_count_distribution(rho: MultiModeDensity) -> CountDistribution:
    """Joint counts per spatial port with colors summed (color-blind detectors)."""
    side = rho.basis.n_max_total + 1
    table = np.zeros((side, side))
    totals = rho.basis.port_totals()
    diag = np.real(np.diag(rho.matrix))
    for (i, j), prob in zip(totals, diag):
        table[i, j] += prob
    return CountDistribution(table)


def off_color_p11(rho: MultiModeDensity) -> float:
    """Probability of one photon per port with the two in different internal modes."""
    total = 0.0
    diag = np.real(np.diag(rho.matrix))
    for i, (n_a, n_b) in enumerate(rho.basis.elements):
        if sum(n_a) != 1 or sum(n_b) != 1:
            continue
        if n_a.index(1) != n_b.index(1):
            total += diag[i]
    return float(total)


def criterion_conservative(
    p: CountDistribution,
    q: CountDistribution,
    p2: float,
    variant: str = "printed",
) -> CriterionReport:
    """Color-blind criterion that over-corrects for off-color contamination.

    `p2` is the total probability of detecting exactly two photons; it upper
    bounds the off-color two-photon probability, keeping everything
    measurable without color resolution. Variants:

    - "printed": proxy = max[Q11 - P11 - p2/2, 0]
    - "textual": proxy = max[Q11 - (P20 + P02)/2 - (3/2) P11, 0]

    Both subtract at least the worst-case off-color contribution of
    3/2 * (off-color P11); they coincide when p2 = P20 + P02 + P11.
    """
    if not 0.0 <= p2 <= 1.0:
        raise ValueError(f"p2 must be a probability, got {p2}")
    if variant == "printed":
        proxy = max(q.p(1, 1) - p.p(1, 1) - p2 / 2.0, 0.0)
    elif variant == "textual":
        proxy = max(q.p(1, 1) - (p.p(2, 0) + p.p(0, 2)) / 2.0 - 1.5 * p.p(1, 1), 0.0)
    else:
        raise ValueError(f"variant must be 'printed' or 'textual', got {variant!r}")
    return _report(
        CriterionKind.CONSERVATIVE,
        p0=p.p(0, 0),
        p02=p.p(0, 2),
        p20=p.p(2, 0),
        p22=p.p(2, 2),
        p11=p.p(1, 1),
        q11=q.p(1, 1),
        proxy=proxy,
    )


def mode_identity_check(
    basis: MultiModeBasis,
    mode_pair: tuple[int, int] = (0, 1),
    relative_phase: complex = 1.0,
) -> float:
    """Norm of a1_dag a2_dag |vac> minus [(a+_dag)^2 - (a-_dag)^2]/2 |vac>.

    With a_pm = (a1 pm a2)/sqrt(2) the difference vanishes identically; this
    is the obstruction to any local filter for "both photons in the same
    internal mode" (a two-photon different-mode state *is* a superposition of
    same-mode states). A relative phase other than 1 in a_pm breaks the
    identity, showing it is basis-specific.
    """
    if basis.modes < 2:
        raise ValueError("identity needs at least two internal modes")
    k1, k2 = mode_pair
    a1 = mm_creation_matrix(basis, PORT_A, k1)
    a2 = mm_creation_matrix(basis, PORT_A, k2)
    vac = mm_vacuum_vector(basis)
    lhs = a1 @ a2 @ vac
    a_plus = (a1 + relative_phase * a2) / sqrt(2.0)
    a_minus = (a1 - relative_phase * a2) / sqrt(2.0)
    rhs = (a_plus @ a_plus - a_minus @ a_minus) @ vac / 2.0
    return float(np.linalg.norm(lhs - rhs))


def pairwise_dephase(
    rho: MultiModeDensity,
) -> tuple[float, MultiModeDensity, MultiModeDensity]:
    """Random per-internal-mode phase twirl and same-mode / cross-mode split.

    A random phase applied to internal mode k (in both ports, then forgotten)
    destroys coherence between components whose combined occupation
    n_A[k] + n_B[k] differs for any k. The twirled state is block diagonal
    between elements whose photons all share one internal mode (these show
    inverse Hong-Ou-Mandel interference) and the rest, so it splits as

        twirled = p_s * rho_s + (1 - p_s) * rho_perp

    with p_s the same-mode trace weight. Returns (p_s, rho_s, rho_perp);
    a zero-weight part comes back as an empty (all-zero) operator.
    """
    basis = rho.basis
    combined = basis.combined_mode_occupations()
    keep = (combined[:, None, :] == combined[None, :, :]).all(axis=2)
    twirled = rho.matrix * keep
    same = basis.single_mode_flags()
    mask_s = np.outer(same, same)
    mask_perp = np.outer(~same, ~same)
    block_s = twirled * mask_s
    block_perp = twirled * mask_perp
    p_s = float(np.real(np.trace(block_s)))
    tol = tolerances().validity
    rho_s = MultiModeDensity(basis, block_s / p_s if p_s > tol else np.zeros_like(twirled))
    weight_perp = 1.0 - p_s
    rho_perp = MultiModeDensity(
        basis, block_perp / weight_perp if weight_perp > tol else np.zeros_like(twirled)
    )
    return p_s, rho_s, rho_perp


def embed_density(
    rho: DensityOperator,
    basis: MultiModeBasis,
    mode: int = 0,
) -> MultiModeDensity:
    """Lift a single-mode two-port state into a multimode basis.

    All photons land in internal mode `mode`. Support on total photon
    numbers above n_max_total cannot be represented and raises ValueError.
    """
    if not 0 <= mode < basis.modes:
        raise ValueError(f"mode {mode} out of range for modes={basis.modes}")
    src = rho.basis
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    index = []
    for i in range(src.dim):
        n_a, n_b = src.occupations(i)
        if n_a + n_b > basis.n_max_total:
            mass = abs(rho.matrix[i, i])
            if mass > tolerances().validity:
                raise ValueError(
                    f"state has weight {mass:.3e} on |{n_a},{n_b}> with total "
                    f"{n_a + n_b} > n_max_total={basis.n_max_total}"
                )
            index.append(None)
            continue
        occ_a = tuple(n_a if k == mode else 0 for k in range(basis.modes))
        occ_b = tuple(n_b if k == mode else 0 for k in range(basis.modes))
        index.append(basis.index(occ_a, occ_b))
    for i, target_i in enumerate(index):
        if target_i is None:
            continue
        for j, target_j in enumerate(index):
            if target_j is None:
                continue
            out[target_i, target_j] = rho.matrix[i, j]
    return MultiModeDensity(basis, out)
