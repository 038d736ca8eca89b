"""Named reference states and seeded random-state families.

All generators take an explicit numpy Generator so batches are reproducible;
the PRNG identifier recorded in dataset metadata is `PRNG_ID`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .fock import DensityOperator, PureState, TwoModeBasis, pure_to_density
from .multimode import MultiModeBasis, MultiModeDensity

PRNG_ID = "numpy-pcg64"

# Sampling ranges for the separable families; chosen to populate criterion
# values in roughly [0, 0.25] and recorded in every dataset's metadata.
BOUNDARY_COEFF_RANGE = (0.0, 3.0)
MIXTURE_MODULUS_RANGE = (0.0, 1.5)

NAMED_STATE_IDS = ("hom", "rho1", "rho2", "worst2color")

DEFAULT_N_MAX = 4


def hom_state(n_max: int = DEFAULT_N_MAX) -> PureState:
    """The delocalized bi-photon (|0,2> - |2,0>)/sqrt(2)."""
    basis = TwoModeBasis(n_max)
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index(0, 2)] = 1.0 / sqrt(2.0)
    amps[basis.index(2, 0)] = -1.0 / sqrt(2.0)
    return PureState(basis, amps)


def _biphoton_mixture(w_vac: float, w_pair: float, w_four: float, n_max: int) -> DensityOperator:
    """w_vac |00><00| + w_pair (|20>+i|02>)(<20|-i<02|) + w_four |22><22|."""
    basis = TwoModeBasis(n_max)
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    mat[basis.index(0, 0), basis.index(0, 0)] = w_vac
    vec = np.zeros(basis.dim, dtype=complex)
    vec[basis.index(2, 0)] = 1.0
    vec[basis.index(0, 2)] = 1j
    mat += w_pair * np.outer(vec, vec.conj())
    mat[basis.index(2, 2), basis.index(2, 2)] = w_four
    return DensityOperator(basis, mat)


def rho1(n_max: int = DEFAULT_N_MAX) -> DensityOperator:
    """Noisy bi-photon mixture with weights (1/6, 1/3, 1/6); d = i/3."""
    return _biphoton_mixture(1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0, n_max)


def rho2(n_max: int = DEFAULT_N_MAX) -> DensityOperator:
    """More noisy variant with weights (1/3, 1/4, 1/6); d = i/4."""
    return _biphoton_mixture(1.0 / 3.0, 1.0 / 4.0, 1.0 / 6.0, n_max)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model around the ideal bi-photon state.

    p_vacuum / p_four: weights mixed onto |00><00| and |22><22|.
    dephase: factor in [0, 1] scaling the pair coherence.
    phase: phase-shifter angle applied to port A in the component convention,
        i.e. the coherence becomes -(dephase/2) * exp(-i*phase).
    """

    p_vacuum: float = 0.0
    p_four: float = 0.0
    dephase: float = 1.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.p_vacuum < 0.0 or self.p_four < 0.0:
            raise ValueError("noise weights must be nonnegative")
        if self.p_vacuum + self.p_four > 1.0:
            raise ValueError("p_vacuum + p_four must not exceed 1")
        if not 0.0 <= self.dephase <= 1.0:
            raise ValueError(f"dephase must lie in [0, 1], got {self.dephase}")


def noisy_hom(spec: NoiseSpec, n_max: int = DEFAULT_N_MAX) -> DensityOperator:
    """Ideal bi-photon state with vacuum/four-photon admixture and dephasing."""
    basis = TwoModeBasis(n_max)
    w_mid = 1.0 - spec.p_vacuum - spec.p_four
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    i02, i20 = basis.index(0, 2), basis.index(2, 0)
    d_mid = -0.5 * spec.dephase * np.exp(-1j * spec.phase)
    mat[i02, i02] = 0.5 * w_mid
    mat[i20, i20] = 0.5 * w_mid
    mat[i02, i20] = w_mid * d_mid
    mat[i20, i02] = w_mid * np.conj(d_mid)
    mat[basis.index(0, 0), basis.index(0, 0)] = spec.p_vacuum
    mat[basis.index(2, 2), basis.index(2, 2)] = spec.p_four
    return DensityOperator(basis, mat)


def separable_boundary_state(a: float, b: float, n_max: int = DEFAULT_N_MAX) -> PureState:
    """Normalized (|0> + a|2>) x (|0> + b|2>) with real a, b.

    These products sit exactly on the boundary of the count criterion:
    left- and right-hand sides coincide.
    """
    basis = TwoModeBasis(n_max)
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index(0, 0)] = 1.0
    amps[basis.index(0, 2)] = b
    amps[basis.index(2, 0)] = a
    amps[basis.index(2, 2)] = a * b
    return PureState(basis, amps).normalize()


def random_separable_boundary(rng: np.random.Generator, n_max: int = DEFAULT_N_MAX) -> PureState:
    lo, hi = BOUNDARY_COEFF_RANGE
    a, b = rng.uniform(lo, hi, size=2)
    return separable_boundary_state(float(a), float(b), n_max)


def product_state(
    coeffs_a: tuple[complex, complex, complex],
    coeffs_b: tuple[complex, complex, complex],
    n_max: int = DEFAULT_N_MAX,
) -> PureState:
    """Normalized product of per-port superpositions over |0>, |1>, |2>."""
    basis = TwoModeBasis(n_max)
    amps = np.zeros(basis.dim, dtype=complex)
    for i, u in enumerate(coeffs_a):
        for j, v in enumerate(coeffs_b):
            amps[basis.index(i, j)] = u * v
    return PureState(basis, amps).normalize()


def _random_port_coeffs(rng: np.random.Generator) -> tuple[complex, complex, complex]:
    lo, hi = MIXTURE_MODULUS_RANGE
    moduli = rng.uniform(lo, hi, size=2)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
    c1, c2 = moduli * np.exp(1j * phases)
    return (1.0 + 0.0j, complex(c1), complex(c2))


def random_separable_mixture(rng: np.random.Generator, n_max: int = DEFAULT_N_MAX) -> DensityOperator:
    """Convex mixture of two random complex product states."""
    first = pure_to_density(product_state(_random_port_coeffs(rng), _random_port_coeffs(rng), n_max))
    second = pure_to_density(product_state(_random_port_coeffs(rng), _random_port_coeffs(rng), n_max))
    weight = float(rng.uniform(0.0, 1.0))
    basis = first.basis
    return DensityOperator(basis, weight * first.matrix + (1.0 - weight) * second.matrix)


def worst_case_two_color(n_max_total: int = DEFAULT_N_MAX) -> MultiModeDensity:
    """Two-color product (one red photon) x (one blue photon), delocalized.

    (|10>_red + |01>_red)(|10>_blue - |01>_blue)/2: the state that, through
    the beamsplitter, mimics inverse Hong-Ou-Mandel counts (Q11 = 1) while
    carrying none of the targeted same-mode bi-photon entanglement.
    """
    basis = MultiModeBasis(modes=2, n_max_total=n_max_total)
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index((1, 1), (0, 0))] = 0.5
    amps[basis.index((1, 0), (0, 1))] = -0.5
    amps[basis.index((0, 1), (1, 0))] = 0.5
    amps[basis.index((0, 0), (1, 1))] = -0.5
    return MultiModeDensity(basis, np.outer(amps, amps.conj()))


def named_state(name: str, n_max: int = DEFAULT_N_MAX) -> DensityOperator | MultiModeDensity:
    """Resolve a state id from `NAMED_STATE_IDS`."""
    if name == "hom":
        return pure_to_density(hom_state(n_max))
    if name == "rho1":
        return rho1(n_max)
    if name == "rho2":
        return rho2(n_max)
    if name == "worst2color":
        return worst_case_two_color(n_max)
    raise KeyError(f"unknown state id {name!r}; known ids: {', '.join(NAMED_STATE_IDS)}")
