"""Entanglement verification core.

Local filtering onto the {|0>,|2>} x {|0>,|2>} subspace, the dephasing twirl
that leaves an X-form state, concurrence/negativity machinery for that 4x4
subspace, and the photon-counting entanglement criteria. All criteria share
the left-hand side P00*P22 and certify entanglement when it is strictly below
a right-hand side built from the pair coherence d = <02|rho|20> or from a
measurable proxy for its real part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from math import sqrt

import numpy as np

from .exceptions import InvariantError, TruncationError
from .fock import PORT_A, DensityOperator, pair_coherence, validate_matrix
from .optics import (
    BeamSplitterParams,
    CountDistribution,
    PhaseConvention,
    apply_unitary,
    beamsplitter_unitary,
    count_distribution,
    phase_shift,
    unsafe_sector_mass,
)
from .settings import tolerances

# Ordered occupation labels of the filtered subspace.
FILTER_LABELS = ((0, 0), (0, 2), (2, 0), (2, 2))


@dataclass(frozen=True)
class FilteredState:
    """Result of the local filter keeping only 0 or 2 photons per port.

    p_tilde: success probability of the filter.
    matrix4: filtered state, renormalized, in basis {|00>,|02>,|20>,|22>}.
    d: the pair coherence of the *unfiltered* state (filtering preserves it).
    """

    p_tilde: float
    matrix4: np.ndarray
    d: complex

    def __post_init__(self) -> None:
        mat = np.array(self.matrix4, dtype=complex)
        if mat.shape != (4, 4):
            raise ValueError(f"matrix4 must be 4x4, got {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix4", mat)

    def unnormalized_diagonal(self) -> np.ndarray:
        """The raw probabilities (P00, P02, P20, P22) before renormalization."""
        return self.p_tilde * np.real(np.diag(self.matrix4))


class CriterionKind(Enum):
    IDEAL_D = "ideal"
    MEASURED = "measured"
    ASYMMETRIC = "asymmetric"
    CONSERVATIVE = "conservative"


@dataclass(frozen=True)
class CriterionReport:
    """Everything a criterion evaluation measured and concluded."""

    criterion_kind: CriterionKind
    p0: float
    p02: float
    p20: float
    p22: float
    p11: float
    q11: float
    lhs: float
    rhs: float
    entangled: bool
    concurrence_lower_bound: float

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion_kind.value,
            "p0": self.p0,
            "p02": self.p02,
            "p20": self.p20,
            "p22": self.p22,
            "p11": self.p11,
            "q11": self.q11,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "entangled": self.entangled,
            "concurrence_lower_bound": self.concurrence_lower_bound,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _verdict(lhs: float, rhs: float) -> bool:
    # Strict inequality with a guard so rounding noise never flags entanglement.
    return lhs < rhs - tolerances().verdict_margin


def _report(
    kind: CriterionKind,
    p0: float,
    p02: float,
    p20: float,
    p22: float,
    p11: float,
    q11: float,
    proxy: float,
) -> CriterionReport:
    """Assemble a report from the common ingredients.

    `proxy` is the quantity whose square is the right-hand side; its absolute
    value also lower-bounds |d|, which yields the concurrence bound.
    """
    lhs = p0 * p22
    rhs = proxy * proxy
    bound = max(0.0, 2.0 * abs(proxy) - 2.0 * sqrt(lhs))
    return CriterionReport(
        criterion_kind=kind,
        p0=p0,
        p02=p02,
        p20=p20,
        p22=p22,
        p11=p11,
        q11=q11,
        lhs=lhs,
        rhs=rhs,
        entangled=_verdict(lhs, rhs),
        concurrence_lower_bound=bound,
    )


def filter_02(rho: DensityOperator) -> FilteredState:
    """Project onto the {|0>,|2>} x {|0>,|2>} subspace.

    The filter is local (per port) and succeeds with probability
    p_tilde = P00 + P02 + P20 + P22. None of the criteria require performing
    it physically; it exists so the filtered state's entanglement can be
    computed and compared against the count-based criteria.
    """
    basis = rho.basis
    if basis.n_max < 2:
        raise ValueError("filter requires n_max >= 2")
    sub = [basis.index(*lbl) for lbl in FILTER_LABELS]
    block = rho.matrix[np.ix_(sub, sub)]
    p_tilde = float(np.real(np.trace(block)))
    d = pair_coherence(rho)
    if p_tilde <= tolerances().validity:
        return FilteredState(p_tilde=0.0, matrix4=np.zeros((4, 4), dtype=complex), d=0j)
    return FilteredState(p_tilde=p_tilde, matrix4=block / p_tilde, d=d)


def number_twirl(fs: FilteredState) -> FilteredState:
    """Apply the same random phase to both ports and average.

    Coherence survives only between components with equal total photon
    number, which in the filtered subspace is the single (|02>, |20>) pair:
    the output is an X-form matrix with at most 6 nonzero entries.
    """
    totals = np.array([a + b for a, b in FILTER_LABELS])
    mask = totals[:, None] == totals[None, :]
    return FilteredState(fs.p_tilde, fs.matrix4 * mask, fs.d)


def concurrence_bound(fs: FilteredState) -> float:
    """Closed-form p_tilde * C(filtered, twirled state).

    Equals max[0, 2|d| - 2 sqrt(P00 * P22)] in unfiltered probabilities, and
    lower-bounds the concurrence of the original state because filtering and
    twirling are local operations.
    """
    diag = fs.unnormalized_diagonal()
    return max(0.0, 2.0 * abs(fs.d) - 2.0 * sqrt(diag[0] * diag[3]))


def wootters_concurrence(matrix4: np.ndarray) -> float:
    """Two-qubit concurrence via the spin-flipped spectrum.

    Independent oracle for `concurrence_bound`: the filtered subspace is a
    two-qubit space with |0>/|2> as the qubit levels. Uses the Hermitian form
    sqrt(rho) rho_tilde sqrt(rho) for numerical stability.
    """
    rho = np.asarray(matrix4, dtype=complex)
    report = validate_matrix(rho)
    if not report.ok:
        raise InvariantError(
            "concurrence needs a Hermitian PSD trace-one 4x4 matrix: "
            f"hermiticity dev {report.hermiticity_deviation:.3e}, "
            f"trace dev {report.trace_deviation:.3e}, "
            f"min eigenvalue {report.min_eigenvalue:.3e}"
        )
    sigma_y = np.array([[0.0, -1j], [1j, 0.0]])
    flip = np.kron(sigma_y, sigma_y)
    rho_tilde = flip @ rho.conj() @ flip
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2.0)
    sqrt_rho = (v * np.sqrt(w.clip(min=0.0))) @ v.conj().T
    lam = np.linalg.eigvalsh(sqrt_rho @ rho_tilde @ sqrt_rho)
    lam = np.sqrt(lam.clip(min=0.0))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def negativity(matrix4: np.ndarray) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over port B."""
    rho = np.asarray(matrix4, dtype=complex).reshape(2, 2, 2, 2)
    pt = rho.transpose(0, 3, 2, 1).reshape(4, 4)
    eigs = np.linalg.eigvalsh(pt)
    return float(-eigs[eigs < 0.0].sum())


def criterion_ideal_d(rho: DensityOperator) -> CriterionReport:
    """Criterion P00*P22 < |d|^2 with d read directly from the state.

    Diagnostic / simulation mode only: experiments cannot observe |d|
    directly, but a simulated density matrix can.
    """
    p = count_distribution(rho)
    d = pair_coherence(rho)
    q11_predicted = (p.p(2, 0) + p.p(0, 2)) / 2.0 - d.real
    report = _report(
        CriterionKind.IDEAL_D,
        p0=p.p(0, 0),
        p02=p.p(0, 2),
        p20=p.p(2, 0),
        p22=p.p(2, 2),
        p11=p.p(1, 1),
        q11=q11_predicted,
        proxy=abs(d),
    )
    return report


def criterion_measured(p: CountDistribution, q: CountDistribution) -> CriterionReport:
    """Criterion from count statistics only: the balanced-beamsplitter case.

    Q11 - (P20 + P02)/2 equals -Re(d) exactly for a balanced beamsplitter,
    so its square lower-bounds |d|^2 and P00*P22 < (that square) certifies
    entanglement.
    """
    proxy = q.p(1, 1) - (p.p(2, 0) + p.p(0, 2)) / 2.0
    return _report(
        CriterionKind.MEASURED,
        p0=p.p(0, 0),
        p02=p.p(0, 2),
        p20=p.p(2, 0),
        p22=p.p(2, 2),
        p11=p.p(1, 1),
        q11=q.p(1, 1),
        proxy=proxy,
    )


def criterion_asymmetric(
    p: CountDistribution,
    q: CountDistribution,
    params: BeamSplitterParams,
) -> CriterionReport:
    """Count-statistics criterion for an unbalanced beamsplitter (r != t).

    The proxy (Q11 + P11 (t^2 - r^2)) / (4 r^2 t^2) - (P20 + P02)/2 equals
    -Re(d) for states supported on {|00>,|02>,|20>,|22>}; at r = t it reduces
    to the balanced criterion for every state. Populations or coherences of
    |1,1> contaminate the proxy away from balance, so apply the local filter
    reasoning (or a balanced splitter) when those are present.
    """
    r2, t2 = params.r**2, params.t**2
    proxy = (q.p(1, 1) + p.p(1, 1) * (t2 - r2)) / (4.0 * r2 * t2) - (
        p.p(2, 0) + p.p(0, 2)
    ) / 2.0
    return _report(
        CriterionKind.ASYMMETRIC,
        p0=p.p(0, 0),
        p02=p.p(0, 2),
        p20=p.p(2, 0),
        p22=p.p(2, 2),
        p11=p.p(1, 1),
        q11=q.p(1, 1),
        proxy=proxy,
    )


@dataclass(frozen=True)
class PhaseScan:
    """Detection curve of the balanced count criterion vs. phase on port A."""

    phis: np.ndarray
    lhs: float
    rhs: np.ndarray
    detected: np.ndarray
    intervals: tuple[tuple[float, float], ...]
    phi_star: float
    convention: PhaseConvention

    def to_csv(self) -> str:
        lines = ["phi,lhs,rhs,detected"]
        for phi, rhs, det in zip(self.phis, self.rhs, self.detected):
            lines.append(f"{phi:.17g},{self.lhs:.17g},{rhs:.17g},{int(det)}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "points": int(self.phis.size),
            "convention": self.convention.value,
            "lhs": self.lhs,
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "phi_star": self.phi_star,
            "detected_fraction": float(self.detected.mean()),
        }


def _refine_crossing(evaluate, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Bisect a sign change of `evaluate` to within `tol` radians."""
    f_lo = evaluate(lo)
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        f_mid = evaluate(mid)
        if (f_lo > 0.0) == (f_mid > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def scan_phase(
    rho: DensityOperator,
    n_points: int,
    convention: PhaseConvention = PhaseConvention.PER_FOCK_COMPONENT,
) -> PhaseScan:
    """Sweep a phase shifter on port A over [0, 2pi) and evaluate detection.

    At each grid phase the state goes through a balanced beamsplitter and the
    count criterion is evaluated; interval endpoints are refined by bisection
    to 1e-6 rad. Intervals are reported as open (start, end) pairs in
    [0, 2pi); when detection is active across the 2pi -> 0 seam the first and
    last runs merge into a single wrapping interval with start > end.
    """
    if n_points < 8:
        raise ValueError(f"n_points must be >= 8, got {n_points}")
    margin = tolerances().verdict_margin
    risk = unsafe_sector_mass(rho)
    if risk > tolerances().validity:
        raise TruncationError(
            f"state has probability {risk:.3e} on more than n_max={rho.basis.n_max} "
            "total photons; enlarge the basis before scanning"
        )
    unitary = beamsplitter_unitary(rho.basis, BeamSplitterParams.balanced())
    p = count_distribution(rho)
    lhs = p.p(0, 0) * p.p(2, 2)

    def rhs_at(phi: float) -> float:
        shifted = phase_shift(rho, PORT_A, phi, convention)
        q = count_distribution(apply_unitary(shifted, unitary))
        proxy = q.p(1, 1) - (p.p(2, 0) + p.p(0, 2)) / 2.0
        return proxy * proxy

    phis = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
    rhs = np.array([rhs_at(phi) for phi in phis])
    detected = lhs < rhs - margin

    def gap(phi: float) -> float:
        return rhs_at(phi) - lhs - margin

    intervals: list[tuple[float, float]] = []
    if detected.all():
        intervals.append((0.0, 2.0 * np.pi))
    elif detected.any():
        flips = np.flatnonzero(detected != np.roll(detected, -1))
        crossings = {}
        for i in flips:
            lo, hi = phis[i], phis[i] + (2.0 * np.pi / n_points)
            crossings[i] = _refine_crossing(gap, lo, hi) % (2.0 * np.pi)
        runs = _detection_runs(detected)
        for start_idx, end_idx in runs:
            start = crossings[(start_idx - 1) % n_points]
            end = crossings[end_idx]
            intervals.append((start, end))

    phi_star = float(phis[int(np.argmax(rhs))])
    return PhaseScan(
        phis=phis,
        lhs=lhs,
        rhs=rhs,
        detected=detected,
        intervals=tuple(intervals),
        phi_star=phi_star,
        convention=convention,
    )


def _detection_runs(detected: np.ndarray) -> list[tuple[int, int]]:
    """Maximal circular runs of True as (first_index, last_index) pairs."""
    n = detected.size
    starts = [i for i in range(n) if detected[i] and not detected[(i - 1) % n]]
    runs = []
    for start in starts:
        end = start
        while detected[(end + 1) % n]:
            end = (end + 1) % n
        runs.append((start, end))
    return runs
