"""Schmidt analysis across cuts and the entropy bounds that follow from it.

Covers Schmidt spectra and entropies, rank growth under the layered
projection operator, tail bounds on the ground-state Schmidt spectrum,
the closed-form step-distribution entropy bound, and the certificate
pipeline that ties them together for unique-ground-state chains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dl import DLOperator, dl_bound
from .errors import ValidationError
from .hamiltonian import HamiltonianSpec
from .states import GroundSpaceData, StateVector, ground_space

RANK_TOL = 1e-10
NORM_TOL = 1e-10


@dataclass(frozen=True)
class CutSpec:
    """Bipartition of the sites: contiguous prefix cut or explicit subset."""

    kind: str  # "contiguous" or "subset"
    position: int | None = None  # sites [0, position) form the left side
    subset: frozenset[int] | None = None
    window: int | None = None  # optional half-width for windowed checks

    @staticmethod
    def contiguous(position: int, window: int | None = None) -> "CutSpec":
        return CutSpec("contiguous", position=position, window=window)

    @staticmethod
    def of_subset(sites) -> "CutSpec":
        return CutSpec("subset", subset=frozenset(int(s) for s in sites))

    def sides(self, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if self.kind == "contiguous":
            if self.position is None or not (1 <= self.position <= n - 1):
                raise ValidationError(f"cut position must lie in [1, {n - 1}]")
            return tuple(range(self.position)), tuple(range(self.position, n))
        if not self.subset or len(self.subset) >= n:
            raise ValidationError("subset cut must be proper and non-empty")
        left = tuple(sorted(self.subset))
        right = tuple(i for i in range(n) if i not in self.subset)
        return left, right


def cut_matrix(psi: StateVector, cut: CutSpec) -> np.ndarray:
    """Amplitudes reshaped into a (left, right) matrix for the cut."""
    n, d = psi.sites.n, psi.sites.d
    left, right = cut.sides(n)
    tensor = psi.amplitudes.reshape((d,) * n)
    tensor = np.transpose(tensor, left + right)
    return tensor.reshape(d ** len(left), d ** len(right))


def entropy_of_weights(lams: np.ndarray) -> float:
    """Von Neumann entropy in nats with the 0*ln 0 = 0 convention."""
    lams = np.clip(np.asarray(lams, dtype=float), 0.0, None)
    lams = lams[lams > 0]
    return float(-(lams * np.log(lams)).sum()) if lams.size else 0.0


def reduced_density(psi: StateVector, sites_subset) -> np.ndarray:
    """Density matrix on a site subset by summation over the complement."""
    n, d = psi.sites.n, psi.sites.d
    subset = tuple(int(s) for s in sites_subset)
    if len(set(subset)) != len(subset) or not subset:
        raise ValidationError("need a non-empty set of distinct sites")
    rest = tuple(i for i in range(n) if i not in subset)
    tensor = psi.amplitudes.reshape((d,) * n)
    tensor = np.transpose(tensor, subset + rest).reshape(d ** len(subset), -1)
    return tensor @ tensor.conj().T


def density_entropy(rho: np.ndarray) -> float:
    return entropy_of_weights(np.linalg.eigvalsh(rho))


@dataclass(frozen=True)
class SchmidtData:
    """Schmidt coefficients, their squares, rank and entanglement entropy."""

    coefficients: np.ndarray  # descending singular values
    rank: int
    entropy: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.coefficients ** 2

    def best_rank_overlap(self, r: int) -> float:
        """Largest inner product achievable by a rank-r unit vector."""
        if r < 1:
            raise ValidationError("rank must be at least 1")
        return float(np.sqrt(self.eigenvalues[:r].sum()))

    def tail_mass(self, first_excluded: int) -> float:
        """Sum of eigenvalues with 1-based index > first_excluded."""
        return float(self.eigenvalues[first_excluded:].sum())


def schmidt(psi: StateVector, cut: CutSpec, tol: float = RANK_TOL) -> SchmidtData:
    """Schmidt spectrum of a normalized state across the cut."""
    if abs(psi.norm() - 1.0) > NORM_TOL:
        raise ValidationError(f"state norm {psi.norm():.12g} is not 1 within {NORM_TOL:g}")
    svals = np.linalg.svd(cut_matrix(psi, cut), compute_uv=False)
    rank = int((svals > tol * svals[0]).sum()) if svals.size and svals[0] > 0 else 0
    return SchmidtData(svals, rank, entropy_of_weights(svals ** 2))


def max_product_overlap(psi: StateVector, cut: CutSpec) -> tuple[float, np.ndarray, np.ndarray]:
    """Largest overlap with any product state across the cut, and a maximizer."""
    if abs(psi.norm() - 1.0) > NORM_TOL:
        raise ValidationError(f"state norm {psi.norm():.12g} is not 1 within {NORM_TOL:g}")
    u, svals, vh = np.linalg.svd(cut_matrix(psi, cut))
    return float(svals[0]), u[:, 0], vh[0, :].conj()


@dataclass(frozen=True)
class RankGrowthTrace:
    """Schmidt ranks of A^j psi0 with the per-step cap implied by the cut."""

    ranks: tuple[int, ...]
    caps: tuple[int, ...]
    crossing_terms: int

    def within_caps(self) -> bool:
        return all(r <= c for r, c in zip(self.ranks, self.caps))


def rank_growth(a: DLOperator, psi0: StateVector, cut: CutSpec, l: int) -> RankGrowthTrace:
    """Track the Schmidt rank of repeated applications of A to a product state."""
    if cut.kind != "contiguous":
        raise ValidationError("rank growth is defined for contiguous cuts")
    start = schmidt(psi0.normalized(), cut)
    if start.rank != 1:
        raise ValidationError("psi0 must be a product state across the cut")
    h = a.h
    left, _ = cut.sides(h.sites.n)
    left_set = set(left)
    crossings = sum(
        1 for t in h.terms if set(t.support) & left_set and set(t.support) - left_set
    )
    d = h.sites.d
    per_step = d ** (2 * crossings)
    ranks = []
    caps = []
    current = psi0.amplitudes
    for j in range(1, l + 1):
        current = a.apply_array(current)
        state = StateVector(current / np.linalg.norm(current), psi0.sites)
        ranks.append(schmidt(state, cut).rank)
        caps.append(int(min(per_step ** j, h.sites.dim)))
    return RankGrowthTrace(tuple(ranks), tuple(caps), crossings)


@dataclass(frozen=True)
class TailBoundTable:
    """Tail masses of the ground Schmidt spectrum against the decay bound."""

    rows: tuple[tuple[int, float, float], ...]  # (l, tail, bound)
    tolerance: float

    def ok(self) -> bool:
        return all(tail <= bound + self.tolerance for _, tail, bound in self.rows)


def tail_bound_check(gs_state: StateVector, cut: CutSpec, mu: float, delta: float,
                     l_max: int, tolerance: float = 1e-9) -> TailBoundTable:
    """Check sum_{j > d^(2l)} lambda_j <= mu^-2 (1-delta)^(2l) for l = 1..l_max."""
    if not (0 < mu <= 1) or not (0 < delta < 1):
        raise ValidationError("need mu in (0,1] and delta in (0,1)")
    data = schmidt(gs_state, cut)
    d = gs_state.sites.d
    rows = []
    for l in range(1, l_max + 1):
        keep = d ** (2 * l)
        tail = data.tail_mass(min(keep, len(data.coefficients)))
        bound = (1.0 - delta) ** (2 * l) / mu ** 2
        rows.append((l, tail, bound))
    return TailBoundTable(tuple(rows), tolerance)


# ---------------------------------------------------------------------------
# maximal entropy of step distributions with geometric tail constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepBoundResult:
    bound: float
    oracle_entropy: float
    threshold_block: int
    blocks: tuple[tuple[int, float, float], ...]  # (block index, mass, ln block size)


def step_entropy_bound(bigD: int, bigK: float, theta: float) -> StepBoundResult:
    """Closed-form entropy bound for tail-constrained step distributions.

    The oracle builds the saturating distribution explicitly: the head block
    holds indices 1..D, block l holds indices D^l+1..D^(l+1) with equal
    weights, and every tail constraint sum_{j > D^l} lambda_j <= K theta^l
    is met with equality until the total mass is exhausted.
    """
    if bigD < 2 or bigK < 1 or not (0 < theta < 1):
        raise ValidationError("need D >= 2, K >= 1 and theta in (0, 1)")
    log_d = math.log(bigD)
    bound = 3.0 * ((math.log(bigK / (1.0 - theta)) + 1.0) / math.log(1.0 / theta) + 2.0) * log_d

    blocks = []
    tail = min(1.0, bigK * theta)  # tail mass after the head block
    head_mass = 1.0 - tail
    entropy = head_mass * (log_d - math.log(head_mass)) if head_mass > 0 else 0.0
    blocks.append((0, head_mass, log_d))
    l = 1
    while tail > 1e-25 and l < 100000:
        next_tail = min(1.0, bigK * theta ** (l + 1))
        next_tail = min(next_tail, tail)
        mass = tail - next_tail
        ln_size = l * log_d + math.log(bigD - 1)  # block size D^l (D-1)
        if mass > 0:
            entropy += mass * (ln_size - math.log(mass))
        blocks.append((l, mass, ln_size))
        tail = next_tail
        l += 1

    threshold = 1
    while bigK * theta ** threshold > (1.0 - theta) * theta / math.e:
        threshold += 1
    return StepBoundResult(bound, entropy, threshold, tuple(blocks))


def sample_feasible_step_distribution(bigD: int, bigK: float, theta: float,
                                      rng: np.random.Generator,
                                      max_blocks: int = 12) -> np.ndarray:
    """A random non-increasing distribution satisfying the tail constraints.

    Random sub-saturating tails define block masses with equal weights per
    block; concentrating a block on its leading entries and sorting the
    result in non-increasing order can only lower every tail, so
    feasibility is preserved.
    """
    tails = [1.0]
    for l in range(1, max_blocks + 1):
        cap = min(bigK * theta ** l, tails[-1])
        tails.append(cap * rng.uniform(0.0, 1.0))
    tails.append(0.0)
    weights: list[float] = []
    sizes = [bigD] + [bigD ** (l + 1) - bigD ** l for l in range(1, max_blocks + 1)]
    for l, size in enumerate(sizes):
        mass = tails[l] - tails[l + 1]
        if mass <= 0:
            continue
        size = min(size, 20000)
        weights.extend([mass / size] * size)
    arr = np.sort(np.asarray(weights))[::-1]
    return arr / arr.sum()


# ---------------------------------------------------------------------------
# area-law certificate
# ---------------------------------------------------------------------------

LOG10_OVERFLOW = 300.0


def overlap_entropy_bound_value(mu: float, delta: float, d: int) -> float:
    """Entropy cap implied by a product-state overlap of at least mu."""
    if not (0 < mu <= 1) or not (0 < delta < 1) or d < 2:
        raise ValidationError("need mu in (0,1], delta in (0,1) and d >= 2")
    return (3.0 / delta) * (math.log(1.0 / (mu ** 2 * delta)) + 2.0) * math.log(d)


@dataclass(frozen=True)
class AreaLawCertificate:
    """Measured cut entropy against the overlap-based and gap-only bounds."""

    cut: CutSpec
    epsilon: float
    delta: float
    mu_measured: float
    entropy_measured: float
    overlap_entropy_bound: float
    gap_entropy_bound_log10: float
    gap_entropy_bound: float | None  # None when it overflows double precision
    ell0_log10: float
    worst_case_overlap_log10: float
    entropy_within_overlap_bound: bool
    entropy_within_gap_bound: bool


def area_law_certificate(h: HamiltonianSpec, cut: CutSpec,
                         gs: GroundSpaceData | None = None) -> AreaLawCertificate:
    """Certify the cut entropy of a unique ground state on a chain."""
    if not h.sites.is_chain():
        raise ValidationError("the certificate pipeline needs a 1D chain")
    data = gs if gs is not None else ground_space(h)
    if data.degeneracy != 1:
        raise ValidationError("the certificate pipeline needs a unique ground state")
    omega = data.ground_basis[0].normalized()
    d = h.sites.d
    eps = min(data.gap, 1.0)  # the closed-form constants assume a gap at most 1
    delta = 1.0 - dl_bound(eps, 2, 2, one_d=True)
    mu, _, _ = max_product_overlap(omega, cut)
    s_measured = schmidt(omega, cut).entropy
    overlap_bound = overlap_entropy_bound_value(mu, delta, d)

    ell0_log10 = (4.0 / delta) * math.log10(d)
    gap_bound_log10 = (math.log10(10.0 / delta) + ell0_log10 + 2.0 * math.log10(math.log(d)))
    gap_bound = 10.0 ** gap_bound_log10 if gap_bound_log10 < LOG10_OVERFLOW else None
    ell0 = 10.0 ** ell0_log10 if ell0_log10 < LOG10_OVERFLOW else None
    if ell0 is not None:
        worst_overlap_log10 = (-ell0 * math.log10(d)
                               + (ell0 / 4.0) * math.log10(1.0 - delta))
    else:
        worst_overlap_log10 = -math.inf
    s_log10 = math.log10(s_measured) if s_measured > 0 else -math.inf
    return AreaLawCertificate(
        cut=cut,
        epsilon=data.gap,
        delta=delta,
        mu_measured=mu,
        entropy_measured=s_measured,
        overlap_entropy_bound=overlap_bound,
        gap_entropy_bound_log10=gap_bound_log10,
        gap_entropy_bound=gap_bound,
        ell0_log10=ell0_log10,
        worst_case_overlap_log10=worst_overlap_log10,
        entropy_within_overlap_bound=s_measured <= overlap_bound + 1e-9,
        entropy_within_gap_bound=s_log10 <= gap_bound_log10,
    )


@dataclass(frozen=True)
class ShiftedCutTable:
    """Max product overlaps at shifted cuts against the center-cut cap."""

    rows: tuple[tuple[int, float, float], ...]  # (shift, alpha_shifted, scaled cap)
    tolerance: float

    def ok(self) -> bool:
        return all(a <= cap + self.tolerance for _, a, cap in self.rows)


def shifted_cut_check(gs_state: StateVector, cut: CutSpec, l: int,
                      tolerance: float = 1e-10) -> ShiftedCutTable:
    """Check alpha_1(k+j) <= alpha_1(k) * d^|j| for every |j| <= l."""
    if cut.kind != "contiguous":
        raise ValidationError("shifted cuts are defined for contiguous cuts")
    n, d = gs_state.sites.n, gs_state.sites.d
    k = cut.position
    if k - l < 1 or k + l > n - 1:
        raise ValidationError(f"shifts of {l} around position {k} leave [1, {n - 1}]")
    alpha_center, _, _ = max_product_overlap(gs_state, cut)
    rows = []
    for j in range(-l, l + 1):
        alpha_j, _, _ = max_product_overlap(gs_state, CutSpec.contiguous(k + j))
        rows.append((j, alpha_j, alpha_center * d ** abs(j)))
    return ShiftedCutTable(tuple(rows), tolerance)
