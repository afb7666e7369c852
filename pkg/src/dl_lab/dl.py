"""The layered alternating-projection operator A and its quantitative checks.

A is the product of per-layer ground-space projectors of a frustration-free
projector Hamiltonian.  It fixes the ground space and contracts the
orthogonal complement by at least (eps/f + 1)^(-1/3); this module builds A,
measures that contraction against the bound, reorders A into pyramid
triples on two-layer chains, and tracks A^l convergence to the ground
projector.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .hamiltonian import HamiltonianSpec, LayerPartition, partition_layers
from .states import GroundSpaceData, StateVector, apply_term_array, restricted_norm


def canonical_layer_order(h: HamiltonianSpec, layer: tuple[int, ...]) -> tuple[int, ...]:
    """Deterministic in-layer order: ascending leftmost support site."""
    return tuple(sorted(layer, key=lambda idx: (min(h.terms[idx].support), idx)))


def application_layers(h: HamiltonianSpec, partition: LayerPartition) -> tuple[tuple[int, ...], ...]:
    """Layers in the order they hit the state, first-applied first.

    The layer holding the first term is applied last, which on a two-layer
    chain reproduces the ordering the pyramid reordering assumes.
    """
    return tuple(canonical_layer_order(h, layer) for layer in reversed(partition.layers))


@dataclass(frozen=True)
class DLOperator:
    """Product of per-layer complement projectors P_i = 1 - Q_i."""

    h: HamiltonianSpec
    partition: LayerPartition
    layer_order: tuple[tuple[int, ...], ...]  # application order, first-applied first
    complements: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def g(self) -> int:
        return self.partition.g

    def apply_array(self, arr: np.ndarray) -> np.ndarray:
        n, d = self.h.sites.n, self.h.sites.d
        out = arr
        for layer in self.layer_order:
            for idx in layer:
                out = apply_term_array(self.complements[idx], self.h.terms[idx].support, out, n, d)
        return out

    def adjoint_apply_array(self, arr: np.ndarray) -> np.ndarray:
        n, d = self.h.sites.n, self.h.sites.d
        out = arr
        for layer in reversed(self.layer_order):
            for idx in reversed(layer):
                out = apply_term_array(self.complements[idx], self.h.terms[idx].support, out, n, d)
        return out

    def apply(self, psi: StateVector) -> StateVector:
        if psi.sites.dim != self.h.sites.dim:
            raise ValidationError("state dimension does not match the operator")
        return StateVector(self.apply_array(psi.amplitudes), psi.sites)

    def occurrence_layers(self, rounds: int) -> tuple[tuple[int, ...], ...]:
        """The g*rounds projection layers of A^rounds, first-applied first."""
        return self.layer_order * rounds


def dl_operator(h: HamiltonianSpec, partition: LayerPartition | None = None) -> DLOperator:
    if not h.all_projectors():
        raise ValidationError("the DL operator needs projector terms; run projectorize first")
    part = partition if partition is not None else partition_layers(h)
    part.validate(h)
    complements = tuple(np.eye(t.matrix.shape[0]) - t.matrix for t in h.terms)
    return DLOperator(h, part, application_layers(h, part), complements)


def apply_dl(a: DLOperator, psi: StateVector) -> StateVector:
    return a.apply(psi)


def dl_bound(epsilon: float, k: int, g: int, one_d: bool = False) -> float:
    """Contraction bound on the ground-complement norm of A.

    Two-layer nearest-neighbor chains use f = 2; a single layer is an exact
    ground projector (bound 0); otherwise f is crudely bounded by (g-1)*k^g.
    """
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    if k < 1 or g < 1:
        raise ValidationError("k and g must be at least 1")
    if g == 1:
        return 0.0
    f = 2.0 if one_d else float(g - 1) * float(k) ** g
    return (epsilon / f + 1.0) ** (-1.0 / 3.0)


def is_two_layer_chain(h: HamiltonianSpec, partition: LayerPartition) -> bool:
    """Nearest-neighbor two-local chain split into at most two layers."""
    if not h.sites.is_chain() or partition.g > 2:
        return False
    edges = {frozenset(e) for e in h.sites.edges()}
    return all(t.k == 2 and frozenset(t.support) in edges for t in h.terms)


@dataclass(frozen=True)
class DLReport:
    """Measured contraction of A on the ground complement versus the bound."""

    epsilon: float
    k: int
    g: int
    one_d: bool
    f_value: float | None
    theoretical_bound: float
    measured_shrinkage: float
    tolerance: float
    convergence_trace: tuple[tuple[int, float, float], ...] = ()

    @property
    def passed(self) -> bool:
        return self.measured_shrinkage <= self.theoretical_bound + self.tolerance


def measure_shrinkage(h: HamiltonianSpec, a: DLOperator, gs: GroundSpaceData,
                      tolerance: float = 1e-9) -> DLReport:
    eps = gs.gap
    k = h.max_k
    g = a.g
    one_d = is_two_layer_chain(h, a.partition)
    bound = dl_bound(eps, k, g, one_d)
    measured = restricted_norm(a.apply_array, gs, adjoint_apply=a.adjoint_apply_array)
    f_value = None if g == 1 else (2.0 if one_d else float(g - 1) * float(k) ** g)
    return DLReport(eps, k, g, one_d, f_value, bound, measured, tolerance)


# ---------------------------------------------------------------------------
# pyramid reordering on two-layer open chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PyramidDecomposition:
    """Reordering of A into triples plus a commuting remainder.

    Pyramid triples and the remainder are tuples of chain positions
    (1-based along the chain); applied right to left they reproduce A.
    """

    variant: str  # "primary" or "shifted"
    pyramids: tuple[tuple[int, ...], ...]
    remainder: tuple[int, ...]

    def all_positions(self) -> tuple[int, ...]:
        out: list[int] = []
        for p in self.pyramids:
            out.extend(p)
        out.extend(self.remainder)
        return tuple(out)


def _chain_positions(a: DLOperator) -> dict[int, int]:
    """Map 1-based bond position -> term index for an open two-layer chain."""
    h = a.h
    if h.sites.geometry.kind != "chain-open":
        raise ValidationError("pyramid decomposition is defined on open chains only")
    if a.g != 2:
        raise ValidationError("pyramid decomposition needs exactly two layers")
    pos: dict[int, int] = {}
    for idx, term in enumerate(h.terms):
        if term.k != 2 or max(term.support) - min(term.support) != 1:
            raise ValidationError("pyramid decomposition needs nearest-neighbor pair terms")
        p = min(term.support) + 1
        if p in pos:
            raise ValidationError(f"duplicate term on bond {p}")
        pos[p] = idx
    if sorted(pos) != list(range(1, h.sites.n)):
        raise ValidationError("pyramid decomposition needs a term on every bond")
    return pos


def pyramid_decompose(a: DLOperator) -> tuple[PyramidDecomposition, PyramidDecomposition]:
    """Both coverings of A by pyramid triples.

    Primary: triples (4i-3, 4i-1, 4i-2) with remainder 4, 8, ...; shifted:
    triples (4i-1, 4i+1, 4i) with the orphan first bond and remainder
    2, 6, ....  Positions past the chain end are dropped.
    """
    positions = _chain_positions(a)
    m = max(positions)

    def covering(variant: str, start: int) -> PyramidDecomposition:
        pyramids = []
        covered: set[int] = set()
        if variant == "shifted":
            pyramids.append((1,))
            covered.add(1)
        i = start
        while i <= m:
            triple = tuple(p for p in (i, i + 2, i + 1) if p <= m)
            pyramids.append(triple)
            covered.update(triple)
            i += 4
        remainder = tuple(p for p in range(1, m + 1) if p not in covered)
        return PyramidDecomposition(variant, tuple(pyramids), remainder)

    primary = covering("primary", 1)
    shifted = covering("shifted", 3)
    for dec in (primary, shifted):
        if sorted(dec.all_positions()) != list(range(1, m + 1)):
            raise ValidationError(f"{dec.variant} covering does not partition the bonds")
    return primary, shifted


def apply_pyramids(a: DLOperator, decomposition: PyramidDecomposition,
                   psi: StateVector) -> StateVector:
    """Evaluate Delta_1 ... Delta_M R |psi> (remainder applied first)."""
    positions = _chain_positions(a)
    n, d = a.h.sites.n, a.h.sites.d
    out = psi.amplitudes
    # applications from first to last: remainder, then pyramids right to left,
    # each triple applied right to left
    seq = list(decomposition.remainder)
    for triple in reversed(decomposition.pyramids):
        seq.extend(triple[::-1])
    for p in seq:
        idx = positions[p]
        out = apply_term_array(a.complements[idx], a.h.terms[idx].support, out, n, d)
    return StateVector(out, psi.sites)


# ---------------------------------------------------------------------------
# norm-energy trade-off and convergence
# ---------------------------------------------------------------------------

def _check_projector(mat: np.ndarray, name: str, tol: float = 1e-10) -> None:
    if np.abs(mat - mat.conj().T).max(initial=0.0) > tol:
        raise ValidationError(f"{name} is not Hermitian")
    if np.abs(mat @ mat - mat).max(initial=0.0) > tol:
        raise ValidationError(f"{name} is not a projector")


def norm_energy_check(x_proj: np.ndarray, y_proj: np.ndarray,
                      v: np.ndarray) -> tuple[float, float]:
    """Evaluate ||(1-Y)XYv||^2 against eps(1-eps) with eps = 1 - ||XYv||^2."""
    x_proj = np.asarray(x_proj)
    y_proj = np.asarray(y_proj)
    _check_projector(x_proj, "X")
    _check_projector(y_proj, "Y")
    vec = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
        raise ValidationError("v must be normalized")
    xyv = x_proj @ (y_proj @ vec)
    eps = 1.0 - float(np.linalg.norm(xyv) ** 2)
    lhs = float(np.linalg.norm(xyv - y_proj @ xyv) ** 2)
    rhs = eps * (1.0 - eps)
    return lhs, rhs


def step_inequality_margin(x: float, m: int) -> float:
    """Margin of the scalar step bound m(1 - x^(1/m)) <= (1 - x)/sqrt(x)."""
    if not (0 < x <= 1) or m < 1:
        raise ValidationError("need x in (0, 1] and m >= 1")
    return (1.0 - x) / np.sqrt(x) - m * (1.0 - x ** (1.0 / m))


@dataclass(frozen=True)
class ConvergenceTrace:
    """Residuals of A^l psi against the ground projection of psi."""

    shrink_bound: float
    perp_norm: float
    residuals: tuple[float, ...]

    def rows(self) -> tuple[tuple[int, float, float], ...]:
        return tuple(
            (l + 1, r, self.shrink_bound ** (l + 1) * self.perp_norm)
            for l, r in enumerate(self.residuals)
        )

    def monotone(self) -> bool:
        return all(b <= a + 1e-14 for a, b in zip(self.residuals, self.residuals[1:]))

    def within_bound(self, tolerance: float = 1e-9) -> bool:
        return all(r <= b + tolerance for _, r, b in self.rows())


def converge(a: DLOperator, gs: GroundSpaceData, psi: StateVector,
             l_max: int) -> ConvergenceTrace:
    """Track ||A^l psi - Pi_gs psi|| for l = 1..l_max."""
    if l_max < 1:
        raise ValidationError("l_max must be at least 1")
    if psi.sites.dim != a.h.sites.dim:
        raise ValidationError("state dimension does not match the operator")
    one_d = is_two_layer_chain(a.h, a.partition)
    bound = dl_bound(gs.gap, a.h.max_k, a.g, one_d)
    target = gs.project_array(psi.amplitudes)
    perp = float(np.linalg.norm(psi.amplitudes - target))
    current = psi.amplitudes
    residuals = []
    for _ in range(l_max):
        current = a.apply_array(current)
        residuals.append(float(np.linalg.norm(current - target)))
    return ConvergenceTrace(bound, perp, tuple(residuals))
