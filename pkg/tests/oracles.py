"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the package's contraction code:
operators are embedded by explicit index arithmetic and states are
analyzed with plain numpy calls.
"""
from __future__ import annotations

from itertools import product as iter_product

import numpy as np


def kron_embed(matrix: np.ndarray, support, n: int, d: int) -> np.ndarray:
    """Embed a local operator into the full space by index arithmetic."""
    support = tuple(support)
    k = len(support)
    dim = d ** n
    place = [d ** (n - 1 - s) for s in range(n)]
    rest = [s for s in range(n) if s not in support]
    rest_offsets = np.array(
        [sum(v * place[s] for v, s in zip(vals, rest))
         for vals in iter_product(range(d), repeat=len(rest))],
        dtype=int,
    )
    out = np.zeros((dim, dim), dtype=complex)
    local_index = {}
    for row, conf in enumerate(iter_product(range(d), repeat=k)):
        local_index[row] = sum(v * place[s] for v, s in zip(conf, support))
    for a in range(d ** k):
        for b in range(d ** k):
            if matrix[a, b] != 0:
                out[local_index[a] + rest_offsets, local_index[b] + rest_offsets] += matrix[a, b]
    return out


def dense_hamiltonian(h) -> np.ndarray:
    """Full matrix of a HamiltonianSpec via the embedding oracle."""
    n, d = h.sites.n, h.sites.d
    out = np.zeros((h.sites.dim, h.sites.dim), dtype=complex)
    for term in h.terms:
        out += kron_embed(term.matrix, term.support, n, d)
    return out


def dense_dl_matrix(a) -> np.ndarray:
    """Full matrix of the layered projection operator via the oracle."""
    h = a.h
    n, d = h.sites.n, h.sites.d
    out = np.eye(h.sites.dim, dtype=complex)
    for layer in a.layer_order:
        for idx in layer:
            comp = np.eye(d ** h.terms[idx].k) - h.terms[idx].matrix
            out = kron_embed(comp, h.terms[idx].support, n, d) @ out
    return out


def schmidt_eigenvalues_by_partial_trace(psi_amplitudes, left_count: int, n: int,
                                         d: int) -> np.ndarray:
    """Reduced-density eigenvalues across a prefix cut, descending."""
    mat = np.asarray(psi_amplitudes).reshape(d ** left_count, d ** (n - left_count))
    rho = mat @ mat.conj().T
    evals = np.linalg.eigvalsh(rho)[::-1]
    return np.clip(evals, 0.0, None)
