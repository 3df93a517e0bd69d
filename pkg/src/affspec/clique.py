"""Exact maximum clique in the orthogonality graph on a scaled frequency grid.

Vertices are ``scale * E_q``; two vertices are adjacent when their difference
is a zero of the Fourier transform. Edges are decided lazily and cached, since
each test iterates the inverse transpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exact import DomainError, Mat2, euler_phi
from .spectral import Frequency, ZeroTester, grid_frequencies
from .zeros import DigitSet3, zero_cosets_3digit


@dataclass
class CliqueResult:
    q: int
    scale: int
    size: int
    members: list  # Frequency objects, in vertex order
    edges_tested: int
    inconclusive_edges: int


class _LazyGraph:
    def __init__(self, verts: list, tester: ZeroTester, j_max: Optional[int]):
        self.verts = verts
        self.tester = tester
        self.j_max = j_max
        self.cache: dict = {}
        self.inconclusive = 0

    def adjacent(self, i: int, k: int) -> bool:
        key = (i, k) if i < k else (k, i)
        hit = self.cache.get(key)
        if hit is None:
            r = self.tester.test((self.verts[i] - self.verts[k]).vector(), self.j_max)
            if r.status == "inconclusive":
                self.inconclusive += 1
            # only certified zeros count as edges
            hit = r.status == "witness"
            self.cache[key] = hit
        return hit


def _color_sort(g: _LazyGraph, cand: list) -> tuple[list, list]:
    """Greedy colouring; returns vertices ordered by colour with their colour bounds."""
    classes: list = []
    for v in cand:
        for cls in classes:
            if not any(g.adjacent(v, w) for w in cls):
                cls.append(v)
                break
        else:
            classes.append([v])
    order, bounds = [], []
    for c, cls in enumerate(classes, start=1):
        order.extend(cls)
        bounds.extend([c] * len(cls))
    return order, bounds


def _expand(g: _LazyGraph, clique: list, cand: list, best: list) -> None:
    order, bounds = _color_sort(g, cand)
    for idx in range(len(order) - 1, -1, -1):
        if len(clique) + bounds[idx] <= len(best):
            return
        v = order[idx]
        rest = [w for w in order[:idx] if g.adjacent(v, w)]
        if rest:
            _expand(g, clique + [v], rest, best)
        elif len(clique) + 1 > len(best):
            best[:] = clique + [v]


def max_orthogonal_clique(M: Mat2, D: DigitSet3, q: int, scale: Optional[int] = None,
                          j_max: Optional[int] = None) -> CliqueResult:
    """Largest mutually orthogonal subset of ``scale * E_q``.

    ``scale`` defaults to ``det(M)^(phi(q)(q^2-1))``, which makes every grid
    difference reachable from a mask zero whenever any scaling does.
    """
    if q < 2:
        raise DomainError("q must be at least 2")
    if scale is None:
        scale = M.det() ** (euler_phi(q) * (q * q - 1))
    verts = grid_frequencies(scale, q)
    g = _LazyGraph(verts, ZeroTester(M, zero_cosets_3digit(D)), j_max)
    best: list = []
    _expand(g, [], list(range(len(verts))), best)
    best.sort()
    return CliqueResult(q, scale, len(best), [verts[i] for i in best], len(g.cache), g.inconclusive)
